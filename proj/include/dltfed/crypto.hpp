#pragma once

#include "dltfed/bytes.hpp"

#include <map>
#include <string_view>

namespace dltfed {

Digest sha256(ByteView data);
Digest sha256(std::string_view text);
Digest hmac_sha256(ByteView key, ByteView message);

/// Per-participant secrets held by the simulation. Stands in for asymmetric
/// keys: whoever holds the ring can both sign and verify.
class KeyRing {
public:
    /// Registers `who` with a secret derived from (label, seed).
    void add(const Address& who, std::string_view label, std::uint64_t seed);
    void add(const Address& who, Bytes secret);

    bool contains(const Address& who) const { return secrets_.contains(who); }
    Bytes sign(const Address& who, ByteView message) const;
    bool verify(const Address& who, ByteView message, ByteView signature) const;

private:
    std::map<Address, Bytes> secrets_;
};

} // namespace dltfed
