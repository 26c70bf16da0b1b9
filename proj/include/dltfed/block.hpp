#pragma once

#include "dltfed/bytes.hpp"
#include "dltfed/contract.hpp"

#include <variant>
#include <vector>

namespace dltfed {

struct Transaction {
    Digest tx_id;
    Address sender;
    std::uint64_t nonce = 0;
    ContractCall call;
    TimeMs submitted_at = 0;

    /// Builds a transaction with tx_id = sha256(sender, nonce, call).
    static Transaction make(const Address& sender, std::uint64_t nonce, ContractCall call, TimeMs submitted_at);
    Digest compute_id() const;

    bool operator==(const Transaction&) const = default;
};

void encode_transaction(ByteWriter& w, const Transaction& tx);
Transaction decode_transaction(ByteReader& r);

struct PoASeal {
    Bytes signature; // HMAC-SHA-256 of the unsealed header under the sealer's secret
    bool operator==(const PoASeal&) const = default;
};

struct PoWSeal {
    std::uint64_t nonce = 0;
    Digest work_digest; // sha256(unsealed header || nonce)
    bool operator==(const PoWSeal&) const = default;
};

/// Genesis carries the empty alternative.
using Seal = std::variant<std::monostate, PoASeal, PoWSeal>;

struct Block {
    std::uint64_t height = 0;
    Digest parent_hash;
    std::vector<Transaction> txs;
    TimeMs timestamp = 0;
    Seal seal;

    Digest tx_root() const;
    /// Canonical header without seal body; the input to sealing and mining.
    Bytes unsealed_header() const;
    /// Canonical header including seal body; the input to hash_block.
    Bytes header() const;
    Digest hash() const;

    bool operator==(const Block&) const = default;
};

Digest hash_block(ByteView header);
Block make_genesis();

void encode_block(ByteWriter& w, const Block& b);
Block decode_block(ByteReader& r);

struct Receipt {
    Digest tx_id;
    std::uint64_t block_height = 0;
    ContractError status = ContractError::ok;
    std::vector<ContractEvent> events;

    bool operator==(const Receipt&) const = default;
};

} // namespace dltfed
