#include "dltfed/crypto.hpp"

#include <openssl/crypto.h>
#include <openssl/evp.h>
#include <openssl/hmac.h>
#include <openssl/sha.h>

#include <stdexcept>

namespace dltfed {

Digest sha256(ByteView data) {
    Digest d;
    SHA256(data.data(), data.size(), d.bytes.data());
    return d;
}

Digest sha256(std::string_view text) {
    return sha256(ByteView(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

Digest hmac_sha256(ByteView key, ByteView message) {
    Digest d;
    unsigned int len = 0;
    auto* out = HMAC(EVP_sha256(), key.data(), static_cast<int>(key.size()), message.data(), message.size(),
                     d.bytes.data(), &len);
    if (out == nullptr || len != d.bytes.size()) throw std::runtime_error("HMAC-SHA-256 failed");
    return d;
}

void KeyRing::add(const Address& who, std::string_view label, std::uint64_t seed) {
    ByteWriter w;
    w.str("dltfed-secret").str(label).u64(seed);
    auto d = sha256(w.data());
    add(who, Bytes(d.bytes.begin(), d.bytes.end()));
}

void KeyRing::add(const Address& who, Bytes secret) { secrets_[who] = std::move(secret); }

Bytes KeyRing::sign(const Address& who, ByteView message) const {
    auto it = secrets_.find(who);
    if (it == secrets_.end()) throw std::out_of_range("no secret registered for " + who.hex());
    auto d = hmac_sha256(it->second, message);
    return Bytes(d.bytes.begin(), d.bytes.end());
}

bool KeyRing::verify(const Address& who, ByteView message, ByteView signature) const {
    auto it = secrets_.find(who);
    if (it == secrets_.end() || signature.size() != 32) return false;
    auto d = hmac_sha256(it->second, message);
    return CRYPTO_memcmp(d.bytes.data(), signature.data(), d.bytes.size()) == 0;
}

} // namespace dltfed
