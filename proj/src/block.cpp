#include "dltfed/block.hpp"

#include "dltfed/crypto.hpp"

namespace dltfed {

namespace {

constexpr std::uint8_t seal_kind(const Seal& s) { return static_cast<std::uint8_t>(s.index()); }

void encode_seal_body(ByteWriter& w, const Seal& seal) {
    if (const auto* poa = std::get_if<PoASeal>(&seal)) {
        w.bytes(poa->signature);
    } else if (const auto* pow = std::get_if<PoWSeal>(&seal)) {
        w.u64(pow->nonce).digest(pow->work_digest);
    }
}

} // namespace

Transaction Transaction::make(const Address& sender, std::uint64_t nonce, ContractCall call, TimeMs submitted_at) {
    Transaction tx{Digest{}, sender, nonce, std::move(call), submitted_at};
    tx.tx_id = tx.compute_id();
    return tx;
}

Digest Transaction::compute_id() const {
    ByteWriter w;
    w.address(sender).u64(nonce);
    encode_call(w, call);
    return sha256(w.data());
}

void encode_transaction(ByteWriter& w, const Transaction& tx) {
    w.digest(tx.tx_id).address(tx.sender).u64(tx.nonce);
    encode_call(w, tx.call);
    w.u64(tx.submitted_at);
}

Transaction decode_transaction(ByteReader& r) {
    Transaction tx;
    tx.tx_id = r.digest();
    tx.sender = r.address();
    tx.nonce = r.u64();
    tx.call = decode_call(r);
    tx.submitted_at = r.u64();
    return tx;
}

Digest Block::tx_root() const {
    ByteWriter w;
    w.u32(static_cast<std::uint32_t>(txs.size()));
    for (const auto& tx : txs) {
        ByteWriter inner;
        encode_transaction(inner, tx);
        w.bytes(inner.data());
    }
    return sha256(w.data());
}

Bytes Block::unsealed_header() const {
    ByteWriter w;
    w.u64(height).digest(parent_hash).digest(tx_root()).u64(timestamp).u8(seal_kind(seal));
    return std::move(w).take();
}

Bytes Block::header() const {
    ByteWriter w;
    w.raw(unsealed_header());
    encode_seal_body(w, seal);
    return std::move(w).take();
}

Digest Block::hash() const { return hash_block(header()); }

Digest hash_block(ByteView header) { return sha256(header); }

Block make_genesis() { return Block{}; }

void encode_block(ByteWriter& w, const Block& b) {
    w.u64(b.height).digest(b.parent_hash).u64(b.timestamp).u8(seal_kind(b.seal));
    encode_seal_body(w, b.seal);
    w.u32(static_cast<std::uint32_t>(b.txs.size()));
    for (const auto& tx : b.txs) {
        ByteWriter inner;
        encode_transaction(inner, tx);
        w.bytes(inner.data());
    }
}

Block decode_block(ByteReader& r) {
    Block b;
    b.height = r.u64();
    b.parent_hash = r.digest();
    b.timestamp = r.u64();
    switch (r.u8()) {
    case 0:
        break;
    case 1:
        b.seal = PoASeal{r.bytes()};
        break;
    case 2: {
        PoWSeal s;
        s.nonce = r.u64();
        s.work_digest = r.digest();
        b.seal = s;
        break;
    }
    default:
        throw DecodeError("unknown seal kind");
    }
    auto n = r.u32();
    b.txs.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        auto raw = r.bytes();
        ByteReader inner(raw);
        b.txs.push_back(decode_transaction(inner));
        if (!inner.done()) throw DecodeError("trailing bytes in transaction");
    }
    return b;
}

} // namespace dltfed
