#include "dltfed/ledger.hpp"

#include <sstream>
#include <stdexcept>

namespace dltfed {

std::string_view submit_status_name(SubmitStatus s) {
    switch (s) {
    case SubmitStatus::accepted: return "accepted";
    case SubmitStatus::duplicate_tx: return "duplicate_tx";
    case SubmitStatus::stale_nonce: return "stale_nonce";
    case SubmitStatus::future_nonce: return "future_nonce";
    }
    return "unknown";
}

ApplyResult apply_block(const FederationState& state, const Block& block, const KeyRing& keys) {
    ApplyResult out{state, {}};
    out.receipts.reserve(block.txs.size());
    for (const auto& tx : block.txs) {
        CallContext ctx{tx.sender, block.height, block.timestamp};
        auto outcome = out.state.execute(tx.call, ctx, keys);
        out.receipts.push_back(Receipt{tx.tx_id, block.height, outcome.status, std::move(outcome.events)});
    }
    return out;
}

ChainCheck verify_chain(const std::vector<Block>& chain, const EngineConfig& engine, const KeyRing& keys) {
    auto bad = [](std::uint64_t at, std::string why) { return ChainCheck{false, at, std::move(why)}; };
    if (chain.empty()) return bad(0, "empty chain");

    const auto& genesis = chain.front();
    if (genesis.height != 0) return bad(0, "genesis height is not 0");
    if (!genesis.parent_hash.is_zero()) return bad(0, "genesis parent hash is not zero");
    if (!genesis.txs.empty()) return bad(0, "genesis carries transactions");
    if (genesis.timestamp != 0) return bad(0, "genesis timestamp is not 0");
    if (!std::holds_alternative<std::monostate>(genesis.seal)) return bad(0, "genesis is sealed");

    std::map<Address, std::uint64_t> nonces;
    std::set<Digest> seen;
    for (std::size_t i = 1; i < chain.size(); ++i) {
        const auto& prev = chain[i - 1];
        const auto& b = chain[i];
        if (b.height != i) return bad(i, "height discontinuity");
        if (b.parent_hash != prev.hash()) return bad(i, "parent hash mismatch");
        if (b.timestamp < prev.timestamp) return bad(i, "timestamp decreases");
        if (auto seal = verify_seal(b, engine, keys); !seal) return bad(i, "bad seal: " + seal.reason);
        for (const auto& tx : b.txs) {
            if (tx.compute_id() != tx.tx_id) return bad(i, "transaction id mismatch");
            if (!seen.insert(tx.tx_id).second) return bad(i, "duplicate transaction");
            auto& expected = nonces[tx.sender];
            if (tx.nonce != expected) return bad(i, "nonce out of sequence");
            ++expected;
        }
    }
    return {};
}

Ledger::Ledger(EngineConfig engine, const KeyRing& keys) : engine_(std::move(engine)), keys_(keys) {
    validate(engine_);
    chain_.push_back(make_genesis());
}

std::uint64_t Ledger::next_nonce(const Address& sender) const {
    auto it = nonces_.find(sender);
    return it == nonces_.end() ? 0 : it->second;
}

SubmitStatus Ledger::submit(const Transaction& tx) {
    if (tx_ids_.contains(tx.tx_id) || mempool_.contains(tx.tx_id)) return SubmitStatus::duplicate_tx;
    const auto expected = next_nonce(tx.sender) + mempool_.pending_from(tx.sender);
    if (tx.nonce < expected) return SubmitStatus::stale_nonce;
    if (tx.nonce > expected) return SubmitStatus::future_nonce;
    mempool_.push(tx);
    return SubmitStatus::accepted;
}

std::vector<Receipt> Ledger::append(Block block) {
    const auto& h = head();
    if (block.height != h.height + 1) throw std::invalid_argument("block height does not extend head");
    if (block.parent_hash != h.hash()) throw std::invalid_argument("bad_parent_hash");
    if (block.timestamp < h.timestamp) throw std::invalid_argument("block timestamp precedes head");
    if (auto seal = verify_seal(block, engine_, keys_); !seal) throw std::invalid_argument("bad_seal: " + seal.reason);

    auto applied = apply_block(state_, block, keys_);
    state_ = std::move(applied.state);
    for (const auto& tx : block.txs) {
        tx_ids_.insert(tx.tx_id);
        nonces_[tx.sender] = tx.nonce + 1;
    }
    receipts_.insert(receipts_.end(), applied.receipts.begin(), applied.receipts.end());
    chain_.push_back(std::move(block));
    return std::move(applied.receipts);
}

std::vector<ContractEvent> Ledger::events() const {
    std::vector<ContractEvent> out;
    for (const auto& r : receipts_) out.insert(out.end(), r.events.begin(), r.events.end());
    return out;
}

Bytes export_chain(const std::vector<Block>& chain) {
    ByteWriter w;
    w.u32(static_cast<std::uint32_t>(chain.size()));
    for (const auto& b : chain) {
        ByteWriter inner;
        encode_block(inner, b);
        w.bytes(inner.data());
    }
    return std::move(w).take();
}

std::vector<Block> import_chain(ByteView data) {
    ByteReader r(data);
    std::vector<Block> chain(r.u32());
    for (auto& b : chain) {
        auto raw = r.bytes();
        ByteReader inner(raw);
        b = decode_block(inner);
        if (!inner.done()) throw DecodeError("trailing bytes in block");
    }
    if (!r.done()) throw DecodeError("trailing bytes after chain");
    return chain;
}

std::string render_chain(const std::vector<Block>& chain) {
    std::ostringstream os;
    os << "[\n";
    for (const auto& b : chain) {
        os << "  { height: " << b.height << ", hash: " << b.hash().hex() << ",\n"
           << "    parent: " << b.parent_hash.hex() << ", timestamp_ms: " << b.timestamp << ",\n";
        if (const auto* poa = std::get_if<PoASeal>(&b.seal)) {
            os << "    seal: { poa: " << to_hex(poa->signature) << " },\n";
        } else if (const auto* pow = std::get_if<PoWSeal>(&b.seal)) {
            os << "    seal: { pow_nonce: " << pow->nonce << ", work: " << pow->work_digest.hex() << " },\n";
        } else {
            os << "    seal: none,\n";
        }
        os << "    txs: [";
        for (const auto& tx : b.txs) {
            os << "\n      { id: " << tx.tx_id.hex() << ", sender: " << tx.sender.hex() << ", nonce: " << tx.nonce
               << ", call: " << call_name(tx.call) << ", submitted_at_ms: " << tx.submitted_at << " }";
        }
        os << (b.txs.empty() ? "] }\n" : "\n    ] }\n");
    }
    os << "]\n";
    return os.str();
}

} // namespace dltfed
