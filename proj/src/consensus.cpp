#include "dltfed/consensus.hpp"

#include <algorithm>
#include <stdexcept>

namespace dltfed {

void validate(const EngineConfig& cfg) {
    if (const auto* poa = std::get_if<PoAConfig>(&cfg)) {
        if (poa->block_period == 0) throw std::invalid_argument("block_period must be > 0");
    } else {
        const auto& pow = std::get<PoWConfig>(cfg);
        if (pow.difficulty_bits > 32) throw std::invalid_argument("difficulty_bits must be in [0, 32]");
        if (pow.attempt_time == 0) throw std::invalid_argument("attempt_time must be > 0");
    }
}

void Mempool::push(Transaction tx) { txs_.push_back(std::move(tx)); }

bool Mempool::contains(const Digest& tx_id) const {
    return std::any_of(txs_.begin(), txs_.end(), [&](const Transaction& tx) { return tx.tx_id == tx_id; });
}

std::uint64_t Mempool::pending_from(const Address& sender) const {
    return static_cast<std::uint64_t>(
        std::count_if(txs_.begin(), txs_.end(), [&](const Transaction& tx) { return tx.sender == sender; }));
}

std::vector<Transaction> Mempool::drain() {
    std::vector<Transaction> out(std::make_move_iterator(txs_.begin()), std::make_move_iterator(txs_.end()));
    txs_.clear();
    return out;
}

ProduceResult poa_produce(Mempool& mempool, const Block& head, const PoAConfig& cfg, const Address& caller,
                          const KeyRing& keys, TimeMs now) {
    if (caller != cfg.sealer) return {ProduceStatus::not_sealer, std::nullopt};
    const TimeMs boundary = head.timestamp + cfg.block_period;
    if (now < boundary) return {ProduceStatus::not_yet, std::nullopt};

    Block b;
    b.height = head.height + 1;
    b.parent_hash = head.hash();
    b.txs = mempool.drain();
    b.timestamp = boundary;
    b.seal = PoASeal{};
    std::get<PoASeal>(b.seal).signature = keys.sign(cfg.sealer, b.unsealed_header());
    return {ProduceStatus::produced, std::move(b)};
}

std::optional<Digest> pow_target(std::uint32_t difficulty_bits) {
    if (difficulty_bits == 0) return std::nullopt;
    if (difficulty_bits > 256) throw std::invalid_argument("difficulty_bits out of range");
    // 2^(256-d): a single set bit at position (256 - d) counted from the least significant end.
    const std::uint32_t bit = 256 - difficulty_bits;
    Digest t;
    t.bytes[31 - bit / 8] = static_cast<std::uint8_t>(1u << (bit % 8));
    return t;
}

bool meets_target(const Digest& d, std::uint32_t difficulty_bits) {
    auto target = pow_target(difficulty_bits);
    return !target || d < *target;
}

Digest pow_digest(ByteView unsealed_header, std::uint64_t nonce) {
    ByteWriter w;
    w.raw(unsealed_header).u64(nonce);
    return sha256(w.data());
}

MiningResult pow_mine(ByteView unsealed_header, const PoWConfig& cfg, std::mt19937_64& rng) {
    MiningResult r;
    r.nonce = rng();
    for (;;) {
        ++r.attempts;
        r.work_digest = pow_digest(unsealed_header, r.nonce);
        if (meets_target(r.work_digest, cfg.difficulty_bits)) return r;
        ++r.nonce;
    }
}

SealCheck verify_seal(const Block& block, const EngineConfig& cfg, const KeyRing& keys) {
    if (const auto* poa = std::get_if<PoAConfig>(&cfg)) {
        const auto* seal = std::get_if<PoASeal>(&block.seal);
        if (seal == nullptr) return {false, "expected PoA seal"};
        if (block.timestamp % poa->block_period != 0) return {false, "timestamp off period boundary"};
        if (!keys.verify(poa->sealer, block.unsealed_header(), seal->signature))
            return {false, "sealer signature mismatch"};
        return {};
    }
    const auto& pow = std::get<PoWConfig>(cfg);
    const auto* seal = std::get_if<PoWSeal>(&block.seal);
    if (seal == nullptr) return {false, "expected PoW seal"};
    if (pow_digest(block.unsealed_header(), seal->nonce) != seal->work_digest) return {false, "work digest mismatch"};
    if (!meets_target(seal->work_digest, pow.difficulty_bits)) return {false, "work digest above target"};
    return {};
}

} // namespace dltfed
