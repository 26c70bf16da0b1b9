#pragma once

// Block production engines. Both are passive functions driven by the caller's
// virtual clock; neither keeps state between calls.

#include "dltfed/block.hpp"
#include "dltfed/crypto.hpp"

#include <deque>
#include <optional>
#include <random>
#include <string>
#include <variant>

namespace dltfed {

struct PoAConfig {
    Address sealer;
    TimeMs block_period = 1000;
};

struct PoWConfig {
    std::uint32_t difficulty_bits = 0; // 0..32
    TimeMs attempt_time = 1;           // virtual ms per hash attempt
};

using EngineConfig = std::variant<PoAConfig, PoWConfig>;

/// Throws std::invalid_argument when the engine parameters are out of range.
void validate(const EngineConfig& cfg);

/// FIFO of pending transactions.
class Mempool {
public:
    void push(Transaction tx);
    bool contains(const Digest& tx_id) const;
    std::uint64_t pending_from(const Address& sender) const;
    std::vector<Transaction> drain();
    std::size_t size() const { return txs_.size(); }
    bool empty() const { return txs_.empty(); }
    const std::deque<Transaction>& pending() const { return txs_; }

private:
    std::deque<Transaction> txs_;
};

enum class ProduceStatus { produced, not_yet, not_sealer };

struct ProduceResult {
    ProduceStatus status = ProduceStatus::not_yet;
    std::optional<Block> block;
};

/// Seals the next block once `now` reaches head.timestamp + block_period.
/// The block is stamped with that boundary and takes the whole mempool in order.
ProduceResult poa_produce(Mempool& mempool, const Block& head, const PoAConfig& cfg, const Address& caller,
                          const KeyRing& keys, TimeMs now);

/// 2^(256-d) as a big-endian digest; nullopt for d == 0 (the target exceeds every digest).
std::optional<Digest> pow_target(std::uint32_t difficulty_bits);
bool meets_target(const Digest& d, std::uint32_t difficulty_bits);
Digest pow_digest(ByteView unsealed_header, std::uint64_t nonce);

struct MiningResult {
    std::uint64_t nonce = 0;
    Digest work_digest;
    std::uint64_t attempts = 0;

    TimeMs duration(const PoWConfig& cfg) const { return attempts * cfg.attempt_time; }
};

/// Sequential nonce search starting from a 64-bit value drawn from `rng`.
MiningResult pow_mine(ByteView unsealed_header, const PoWConfig& cfg, std::mt19937_64& rng);

struct SealCheck {
    bool ok = true;
    std::string reason;

    explicit operator bool() const { return ok; }
};

SealCheck verify_seal(const Block& block, const EngineConfig& cfg, const KeyRing& keys);

} // namespace dltfed
