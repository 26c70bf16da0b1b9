#pragma once

#include "dltfed/block.hpp"
#include "dltfed/consensus.hpp"
#include "dltfed/contract.hpp"

#include <map>
#include <set>
#include <string>
#include <vector>

namespace dltfed {

enum class SubmitStatus { accepted, duplicate_tx, stale_nonce, future_nonce };

std::string_view submit_status_name(SubmitStatus s);

struct ApplyResult {
    FederationState state;
    std::vector<Receipt> receipts;
};

/// Pure block application. Failing calls produce an error receipt and leave
/// the state as it was before that call; they never abort the block.
ApplyResult apply_block(const FederationState& state, const Block& block, const KeyRing& keys);

struct ChainCheck {
    bool ok = true;
    std::uint64_t first_bad_height = 0;
    std::string reason;

    explicit operator bool() const { return ok; }
};

/// Checks genesis shape, parent links, height continuity, timestamp order,
/// transaction ids, per-sender nonce sequence and every seal. Reports the lowest bad position.
ChainCheck verify_chain(const std::vector<Block>& chain, const EngineConfig& engine, const KeyRing& keys);

/// Single sequencer: owns the mempool, the canonical chain and the contract state.
class Ledger {
public:
    Ledger(EngineConfig engine, const KeyRing& keys);

    SubmitStatus submit(const Transaction& tx);
    /// Next nonce the chain expects from `sender`, ignoring the mempool.
    std::uint64_t next_nonce(const Address& sender) const;

    /// Validates the link and seal, applies the block, and returns its receipts.
    /// Throws std::invalid_argument on a bad block.
    std::vector<Receipt> append(Block block);

    const Block& head() const { return chain_.back(); }
    const std::vector<Block>& chain() const { return chain_; }
    const FederationState& state() const { return state_; }
    const std::vector<Receipt>& receipts() const { return receipts_; }
    /// All events in block, transaction, emission order.
    std::vector<ContractEvent> events() const;
    Mempool& mempool() { return mempool_; }
    const Mempool& mempool() const { return mempool_; }
    const EngineConfig& engine() const { return engine_; }
    const KeyRing& keys() const { return keys_; }
    std::size_t tx_count() const { return tx_ids_.size(); }

private:
    EngineConfig engine_;
    const KeyRing& keys_;
    std::vector<Block> chain_;
    FederationState state_;
    Mempool mempool_;
    std::vector<Receipt> receipts_;
    std::map<Address, std::uint64_t> nonces_;
    std::set<Digest> tx_ids_;
};

/// Length-prefixed binary chain dump; see docs/serialization.md.
Bytes export_chain(const std::vector<Block>& chain);
std::vector<Block> import_chain(ByteView data);
/// Indented, human-readable rendering for debugging.
std::string render_chain(const std::vector<Block>& chain);

} // namespace dltfed
