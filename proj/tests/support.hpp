#pragma once

#include "dltfed/ledger.hpp"

#include <random>
#include <string>
#include <vector>

namespace dltfed::test {

inline Address addr(const std::string& name) { return Address::from_name(name); }

/// Builds blocks for a PoA chain without any simulation around it.
struct PoAChainBuilder {
    KeyRing keys;
    PoAConfig cfg{addr("sealer"), 1000};
    Ledger ledger{cfg, keys};
    std::map<Address, std::uint64_t> nonces;

    PoAChainBuilder() { keys.add(cfg.sealer, "sealer", 7); }

    Transaction tx(const std::string& who, ContractCall call) {
        auto a = addr(who);
        if (!keys.contains(a)) keys.add(a, who, 7);
        return Transaction::make(a, nonces[a]++, std::move(call), ledger.head().timestamp);
    }

    void submit(const std::string& who, ContractCall call) {
        auto status = ledger.submit(tx(who, std::move(call)));
        if (status != SubmitStatus::accepted) throw std::runtime_error("submit rejected");
    }

    std::vector<Receipt> seal() {
        auto produced =
            poa_produce(ledger.mempool(), ledger.head(), cfg, cfg.sealer, keys, ledger.head().timestamp + cfg.block_period);
        return ledger.append(std::move(*produced.block));
    }
};

/// Builds a PoW chain by mining each block in place.
struct PoWChainBuilder {
    KeyRing keys;
    PoWConfig cfg{8, 1};
    Ledger ledger{cfg, keys};
    std::map<Address, std::uint64_t> nonces;
    std::mt19937_64 rng{1};

    void submit(const std::string& who, ContractCall call) {
        auto a = addr(who);
        if (ledger.submit(Transaction::make(a, nonces[a]++, std::move(call), ledger.head().timestamp)) !=
            SubmitStatus::accepted)
            throw std::runtime_error("submit rejected");
    }

    void seal() {
        Block b;
        b.height = ledger.head().height + 1;
        b.parent_hash = ledger.head().hash();
        b.txs = ledger.mempool().drain();
        b.timestamp = ledger.head().timestamp + 1000;
        b.seal = PoWSeal{};
        auto mined = pow_mine(b.unsealed_header(), cfg, rng);
        b.seal = PoWSeal{mined.nonce, mined.work_digest};
        ledger.append(std::move(b));
    }
};

struct Tampered {
    std::uint64_t height = 0;
    std::string what;
    std::vector<Block> chain;
};

/// Every single-field mutation of every block and every transaction in `chain`.
inline std::vector<Tampered> tamper_variants(const std::vector<Block>& chain) {
    std::vector<Tampered> out;
    for (std::size_t h = 0; h < chain.size(); ++h) {
        auto mutate = [&](std::string what, auto&& fn) {
            auto copy = chain;
            fn(copy[h]);
            out.push_back({h, std::move(what), std::move(copy)});
        };
        mutate("height", [](Block& b) { b.height += 1; });
        mutate("parent_hash", [](Block& b) { b.parent_hash.bytes[31] ^= 0x01; });
        mutate("timestamp+1", [](Block& b) { b.timestamp += 1; });
        mutate("timestamp+period", [](Block& b) { b.timestamp += 1000; });
        if (std::holds_alternative<std::monostate>(chain[h].seal)) {
            mutate("seal", [](Block& b) { b.seal = PoASeal{Bytes(32, 0)}; });
        } else {
            mutate("seal_removed", [](Block& b) { b.seal = std::monostate{}; });
        }
        if (std::holds_alternative<PoASeal>(chain[h].seal))
            mutate("signature", [](Block& b) { std::get<PoASeal>(b.seal).signature[0] ^= 0x80; });
        if (std::holds_alternative<PoWSeal>(chain[h].seal)) {
            mutate("pow_nonce", [](Block& b) { std::get<PoWSeal>(b.seal).nonce += 1; });
            mutate("work_digest", [](Block& b) { std::get<PoWSeal>(b.seal).work_digest.bytes[5] ^= 0x01; });
        }
        mutate("extra_tx", [](Block& b) {
            b.txs.push_back(Transaction::make(addr("intruder"), 0, PlaceBid{0, 1}, b.timestamp));
        });
        for (std::size_t i = 0; i < chain[h].txs.size(); ++i) {
            auto tx = [i](Block& b) -> Transaction& { return b.txs[i]; };
            const auto idx = "tx" + std::to_string(i) + ".";
            mutate(idx + "tx_id", [&](Block& b) { tx(b).tx_id.bytes[0] ^= 0x01; });
            mutate(idx + "sender", [&](Block& b) { tx(b).sender.bytes[19] ^= 0x01; });
            mutate(idx + "nonce", [&](Block& b) { tx(b).nonce += 1; });
            mutate(idx + "call", [&](Block& b) { tx(b).call = PlaceBid{999, 999}; });
            mutate(idx + "submitted_at", [&](Block& b) { tx(b).submitted_at += 1; });
            mutate(idx + "removed", [&](Block& b) { b.txs.erase(b.txs.begin() + static_cast<std::ptrdiff_t>(i)); });
            mutate(idx + "duplicated", [&](Block& b) { b.txs.push_back(b.txs[i]); });
        }
    }
    return out;
}

inline Requirements sample_requirements(TrustMode mode = TrustMode::untrusty) {
    return Requirements{"vap2-hostapd", Interval{25, 60}, 20, mode};
}

inline DeploymentInfo sample_deployment() {
    return DeploymentInfo{"vap2-hostapd", "10.8.0.1:4789",
                          TrustedDetails{"fog05://db", "fog05://storage", {"10.8.0.2:1883", "10.8.0.3:8080"}}};
}

} // namespace dltfed::test
