#include "dltfed/node.hpp"

namespace dltfed {

LedgerNode::LedgerNode(Scheduler& sched, EngineConfig engine, const KeyRing& keys, LinkModel link, RngFactory rngs)
    : sched_(sched), ledger_(std::move(engine), keys), link_(link), rngs_(rngs), mining_rng_(rngs.stream("mining")) {}

std::mt19937_64& LedgerNode::link_rng(const std::string& peer) {
    auto it = link_rngs_.find(peer);
    if (it == link_rngs_.end()) it = link_rngs_.emplace(peer, rngs_.stream("ledger-link:" + peer)).first;
    return it->second;
}

void LedgerNode::start() {
    if (started_) return;
    started_ = true;
    if (const auto* poa = std::get_if<PoAConfig>(&ledger_.engine())) {
        sched_.schedule(ledger_.head().timestamp + poa->block_period, "ledger", "seal", [this] { seal_poa(); });
    } else {
        start_mining();
    }
}

void LedgerNode::subscribe(std::string name, NoticeHandler on_notice, RejectHandler on_reject) {
    subscribers_.push_back(Subscriber{std::move(name), std::move(on_notice), std::move(on_reject)});
}

void LedgerNode::submit(const std::string& from, Transaction tx) {
    send(sched_, link_, link_rng(from), "ledger", "tx:" + call_name(tx.call),
         [this, from, tx = std::move(tx)] { receive(from, tx); });
}

void LedgerNode::receive(const std::string& from, const Transaction& tx) {
    const auto status = ledger_.submit(tx);
    if (status != SubmitStatus::accepted) {
        for (auto& sub : subscribers_) {
            if (sub.name != from || !sub.on_reject) continue;
            send(sched_, link_, link_rng(from), from, "tx_rejected",
                 [handler = sub.on_reject, tx, status] { handler(tx, status); });
        }
        return;
    }
    // A PoW miner recommits its template whenever the mempool changes. Hashing is
    // memoryless, so restarting does not bias the expected time to the next block.
    if (std::holds_alternative<PoWConfig>(ledger_.engine()) && started_) start_mining();
}

void LedgerNode::seal_poa() {
    const auto& poa = std::get<PoAConfig>(ledger_.engine());
    auto produced = poa_produce(ledger_.mempool(), ledger_.head(), poa, poa.sealer, ledger_.keys(), sched_.now());
    if (produced.block) publish(std::move(*produced.block));
    sched_.schedule(ledger_.head().timestamp + poa.block_period, "ledger", "seal", [this] { seal_poa(); });
}

void LedgerNode::start_mining() {
    const auto& pow = std::get<PoWConfig>(ledger_.engine());
    Block tmpl;
    tmpl.height = ledger_.head().height + 1;
    tmpl.parent_hash = ledger_.head().hash();
    tmpl.txs.assign(ledger_.mempool().pending().begin(), ledger_.mempool().pending().end());
    tmpl.timestamp = sched_.now();
    tmpl.seal = PoWSeal{};

    auto mined = pow_mine(tmpl.unsealed_header(), pow, mining_rng_);
    mining_attempts_ += mined.attempts;
    std::get<PoWSeal>(tmpl.seal) = PoWSeal{mined.nonce, mined.work_digest};

    const auto generation = ++mining_generation_;
    sched_.after(mined.duration(pow), "ledger", "mined", [this, generation, block = std::move(tmpl)]() mutable {
        if (generation != mining_generation_) return; // superseded by a recommit
        ledger_.mempool().drain();
        publish(std::move(block));
        start_mining();
    });
}

void LedgerNode::publish(Block block) {
    BlockNotice notice{block.height, block.timestamp, ledger_.append(std::move(block))};
    for (auto& sub : subscribers_) {
        ++notices_delivered_;
        send(sched_, link_, link_rng(sub.name), sub.name, "block_notice",
             [handler = sub.on_notice, notice] { handler(notice); });
    }
}

}  // namespace dltfed
