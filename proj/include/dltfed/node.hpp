#pragma once

// The ledger node as a simulated actor: receives transactions over links,
// seals blocks with the configured engine, and pushes block notices to subscribers.

#include "dltfed/ledger.hpp"
#include "dltfed/simnet.hpp"

#include <functional>
#include <string>
#include <vector>

namespace dltfed {

struct BlockNotice {
    std::uint64_t height = 0;
    TimeMs timestamp = 0;
    std::vector<Receipt> receipts;
};

class LedgerNode {
public:
    using NoticeHandler = std::function<void(const BlockNotice&)>;
    using RejectHandler = std::function<void(const Transaction&, SubmitStatus)>;

    LedgerNode(Scheduler& sched, EngineConfig engine, const KeyRing& keys, LinkModel link, RngFactory rngs);

    /// Starts block production at the current virtual time.
    void start();

    void subscribe(std::string name, NoticeHandler on_notice, RejectHandler on_reject = {});

    /// Sends a transaction from `sender` across the ledger link.
    void submit(const std::string& from, Transaction tx);

    /// Round trip over the ledger link; `query` runs against the state at arrival time
    /// and `reply` is invoked at the sender after the return trip.
    template <typename T>
    void query(const std::string& from, std::string kind, std::function<T(const FederationState&)> query,
               std::function<void(T)> reply);

    const Ledger& ledger() const { return ledger_; }
    std::uint64_t notices_delivered() const { return notices_delivered_; }
    std::uint64_t mining_attempts() const { return mining_attempts_; }

private:
    struct Subscriber {
        std::string name;
        NoticeHandler on_notice;
        RejectHandler on_reject;
    };

    void receive(const std::string& from, const Transaction& tx);
    void seal_poa();
    void start_mining();
    void publish(Block block);
    std::mt19937_64& link_rng(const std::string& peer);

    Scheduler& sched_;
    Ledger ledger_;
    LinkModel link_;
    RngFactory rngs_;
    std::map<std::string, std::mt19937_64> link_rngs_;
    std::mt19937_64 mining_rng_;
    std::vector<Subscriber> subscribers_;
    std::uint64_t mining_generation_ = 0;
    std::uint64_t notices_delivered_ = 0;
    std::uint64_t mining_attempts_ = 0;
    bool started_ = false;
};

template <typename T>
void LedgerNode::query(const std::string& from, std::string kind, std::function<T(const FederationState&)> query,
                       std::function<void(T)> reply) {
    send(sched_, link_, link_rng(from), "ledger", "query:" + kind,
         [this, from, kind, query = std::move(query), reply = std::move(reply)]() mutable {
             T answer = query(ledger_.state());
             send(sched_, link_, link_rng(from), from, "reply:" + kind,
                  [answer = std::move(answer), reply = std::move(reply)]() mutable { reply(std::move(answer)); });
         });
}

} // namespace dltfed
