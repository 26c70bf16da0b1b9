#pragma once

// Consumer and provider orchestrators driving the federation protocol over the
// simulated ledger, plus the policy and latency models they are configured with.

#include "dltfed/contract.hpp"
#include "dltfed/node.hpp"
#include "dltfed/robot.hpp"
#include "dltfed/simnet.hpp"

#include <functional>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace dltfed {

enum class SelectionRule { lowest_price, first_bid, custom };

struct ConsumerPolicy {
    SelectionRule selection = SelectionRule::lowest_price;
    /// Used when selection == custom: returns the chosen index into the bid list.
    std::function<std::size_t(const std::vector<Bid>&)> ranking;
    std::uint32_t min_bids = 1;
    TimeMs bid_wait = 1500;     // collection window after the first NewBid
    TimeMs bid_timeout = 30000; // give up if bidding has not concluded this long after the announcement is recorded
};

struct EmptyBids : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// lowest_price: argmin price, ties to the bytewise-lowest provider address.
/// first_bid: index 0. Throws EmptyBids on an empty list.
std::size_t select_winner(const std::vector<Bid>& bids, const ConsumerPolicy& policy);

struct PricingFunction {
    std::uint64_t base_price = 0; // units per hour
    std::uint64_t per_meter = 0;  // units per hour per meter of requested coverage
    bool decline_outside_footprint = false;

    /// Price to bid, or nullopt to decline.
    std::optional<std::uint64_t> quote(const Requirements& req, const ServiceFootprint& footprint) const;
};

struct DeploymentLatencyModel {
    TimeMs link_setup = 0;
    TimeMs onboard = 0;
    TimeMs instantiate = 0;
    double jitter_pct = 0; // in [0, 0.5]

    TimeMs nominal() const { return link_setup + onboard + instantiate; }
};

/// (link_setup + onboard + instantiate) scaled by 1 + U[-jitter_pct, +jitter_pct], rounded to the ms.
TimeMs simulate_deployment(const DeploymentLatencyModel& model, std::mt19937_64& rng);

/// Locally administered MAC (first octet 0x02) derived from the provider address.
std::string bssid_for(const Address& provider);

struct ConsumerTimeline {
    std::optional<TimeMs> t_trigger, t_announce_sent, t_announce_recorded, t_first_bid_seen, t_bids_collected,
        t_winner_chosen, t_federation_completed, t_robot_connected;
};

/// The two *_recorded milestones carry the timestamp of the block that recorded the transaction.
struct ProviderTimeline {
    std::optional<TimeMs> t_announcement_received, t_bid_sent, t_bid_recorded, t_winner_learned, t_deploy_start,
        t_deploy_done, t_confirm_recorded;
};

struct PhaseSpan {
    std::string name;
    TimeMs start = 0;
    TimeMs end = 0;

    TimeMs duration() const { return end - start; }
};

inline constexpr std::size_t consumer_phase_count = 8;
inline constexpr std::size_t provider_phase_count = 7;

/// Names in CSV order; the last entry of each view is the view total.
const std::vector<std::string>& consumer_phase_names();
const std::vector<std::string>& provider_phase_names();

/// Consecutive intervals between recorded milestones followed by the total.
/// Stops at the first missing milestone (partial runs yield fewer spans and no total).
std::vector<PhaseSpan> consumer_phases(const ConsumerTimeline& t);
std::vector<PhaseSpan> provider_phases(const ProviderTimeline& t);

bool is_monotone(const ConsumerTimeline& t);
bool is_monotone(const ProviderTimeline& t);

struct Links {
    LinkModel ledger;
    LinkModel control;      // orchestrator -> Brain -> robot
    LinkModel inter_domain; // consumer <-> provider, off-chain
};

/// What the consumer orchestrator needs besides its policy.
struct ConsumerSetup {
    std::string name;
    ServiceFootprint footprint;
    Requirements requirements;
    DeploymentInfo deployment_info;
    ConsumerPolicy policy;
    TimeMs announce_prep = 0; // trigger -> announcement transaction sent
    TimeMs selection_time = 0; // bids collected -> choose_provider sent
    std::uint64_t deposit = 0;
    TimeMs usage = 0;          // service use before the final channel update
};

struct ProviderSetup {
    std::string name;
    ServiceFootprint footprint;
    PricingFunction pricing;
    TimeMs bid_eval = 0;
    DeploymentLatencyModel deployment;
};

enum class ConsumerFailure { none, no_bids, insufficient_bids, tx_rejected };

std::string_view failure_name(ConsumerFailure f);

class ProviderAgent;

class ConsumerAgent {
public:
    ConsumerAgent(Scheduler& sched, LedgerNode& node, const KeyRing& keys, const Links& links, RngFactory rngs,
                  ConsumerSetup setup);

    void register_domain();
    /// Federation trigger from the Brain.
    void on_trigger();

    /// Called with the new BSSID once federation completes; the scenario routes it to the Brain.
    std::function<void(const std::string& bssid)> on_federated;
    /// Called once the channel settles.
    std::function<void(const Settlement&)> on_settled;
    /// Called when the run fails on the consumer side.
    std::function<void(ConsumerFailure)> on_failed;

    void connect_provider(ProviderAgent* provider) { providers_.push_back(provider); }
    void mark_robot_connected(TimeMs t) { timeline_.t_robot_connected = t; }

    const Address& address() const { return address_; }
    const ConsumerTimeline& timeline() const { return timeline_; }
    ConsumerFailure failure() const { return failure_; }
    std::optional<std::uint64_t> auction_id() const { return auction_id_; }
    const std::vector<Bid>& bids_read() const { return bids_; }
    std::optional<std::size_t> chosen_index() const { return chosen_; }
    std::size_t choose_txs_sent() const { return choose_sent_; }

private:
    void on_notice(const BlockNotice& notice);
    void submit(ContractCall call);
    void maybe_collect();
    void collect_bids();
    void choose();
    void fail(ConsumerFailure f);
    void send_final_update();

    Scheduler& sched_;
    LedgerNode& node_;
    const KeyRing& keys_;
    Links links_;
    std::mt19937_64 rng_;
    ConsumerSetup setup_;
    Address address_;
    std::uint64_t nonce_ = 0;
    ConsumerTimeline timeline_;
    ConsumerFailure failure_ = ConsumerFailure::none;
    std::optional<Digest> announce_tx_, choose_tx_, open_tx_;
    std::optional<std::uint64_t> auction_id_;
    std::uint32_t bids_seen_ = 0;
    bool wait_elapsed_ = false;
    bool collecting_ = false;
    std::vector<Bid> bids_;
    std::optional<std::size_t> chosen_;
    std::size_t choose_sent_ = 0;
    std::optional<ChargingRecord> charging_;
    std::optional<std::uint64_t> channel_id_;
    std::vector<ProviderAgent*> providers_;
};

class ProviderAgent {
public:
    ProviderAgent(Scheduler& sched, LedgerNode& node, const KeyRing& keys, const Links& links, RngFactory rngs,
                  ProviderSetup setup);

    void register_domain();
    /// Off-chain channel update from the consumer.
    void on_channel_update(const ChannelUpdate& update);

    const Address& address() const { return address_; }
    const std::string& name() const { return setup_.name; }
    const ProviderTimeline& timeline() const { return timeline_; }
    bool won() const { return won_; }
    bool bid_placed() const { return bid_tx_.has_value(); }
    std::size_t denied_queries() const { return denied_; }
    std::size_t deployments_run() const { return deployments_; }
    std::size_t confirms_sent() const { return confirms_; }
    std::optional<std::uint64_t> quoted_price() const { return price_; }

private:
    void on_notice(const BlockNotice& notice);
    void submit(ContractCall call);

    Scheduler& sched_;
    LedgerNode& node_;
    const KeyRing& keys_;
    Links links_;
    std::mt19937_64 rng_;
    ProviderSetup setup_;
    Address address_;
    std::uint64_t nonce_ = 0;
    ProviderTimeline timeline_;
    std::optional<std::uint64_t> auction_id_;
    std::optional<std::uint64_t> price_;
    std::optional<Digest> bid_tx_, confirm_tx_;
    bool won_ = false;
    std::size_t denied_ = 0;
    std::size_t deployments_ = 0;
    std::size_t confirms_ = 0;
};

} // namespace dltfed
