#include "dltfed/agents.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>

namespace dltfed {

std::size_t select_winner(const std::vector<Bid>& bids, const ConsumerPolicy& policy) {
    if (bids.empty()) throw EmptyBids("select_winner needs at least one bid");
    switch (policy.selection) {
    case SelectionRule::first_bid:
        return 0;
    case SelectionRule::custom:
        if (!policy.ranking) throw std::invalid_argument("custom selection without a ranking hook");
        return policy.ranking(bids);
    case SelectionRule::lowest_price:
        break;
    }
    auto best = std::min_element(bids.begin(), bids.end(), [](const Bid& a, const Bid& b) {
        return a.price != b.price ? a.price < b.price : a.provider < b.provider;
    });
    return static_cast<std::size_t>(best - bids.begin());
}

std::optional<std::uint64_t> PricingFunction::quote(const Requirements& req, const ServiceFootprint& footprint) const {
    const bool inside = std::any_of(footprint.begin(), footprint.end(),
                                    [&](const Interval& i) { return i.covers(req.coverage_target); });
    if (!inside && decline_outside_footprint) return std::nullopt;
    const double meters = std::max(0.0, req.coverage_target.length());
    return base_price + static_cast<std::uint64_t>(std::llround(static_cast<double>(per_meter) * meters));
}

TimeMs simulate_deployment(const DeploymentLatencyModel& model, std::mt19937_64& rng) {
    const double nominal = static_cast<double>(model.nominal());
    double factor = 1.0;
    if (model.jitter_pct > 0) {
        std::uniform_real_distribution<double> jitter(-model.jitter_pct, model.jitter_pct);
        factor += jitter(rng);
    }
    return static_cast<TimeMs>(std::llround(nominal * factor));
}

std::string bssid_for(const Address& provider) {
    char buf[18];
    const auto& b = provider.bytes;
    std::snprintf(buf, sizeof buf, "02:%02x:%02x:%02x:%02x:%02x", b[15], b[16], b[17], b[18], b[19]);
    return buf;
}

const std::vector<std::string>& consumer_phase_names() {
    static const std::vector<std::string> names{
        "announce_prepare", "announce_record", "first_bid_wait", "bid_collection",
        "winner_selection", "deployment_wait", "robot_handover", "consumer_total",
    };
    return names;
}

const std::vector<std::string>& provider_phase_names() {
    static const std::vector<std::string> names{
        "bid_evaluation", "bid_record",   "winner_wait", "deploy_prepare",
        "deployment",     "confirm_record", "provider_total",
    };
    return names;
}

namespace {

std::vector<PhaseSpan> spans(const std::vector<std::optional<TimeMs>>& marks, const std::vector<std::string>& names) {
    std::vector<PhaseSpan> out;
    if (marks.empty() || !marks.front()) return out;
    for (std::size_t i = 1; i < marks.size(); ++i) {
        if (!marks[i]) return out;
        out.push_back(PhaseSpan{names[i - 1], *marks[i - 1], *marks[i]});
    }
    out.push_back(PhaseSpan{names.back(), *marks.front(), *marks.back()});
    return out;
}

bool monotone(const std::vector<std::optional<TimeMs>>& marks) {
    std::optional<TimeMs> prev;
    for (const auto& m : marks) {
        if (!m) continue;
        if (prev && *m < *prev) return false;
        prev = m;
    }
    return true;
}

std::vector<std::optional<TimeMs>> marks_of(const ConsumerTimeline& t) {
    return {t.t_trigger,        t.t_announce_sent, t.t_announce_recorded,    t.t_first_bid_seen,
            t.t_bids_collected, t.t_winner_chosen, t.t_federation_completed, t.t_robot_connected};
}

std::vector<std::optional<TimeMs>> marks_of(const ProviderTimeline& t) {
    return {t.t_announcement_received, t.t_bid_sent,    t.t_bid_recorded,     t.t_winner_learned,
            t.t_deploy_start,          t.t_deploy_done, t.t_confirm_recorded};
}

} // namespace

std::vector<PhaseSpan> consumer_phases(const ConsumerTimeline& t) { return spans(marks_of(t), consumer_phase_names()); }
std::vector<PhaseSpan> provider_phases(const ProviderTimeline& t) { return spans(marks_of(t), provider_phase_names()); }
bool is_monotone(const ConsumerTimeline& t) { return monotone(marks_of(t)); }
bool is_monotone(const ProviderTimeline& t) { return monotone(marks_of(t)); }

std::string_view failure_name(ConsumerFailure f) {
    switch (f) {
    case ConsumerFailure::none: return "ok";
    case ConsumerFailure::no_bids: return "no_bids";
    case ConsumerFailure::insufficient_bids: return "insufficient_bids";
    case ConsumerFailure::tx_rejected: return "tx_rejected";
    }
    return "unknown";
}

// Consumer ------------------------------------------------------------------

ConsumerAgent::ConsumerAgent(Scheduler& sched, LedgerNode& node, const KeyRing& keys, const Links& links,
                             RngFactory rngs, ConsumerSetup setup)
    : sched_(sched), node_(node), keys_(keys), links_(links), rng_(rngs.stream("agent:" + setup.name)),
      setup_(std::move(setup)), address_(Address::from_name(setup_.name)) {
    node_.subscribe(
        setup_.name, [this](const BlockNotice& n) { on_notice(n); },
        [this](const Transaction&, SubmitStatus) { fail(ConsumerFailure::tx_rejected); });
}

void ConsumerAgent::submit(ContractCall call) {
    node_.submit(setup_.name, Transaction::make(address_, nonce_++, std::move(call), sched_.now()));
}

void ConsumerAgent::register_domain() { submit(RegisterDomain{setup_.name, setup_.footprint}); }

void ConsumerAgent::on_trigger() {
    timeline_.t_trigger = sched_.now();
    sched_.after(setup_.announce_prep, setup_.name, "announce", [this] {
        auto tx = Transaction::make(address_, nonce_++, AnnounceService{setup_.requirements}, sched_.now());
        announce_tx_ = tx.tx_id;
        timeline_.t_announce_sent = sched_.now();
        node_.submit(setup_.name, std::move(tx));
    });
}

void ConsumerAgent::on_notice(const BlockNotice& notice) {
    if (failure_ != ConsumerFailure::none) return;
    for (const auto& receipt : notice.receipts) {
        if (announce_tx_ && receipt.tx_id == *announce_tx_) {
            if (receipt.status != ContractError::ok) return fail(ConsumerFailure::tx_rejected);
            auction_id_ = parse_announcement(receipt.events.front()).auction_id;
            timeline_.t_announce_recorded = sched_.now();
            sched_.after(setup_.policy.bid_timeout, setup_.name, "bid_timeout", [this] {
                if (collecting_ || failure_ != ConsumerFailure::none) return;
                fail(bids_seen_ == 0 ? ConsumerFailure::no_bids : ConsumerFailure::insufficient_bids);
            });
        } else if (choose_tx_ && receipt.tx_id == *choose_tx_) {
            if (receipt.status != ContractError::ok) return fail(ConsumerFailure::tx_rejected);
            timeline_.t_winner_chosen = sched_.now();
        } else if (open_tx_ && receipt.tx_id == *open_tx_) {
            if (receipt.status != ContractError::ok) return fail(ConsumerFailure::tx_rejected);
            channel_id_ = parse_channel_opened(receipt.events.front()).channel_id;
            sched_.after(setup_.usage, setup_.name, "channel_update", [this] { send_final_update(); });
        }

        for (const auto& ev : receipt.events) {
            if (!auction_id_ || ev.auction_id != auction_id_) continue;
            if (ev.kind == EventKind::new_bid) {
                if (++bids_seen_ == 1) {
                    timeline_.t_first_bid_seen = sched_.now();
                    sched_.after(setup_.policy.bid_wait, setup_.name, "bid_wait_elapsed", [this] {
                        wait_elapsed_ = true;
                        maybe_collect();
                    });
                }
                maybe_collect();
            } else if (ev.kind == EventKind::deployment_confirmed) {
                auto confirmed = parse_deployment_confirmed(ev);
                timeline_.t_federation_completed = sched_.now();
                charging_ = ChargingRecord{notice.timestamp, bids_[*chosen_].price, std::nullopt};
                if (on_federated) on_federated(confirmed.bssid);
                auto tx = Transaction::make(address_, nonce_++, OpenChannel{*auction_id_, setup_.deposit},
                                            sched_.now());
                open_tx_ = tx.tx_id;
                node_.submit(setup_.name, std::move(tx));
            } else if (ev.kind == EventKind::channel_closed) {
                auto closed = parse_channel_closed(ev);
                if (channel_id_ == closed.channel_id && on_settled) on_settled(closed.settlement);
            }
        }
    }
}

void ConsumerAgent::maybe_collect() {
    if (collecting_ || !wait_elapsed_ || failure_ != ConsumerFailure::none) return;
    if (bids_seen_ < setup_.policy.min_bids) return;
    collect_bids();
}

void ConsumerAgent::collect_bids() {
    collecting_ = true;
    const auto count = bids_seen_;
    bids_.assign(count, Bid{});
    auto pending = std::make_shared<std::uint32_t>(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        const auto id = *auction_id_;
        const auto me = address_;
        node_.query<Result<Bid>>(
            setup_.name, "get_bid",
            [id, i, me](const FederationState& s) { return s.get_bid(id, i, me); },
            [this, i, pending](Result<Bid> bid) {
                if (bid) bids_[i] = *bid;
                if (--*pending == 0) {
                    timeline_.t_bids_collected = sched_.now();
                    sched_.after(setup_.selection_time, setup_.name, "choose", [this] { choose(); });
                }
            });
    }
}

void ConsumerAgent::choose() {
    chosen_ = select_winner(bids_, setup_.policy);
    auto tx = Transaction::make(address_, nonce_++,
                                ChooseProvider{*auction_id_, bids_[*chosen_].bid_index, setup_.deployment_info},
                                sched_.now());
    choose_tx_ = tx.tx_id;
    ++choose_sent_;
    node_.submit(setup_.name, std::move(tx));
}

void ConsumerAgent::fail(ConsumerFailure f) {
    if (failure_ != ConsumerFailure::none) return;
    failure_ = f;
    if (on_failed) on_failed(f);
}

void ConsumerAgent::send_final_update() {
    const auto accrued = accrued_charge(*charging_, sched_.now());
    const auto balance = std::min(setup_.deposit, accrued.value());
    auto update = sign_channel_update(keys_, address_, *channel_id_, 1, balance);
    const auto winner = bids_[*chosen_].provider;
    auto it = std::find_if(providers_.begin(), providers_.end(),
                           [&](const ProviderAgent* p) { return p->address() == winner; });
    if (it == providers_.end()) return;
    ProviderAgent* provider = *it;
    send(sched_, links_.inter_domain, rng_, provider->name(), "channel_update",
         [provider, update] { provider->on_channel_update(update); });
}

// Provider ------------------------------------------------------------------

ProviderAgent::ProviderAgent(Scheduler& sched, LedgerNode& node, const KeyRing& keys, const Links& links,
                             RngFactory rngs, ProviderSetup setup)
    : sched_(sched), node_(node), keys_(keys), links_(links), rng_(rngs.stream("agent:" + setup.name)),
      setup_(std::move(setup)), address_(Address::from_name(setup_.name)) {
    node_.subscribe(setup_.name, [this](const BlockNotice& n) { on_notice(n); });
}

void ProviderAgent::submit(ContractCall call) {
    node_.submit(setup_.name, Transaction::make(address_, nonce_++, std::move(call), sched_.now()));
}

void ProviderAgent::register_domain() { submit(RegisterDomain{setup_.name, setup_.footprint}); }

void ProviderAgent::on_channel_update(const ChannelUpdate& update) {
    submit(CloseChannel{update.channel_id, update});
}

void ProviderAgent::on_notice(const BlockNotice& notice) {
    for (const auto& receipt : notice.receipts) {
        if (bid_tx_ && receipt.tx_id == *bid_tx_ && receipt.status == ContractError::ok) {
            timeline_.t_bid_recorded = notice.timestamp;
        } else if (confirm_tx_ && receipt.tx_id == *confirm_tx_ && receipt.status == ContractError::ok) {
            timeline_.t_confirm_recorded = notice.timestamp;
        }

        for (const auto& ev : receipt.events) {
            if (ev.kind == EventKind::announcement_broadcast && !auction_id_) {
                auto ann = parse_announcement(ev);
                timeline_.t_announcement_received = sched_.now();
                auction_id_ = ann.auction_id;
                price_ = setup_.pricing.quote(ann.requirements, setup_.footprint);
                if (!price_) continue; // decline
                sched_.after(setup_.bid_eval, setup_.name, "bid", [this] {
                    auto tx = Transaction::make(address_, nonce_++, PlaceBid{*auction_id_, *price_}, sched_.now());
                    bid_tx_ = tx.tx_id;
                    timeline_.t_bid_sent = sched_.now();
                    node_.submit(setup_.name, std::move(tx));
                });
            } else if (ev.kind == EventKind::winner_chosen && auction_id_ && ev.auction_id == auction_id_ &&
                       bid_tx_) {
                const auto id = *auction_id_;
                const auto me = address_;
                node_.query<Result<DeploymentView>>(
                    setup_.name, "get_deployment_info",
                    [id, me](const FederationState& s) { return s.get_deployment_info(id, me); },
                    [this](Result<DeploymentView> view) {
                        if (!view) {
                            ++denied_;
                            return;
                        }
                        won_ = true;
                        timeline_.t_winner_learned = sched_.now();
                        timeline_.t_deploy_start = sched_.now();
                        ++deployments_;
                        const auto duration = simulate_deployment(setup_.deployment, rng_);
                        sched_.after(duration, setup_.name, "deployed", [this] {
                            timeline_.t_deploy_done = sched_.now();
                            auto tx = Transaction::make(address_, nonce_++,
                                                        ConfirmDeployment{*auction_id_, bssid_for(address_)},
                                                        sched_.now());
                            confirm_tx_ = tx.tx_id;
                            ++confirms_;
                            node_.submit(setup_.name, std::move(tx));
                        });
                    });
            }
        }
    }
}

} // namespace dltfed
