#include "dltfed/scenario.hpp"

#include <cmath>
#include <memory>

namespace dltfed {

namespace {

const Address sealer_address = Address::from_name("poa-sealer");

} // namespace

EngineConfig engine_config(const ScenarioConfig& cfg) {
    if (cfg.engine == EngineKind::poa) return PoAConfig{sealer_address, cfg.block_period};
    return PoWConfig{cfg.difficulty_bits, cfg.attempt_time};
}

CoverageMap coverage_map(const ScenarioConfig& cfg) {
    CoverageMap map;
    map.serving_bssid = cfg.vap1_bssid;
    map.trigger_margin = cfg.trigger_margin;
    map.cells[cfg.vap1_bssid] = cfg.consumer.footprint.front();
    for (const auto& p : cfg.providers) map.cells[bssid_for(Address::from_name(p.name))] = p.footprint.front();
    return map;
}

RunResult run_once(const ScenarioConfig& cfg, std::uint32_t run_index, bool keep_trace) {
    RunResult result;
    result.run = run_index;
    result.seed = cfg.seed + run_index;
    result.deposit = cfg.consumer.deposit;

    const RngFactory rngs(result.seed);
    KeyRing keys;
    keys.add(sealer_address, "poa-sealer", result.seed);
    keys.add(Address::from_name(cfg.consumer.name), cfg.consumer.name, result.seed);
    for (const auto& p : cfg.providers) keys.add(Address::from_name(p.name), p.name, result.seed);

    const auto engine = engine_config(cfg);
    const auto coverage = coverage_map(cfg);

    Scheduler sched;
    sched.set_realtime_factor(cfg.realtime_factor);
    LedgerNode node(sched, engine, keys, cfg.links.ledger, rngs);
    ConsumerAgent consumer(sched, node, keys, cfg.links, rngs, cfg.consumer);
    std::vector<std::unique_ptr<ProviderAgent>> providers;
    for (auto setup : cfg.providers) {
        setup.deployment = cfg.deployment;
        providers.push_back(std::make_unique<ProviderAgent>(sched, node, keys, cfg.links, rngs, std::move(setup)));
        consumer.connect_provider(providers.back().get());
    }

    RobotModel robot = cfg.robot;
    robot.clock = 0;
    robot.connected_ap = cfg.vap1_bssid;
    auto control_rng = rngs.stream("control-link");

    // Advances the robot to `now`, accounting closed-loop messages and reacting to trigger/association.
    auto advance_robot = [&] {
        if (sched.now() <= robot.clock) return;
        auto step = robot_step(robot, coverage, sched.now() - robot.clock);
        robot = std::move(step.robot);
        result.messages += step.messages.size();
        result.lost += step.lost();
        if (step.trigger_at) consumer.on_trigger();
        if (step.associated_at) consumer.mark_robot_connected(*step.associated_at);
    };

    std::function<void()> tick = [&] {
        advance_robot();
        sched.after(robot.control_period, "robot", "control_tick", tick);
    };

    consumer.on_federated = [&](const std::string& bssid) {
        send(sched, cfg.links.control, control_rng, "brain", "bssid", [&, bssid] {
            send(sched, cfg.links.control, control_rng, "robot", "switch_ap", [&, bssid] {
                advance_robot();
                robot = begin_handover(robot, bssid, coverage);
            });
        });
    };
    consumer.on_settled = [&](const Settlement& s) {
        result.settlement = s;
        sched.stop();
    };
    consumer.on_failed = [&](ConsumerFailure) { sched.stop(); };

    sched.schedule(0, "scenario", "start", [&] {
        node.start();
        consumer.register_domain();
        for (auto& p : providers) p->register_domain();
        sched.after(robot.control_period, "robot", "control_tick", tick);
    });
    sched.run_until(cfg.max_time);

    const auto& ledger = node.ledger();
    result.consumer = consumer.timeline();
    for (const auto& p : providers) {
        result.denied_queries += p->denied_queries();
        if (p->won()) {
            result.provider = p->timeline();
            result.winner = p->name();
        }
    }
    result.blocks = ledger.chain().size() - 1;
    result.txs = ledger.tx_count();
    const auto check = verify_chain(ledger.chain(), engine, keys);
    result.chain_ok = check.ok;
    result.chain_reason = check.reason;
    if (auto id = consumer.auction_id()) {
        const auto* auction = ledger.state().find_auction(*id);
        result.deployed = auction->state == AuctionState::deployed;
        result.bssid = auction->bssid;
    }

    if (consumer.failure() != ConsumerFailure::none) result.status = failure_name(consumer.failure());
    else if (!result.settlement) result.status = "timeout";
    else if (!result.chain_ok) result.status = "chain_invalid";

    result.trace_hash = trace_hash(sched.trace());
    if (keep_trace) result.trace = sched.trace();
    return result;
}

std::size_t RunReport::successes() const {
    std::size_t n = 0;
    for (const auto& r : runs) n += r.ok() ? 1 : 0;
    return n;
}

std::vector<PhaseStat> summarize(const std::vector<RunResult>& runs) {
    std::vector<PhaseStat> out;
    auto add_view = [&](const std::vector<std::string>& names, const std::string& view, auto&& phases_of) {
        for (const auto& name : names) {
            std::vector<double> values;
            for (const auto& r : runs) {
                if (!r.ok()) continue;
                for (const auto& span : phases_of(r))
                    if (span.name == name) values.push_back(static_cast<double>(span.duration()));
            }
            PhaseStat stat{name, view, 0, 0};
            if (!values.empty()) {
                double sum = 0;
                for (auto v : values) sum += v;
                stat.mean_ms = sum / static_cast<double>(values.size());
                if (values.size() > 1) {
                    double sq = 0;
                    for (auto v : values) sq += (v - stat.mean_ms) * (v - stat.mean_ms);
                    stat.stddev_ms = std::sqrt(sq / static_cast<double>(values.size() - 1));
                }
            }
            out.push_back(stat);
        }
    };
    add_view(consumer_phase_names(), "consumer", [](const RunResult& r) { return consumer_phases(r.consumer); });
    add_view(provider_phase_names(), "provider", [](const RunResult& r) { return provider_phases(r.provider); });
    return out;
}

RunReport run_scenario(const ScenarioConfig& cfg, bool keep_trace) {
    validate(cfg);
    RunReport report;
    report.name = cfg.name;
    for (std::uint32_t i = 0; i < cfg.runs; ++i) report.runs.push_back(run_once(cfg, i, keep_trace));
    report.summary = summarize(report.runs);
    return report;
}

} // namespace dltfed
