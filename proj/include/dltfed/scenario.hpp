#pragma once

#include "dltfed/agents.hpp"
#include "dltfed/consensus.hpp"
#include "dltfed/robot.hpp"
#include "dltfed/simnet.hpp"

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dltfed {

/// Invalid scenario configuration; `path()` names the offending key as section.key.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string path, const std::string& message)
        : std::runtime_error(path + ": " + message), path_(std::move(path)) {}
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class EngineKind { poa, pow };

struct ScenarioConfig {
    std::string name = "scenario";
    std::uint32_t runs = 1;
    std::uint64_t seed = 1;
    TimeMs max_time = 600'000; // virtual horizon of a single run
    double realtime_factor = 0; // wall ms slept per virtual ms; set from the command line only

    EngineKind engine = EngineKind::poa;
    TimeMs block_period = 1000;
    std::uint32_t difficulty_bits = 0;
    TimeMs attempt_time = 1;

    Links links;
    ConsumerSetup consumer;
    std::vector<ProviderSetup> providers;
    DeploymentLatencyModel deployment; // shared by every provider

    RobotModel robot;
    std::string vap1_bssid = "02:00:00:00:00:01";
    double trigger_margin = 5;
};

/// Parses the INI-style scenario file documented in docs/config.md.
ScenarioConfig load_config(const std::filesystem::path& file);
ScenarioConfig parse_config(const std::string& text);
/// Throws ConfigError on the first violated constraint.
void validate(const ScenarioConfig& cfg);

EngineConfig engine_config(const ScenarioConfig& cfg);
/// Coverage of vAP1 (consumer footprint) and of every provider's vAP2.
CoverageMap coverage_map(const ScenarioConfig& cfg);

struct RunResult {
    std::uint32_t run = 0;
    std::uint64_t seed = 0;
    std::string status = "ok"; // ok | no_bids | insufficient_bids | tx_rejected | timeout | chain_invalid

    ConsumerTimeline consumer;
    ProviderTimeline provider; // the winning provider's view
    std::optional<std::string> winner;

    std::size_t messages = 0;
    std::size_t lost = 0;

    std::uint64_t blocks = 0; // excluding genesis
    std::uint64_t txs = 0;
    bool chain_ok = false;
    std::string chain_reason;
    bool deployed = false;
    std::optional<std::string> bssid;

    std::uint64_t deposit = 0;
    std::optional<Settlement> settlement;

    std::size_t denied_queries = 0;
    Digest trace_hash;
    std::vector<TraceRecord> trace;

    bool ok() const { return status == "ok"; }
};

/// One seeded simulation; seed = cfg.seed + run index.
RunResult run_once(const ScenarioConfig& cfg, std::uint32_t run_index, bool keep_trace = false);

struct PhaseStat {
    std::string phase;
    std::string view;
    double mean_ms = 0;
    double stddev_ms = 0;
};

struct RunReport {
    std::string name;
    std::vector<RunResult> runs;
    std::vector<PhaseStat> summary; // successful runs only

    std::size_t successes() const;
};

/// Executes cfg.runs simulations, in run-index order.
RunReport run_scenario(const ScenarioConfig& cfg, bool keep_trace = false);
std::vector<PhaseStat> summarize(const std::vector<RunResult>& runs);

} // namespace dltfed
