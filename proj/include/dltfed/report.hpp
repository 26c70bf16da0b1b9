#pragma once

#include "dltfed/scenario.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace dltfed {

inline constexpr const char* phases_header = "run,seed,phase,start_ms,end_ms,duration_ms,view";
inline constexpr const char* summary_header = "phase,mean_ms,stddev_ms,view";
inline constexpr const char* runs_header =
    "run,seed,status,messages,lost,blocks,txs,chain_ok,bssid,deposit,payout,refund,trace_hash";

std::string phases_csv(const RunReport& report);
std::string summary_csv(const RunReport& report);
std::string runs_csv(const RunReport& report);

/// Writes phases.csv, summary.csv and runs.csv into `dir` (created if missing). Throws IoError.
void emit_csv(const RunReport& report, const std::filesystem::path& dir);
/// Writes one trace_<run>.txt per run that kept its trace.
void emit_traces(const RunReport& report, const std::filesystem::path& dir);

/// Reads summary.csv back. Throws IoError.
std::vector<PhaseStat> read_summary(const std::filesystem::path& dir);

struct PhaseMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ComparisonRow {
    std::string phase;
    std::string view;
    double a_mean_ms = 0;
    double b_mean_ms = 0;
    double delta_ms = 0; // b - a
    double ratio = 0;    // b / a; 1 when both are zero
    bool b_slower = false;
};

/// Per-phase deltas plus the cumulative milestones federation_completed (consumer view,
/// trigger to confirmation seen) and announcement_to_deploy_start (provider view).
/// Throws PhaseMismatch when the two summaries cover different phases.
std::vector<ComparisonRow> compare(const std::vector<PhaseStat>& a, const std::vector<PhaseStat>& b);
std::string comparison_csv(const std::vector<ComparisonRow>& rows);

} // namespace dltfed
