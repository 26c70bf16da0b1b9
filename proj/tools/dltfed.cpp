// dltfed: run federation scenarios, compare result directories, validate configs.

#include "dltfed/report.hpp"
#include "dltfed/scenario.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

constexpr int exit_ok = 0;
constexpr int exit_config_invalid = 1;
constexpr int exit_io_error = 2;

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"DLT-mediated service federation simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint32_t> runs;
    std::string out_dir = "out";
    bool trace = false;
    double realtime = 0;

    auto* run = app.add_subcommand("run", "Execute seeded scenario runs and write CSV reports");
    run->add_option("config", config_path, "Scenario config file")->required();
    run->add_option("--seed", seed, "Override scenario.seed");
    run->add_option("--runs", runs, "Override scenario.runs");
    run->add_option("--out", out_dir, "Output directory")->capture_default_str();
    run->add_flag("--trace", trace, "Also write per-run event traces");
    run->add_option("--realtime", realtime, "Wall ms slept per virtual ms (demo pacing; 0 = off)")
        ->check(CLI::NonNegativeNumber);

    std::string dir_a, dir_b;
    auto* cmp = app.add_subcommand("compare", "Compare two result directories phase by phase");
    cmp->add_option("dirA", dir_a, "Baseline result directory")->required();
    cmp->add_option("dirB", dir_b, "Result directory to compare against the baseline")->required();

    auto* val = app.add_subcommand("validate", "Check a scenario config");
    val->add_option("config", config_path, "Scenario config file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    using namespace dltfed;
    try {
        if (*val) {
            auto cfg = load_config(config_path);
            std::cout << "ok: " << cfg.name << " (" << cfg.providers.size() << " providers, "
                      << (cfg.engine == EngineKind::poa ? "poa" : "pow") << ")\n";
            return exit_ok;
        }
        if (*cmp) {
            auto rows = compare(read_summary(dir_a), read_summary(dir_b));
            std::cout << comparison_csv(rows);
            return exit_ok;
        }

        auto cfg = load_config(config_path);
        if (seed) cfg.seed = *seed;
        if (runs) cfg.runs = *runs;
        validate(cfg);
        cfg.realtime_factor = realtime;

        auto report = run_scenario(cfg, trace);
        emit_csv(report, out_dir);
        if (trace) emit_traces(report, out_dir);

        std::size_t failed = report.runs.size() - report.successes();
        std::cout << cfg.name << ": " << report.successes() << "/" << report.runs.size() << " runs ok";
        if (failed > 0) std::cout << ", " << failed << " failed (see runs.csv)";
        std::cout << "\n";
        for (const auto& s : report.summary) {
            if (s.phase == "consumer_total" || s.phase == "provider_total")
                std::cout << "  " << s.view << " total: " << s.mean_ms << " ms (sd " << s.stddev_ms << ")\n";
        }
        return exit_ok;
    } catch (const ConfigError& e) {
        std::cerr << "config_invalid: " << e.what() << "\n";
        return exit_config_invalid;
    } catch (const IoError& e) {
        std::cerr << "io_error: " << e.what() << "\n";
        return exit_io_error;
    } catch (const PhaseMismatch& e) {
        std::cerr << "phase_mismatch: " << e.what() << "\n";
        return exit_config_invalid;
    }
}
