#include "dltfed/report.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace dltfed {

namespace {

std::string fixed3(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

void write_file(const std::filesystem::path& file, const std::string& content) {
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + file.string());
    out << content;
    if (!out) throw IoError("write failed for " + file.string());
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

} // namespace

std::string phases_csv(const RunReport& report) {
    std::ostringstream os;
    os << phases_header << '\n';
    for (const auto& r : report.runs) {
        auto emit = [&](const std::vector<PhaseSpan>& spans, const char* view) {
            for (const auto& s : spans)
                os << r.run << ',' << r.seed << ',' << s.name << ',' << s.start << ',' << s.end << ',' << s.duration()
                   << ',' << view << '\n';
        };
        emit(consumer_phases(r.consumer), "consumer");
        emit(provider_phases(r.provider), "provider");
    }
    return os.str();
}

std::string summary_csv(const RunReport& report) {
    std::ostringstream os;
    os << summary_header << '\n';
    for (const auto& s : report.summary)
        os << s.phase << ',' << fixed3(s.mean_ms) << ',' << fixed3(s.stddev_ms) << ',' << s.view << '\n';
    return os.str();
}

std::string runs_csv(const RunReport& report) {
    std::ostringstream os;
    os << runs_header << '\n';
    for (const auto& r : report.runs) {
        os << r.run << ',' << r.seed << ',' << r.status << ',' << r.messages << ',' << r.lost << ',' << r.blocks << ','
           << r.txs << ',' << (r.chain_ok ? "true" : "false") << ',' << r.bssid.value_or("") << ',' << r.deposit << ',';
        if (r.settlement) os << r.settlement->payout << ',' << r.settlement->refund;
        else os << ',';
        os << ',' << r.trace_hash.hex() << '\n';
    }
    return os.str();
}

void emit_csv(const RunReport& report, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
    write_file(dir / "phases.csv", phases_csv(report));
    write_file(dir / "summary.csv", summary_csv(report));
    write_file(dir / "runs.csv", runs_csv(report));
}

void emit_traces(const RunReport& report, const std::filesystem::path& dir) {
    for (const auto& r : report.runs) {
        if (r.trace.empty()) continue;
        write_file(dir / ("trace_" + std::to_string(r.run) + ".txt"), trace_text(r.trace));
    }
}

std::vector<PhaseStat> read_summary(const std::filesystem::path& dir) {
    const auto file = dir / "summary.csv";
    std::ifstream in(file);
    if (!in) throw IoError("cannot read " + file.string());
    std::string line;
    if (!std::getline(in, line) || line != summary_header) throw IoError(file.string() + ": unexpected header");
    std::vector<PhaseStat> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto cells = split_csv(line);
        if (cells.size() != 4) throw IoError(file.string() + ": malformed row '" + line + "'");
        try {
            out.push_back(PhaseStat{cells[0], cells[3], std::stod(cells[1]), std::stod(cells[2])});
        } catch (const std::exception&) {
            throw IoError(file.string() + ": malformed number in '" + line + "'");
        }
    }
    return out;
}

std::vector<ComparisonRow> compare(const std::vector<PhaseStat>& a, const std::vector<PhaseStat>& b) {
    using Key = std::pair<std::string, std::string>; // (view, phase)
    std::map<Key, double> am, bm;
    for (const auto& s : a) am[{s.view, s.phase}] = s.mean_ms;
    for (const auto& s : b) bm[{s.view, s.phase}] = s.mean_ms;
    std::set<Key> ak, bk;
    for (const auto& [k, _] : am) ak.insert(k);
    for (const auto& [k, _] : bm) bk.insert(k);
    if (ak != bk) throw PhaseMismatch("reports aggregate different phase sets");

    auto row = [](std::string phase, std::string view, double x, double y) {
        ComparisonRow r{std::move(phase), std::move(view), x, y, y - x, 0, y > x};
        r.ratio = x == 0 ? (y == 0 ? 1.0 : INFINITY) : y / x;
        return r;
    };

    std::vector<ComparisonRow> out;
    for (const auto& s : a) out.push_back(row(s.phase, s.view, s.mean_ms, bm.at({s.view, s.phase})));

    // Means are linear, so a milestone mean is the sum of the interval means leading to it.
    auto cumulative = [&](const std::string& view, const std::vector<std::string>& names, std::size_t count,
                          const std::string& label) {
        double x = 0, y = 0;
        for (std::size_t i = 0; i < count; ++i) {
            auto it = am.find({view, names[i]});
            if (it == am.end()) return;
            x += it->second;
            y += bm.at({view, names[i]});
        }
        out.push_back(row(label, view, x, y));
    };
    cumulative("consumer", consumer_phase_names(), 6, "federation_completed");
    cumulative("provider", provider_phase_names(), 4, "announcement_to_deploy_start");
    return out;
}

std::string comparison_csv(const std::vector<ComparisonRow>& rows) {
    std::ostringstream os;
    os << "phase,view,a_mean_ms,b_mean_ms,delta_ms,ratio,b_slower\n";
    for (const auto& r : rows)
        os << r.phase << ',' << r.view << ',' << fixed3(r.a_mean_ms) << ',' << fixed3(r.b_mean_ms) << ','
           << fixed3(r.delta_ms) << ',' << fixed3(r.ratio) << ',' << (r.b_slower ? "true" : "false") << '\n';
    return os.str();
}

} // namespace dltfed
