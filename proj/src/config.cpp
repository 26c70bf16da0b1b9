#include "dltfed/scenario.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace dltfed {

namespace {

namespace pt = boost::property_tree;

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

template <typename T>
T parse_number(const std::string& path, const std::string& raw) {
    T value{};
    const auto* end = raw.data() + raw.size();
    auto [ptr, ec] = std::from_chars(raw.data(), end, value);
    if (ec != std::errc{} || ptr != end) throw ConfigError(path, "expected a number, got '" + raw + "'");
    return value;
}

Interval parse_interval(const std::string& path, const std::string& raw) {
    auto parts = split(raw, ':');
    if (parts.size() != 2) throw ConfigError(path, "expected an interval 'lo:hi', got '" + raw + "'");
    Interval i{parse_number<double>(path, parts[0]), parse_number<double>(path, parts[1])};
    if (!i.well_formed()) throw ConfigError(path, "interval must satisfy lo < hi");
    return i;
}

ServiceFootprint parse_footprint(const std::string& path, const std::string& raw) {
    ServiceFootprint fp;
    for (const auto& part : split(raw, ',')) fp.push_back(parse_interval(path, part));
    return fp;
}

bool parse_bool(const std::string& path, const std::string& raw) {
    if (raw == "true" || raw == "yes" || raw == "1") return true;
    if (raw == "false" || raw == "no" || raw == "0") return false;
    throw ConfigError(path, "expected true or false, got '" + raw + "'");
}

/// One INI section; remembers which keys were read so leftovers can be rejected.
class Section {
public:
    Section(std::string name, const pt::ptree* tree) : name_(std::move(name)), tree_(tree) {}

    std::optional<std::string> raw(const std::string& key) {
        used_.insert(key);
        if (tree_ == nullptr) return std::nullopt;
        auto child = tree_->get_child_optional(pt::ptree::path_type(key, '\0'));
        if (!child) return std::nullopt;
        return trim(child->data());
    }

    template <typename T>
    void number(const std::string& key, T& out) {
        if (auto v = raw(key)) out = parse_number<T>(path(key), *v);
    }
    void text(const std::string& key, std::string& out) {
        if (auto v = raw(key)) out = *v;
    }
    void flag(const std::string& key, bool& out) {
        if (auto v = raw(key)) out = parse_bool(path(key), *v);
    }
    void interval(const std::string& key, Interval& out) {
        if (auto v = raw(key)) out = parse_interval(path(key), *v);
    }
    void footprint(const std::string& key, ServiceFootprint& out) {
        if (auto v = raw(key)) out = parse_footprint(path(key), *v);
    }

    void reject_unknown() const {
        if (tree_ == nullptr) return;
        for (const auto& [key, _] : *tree_)
            if (!used_.contains(key)) throw ConfigError(path(key), "unknown key");
    }

    std::string path(const std::string& key) const { return name_ + "." + key; }

private:
    std::string name_;
    const pt::ptree* tree_;
    std::set<std::string> used_;
};

const pt::ptree* find_section(const pt::ptree& root, const std::string& name) {
    auto it = root.find(name);
    return it == root.not_found() ? nullptr : &it->second;
}

} // namespace

ScenarioConfig parse_config(const std::string& text) {
    pt::ptree root;
    try {
        std::istringstream in(text);
        pt::ini_parser::read_ini(in, root);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError("line " + std::to_string(e.line()), e.message());
    }

    static const std::set<std::string> known{"scenario", "consensus", "links",  "consumer",
                                             "service",  "deployment", "robot"};
    for (const auto& [name, child] : root) {
        if (!known.contains(name) && !name.starts_with("provider.")) throw ConfigError(name, "unknown section");
        if (child.empty() && !child.data().empty()) throw ConfigError(name, "key outside of a section");
    }

    ScenarioConfig cfg;

    Section scenario("scenario", find_section(root, "scenario"));
    scenario.text("name", cfg.name);
    scenario.number("runs", cfg.runs);
    scenario.number("seed", cfg.seed);
    scenario.number("max_time_ms", cfg.max_time);
    scenario.reject_unknown();

    Section consensus("consensus", find_section(root, "consensus"));
    if (auto engine = consensus.raw("engine")) {
        if (*engine == "poa") cfg.engine = EngineKind::poa;
        else if (*engine == "pow") cfg.engine = EngineKind::pow;
        else throw ConfigError("consensus.engine", "expected poa or pow, got '" + *engine + "'");
    }
    consensus.number("block_period_ms", cfg.block_period);
    consensus.number("difficulty_bits", cfg.difficulty_bits);
    consensus.number("attempt_time_ms", cfg.attempt_time);
    consensus.reject_unknown();

    Section links("links", find_section(root, "links"));
    links.number("ledger_base_ms", cfg.links.ledger.base);
    links.number("ledger_jitter_ms", cfg.links.ledger.jitter);
    links.number("control_base_ms", cfg.links.control.base);
    links.number("control_jitter_ms", cfg.links.control.jitter);
    links.number("inter_domain_base_ms", cfg.links.inter_domain.base);
    links.number("inter_domain_jitter_ms", cfg.links.inter_domain.jitter);
    links.reject_unknown();

    auto& c = cfg.consumer;
    c.name = "consumer";
    Section consumer("consumer", find_section(root, "consumer"));
    consumer.text("name", c.name);
    consumer.footprint("footprint", c.footprint);
    consumer.number("announce_prep_ms", c.announce_prep);
    consumer.number("selection_ms", c.selection_time);
    if (auto rule = consumer.raw("selection")) {
        if (*rule == "lowest_price") c.policy.selection = SelectionRule::lowest_price;
        else if (*rule == "first_bid") c.policy.selection = SelectionRule::first_bid;
        else throw ConfigError("consumer.selection", "expected lowest_price or first_bid, got '" + *rule + "'");
    }
    consumer.number("min_bids", c.policy.min_bids);
    consumer.number("bid_wait_ms", c.policy.bid_wait);
    consumer.number("bid_timeout_ms", c.policy.bid_timeout);
    consumer.number("deposit", c.deposit);
    consumer.number("usage_ms", c.usage);
    consumer.reject_unknown();

    auto& req = c.requirements;
    auto& info = c.deployment_info;
    Section service("service", find_section(root, "service"));
    service.text("descriptor_id", req.service_descriptor_id);
    service.interval("coverage_target", req.coverage_target);
    service.number("max_latency_ms", req.max_latency);
    if (auto mode = service.raw("trust_mode")) {
        if (*mode == "trusty") req.trust_mode = TrustMode::trusty;
        else if (*mode == "untrusty") req.trust_mode = TrustMode::untrusty;
        else throw ConfigError("service.trust_mode", "expected trusty or untrusty, got '" + *mode + "'");
    }
    service.text("consumer_endpoint", info.consumer_endpoint);
    service.text("resource_db_ref", info.trusted.resource_db_ref);
    service.text("storage_ref", info.trusted.storage_ref);
    if (auto eps = service.raw("extra_endpoints"); eps && !eps->empty()) info.trusted.extra_endpoints = split(*eps, ',');
    service.reject_unknown();
    info.descriptor_id = req.service_descriptor_id;

    auto& deployment = cfg.deployment;
    Section dep("deployment", find_section(root, "deployment"));
    dep.number("link_setup_ms", deployment.link_setup);
    dep.number("onboard_ms", deployment.onboard);
    dep.number("instantiate_ms", deployment.instantiate);
    dep.number("jitter_pct", deployment.jitter_pct);
    dep.reject_unknown();

    Section robot("robot", find_section(root, "robot"));
    robot.number("start_position_m", cfg.robot.position);
    robot.number("speed_mps", cfg.robot.speed);
    robot.number("control_period_ms", cfg.robot.control_period);
    robot.number("scan_ms", cfg.robot.handover.scan);
    robot.number("disassociate_ms", cfg.robot.handover.disassociate);
    robot.number("associate_ms", cfg.robot.handover.associate);
    robot.text("vap1_bssid", cfg.vap1_bssid);
    robot.number("trigger_margin_m", cfg.trigger_margin);
    robot.reject_unknown();

    for (const auto& [name, child] : root) {
        if (!name.starts_with("provider.")) continue;
        ProviderSetup p;
        p.name = name.substr(std::string("provider.").size());
        if (p.name.empty()) throw ConfigError(name, "provider section needs a name");
        Section s(name, &child);
        s.footprint("footprint", p.footprint);
        s.number("base_price", p.pricing.base_price);
        s.number("per_meter", p.pricing.per_meter);
        s.flag("decline_outside_footprint", p.pricing.decline_outside_footprint);
        s.number("bid_eval_ms", p.bid_eval);
        s.reject_unknown();
        cfg.providers.push_back(std::move(p));
    }

    validate(cfg);
    return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw IoError("cannot read config " + file.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

void validate(const ScenarioConfig& cfg) {
    auto require = [](bool cond, const char* path, const char* msg) {
        if (!cond) throw ConfigError(path, msg);
    };
    require(cfg.runs >= 1, "scenario.runs", "must be >= 1");
    require(cfg.max_time > 0, "scenario.max_time_ms", "must be > 0");
    if (cfg.engine == EngineKind::poa) {
        require(cfg.block_period > 0, "consensus.block_period_ms", "must be > 0");
    } else {
        require(cfg.difficulty_bits <= 32, "consensus.difficulty_bits", "must be in [0, 32]");
        require(cfg.attempt_time > 0, "consensus.attempt_time_ms", "must be > 0");
    }
    require(!cfg.consumer.name.empty(), "consumer.name", "must not be empty");
    require(!cfg.consumer.footprint.empty(), "consumer.footprint", "is required");
    require(cfg.consumer.policy.min_bids >= 1, "consumer.min_bids", "must be >= 1");
    require(cfg.consumer.requirements.coverage_target.well_formed(), "service.coverage_target",
            "is required and must satisfy lo < hi");
    require(cfg.consumer.requirements.max_latency > 0, "service.max_latency_ms", "must be > 0");
    require(!cfg.consumer.requirements.service_descriptor_id.empty(), "service.descriptor_id", "is required");
    const auto& dep = cfg.deployment;
    require(dep.jitter_pct >= 0 && dep.jitter_pct <= 0.5, "deployment.jitter_pct", "must be in [0, 0.5]");
    require(cfg.robot.speed > 0, "robot.speed_mps", "must be > 0");
    require(cfg.robot.control_period > 0, "robot.control_period_ms", "must be > 0");
    require(cfg.trigger_margin > 0, "robot.trigger_margin_m", "must be > 0");
    require(is_valid_bssid(cfg.vap1_bssid), "robot.vap1_bssid", "must be six colon-separated hex octets");
    require(cfg.robot.position < cfg.consumer.footprint.front().hi - cfg.trigger_margin, "robot.start_position_m",
            "must lie before the federation trigger point");
    std::set<std::string> names{cfg.consumer.name};
    for (const auto& p : cfg.providers) {
        const auto path = "provider." + p.name;
        if (!names.insert(p.name).second) throw ConfigError(path, "duplicate domain name");
        if (p.footprint.empty()) throw ConfigError(path + ".footprint", "is required");
    }
}

} // namespace dltfed
