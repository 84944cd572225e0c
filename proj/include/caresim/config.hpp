#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "caresim/engine.hpp"
#include "caresim/indicators.hpp"
#include "caresim/population.hpp"
#include "caresim/scenarios.hpp"

namespace caresim {

inline constexpr const char* kVersion = "0.1.0";

/// Everything a run needs, resolved from one JSON config file.
struct ProjectConfig {
    std::filesystem::path path;
    nlohmann::json raw;
    NetworkFiles network;
    int facility_kinds = 5;
    DemographicMarginals marginals;
    std::string marginals_file; // empty when given inline
    SimConfig sim;
    Experiment experiment;
    bool has_scenarios = false;
    std::optional<std::array<double, 4>> grid_bbox; // xmin, ymin, xmax, ymax
    double grid_cell_m = 50.0;
    bool write_daily = false;

    std::vector<std::string> input_files() const
    {
        std::vector<std::string> files = {network.nodes, network.edges, network.dwellings, network.facilities};
        if (!marginals_file.empty()) {
            files.push_back(marginals_file);
        }
        return files;
    }
};

namespace detail {

inline Error config_error(const std::string& where, const std::string& what)
{
    return Error(ErrorCode::InvalidInput, where + ": " + what);
}

inline double json_double(const nlohmann::json& v, const std::string& where)
{
    if (!v.is_number()) {
        throw config_error(where, "expected a number");
    }
    return v.get<double>();
}

inline int json_int(const nlohmann::json& v, const std::string& where)
{
    if (!v.is_number_integer()) {
        throw config_error(where, "expected an integer");
    }
    return v.get<int>();
}

inline std::vector<double> json_doubles(const nlohmann::json& v, const std::string& where)
{
    if (!v.is_array()) {
        throw config_error(where, "expected an array of numbers");
    }
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        out.push_back(json_double(v[i], where + "[" + std::to_string(i) + "]"));
    }
    return out;
}

using Setter = std::function<void(const nlohmann::json&, const std::string&)>;

inline void apply_overrides(const nlohmann::json& obj, const std::map<std::string, Setter>& setters,
                            const std::string& where)
{
    if (!obj.is_object()) {
        throw config_error(where, "expected an object");
    }
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        auto s = setters.find(it.key());
        if (s == setters.end()) {
            throw config_error(where, "unknown key '" + it.key() + "'");
        }
        s->second(*it, where + "." + it.key());
    }
}

inline Setter set_double(double& target)
{
    return [&target](const nlohmann::json& v, const std::string& w) { target = json_double(v, w); };
}

inline Setter set_int(int& target)
{
    return [&target](const nlohmann::json& v, const std::string& w) { target = json_int(v, w); };
}

inline void parse_engine(const nlohmann::json& j, SimConfig& c)
{
    auto& d = c.demography;
    const std::map<std::string, Setter> setters = {
        {"wk_speed", set_double(c.travel.wk_speed)},
        {"pr_speed", set_double(c.travel.pr_speed)},
        {"pu_speed", set_double(c.travel.pu_speed)},
        {"gr_speed", set_double(c.travel.gr_speed)},
        {"gtperc", set_double(c.gtperc)},
        {"radius_preference_km", set_double(c.radius_preference_km)},
        {"efforts_threshold", set_double(c.efforts_threshold)},
        {"n_facilities", set_int(c.n_facilities)},
        {"warmup_days", set_int(c.warmup_days)},
        {"horizon_days", set_int(c.horizon_days)},
        {"x1", set_double(c.x1)},
        {"x2", set_double(c.x2)},
        {"x3", [&c](const nlohmann::json& v, const std::string& w) { c.x3 = json_double(v, w); }},
        {"care_price", set_double(c.care_price)},
        {"day_hours", set_double(c.day_hours)},
        {"work_hours", set_double(c.work_hours)},
        {"round_trip_factor", set_double(c.round_trip_factor)},
        {"unmet_worsening", set_double(c.unmet_worsening)},
        {"days_per_month", set_double(c.days_per_month)},
        {"buyout_hours", set_double(c.buyout_hours)},
        {"buyout_income_multiple", set_double(c.buyout_income_multiple)},
        {"effort_window_days", set_int(c.effort_window_days)},
        {"cluster_link_m", set_double(c.cluster_link_m)},
        {"age_ref", set_int(d.age_ref)},
        {"age_work", set_int(d.age_work)},
        {"age_gold", set_int(d.age_gold)},
        {"base_income", set_double(d.base_income)},
        {"base_income_ret", set_double(d.base_income_ret)},
        {"hrs_ass_max", set_double(d.hrs_ass_max)},
        {"care_slot_hours", set_double(d.care_slot_hours)},
        {"max_age", set_int(d.max_age)},
        {"old_age_decay", set_double(d.old_age_decay)},
    };
    apply_overrides(j, setters, "engine");
}

inline void parse_indicators(const nlohmann::json& j, IndicatorConfig& c)
{
    auto fixed = [](std::size_t n, std::function<void(const std::vector<double>&)> assign) -> Setter {
        return [n, assign](const nlohmann::json& v, const std::string& w) {
            auto xs = json_doubles(v, w);
            if (xs.size() != n) {
                throw config_error(w, "expected " + std::to_string(n) + " numbers");
            }
            assign(xs);
        };
    };
    const std::map<std::string, Setter> setters = {
        {"walk_range_minutes", set_double(c.walk_range_minutes)},
        {"buffer_m", set_double(c.buffer_m)},
        {"kind_weights",
         [&c](const nlohmann::json& v, const std::string& w) { c.kind_weights = json_doubles(v, w); }},
        {"s_min", set_double(c.s_min)},
        {"gamma_vuln", set_double(c.gamma_vuln)},
        {"suitability_weights", fixed(4,
                                      [&c](const std::vector<double>& xs) {
                                          c.suitability.surface = xs[0];
                                          c.suitability.width = xs[1];
                                          c.suitability.slope = xs[2];
                                          c.suitability.safety = xs[3];
                                      })},
        {"walkability_weights", fixed(3,
                                      [&c](const std::vector<double>& xs) {
                                          c.alpha = xs[0];
                                          c.beta = xs[1];
                                          c.gamma = xs[2];
                                      })},
    };
    apply_overrides(j, setters, "indicators");
}

inline Scenario parse_scenario(const nlohmann::json& j, const std::string& where)
{
    if (!j.is_object() || !j.contains("name") || !j["name"].is_string()) {
        throw config_error(where, "scenario needs a string 'name'");
    }
    Scenario s;
    s.name = j["name"].get<std::string>();
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (it.key() != "name" && it.key() != "moves") {
            throw config_error(where, "unknown key '" + it.key() + "'");
        }
    }
    if (j.contains("moves")) {
        const auto& moves = j["moves"];
        if (!moves.is_object()) {
            throw config_error(where + ".moves", "expected an object of facility id -> node id");
        }
        for (auto it = moves.begin(); it != moves.end(); ++it) {
            std::int64_t facility = 0;
            const auto& key = it.key();
            auto [p, ec] = std::from_chars(key.data(), key.data() + key.size(), facility);
            if (ec != std::errc() || p != key.data() + key.size()) {
                throw config_error(where + ".moves", "facility id '" + key + "' is not an integer");
            }
            if (!it->is_number_integer()) {
                throw config_error(where + ".moves." + key, "expected an integer node id");
            }
            s.moves[facility] = it->get<std::int64_t>();
        }
    }
    return s;
}

inline std::string resolve(const std::filesystem::path& base, const nlohmann::json& v, const std::string& where)
{
    if (!v.is_string()) {
        throw config_error(where, "expected a file path");
    }
    std::filesystem::path p = v.get<std::string>();
    return (p.is_absolute() ? p : base / p).lexically_normal().string();
}

} // namespace detail

inline ProjectConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir)
{
    using detail::config_error;
    if (!j.is_object()) {
        throw config_error("config", "expected a JSON object");
    }
    static const std::vector<std::string> known = {"network", "marginals", "stages",    "population",  "scenarios",
                                                   "replicates", "base_seed", "sweeps", "engine", "indicators",
                                                   "grid", "write_daily"};
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (std::find(known.begin(), known.end(), it.key()) == known.end()) {
            throw config_error("config", "unknown key '" + it.key() + "'");
        }
    }
    ProjectConfig c;
    c.raw = j;

    if (!j.contains("network") || !j["network"].is_object()) {
        throw config_error("network", "missing network section");
    }
    const auto& net = j["network"];
    for (auto it = net.begin(); it != net.end(); ++it) {
        const auto& k = it.key();
        const std::string w = "network." + k;
        if (k == "nodes") {
            c.network.nodes = detail::resolve(base_dir, *it, w);
        }
        else if (k == "edges") {
            c.network.edges = detail::resolve(base_dir, *it, w);
        }
        else if (k == "dwellings") {
            c.network.dwellings = detail::resolve(base_dir, *it, w);
        }
        else if (k == "facilities") {
            c.network.facilities = detail::resolve(base_dir, *it, w);
        }
        else {
            throw config_error("network", "unknown key '" + k + "'");
        }
    }
    for (const auto* f : {&c.network.nodes, &c.network.edges, &c.network.dwellings, &c.network.facilities}) {
        if (f->empty()) {
            throw config_error("network", "nodes, edges, dwellings and facilities paths are all required");
        }
    }

    if (j.contains("marginals")) {
        const auto& m = j["marginals"];
        if (m.is_string()) {
            c.marginals_file = detail::resolve(base_dir, m, "marginals");
            c.marginals = parse_marginals(read_json_file(c.marginals_file));
        }
        else {
            c.marginals = parse_marginals(m);
        }
    }
    if (j.contains("stages")) {
        c.sim.stages = parse_stage_specs(j["stages"]);
    }
    if (j.contains("engine")) {
        detail::parse_engine(j["engine"], c.sim);
    }
    if (j.contains("indicators")) {
        detail::parse_indicators(j["indicators"], c.sim.indicators);
    }
    c.facility_kinds = c.sim.n_facilities;
    c.experiment.population = c.marginals.population;
    if (j.contains("population")) {
        c.experiment.population = detail::json_int(j["population"], "population");
    }
    if (j.contains("replicates")) {
        c.experiment.replicates = detail::json_int(j["replicates"], "replicates");
    }
    if (j.contains("base_seed")) {
        if (!j["base_seed"].is_number_unsigned() && !j["base_seed"].is_number_integer()) {
            throw config_error("base_seed", "expected a non-negative integer");
        }
        if (j["base_seed"].is_number_integer() && j["base_seed"].get<std::int64_t>() < 0) {
            throw config_error("base_seed", "expected a non-negative integer");
        }
        c.experiment.base_seed = j["base_seed"].get<std::uint64_t>();
    }
    if (j.contains("scenarios")) {
        const auto& s = j["scenarios"];
        if (!s.is_array() || s.size() != 2) {
            throw config_error("scenarios", "expected exactly two scenarios (baseline, alternative)");
        }
        for (std::size_t i = 0; i < 2; ++i) {
            c.experiment.scenarios[i] = detail::parse_scenario(s[i], "scenarios[" + std::to_string(i) + "]");
        }
        c.has_scenarios = true;
    }
    if (j.contains("sweeps")) {
        const std::map<std::string, detail::Setter> setters = {
            {"x1", [&c](const nlohmann::json& v, const std::string& w) { c.experiment.sweep.x1 = detail::json_doubles(v, w); }},
            {"x2", [&c](const nlohmann::json& v, const std::string& w) { c.experiment.sweep.x2 = detail::json_doubles(v, w); }},
            {"x3", [&c](const nlohmann::json& v, const std::string& w) { c.experiment.sweep.x3 = detail::json_doubles(v, w); }},
        };
        detail::apply_overrides(j["sweeps"], setters, "sweeps");
    }
    if (j.contains("grid")) {
        const std::map<std::string, detail::Setter> setters = {
            {"cell_m", detail::set_double(c.grid_cell_m)},
            {"bbox",
             [&c](const nlohmann::json& v, const std::string& w) {
                 auto xs = detail::json_doubles(v, w);
                 if (xs.size() != 4 || !(xs[0] < xs[2]) || !(xs[1] < xs[3])) {
                     throw config_error(w, "expected [xmin, ymin, xmax, ymax] with min < max");
                 }
                 c.grid_bbox = std::array<double, 4>{xs[0], xs[1], xs[2], xs[3]};
             }},
        };
        detail::apply_overrides(j["grid"], setters, "grid");
        if (!(c.grid_cell_m > 0.0)) {
            throw config_error("grid.cell_m", "must be > 0");
        }
    }
    if (j.contains("write_daily")) {
        if (!j["write_daily"].is_boolean()) {
            throw config_error("write_daily", "expected true or false");
        }
        c.write_daily = j["write_daily"].get<bool>();
    }
    c.sim.validate();
    return c;
}

inline ProjectConfig load_config(const std::filesystem::path& path)
{
    auto j = read_json_file(path.string());
    auto c = parse_config(j, path.parent_path());
    c.path = path;
    return c;
}

inline RoadNetwork load_network(const ProjectConfig& c) { return load_network(c.network, c.facility_kinds); }

// ---------------------------------------------------------------------------
// Run manifest

inline std::uint64_t fnv1a64(std::string_view bytes)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : bytes) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

inline std::string file_hash(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::InvalidInput, path + ": cannot open file");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return hex64(fnv1a64(ss.str()));
}

inline std::string utc_now()
{
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct RunManifest {
    std::string command;
    std::string config_hash;
    std::vector<std::pair<std::string, std::string>> inputs; // path, hash
    std::uint64_t base_seed = 0;
    std::string started;
    std::string finished;

    nlohmann::json to_json() const
    {
        nlohmann::json in = nlohmann::json::array();
        for (const auto& [p, h] : inputs) {
            in.push_back({{"path", p}, {"fnv1a64", h}});
        }
        return {{"artifact", "caresim"}, {"version", kVersion},   {"command", command},     {"config_fnv1a64", config_hash},
                {"inputs", in},          {"base_seed", base_seed}, {"started_utc", started}, {"finished_utc", finished}};
    }
};

/// Manifest for a config-driven command; the config hash covers the parsed
/// config in canonical (sorted-key) form plus the effective base seed.
inline RunManifest make_manifest(const std::string& command, const ProjectConfig& c)
{
    RunManifest m;
    m.command = command;
    nlohmann::json canonical = c.raw;
    canonical["base_seed"] = c.experiment.base_seed;
    m.config_hash = hex64(fnv1a64(canonical.dump()));
    for (const auto& f : c.input_files()) {
        m.inputs.emplace_back(f, file_hash(f));
    }
    m.base_seed = c.experiment.base_seed;
    m.started = utc_now();
    return m;
}

inline void write_manifest(const std::filesystem::path& path, RunManifest m)
{
    m.finished = utc_now();
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error(path.string() + ": cannot write");
    }
    out << m.to_json().dump(2) << '\n';
}

} // namespace caresim
