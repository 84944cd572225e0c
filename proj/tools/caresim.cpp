// caresim: batch front end for population synthesis, scenario experiments,
// replicate analysis and walkability grid export.

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "caresim/config.hpp"
#include "caresim/population_io.hpp"
#include "caresim/report.hpp"

namespace fs = std::filesystem;
using namespace caresim;

namespace {

struct Options {
    std::string config;
    std::string out;
    std::string in;
    std::string scenario;
    unsigned jobs = 0;
    std::optional<std::uint64_t> seed;
    bool verbose = false;
    bool daily = false;
};

bool verbose = false;

void log(const std::string& msg)
{
    if (verbose) {
        std::cerr << "caresim: " << msg << '\n';
    }
}

void write_file(const fs::path& path, const std::string& content)
{
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error(path.string() + ": cannot write");
    }
    out << content;
    if (!out) {
        throw std::runtime_error(path.string() + ": write failed");
    }
}

unsigned resolve_jobs(unsigned flag)
{
    if (flag > 0) {
        return flag;
    }
    if (const char* env = std::getenv("CARESIM_THREADS")) {
        unsigned v = 0;
        auto [p, ec] = std::from_chars(env, env + std::strlen(env), v);
        if (ec != std::errc() || *p != '\0' || v == 0) {
            throw Error(ErrorCode::InvalidInput, "CARESIM_THREADS must be a positive integer");
        }
        return v;
    }
    return 1;
}

ProjectConfig load(const Options& o)
{
    auto c = load_config(o.config);
    if (o.seed) {
        c.experiment.base_seed = *o.seed;
    }
    return c;
}

void cmd_synth(const Options& o)
{
    auto cfg = load(o);
    auto manifest = make_manifest("synth", cfg);
    const auto net = load_network(cfg);
    const auto points = expand_sweep(cfg.experiment.sweep, cfg.sim);
    const auto seed = replicate_seed(cfg.experiment.base_seed, 0, points.front());
    SimConfig sim = cfg.sim;
    sim.x1 = points.front().x1;
    sim.x2 = points.front().x2;
    sim.x3 = points.front().x3;
    log("synthesising " + std::to_string(cfg.experiment.population) + " agents");
    auto prepared = prepare_population(net, cfg.marginals, sim, cfg.experiment.population, seed);

    std::ostringstream patients, caregivers, dyads;
    write_patients(patients, prepared.population.patients);
    write_caregivers(caregivers, prepared.population);
    write_dyads(dyads, prepared.population.dyads);
    const fs::path out = o.out;
    write_file(out / "patients.csv", patients.str());
    write_file(out / "caregivers.csv", caregivers.str());
    write_file(out / "dyads.csv", dyads.str());
    write_manifest(out / "manifest.json", manifest);
    log("wrote " + std::to_string(prepared.population.patients.size()) + " patients, " +
        std::to_string(prepared.population.caregivers.size()) + " caregivers");
}

void cmd_experiment(const Options& o)
{
    auto cfg = load(o);
    if (!cfg.has_scenarios) {
        throw Error(ErrorCode::InvalidInput, "config: 'scenarios' is required for experiments");
    }
    auto manifest = make_manifest("experiment", cfg);
    const auto net = load_network(cfg);
    const unsigned jobs = resolve_jobs(o.jobs);
    const bool daily = o.daily || cfg.write_daily;
    const fs::path out = o.out;

    std::vector<std::pair<std::string, std::string>> daily_files;
    DayRecordSink sink;
    if (daily) {
        sink = [&](const ReplicateRecord& r, const std::vector<DayRecord>& days) {
            std::ostringstream ss;
            write_day_records(ss, days);
            daily_files.emplace_back("s" + std::to_string(r.sweep.index) + "_r" + std::to_string(r.replicate) + "_" +
                                         std::to_string(r.scenario_index) + ".csv",
                                     ss.str());
        };
    }
    log("running " + std::to_string(cfg.experiment.replicates) + " replicates on " + std::to_string(jobs) +
        " thread(s)");
    const auto records = run_experiment(net, cfg.marginals, cfg.experiment, cfg.sim, jobs, sink);

    std::ostringstream ss;
    write_replicates(ss, records);
    write_file(out / "replicates.csv", ss.str());
    for (const auto& [name, content] : daily_files) {
        write_file(out / "daily" / name, content);
    }
    write_manifest(out / "manifest.json", manifest);
    log("wrote " + std::to_string(records.size()) + " replicate records");
}

void cmd_analyze(const Options& o)
{
    const auto path = o.in.empty() ? o.config : o.in;
    if (path.empty()) {
        throw Error(ErrorCode::InvalidInput, "analyze needs a replicates.csv path");
    }
    const auto table = csv::Table::read_file(path);
    const auto records = read_replicates(table);
    const auto summary = analyze(records);
    fs::path out = o.out.empty() ? fs::path("summary.json") : fs::path(o.out);
    if (fs::is_directory(out)) {
        out /= "summary.json";
    }
    write_file(out, summary.dump(2) + "\n");
    log("analysed " + std::to_string(records.size()) + " records");
}

void cmd_export_grid(const Options& o)
{
    auto cfg = load(o);
    const auto net = load_network(cfg);
    RoadNetwork target = net;
    if (!o.scenario.empty()) {
        if (!cfg.has_scenarios) {
            throw Error(ErrorCode::InvalidInput, "config has no scenarios; cannot select '" + o.scenario + "'");
        }
        const auto& sc = cfg.experiment.scenarios;
        auto it = std::find_if(sc.begin(), sc.end(), [&](const Scenario& s) { return s.name == o.scenario; });
        if (it == sc.end()) {
            throw Error(ErrorCode::InvalidInput, "unknown scenario '" + o.scenario + "'");
        }
        target = apply_scenario(net, *it);
    }
    GridSpec spec = GridSpec::around(target, cfg.grid_cell_m);
    if (cfg.grid_bbox) {
        const auto& b = *cfg.grid_bbox;
        spec.xmin = b[0];
        spec.ymin = b[1];
        spec.xmax = b[2];
        spec.ymax = b[3];
    }
    const auto cells = walkability_grid(target, spec, cfg.sim.indicators, cfg.sim.travel);
    std::ostringstream ss;
    csv::Writer w(ss);
    w.header(std::array{"cell_x", "cell_y", "walkability"});
    for (const auto& c : cells) {
        w.field(c.x).field(c.y).field(c.walkability);
        w.end_row();
    }
    fs::path out = o.out.empty() ? fs::path("grid.csv") : fs::path(o.out);
    if (fs::is_directory(out)) {
        out /= "grid.csv";
    }
    write_file(out, ss.str());
    log("wrote " + std::to_string(cells.size()) + " cells");
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"caresim - elder care dyads on a road network"};
    app.require_subcommand(1);
    Options o;

    auto add_common = [&](CLI::App* sub) {
        sub->add_flag("-v,--verbose", o.verbose, "Progress messages on stderr");
        sub->add_option("--seed", o.seed, "Override the config's base_seed");
    };

    auto* synth = app.add_subcommand("synth", "Synthesise a population");
    synth->add_option("-c,--config", o.config, "Config JSON")->required();
    synth->add_option("-o,--out", o.out, "Output directory")->required();
    add_common(synth);

    auto* experiment = app.add_subcommand("experiment", "Run the paired scenario experiment");
    experiment->add_option("-c,--config", o.config, "Config JSON")->required();
    experiment->add_option("-o,--out", o.out, "Output directory")->required();
    experiment->add_option("-j,--jobs", o.jobs, "Parallel cells (default: CARESIM_THREADS or 1)")
        ->check(CLI::PositiveNumber);
    experiment->add_flag("--daily", o.daily, "Also write per-day records");
    add_common(experiment);

    auto* analyze_cmd = app.add_subcommand("analyze", "Summarise replicates.csv");
    analyze_cmd->add_option("input,-i,--in", o.in, "replicates.csv")->required();
    analyze_cmd->add_option("-o,--out", o.out, "summary.json path or directory");
    analyze_cmd->add_flag("-v,--verbose", o.verbose, "Progress messages on stderr");

    auto* grid = app.add_subcommand("export-grid", "Walkability grid CSV");
    grid->add_option("-c,--config", o.config, "Config JSON")->required();
    grid->add_option("-s,--scenario", o.scenario, "Scenario name (default: network as loaded)");
    grid->add_option("-o,--out", o.out, "Output CSV path or directory");
    add_common(grid);

    try {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    verbose = o.verbose;

    try {
        if (*synth) {
            cmd_synth(o);
        }
        else if (*experiment) {
            cmd_experiment(o);
        }
        else if (*analyze_cmd) {
            cmd_analyze(o);
        }
        else if (*grid) {
            cmd_export_grid(o);
        }
    }
    catch (const Error& e) {
        std::cerr << "caresim: error: " << e.what() << '\n';
        return e.is_validation() ? 2 : 3;
    }
    catch (const std::exception& e) {
        std::cerr << "caresim: error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
