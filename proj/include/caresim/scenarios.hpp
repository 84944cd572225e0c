#pragma once

#include <array>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "caresim/csv.hpp"
#include "caresim/engine.hpp"
#include "caresim/network.hpp"
#include "caresim/population.hpp"
#include "caresim/rng.hpp"

namespace caresim {

/// A named facility layout: facility id -> node id overrides on top of the
/// network's defaults.
struct Scenario {
    std::string name;
    std::map<std::int64_t, NodeId> moves;
};

/// Copy of `net` with the scenario's facility moves applied.
inline RoadNetwork apply_scenario(const RoadNetwork& net, const Scenario& scenario)
{
    auto facilities = net.facilities();
    for (const auto& [facility_id, node] : scenario.moves) {
        auto it = std::find_if(facilities.begin(), facilities.end(),
                               [&](const Facility& f) { return f.id == facility_id; });
        if (it == facilities.end()) {
            throw Error(ErrorCode::UnknownFacility, "scenario '" + scenario.name + "': facility " +
                                                        std::to_string(facility_id) + " does not exist");
        }
        if (!net.find(node)) {
            throw Error(ErrorCode::UnknownNode, "scenario '" + scenario.name + "': node " + std::to_string(node) +
                                                    " does not exist");
        }
        it->node = node;
    }
    return net.with_facilities(std::move(facilities));
}

struct SweepGrid {
    std::vector<double> x1;
    std::vector<double> x2;
    std::vector<double> x3;
};

struct SweepPoint {
    std::size_t index = 0;
    std::array<std::size_t, 3> coords{};
    double x1 = 1.0;
    double x2 = 1.0;
    double x3 = 0.3;
};

/// Cartesian product of the sweep lists, x1 slowest. An empty list stands
/// for the single value already in `base`.
inline std::vector<SweepPoint> expand_sweep(const SweepGrid& grid, const SimConfig& base)
{
    auto or_default = [](const std::vector<double>& v, double d) { return v.empty() ? std::vector<double>{d} : v; };
    const auto x1 = or_default(grid.x1, base.x1);
    const auto x2 = or_default(grid.x2, base.x2);
    const auto x3 = or_default(grid.x3, base.walk_willing_share());
    std::vector<SweepPoint> out;
    for (std::size_t i = 0; i < x1.size(); ++i) {
        for (std::size_t j = 0; j < x2.size(); ++j) {
            for (std::size_t k = 0; k < x3.size(); ++k) {
                out.push_back({out.size(), {i, j, k}, x1[i], x2[j], x3[k]});
            }
        }
    }
    return out;
}

struct Experiment {
    std::array<Scenario, 2> scenarios; // baseline, relocation
    int replicates = 40;
    std::uint64_t base_seed = 1;
    SweepGrid sweep;
    int population = 746;

    void validate(const RoadNetwork& net) const
    {
        if (replicates < 2) {
            throw Error(ErrorCode::InvalidInput, "replicates must be >= 2");
        }
        if (population <= 0) {
            throw Error(ErrorCode::InvalidInput, "population must be > 0");
        }
        if (scenarios[0].name == scenarios[1].name) {
            throw Error(ErrorCode::InvalidInput, "scenario names must differ");
        }
        for (const auto& s : scenarios) {
            apply_scenario(net, s);
        }
        for (double x : sweep.x3) {
            if (!(x >= 0.0 && x <= 1.0)) {
                throw Error(ErrorCode::InvalidInput, "sweep x3 values must be in [0,1]");
            }
        }
        for (const auto* v : {&sweep.x1, &sweep.x2}) {
            for (double x : *v) {
                if (!(x >= 0.0)) {
                    throw Error(ErrorCode::InvalidInput, "sweep income multipliers must be >= 0");
                }
            }
        }
    }
};

/// One scenario run within a replicate; the unit of statistical analysis.
struct ReplicateRecord {
    std::string scenario;
    int scenario_index = 0;
    int replicate = 0;
    SweepPoint sweep;
    std::uint64_t seed = 0;
    double effort = 0.0;
    double overwhelmed = 0.0;
    double walkability = 0.0;
    double unmet_hours = 0.0;
    std::array<std::optional<GroupKpi>, kStageCount> stages;
    StageMicro micro;
    std::map<int, GroupKpi> clusters;
};

/// Seed shared by both scenarios of replicate `r` at a sweep point.
inline std::uint64_t replicate_seed(std::uint64_t base_seed, int replicate, const SweepPoint& p)
{
    return derive_seed(base_seed, {static_cast<std::uint64_t>(replicate), p.coords[0], p.coords[1], p.coords[2]});
}

/// Streams derived from a replicate seed.
inline std::uint64_t population_seed(std::uint64_t seed) { return derive_seed(seed, {1}); }
inline std::uint64_t homes_seed(std::uint64_t seed) { return derive_seed(seed, {2}); }
inline std::uint64_t engine_seed(std::uint64_t seed) { return derive_seed(seed, {3}); }

/// Population synthesised, housed and paired for one replicate seed, plus
/// the network carrying its dwelling flags.
struct ReplicatePopulation {
    Population population;
    RoadNetwork network;
};

inline ReplicatePopulation prepare_population(const RoadNetwork& net, const DemographicMarginals& marginals,
                                              const SimConfig& cfg, int n, std::uint64_t seed)
{
    auto pop = synthesize(marginals, cfg.stages, n, population_seed(seed), cfg.demography);
    auto dwellings = assign_homes(pop, net.dwellings(), homes_seed(seed), cfg.demography.age_gold);
    auto housed = net.with_dwellings(std::move(dwellings));
    form_dyads(pop, housed);
    return {std::move(pop), std::move(housed)};
}

inline ReplicateRecord make_record(const Scenario& sc, int scenario_index, int replicate, const SweepPoint& p,
                                   std::uint64_t seed, const RunResult& r)
{
    ReplicateRecord rec;
    rec.scenario = sc.name;
    rec.scenario_index = scenario_index;
    rec.replicate = replicate;
    rec.sweep = p;
    rec.seed = seed;
    rec.effort = r.summary.effort;
    rec.overwhelmed = r.summary.overwhelmed;
    rec.walkability = r.summary.walkability;
    rec.unmet_hours = r.summary.unmet_hours;
    rec.stages = r.summary.stages;
    rec.micro = r.micro;
    rec.clusters = r.summary.clusters;
    return rec;
}

/// Hook for per-day output: called once per (sweep, replicate, scenario).
using DayRecordSink = std::function<void(const ReplicateRecord&, const std::vector<DayRecord>&)>;

/// Runs every (sweep point, replicate) cell. Within a cell the population and
/// every stochastic stream are shared by both scenarios (common random
/// numbers). Records come out ordered by sweep point, replicate, scenario,
/// independent of `jobs`.
inline std::vector<ReplicateRecord> run_experiment(const RoadNetwork& net, const DemographicMarginals& marginals,
                                                   const Experiment& exp, const SimConfig& cfg, unsigned jobs = 1,
                                                   const DayRecordSink& sink = {})
{
    cfg.validate();
    exp.validate(net);
    const auto points = expand_sweep(exp.sweep, cfg);
    const auto reps = static_cast<std::size_t>(exp.replicates);
    const std::size_t cells = points.size() * reps;
    std::vector<ReplicateRecord> out(cells * 2);
    std::vector<std::vector<DayRecord>> days(sink ? cells * 2 : 0);

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&] {
        while (true) {
            const std::size_t cell = next.fetch_add(1);
            if (cell >= cells) {
                return;
            }
            {
                std::lock_guard lock(failure_mutex);
                if (failure) {
                    return;
                }
            }
            const auto& point = points[cell / reps];
            const int r = static_cast<int>(cell % reps);
            int stage_scenario = -1;
            try {
                const auto seed = replicate_seed(exp.base_seed, r, point);
                SimConfig run_cfg = cfg;
                run_cfg.x1 = point.x1;
                run_cfg.x2 = point.x2;
                run_cfg.x3 = point.x3;
                run_cfg.seed = engine_seed(seed);
                auto prepared = prepare_population(net, marginals, run_cfg, exp.population, seed);
                for (int s = 0; s < 2; ++s) {
                    stage_scenario = s;
                    const auto scenario_net = apply_scenario(prepared.network, exp.scenarios[static_cast<std::size_t>(s)]);
                    auto result = run(scenario_net, prepared.population, run_cfg);
                    const auto slot = cell * 2 + static_cast<std::size_t>(s);
                    out[slot] = make_record(exp.scenarios[static_cast<std::size_t>(s)], s, r, point, seed, result);
                    if (sink) {
                        days[slot] = std::move(result.days);
                    }
                }
            }
            catch (const Error& e) {
                const std::string where = stage_scenario >= 0
                                              ? "scenario '" + exp.scenarios[static_cast<std::size_t>(stage_scenario)].name + "'"
                                              : std::string("population");
                std::lock_guard lock(failure_mutex);
                if (!failure) {
                    failure = std::make_exception_ptr(Error(e.code(), where + ", replicate " + std::to_string(r) +
                                                                          ", sweep point " +
                                                                          std::to_string(point.index) + ": " + e.what()));
                }
            }
            catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
            }
        }
    };

    const unsigned n_threads = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(cells)));
    if (n_threads == 1) {
        worker();
    }
    else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < n_threads; ++t) {
            pool.emplace_back(worker);
        }
        for (auto& t : pool) {
            t.join();
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
    if (sink) {
        for (std::size_t i = 0; i < out.size(); ++i) {
            sink(out[i], days[i]);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// replicates.csv

inline constexpr std::array<const char*, 6> kStageColumns = {"patient_days", "effort",      "unmet_hours",
                                                             "detour_ratio", "walkability", "proximity"};
inline constexpr std::array<const char*, 5> kClusterColumns = {"patient_days", "effort", "overwhelmed",
                                                               "walkability", "unmet_hours"};
inline constexpr std::array<const char*, 12> kBaseColumns = {
    "scenario_index", "scenario", "replicate", "sweep_index", "x1",          "x2",
    "x3",             "seed",     "effort",    "overwhelmed", "walkability", "unmet_hours"};

inline std::vector<std::string> replicate_header(int n_clusters)
{
    std::vector<std::string> h(kBaseColumns.begin(), kBaseColumns.end());
    for (int s = 0; s < kStageCount; ++s) {
        for (auto c : kStageColumns) {
            h.push_back("stage" + std::to_string(s) + "_" + c);
        }
    }
    for (int k = 0; k < n_clusters; ++k) {
        for (auto c : kClusterColumns) {
            h.push_back("cluster" + std::to_string(k) + "_" + c);
        }
    }
    return h;
}

inline void write_replicates(std::ostream& os, const std::vector<ReplicateRecord>& records)
{
    int n_clusters = 0;
    for (const auto& r : records) {
        if (!r.clusters.empty()) {
            n_clusters = std::max(n_clusters, r.clusters.rbegin()->first + 1);
        }
    }
    csv::Writer w(os);
    w.header(replicate_header(n_clusters));
    const double nan = std::nan("");
    for (const auto& r : records) {
        w.field(r.scenario_index).field(r.scenario).field(r.replicate).field(r.sweep.index);
        w.field(r.sweep.x1).field(r.sweep.x2).field(r.sweep.x3).field(static_cast<std::size_t>(r.seed));
        w.field(r.effort).field(r.overwhelmed).field(r.walkability).field(r.unmet_hours);
        for (std::size_t s = 0; s < kStageCount; ++s) {
            const auto& k = r.stages[s];
            const auto& m = r.micro[s];
            w.field(k ? k->patient_days : 0.0);
            w.field(k ? k->effort : nan).field(k ? k->unmet_hours : nan);
            w.field(m ? m->detour_ratio : nan).field(m ? m->walkability : nan).field(m ? m->household_proximity : nan);
        }
        for (int c = 0; c < n_clusters; ++c) {
            auto it = r.clusters.find(c);
            if (it == r.clusters.end()) {
                w.field(0.0).field(nan).field(nan).field(nan).field(nan);
            }
            else {
                const auto& k = it->second;
                w.field(k.patient_days).field(k.effort).field(k.overwhelmed).field(k.walkability).field(k.unmet_hours);
            }
        }
        w.end_row();
    }
}

/// Parses replicates.csv. The header must match the writer's column order
/// exactly for the cluster count it declares.
inline std::vector<ReplicateRecord> read_replicates(const csv::Table& t)
{
    int n_clusters = 0;
    while (t.has_column("cluster" + std::to_string(n_clusters) + "_patient_days")) {
        ++n_clusters;
    }
    if (t.header() != replicate_header(n_clusters)) {
        throw Error(ErrorCode::InvalidInput, t.source() + ":1: header does not match the replicates schema");
    }
    std::vector<ReplicateRecord> out;
    for (const auto& row : t.rows()) {
        ReplicateRecord r;
        r.scenario_index = static_cast<int>(t.integer(row, "scenario_index"));
        if (r.scenario_index != 0 && r.scenario_index != 1) {
            throw Error(ErrorCode::InvalidInput, t.where(row) + ": scenario_index must be 0 or 1");
        }
        r.scenario = t.cell(row, "scenario");
        r.replicate = static_cast<int>(t.integer(row, "replicate"));
        r.sweep.index = static_cast<std::size_t>(t.integer(row, "sweep_index"));
        r.sweep.x1 = t.number(row, "x1");
        r.sweep.x2 = t.number(row, "x2");
        r.sweep.x3 = t.number(row, "x3");
        r.seed = t.unsigned_integer(row, "seed");
        r.effort = t.number(row, "effort");
        r.overwhelmed = t.number(row, "overwhelmed");
        r.walkability = t.number(row, "walkability");
        r.unmet_hours = t.number(row, "unmet_hours");
        for (int s = 0; s < kStageCount; ++s) {
            const std::string p = "stage" + std::to_string(s) + "_";
            const double days = t.number(row, p + "patient_days");
            if (days > 0) {
                GroupKpi k;
                k.patient_days = days;
                k.effort = t.optional_number(row, p + "effort");
                k.unmet_hours = t.number(row, p + "unmet_hours");
                r.stages[static_cast<std::size_t>(s)] = k;
            }
            if (!t.cell(row, p + "walkability").empty()) {
                MicroConditions m;
                m.detour_ratio = t.optional_number(row, p + "detour_ratio");
                m.walkability = t.number(row, p + "walkability");
                m.household_proximity = t.number(row, p + "proximity");
                r.micro[static_cast<std::size_t>(s)] = m;
            }
        }
        for (int c = 0; c < n_clusters; ++c) {
            const std::string p = "cluster" + std::to_string(c) + "_";
            const double days = t.number(row, p + "patient_days");
            if (days > 0) {
                GroupKpi k;
                k.patient_days = days;
                k.effort = t.optional_number(row, p + "effort");
                k.overwhelmed = t.number(row, p + "overwhelmed");
                k.walkability = t.number(row, p + "walkability");
                k.unmet_hours = t.number(row, p + "unmet_hours");
                r.clusters[c] = k;
            }
        }
        out.push_back(std::move(r));
    }
    return out;
}

} // namespace caresim
