#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "caresim/config.hpp"
#include "caresim/scenarios.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace caresim;
using oracle::edge;

namespace {

const ProjectConfig& mountain_cfg()
{
    static const ProjectConfig cfg = load_config(support::mountain_config().string());
    return cfg;
}

const RoadNetwork& mountain_net()
{
    static const RoadNetwork net = load_network(mountain_cfg());
    return net;
}

Experiment small_experiment(int replicates)
{
    auto exp = mountain_cfg().experiment;
    exp.replicates = replicates;
    return exp;
}

std::string as_csv(const std::vector<ReplicateRecord>& records)
{
    std::ostringstream ss;
    write_replicates(ss, records);
    return ss.str();
}

RoadNetwork triangle()
{
    return RoadNetwork({{0, 0, 0, 0}, {1, 100, 0, 0}, {2, 0, 100, 0}},
                       {edge(0, 1, 100.0), edge(1, 2, 150.0), edge(0, 2, 100.0)}, {},
                       {{0, 0, 0, true}, {1, 2, 1, false}});
}

} // namespace

TEST(ApplyScenario, EmptyMovesIsIdentity)
{
    const auto net = triangle();
    const auto out = apply_scenario(net, {"same", {}});
    ASSERT_EQ(out.facilities().size(), net.facilities().size());
    for (std::size_t i = 0; i < out.facilities().size(); ++i) {
        EXPECT_EQ(out.facilities()[i].node, net.facilities()[i].node);
        EXPECT_EQ(out.facilities()[i].kind, net.facilities()[i].kind);
    }
    EXPECT_EQ(out.edges().size(), net.edges().size());
}

TEST(ApplyScenario, MoveFacilityLeavesOriginalUntouched)
{
    const auto net = triangle();
    const auto moved = apply_scenario(net, {"move", {{0, 2}}});
    EXPECT_EQ(moved.facility(0)->node, 2);
    EXPECT_EQ(net.facility(0)->node, 0);
    EXPECT_EQ(moved.facilities().size(), 2u);
    EXPECT_EQ(*essential_detour_ratio(moved, 2), 1.0);
    EXPECT_EQ(shortest_path(moved, 2, moved.facility(0)->node, Mode::walk).length, 0.0);
}

TEST(ApplyScenario, Errors)
{
    const auto net = triangle();
    auto code = [&](const Scenario& s) {
        try {
            apply_scenario(net, s);
        }
        catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::InvalidInput;
    };
    EXPECT_EQ(code({"x", {{7, 1}}}), ErrorCode::UnknownFacility);
    EXPECT_EQ(code({"x", {{0, 42}}}), ErrorCode::UnknownNode);
}

TEST(ApplyScenario, UphillRelocationRaisesDetours)
{
    const auto& net = mountain_net();
    const auto& sc = mountain_cfg().experiment.scenarios;
    const auto moved = apply_scenario(net, sc[1]);
    // recompute from paths: only the ambulatory is essential
    auto mean_detour = [](const RoadNetwork& n) {
        const NodeId target = n.facility(0)->node;
        double sum = 0.0;
        int count = 0;
        for (const auto& d : n.dwellings()) {
            const double chord = straight_line(n, d.node, target);
            sum += chord == 0.0 ? 1.0 : shortest_path(n, d.node, target, Mode::walk).length / chord;
            ++count;
        }
        return sum / count;
    };
    const double before = mean_detour(net);
    const double after = mean_detour(moved);
    EXPECT_GT(after, before);
    double lib_before = 0.0, lib_after = 0.0;
    for (const auto& d : net.dwellings()) {
        lib_before += *essential_detour_ratio(net, d.node);
        lib_after += *essential_detour_ratio(moved, d.node);
    }
    const double n = static_cast<double>(net.dwellings().size());
    EXPECT_NEAR(lib_before / n, before, 1e-12);
    EXPECT_NEAR(lib_after / n, after, 1e-12);
}

TEST(Sweep, CartesianOrder)
{
    SimConfig base;
    SweepGrid g{{1.0, 2.0}, {}, {0.1, 0.2, 0.3}};
    const auto pts = expand_sweep(g, base);
    ASSERT_EQ(pts.size(), 6u);
    EXPECT_EQ(pts[0].x1, 1.0);
    EXPECT_EQ(pts[0].x3, 0.1);
    EXPECT_EQ(pts[2].x3, 0.3);
    EXPECT_EQ(pts[3].x1, 2.0);
    EXPECT_EQ(pts[5].index, 5u);
    EXPECT_EQ(pts[5].x2, 1.0);
    const auto one = expand_sweep({}, base);
    ASSERT_EQ(one.size(), 1u);
    EXPECT_EQ(one[0].x3, 0.3);
}

TEST(ReplicateSeed, SharedAcrossScenariosDistinctAcrossReplicates)
{
    SweepPoint p;
    std::set<std::uint64_t> seen;
    for (int r = 0; r < 100; ++r) {
        EXPECT_TRUE(seen.insert(replicate_seed(7, r, p)).second);
    }
    SweepPoint q = p;
    q.coords = {0, 0, 1};
    EXPECT_NE(replicate_seed(7, 0, p), replicate_seed(7, 0, q));
    EXPECT_NE(replicate_seed(7, 0, p), replicate_seed(8, 0, p));
}

TEST(RunExperiment, RecordCountAndOrder)
{
    auto exp = small_experiment(2);
    auto records = run_experiment(mountain_net(), mountain_cfg().marginals, exp, mountain_cfg().sim);
    ASSERT_EQ(records.size(), 4u);
    EXPECT_EQ(records[0].scenario, "baseline");
    EXPECT_EQ(records[1].scenario, "relocation");
    EXPECT_EQ(records[0].replicate, 0);
    EXPECT_EQ(records[2].replicate, 1);
    EXPECT_EQ(records[0].seed, records[1].seed);
    EXPECT_NE(records[0].seed, records[2].seed);

    exp.sweep.x1 = {1.0, 1.5};
    exp.sweep.x3 = {0.2, 0.3};
    records = run_experiment(mountain_net(), mountain_cfg().marginals, exp, mountain_cfg().sim);
    ASSERT_EQ(records.size(), 16u);
    std::set<std::tuple<std::size_t, int, int>> keys;
    for (const auto& r : records) {
        EXPECT_TRUE(keys.insert({r.sweep.index, r.replicate, r.scenario_index}).second);
    }
    EXPECT_EQ(records[15].sweep.index, 3u);
    EXPECT_EQ(records[15].sweep.x1, 1.5);
}

TEST(RunExperiment, IdenticalScenariosGiveZeroDifferences)
{
    auto exp = small_experiment(40);
    exp.scenarios[1] = {"copy", {}};
    const auto records = run_experiment(mountain_net(), mountain_cfg().marginals, exp, mountain_cfg().sim);
    ASSERT_EQ(records.size(), 80u);
    for (std::size_t i = 0; i < records.size(); i += 2) {
        const auto& a = records[i];
        const auto& b = records[i + 1];
        EXPECT_EQ(b.effort - a.effort, 0.0);
        EXPECT_EQ(b.overwhelmed - a.overwhelmed, 0.0);
        EXPECT_EQ(b.walkability - a.walkability, 0.0);
        EXPECT_EQ(b.unmet_hours - a.unmet_hours, 0.0);
    }
}

TEST(RunExperiment, JobsAndRerunsAreByteIdentical)
{
    const auto exp = small_experiment(6);
    const auto& cfg = mountain_cfg();
    const auto one = as_csv(run_experiment(mountain_net(), cfg.marginals, exp, cfg.sim, 1));
    const auto four = as_csv(run_experiment(mountain_net(), cfg.marginals, exp, cfg.sim, 4));
    const auto again = as_csv(run_experiment(mountain_net(), cfg.marginals, exp, cfg.sim, 1));
    EXPECT_EQ(one, four);
    EXPECT_EQ(one, again);
}

TEST(RunExperiment, RelocationRaisesUnmetHours)
{
    const auto exp = small_experiment(10);
    const auto& cfg = mountain_cfg();
    const auto records = run_experiment(mountain_net(), cfg.marginals, exp, cfg.sim);
    double s1 = 0.0, s2 = 0.0;
    for (const auto& r : records) {
        (r.scenario_index == 0 ? s1 : s2) += r.unmet_hours;
    }
    EXPECT_GT(s2, s1);
}

TEST(RunExperiment, SinkSeesEveryRunInOrder)
{
    const auto exp = small_experiment(3);
    const auto& cfg = mountain_cfg();
    std::vector<std::pair<int, int>> seen;
    std::vector<std::vector<DayRecord>> logs;
    DayRecordSink sink = [&](const ReplicateRecord& r, const std::vector<DayRecord>& days) {
        seen.emplace_back(r.replicate, r.scenario_index);
        logs.push_back(days);
    };
    run_experiment(mountain_net(), cfg.marginals, exp, cfg.sim, 2, sink);
    ASSERT_EQ(seen.size(), 6u);
    EXPECT_EQ(seen[3], std::make_pair(1, 1));
    // same population in both scenarios: same needs on day one
    for (std::size_t k = 0; k < logs.size(); k += 2) {
        ASSERT_EQ(logs[k].size(), 56u);
        ASSERT_EQ(logs[k][0].patients.size(), logs[k + 1][0].patients.size());
        for (std::size_t i = 0; i < logs[k][0].patients.size(); ++i) {
            EXPECT_EQ(logs[k][0].patients[i].need, logs[k + 1][0].patients[i].need);
        }
    }
}

TEST(RunExperiment, ValidationErrors)
{
    const auto& cfg = mountain_cfg();
    auto exp = small_experiment(1);
    EXPECT_THROW(run_experiment(mountain_net(), cfg.marginals, exp, cfg.sim), Error);
    exp = small_experiment(2);
    exp.scenarios[1].moves = {{99, 0}};
    try {
        run_experiment(mountain_net(), cfg.marginals, exp, cfg.sim);
        FAIL();
    }
    catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::UnknownFacility);
    }
    exp = small_experiment(2);
    exp.scenarios[1].name = exp.scenarios[0].name;
    EXPECT_THROW(run_experiment(mountain_net(), cfg.marginals, exp, cfg.sim), Error);
}

TEST(ReplicatesCsv, RoundTripIsByteIdentical)
{
    const auto exp = small_experiment(4);
    const auto& cfg = mountain_cfg();
    const auto records = run_experiment(mountain_net(), cfg.marginals, exp, cfg.sim);
    const auto text = as_csv(records);
    const auto back = read_replicates(csv::Table::parse(text, "replicates.csv"));
    ASSERT_EQ(back.size(), records.size());
    EXPECT_EQ(as_csv(back), text);
    EXPECT_EQ(back[3].effort, records[3].effort);
    EXPECT_EQ(back[3].seed, records[3].seed);
    EXPECT_EQ(back[1].clusters.size(), records[1].clusters.size());

    auto broken = text;
    broken.replace(0, std::string("scenario_index").size(), "scenario_idx");
    EXPECT_THROW(read_replicates(csv::Table::parse(broken, "replicates.csv")), Error);
}
