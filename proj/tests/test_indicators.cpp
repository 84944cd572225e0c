#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "caresim/indicators.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace caresim;
using fixtures::decorate;
using fixtures::plaza;
using oracle::edge;

namespace {

Edge plain(NodeId u, NodeId v, double len, double slope, double surface, double width, double safety)
{
    return edge(u, v, len, slope, surface, width, safety);
}

RoadNetwork without_unsafe_edges(const RoadNetwork& net, const IndicatorConfig& cfg)
{
    std::vector<Edge> keep;
    for (const auto& e : net.edges()) {
        if (infrastructure_suitability(e, cfg) >= cfg.s_min) {
            keep.push_back(e);
        }
    }
    return RoadNetwork(net.nodes(), keep, {}, net.facilities());
}

double brute_time(const RoadNetwork& net, NodeId a, NodeId b)
{
    auto p = oracle::brute_force_path(net, a, b, Mode::walk);
    return p ? p->time : kInf;
}

} // namespace

// ---------------------------------------------------------------------------
// route efficiency

TEST(RouteEfficiency, DetourOverChord)
{
    // chord 100 m, walking path 150 m via node 2
    RoadNetwork net({{0, 0, 0, 0}, {1, 100, 0, 0}, {2, 50, 40, 0}}, {edge(0, 2, 75.0), edge(2, 1, 75.0)});
    EXPECT_DOUBLE_EQ(route_efficiency(net, 0, 1), 1.5);
}

TEST(RouteEfficiency, StraightEdgeIsOne)
{
    RoadNetwork net({{0, 0, 0, 0}, {1, 30, 40, 0}}, {edge(0, 1, 50.0)});
    EXPECT_DOUBLE_EQ(route_efficiency(net, 0, 1), 1.0);
}

TEST(RouteEfficiency, Errors)
{
    RoadNetwork net({{0, 0, 0, 0}, {1, 0, 0, 0}, {2, 10, 0, 0}}, {edge(0, 1, 10.0)});
    auto code = [&](NodeId a, NodeId b) {
        try {
            route_efficiency(net, a, b);
        }
        catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::InvalidInput;
    };
    EXPECT_EQ(code(0, 1), ErrorCode::DegenerateGeometry);
    EXPECT_EQ(code(0, 0), ErrorCode::DegenerateGeometry);
    EXPECT_EQ(code(0, 2), ErrorCode::NoRoute);
}

TEST(RouteEfficiency, FiveNodeDetourMatchesEnumeration)
{
    // pentagon-ish fixture with a slow shortcut over a steep edge
    std::vector<Node> nodes = {{0, 0, 0, 0}, {1, 100, 0, 0}, {2, 200, 0, 0}, {3, 100, 120, 0}, {4, 100, -90, 0}};
    std::vector<Edge> edges = {edge(0, 3, 160.0), edge(3, 2, 160.0), edge(0, 4, 140.0), edge(4, 2, 140.0),
                               edge(0, 1, 100.0, 0.6), edge(1, 2, 100.0, -0.6)};
    RoadNetwork net(nodes, edges);
    for (NodeId a = 0; a < 5; ++a) {
        for (NodeId b = 0; b < 5; ++b) {
            if (a == b) {
                continue;
            }
            const auto p = oracle::brute_force_path(net, a, b, Mode::walk);
            ASSERT_TRUE(p);
            const double chord = std::hypot(nodes[a].x - nodes[b].x, nodes[a].y - nodes[b].y);
            EXPECT_NEAR(route_efficiency(net, a, b), p->length / chord, 1e-12) << a << "->" << b;
        }
    }
    // the steep straight line is slower than the southern detour
    EXPECT_NEAR(route_efficiency(net, 0, 2), 280.0 / 200.0, 1e-12);
}

TEST(RouteEfficiency, NeverBelowOneOnGeometricGraphs)
{
    std::mt19937_64 gen(21);
    for (int g = 0; g < 40; ++g) {
        const auto net = oracle::geometric_graph(gen, 10);
        for (const auto& a : net.nodes()) {
            for (const auto& b : net.nodes()) {
                if (a.id != b.id && straight_line(net, a.id, b.id) > 0.0) {
                    EXPECT_GE(route_efficiency(net, a.id, b.id), 1.0 - 1e-9);
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// service accessibility

TEST(ServiceAccessibility, NothingReachable)
{
    RoadNetwork net({{0, 0, 0, 0}, {1, 5000, 0, 0}}, {edge(0, 1, 5000.0)}, {}, {{1, 0, 1, true}});
    EXPECT_EQ(service_accessibility(net, 0, {}), 0.0);
}

TEST(ServiceAccessibility, AllKinds)
{
    EXPECT_EQ(service_accessibility(plaza(), 0, {}), 1.0);
    EXPECT_EQ(service_accessibility(plaza(), 1, {}), 1.0);
}

TEST(ServiceAccessibility, TwoOfFive)
{
    RoadNetwork net({{0, 0, 0, 0}, {1, 100, 0, 0}, {2, 5000, 0, 0}}, {edge(0, 1, 100.0), edge(1, 2, 4900.0)}, {},
                    {{1, 0, 1, true}, {2, 3, 0, false}, {3, 1, 2, false}, {4, 2, 2, false}, {5, 4, 2, false}});
    EXPECT_DOUBLE_EQ(service_accessibility(net, 0, {}), 0.4);
}

TEST(ServiceAccessibility, KindWeights)
{
    IndicatorConfig cfg;
    cfg.kind_weights = {0.5, 0.1, 0.1, 0.1, 0.2};
    RoadNetwork net({{0, 0, 0, 0}}, {}, {}, {{1, 0, 0, true}, {2, 4, 0, false}});
    EXPECT_DOUBLE_EQ(service_accessibility(net, 0, cfg), 0.7);
    cfg.kind_weights = {1.0};
    EXPECT_THROW(service_accessibility(net, 0, cfg), Error);
}

TEST(ServiceAccessibility, RangeBoundaryIsInclusive)
{
    // 1000 m flat = 15 minutes exactly
    RoadNetwork net({{0, 0, 0, 0}, {1, 1000, 0, 0}}, {edge(0, 1, 1000.0)}, {}, {{1, 2, 1, false}});
    EXPECT_DOUBLE_EQ(service_accessibility(net, 0, {}), 0.2);
    IndicatorConfig cfg;
    cfg.walk_range_minutes = 14.999;
    EXPECT_DOUBLE_EQ(service_accessibility(net, 0, cfg), 0.0);
}

// ---------------------------------------------------------------------------
// residential proximity

TEST(ResidentialProximity, Examples)
{
    std::vector<Node> nodes = {{0, 0, 0, 0}, {1, 100, 0, 0}, {2, 200, 0, 0}, {3, 800, 0, 0}};
    std::vector<Edge> edges = {edge(0, 1, 100.0), edge(1, 2, 100.0), edge(2, 3, 600.0)};
    RoadNetwork empty(nodes, edges, {{1, 3, true, false}});
    EXPECT_EQ(residential_proximity(empty, 0, {}), 0.0);

    RoadNetwork three(nodes, edges, {{1, 0, true, false}, {2, 1, true, true}, {3, 2, true, false},
                                     {4, 2, false, true}, {5, 3, true, true}});
    EXPECT_EQ(residential_proximity(three, 0, {}), 3.0);
    IndicatorConfig cfg;
    cfg.gamma_vuln = 0.5;
    EXPECT_EQ(residential_proximity(three, 0, cfg), 3.5);
}

TEST(ResidentialProximity, GammaZeroEqualsInhabitedCount)
{
    std::mt19937_64 gen(8);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int g = 0; g < 30; ++g) {
        const auto base = oracle::geometric_graph(gen, 10);
        std::vector<Dwelling> dw;
        for (int d = 0; d < 15; ++d) {
            dw.push_back({d, base.nodes()[gen() % 10].id, unit(gen) < 0.8, unit(gen) < 0.4});
        }
        const auto net = base.with_dwellings(dw);
        for (const auto& n : net.nodes()) {
            double count = 0.0;
            for (const auto& d : dw) {
                if (d.inhabited && shortest_path(net, n.id, d.node, Mode::walk).length <= 300.0) {
                    count += 1.0;
                }
            }
            EXPECT_EQ(residential_proximity(net, n.id, {}), count);
        }
    }
}

// ---------------------------------------------------------------------------
// infrastructure suitability

TEST(InfrastructureSuitability, Examples)
{
    IndicatorConfig cfg;
    EXPECT_DOUBLE_EQ(infrastructure_suitability(plain(0, 1, 1, 0.0, 1, 2, 1), cfg), 1.0);
    // slope at the cutoff: the 0.3 slope weight drops out entirely
    EXPECT_DOUBLE_EQ(infrastructure_suitability(plain(0, 1, 1, 0.15, 1, 2, 1), cfg), 0.7);
    Edge zero = plain(0, 1, 1, 0.15, 0, 0, 0);
    EXPECT_DOUBLE_EQ(infrastructure_suitability(zero, cfg), 0.0);
    zero.slope = -0.4;
    EXPECT_DOUBLE_EQ(infrastructure_suitability(zero, cfg), 0.0);
}

TEST(InfrastructureSuitability, Monotone)
{
    std::mt19937_64 gen(4);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    IndicatorConfig cfg;
    for (int i = 0; i < 1000; ++i) {
        Edge e = plain(0, 1, 10, (unit(gen) - 0.5) * 0.6, unit(gen), 3 * unit(gen), unit(gen));
        const double s = infrastructure_suitability(e, cfg);
        EXPECT_GE(s, 0.0);
        EXPECT_LE(s, 1.0 + 1e-12);
        Edge steeper = e;
        steeper.slope = std::copysign(std::abs(e.slope) + 0.05 * unit(gen), e.slope);
        EXPECT_LE(infrastructure_suitability(steeper, cfg), s);
        Edge better = e;
        better.surface = std::min(1.0, e.surface + 0.1);
        better.width = e.width + 0.3;
        better.safety = std::min(1.0, e.safety + 0.1);
        EXPECT_GE(infrastructure_suitability(better, cfg), s);
    }
}

// ---------------------------------------------------------------------------
// overall service access

TEST(OverallServiceAccess, AllAdjacentOverPerfectEdges)
{
    const auto net = plaza();
    EXPECT_EQ(overall_service_access(net, {0, 1, 2, 3}, {}), 1.0);
}

TEST(OverallServiceAccess, NoEssentialFacilities)
{
    RoadNetwork net({{0, 0, 0, 0}, {1, 100, 0, 0}}, {edge(0, 1, 100.0)}, {}, {{1, 0, 1, false}});
    EXPECT_EQ(overall_service_access(net, {0, 1}, {}), 0.0);
}

TEST(OverallServiceAccess, EmptyPopulation)
{
    try {
        overall_service_access(plaza(), {}, {});
        FAIL();
    }
    catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::EmptyPopulation);
    }
}

TEST(OverallServiceAccess, UnsafeShortcutIsAvoided)
{
    // 0 - 1 is short but unsafe; 0 - 2 - 1 is safe and within range
    RoadNetwork net({{0, 0, 0, 0}, {1, 100, 0, 0}, {2, 50, 300, 0}},
                    {plain(0, 1, 100, 0, 0, 0, 0), edge(0, 2, 350.0), edge(2, 1, 350.0)}, {}, {{1, 0, 1, true}});
    EXPECT_TRUE(has_safe_essential_access(net, 0, {}));
    IndicatorConfig tight;
    tight.walk_range_minutes = 10.0;
    EXPECT_FALSE(has_safe_essential_access(net, 0, tight));
    EXPECT_EQ(overall_service_access(net, {0, 1, 0, 0}, tight), 0.25);
}

TEST(OverallServiceAccess, MatchesSafeSubgraphEnumeration)
{
    std::mt19937_64 gen(13);
    for (int g = 0; g < 60; ++g) {
        const auto net = decorate(gen, oracle::geometric_graph(gen, 8), 3);
        IndicatorConfig cfg;
        cfg.walk_range_minutes = 2.0 + static_cast<double>(gen() % 8);
        const auto safe = without_unsafe_edges(net, cfg);
        std::vector<NodeId> residents;
        std::size_t served = 0;
        for (const auto& n : net.nodes()) {
            for (int copies = 0; copies < 1 + static_cast<int>(n.id % 2); ++copies) {
                residents.push_back(n.id);
                bool ok = false;
                for (const auto& f : net.facilities()) {
                    ok = ok || (f.essential && brute_time(safe, n.id, f.node) <= cfg.walk_range_minutes);
                }
                served += ok ? 1 : 0;
            }
        }
        EXPECT_DOUBLE_EQ(overall_service_access(net, residents, cfg),
                         static_cast<double>(served) / static_cast<double>(residents.size()));
    }
}

// ---------------------------------------------------------------------------
// walkability

TEST(Walkability, IsolatedNodeScoresZero)
{
    RoadNetwork net({{0, 0, 0, 0}}, {});
    EXPECT_EQ(walkability_index(net, 0, {}), 0.0);
}

TEST(Walkability, IdealPlazaScoresHundred)
{
    EXPECT_DOUBLE_EQ(walkability_index(plaza(), 0, {}), 100.0);
}

TEST(Walkability, GridTownMatchesTermByTermRecomputation)
{
    // 5x5 grid, 80 m blocks, one hilly column and a few rough streets
    std::vector<Node> nodes;
    std::vector<Edge> edges;
    auto id = [](int i, int j) { return static_cast<NodeId>(100 + 10 * j + i); };
    for (int j = 0; j < 5; ++j) {
        for (int i = 0; i < 5; ++i) {
            nodes.push_back({id(i, j), i * 80.0, j * 80.0, 0.0});
        }
    }
    for (int j = 0; j < 5; ++j) {
        for (int i = 0; i < 5; ++i) {
            if (i + 1 < 5) {
                edges.push_back(plain(id(i, j), id(i + 1, j), 80.0, 0.0, i == 2 ? 0.3 : 0.9, 2.5, 0.8));
            }
            if (j + 1 < 5) {
                edges.push_back(plain(id(i, j), id(i, j + 1), 80.0, i == 4 ? 0.12 : 0.0, 0.7, 1.0 + 0.2 * i, 0.6));
            }
        }
    }
    std::vector<Facility> fac = {{1, 0, id(4, 4), true}, {2, 1, id(0, 0), false}, {3, 2, id(2, 3), false},
                                 {4, 3, id(3, 1), false}, {5, 3, id(1, 4), false}};
    RoadNetwork net(nodes, edges, {}, fac);

    IndicatorConfig cfg;
    cfg.walk_range_minutes = 4.5;
    for (const auto& origin : net.nodes()) {
        // service term
        std::vector<double> time(nodes.size());
        for (std::size_t k = 0; k < nodes.size(); ++k) {
            time[k] = shortest_path(net, origin.id, nodes[k].id, Mode::walk).travel_time;
        }
        auto time_of = [&](NodeId n) {
            for (std::size_t k = 0; k < nodes.size(); ++k) {
                if (nodes[k].id == n) {
                    return time[k];
                }
            }
            return kInf;
        };
        std::set<int> kinds;
        for (const auto& f : fac) {
            if (time_of(f.node) <= cfg.walk_range_minutes) {
                kinds.insert(f.kind);
            }
        }
        const double service = static_cast<double>(kinds.size()) / 5.0;

        // infrastructure term
        double sum = 0.0;
        int count = 0;
        for (const auto& e : edges) {
            if (time_of(e.u) <= cfg.walk_range_minutes && time_of(e.v) <= cfg.walk_range_minutes) {
                sum += 0.3 * e.surface + 0.2 * std::min(e.width / 2.0, 1.0) +
                       0.3 * std::max(0.0, 1.0 - std::abs(e.slope) / 0.15) + 0.2 * e.safety;
                ++count;
            }
        }
        const double infra = count ? sum / count : 0.0;

        // directness to the nearest facility (ties to the smaller facility id)
        const Facility* nearest = nullptr;
        for (const auto& f : fac) {
            const double t = time_of(f.node);
            if (t <= cfg.walk_range_minutes && (!nearest || t < time_of(nearest->node))) {
                nearest = &f;
            }
        }
        double direct = 0.0;
        if (nearest) {
            if (nearest->node == origin.id) {
                direct = 1.0;
            }
            else {
                const double len = shortest_path(net, origin.id, nearest->node, Mode::walk).length;
                const auto& dn = net.node(nearest->node);
                direct = std::min(1.0, std::hypot(dn.x - origin.x, dn.y - origin.y) / len);
            }
        }
        const double expect = 100.0 * (0.4 * service + 0.4 * infra + 0.2 * direct);
        EXPECT_NEAR(walkability_index(net, origin.id, cfg), expect, 1e-9) << "origin " << origin.id;

        const auto terms = walkability_terms(net, origin.id, cfg);
        EXPECT_NEAR(terms.service, service, 1e-12);
        EXPECT_NEAR(terms.infrastructure, infra, 1e-12);
        EXPECT_NEAR(terms.directness, direct, 1e-12);
    }
}

// ---------------------------------------------------------------------------
// randomized monotonicity

TEST(IndicatorProperties, MonotoneOverRandomFixtures)
{
    std::mt19937_64 gen(2024);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int fixture = 0; fixture < 1000; ++fixture) {
        const auto net = decorate(gen, oracle::geometric_graph(gen, 6 + static_cast<int>(gen() % 5)), 4);
        const NodeId origin = net.nodes()[gen() % net.node_count()].id;
        IndicatorConfig lo, hi;
        lo.walk_range_minutes = 10.0 * unit(gen);
        hi.walk_range_minutes = lo.walk_range_minutes + 10.0 * unit(gen);

        // range
        ASSERT_LE(service_accessibility(net, origin, lo), service_accessibility(net, origin, hi));
        std::vector<NodeId> residents;
        for (const auto& n : net.nodes()) {
            residents.push_back(n.id);
        }
        ASSERT_LE(overall_service_access(net, residents, lo), overall_service_access(net, residents, hi));

        // facility added at the origin
        const double before = walkability_index(net, origin, lo);
        ASSERT_GE(before, 0.0);
        ASSERT_LE(before, 100.0);
        auto fac = net.facilities();
        fac.push_back({99, static_cast<int>(gen() % 5), origin, unit(gen) < 0.5});
        const auto more = net.with_facilities(fac);
        ASSERT_GE(walkability_index(more, origin, lo), before) << "fixture " << fixture;
        ASSERT_GE(service_accessibility(more, origin, lo), service_accessibility(net, origin, lo));

        // slope
        const auto& e = net.edges()[gen() % net.edges().size()];
        Edge steeper = e;
        steeper.slope = std::clamp(e.slope + std::copysign(0.1 * unit(gen), e.slope), -1.0, 1.0);
        ASSERT_LE(infrastructure_suitability(steeper, lo), infrastructure_suitability(e, lo));
    }
}

// ---------------------------------------------------------------------------
// grid export

TEST(WalkabilityGrid, NearestNodePerCell)
{
    const auto net = plaza();
    GridSpec spec = GridSpec::around(net, 50.0);
    EXPECT_EQ(spec.columns(), 4u);
    EXPECT_EQ(spec.rows(), 2u);
    const auto cells = walkability_grid(net, spec, {});
    ASSERT_EQ(cells.size(), 8u);
    EXPECT_DOUBLE_EQ(cells[0].x, -75.0);
    EXPECT_DOUBLE_EQ(cells[0].y, 25.0);
    for (const auto& c : cells) {
        const auto n = *nearest_node(net, c.x, c.y);
        EXPECT_DOUBLE_EQ(c.walkability, walkability_index(net, n, {}));
    }
    spec.cell = 0.0;
    EXPECT_THROW(walkability_grid(net, spec, {}), Error);
}

TEST(IndicatorConfig, Validation)
{
    IndicatorConfig cfg;
    EXPECT_NO_THROW(cfg.validate());
    cfg.kind_weights = {0.5, 0.5, 0.1};
    EXPECT_THROW(cfg.validate(), Error);
    cfg = {};
    cfg.alpha = 0.5;
    EXPECT_THROW(cfg.validate(), Error);
    cfg = {};
    cfg.suitability.safety = -0.1;
    cfg.suitability.surface = 0.6;
    EXPECT_THROW(cfg.validate(), Error);
    cfg = {};
    cfg.s_min = 1.5;
    EXPECT_THROW(cfg.validate(), Error);
}
