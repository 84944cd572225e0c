#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "caresim/population.hpp"
#include "caresim/population_io.hpp"
#include "oracles.hpp"

using namespace caresim;
using oracle::edge;

namespace {

std::string dump(const Population& pop)
{
    std::ostringstream ss;
    write_patients(ss, pop.patients);
    write_caregivers(ss, pop);
    write_dyads(ss, pop.dyads);
    return ss.str();
}

// chain of `n` nodes 100 m apart with one dwelling per node (dwelling id == node id)
RoadNetwork chain_with_dwellings(int n)
{
    std::vector<Node> nodes;
    std::vector<Edge> edges;
    std::vector<Dwelling> dw;
    for (int i = 0; i < n; ++i) {
        nodes.push_back({i, i * 100.0, 0.0, 0.0});
        dw.push_back({i, i, true, false});
        if (i > 0) {
            edges.push_back(edge(i - 1, i, 100.0));
        }
    }
    return RoadNetwork(nodes, edges, dw);
}

PatientAgent patient(std::int64_t id, int stage, std::int64_t home)
{
    PatientAgent p;
    p.id = id;
    p.aging_stage = stage;
    p.home = home;
    return p;
}

CaregiverAgent caregiver(std::int64_t id, std::int64_t home)
{
    CaregiverAgent c;
    c.id = id;
    c.home = home;
    return c;
}

} // namespace

TEST(Synthesize, SameSeedSameAgents)
{
    const auto a = synthesize({}, default_stage_specs(), 746, 99);
    const auto b = synthesize({}, default_stage_specs(), 746, 99);
    EXPECT_EQ(dump(a), dump(b));
    const auto c = synthesize({}, default_stage_specs(), 746, 100);
    EXPECT_NE(dump(a), dump(c));
}

TEST(Synthesize, DegenerateEducationShare)
{
    DemographicMarginals m;
    m.adults_with_education = 1.0;
    const auto pop = synthesize(m, default_stage_specs(), 300, 5);
    for (const auto& p : pop.patients) {
        EXPECT_TRUE(p.education);
    }
    for (const auto& c : pop.caregivers) {
        EXPECT_TRUE(c.education);
    }
    m.adults_with_education = 0.0;
    for (const auto& c : synthesize(m, default_stage_specs(), 300, 5).caregivers) {
        EXPECT_FALSE(c.education);
    }
}

TEST(Synthesize, ElderAdultRatioAt746)
{
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto pop = synthesize({}, default_stage_specs(), 746, seed);
        const double ratio = static_cast<double>(pop.patients.size()) / static_cast<double>(pop.caregivers.size());
        ASSERT_NEAR(ratio, 0.39, 0.02) << "seed " << seed;
        ASSERT_EQ(pop.patients.size() + pop.caregivers.size(), 746u);
    }
}

TEST(Synthesize, LargePopulationMatchesMarginals)
{
    const DemographicMarginals m;
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const auto pop = synthesize(m, default_stage_specs(), 5000, seed);
        for (const auto& check : realized_shares(pop, m)) {
            EXPECT_NEAR(check.realized, check.target, 0.015) << check.key << " seed " << seed;
        }
    }
}

TEST(Synthesize, AttributeDomains)
{
    const auto stages = default_stage_specs();
    DemographyParams params;
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const auto pop = synthesize({}, stages, 200 + static_cast<int>(seed) * 7, seed * 7919 + 1);
        for (const auto& p : pop.patients) {
            ASSERT_GE(p.age, params.age_ref);
            ASSERT_LE(p.age, params.max_age);
            ASSERT_GE(p.income, 400.0);
            ASSERT_LE(p.income, 3000.0);
            ASSERT_GE(p.life_expectancy, 20);
            ASSERT_LE(p.life_expectancy, 50);
            ASSERT_GE(p.walking_radius, 0);
            ASSERT_LE(p.walking_radius, 1500);
            ASSERT_GE(p.aging_stage, 0);
            ASSERT_LE(p.aging_stage, 4);
            ASSERT_EQ(p.aging_stage, std::clamp((p.age - 65) / 5, 0, 4));
            ASSERT_EQ(p.hrs_care_needed, stages[static_cast<std::size_t>(p.aging_stage)].base_assistance);
            ASSERT_GE(p.hrs_care_needed, 0.0);
            ASSERT_LE(p.hrs_care_needed, 18.0);
            ASSERT_EQ(p.worsening_points, 0.0);
            ASSERT_TRUE(p.alive);
        }
        for (const auto& c : pop.caregivers) {
            ASSERT_GE(c.age, params.age_work);
            ASSERT_LT(c.age, params.age_ref);
            ASSERT_GE(c.income, 400.0);
            ASSERT_LE(c.income, 3000.0);
            ASSERT_GE(c.life_expectancy, 20);
            ASSERT_LE(c.life_expectancy, 50);
            ASSERT_GE(c.walking_radius, 0);
            ASSERT_LE(c.walking_radius, 1500);
            ASSERT_GE(c.hrs_support, 2.0);
            ASSERT_LE(c.hrs_support, params.hrs_ass_max);
            ASSERT_EQ(c.efforts, 0.0);
            ASSERT_FALSE(c.skilled_job && !c.has_job);
        }
    }
}

TEST(Synthesize, StageBands)
{
    EXPECT_EQ(stage_for_age(65, 65), 0);
    EXPECT_EQ(stage_for_age(69, 65), 0);
    EXPECT_EQ(stage_for_age(70, 65), 1);
    EXPECT_EQ(stage_for_age(79, 65), 2);
    EXPECT_EQ(stage_for_age(84, 65), 3);
    EXPECT_EQ(stage_for_age(85, 65), 4);
    EXPECT_EQ(stage_for_age(99, 65), 4);
}

TEST(Marginals, ValidationAndParsing)
{
    auto code_of = [](const nlohmann::json& j) {
        try {
            parse_marginals(j);
        }
        catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::InvalidInput;
    };
    EXPECT_EQ(code_of({{"adults_with_education", 1.2}}), ErrorCode::InvalidMarginals);
    EXPECT_EQ(code_of({{"adults_divorced", -0.1}}), ErrorCode::InvalidMarginals);
    EXPECT_EQ(code_of({{"mystery", 0.1}}), ErrorCode::InvalidMarginals);
    EXPECT_EQ(code_of({{"private_transport", 0.9}, {"public_transport", 0.2}}), ErrorCode::InvalidMarginals);
    EXPECT_EQ(code_of({{"population", 1.5}}), ErrorCode::InvalidMarginals);

    const auto m = parse_marginals({{"population", 500}, {"urbanized", 0.5}, {"adults_single", 0.2}});
    EXPECT_EQ(m.population, 500);
    EXPECT_EQ(m.urbanized, 0.5);
    EXPECT_EQ(m.single_share_adults(), 0.2);
    EXPECT_EQ(parse_marginals(marginals_to_json(m)).single_share_adults(), 0.2);

    DemographicMarginals bad;
    bad.employment_males = 2.0;
    EXPECT_THROW(synthesize(bad, default_stage_specs(), 10, 1), Error);
}

TEST(StageSpecs, Validation)
{
    auto specs = default_stage_specs();
    EXPECT_NO_THROW(validate_stage_specs(specs));
    EXPECT_EQ(parse_stage_specs(stage_specs_to_json(specs)).size(), 5u);
    specs[2].base_assistance = 0.5;
    EXPECT_THROW(validate_stage_specs(specs), Error);
    specs = default_stage_specs();
    specs[4].death_probability = 1.5;
    EXPECT_THROW(validate_stage_specs(specs), Error);
    specs.pop_back();
    EXPECT_THROW(validate_stage_specs(specs), Error);
}

// ---------------------------------------------------------------------------
// homes

TEST(AssignHomes, SingleDwellingHostsEveryone)
{
    auto pop = synthesize({}, default_stage_specs(), 50, 3);
    const auto dw = assign_homes(pop, {{7, 0, true, false}}, 11);
    for (const auto& p : pop.patients) {
        EXPECT_EQ(p.home, 7);
    }
    for (const auto& c : pop.caregivers) {
        EXPECT_EQ(c.home, 7);
    }
    bool any_old = false;
    for (const auto& p : pop.patients) {
        any_old = any_old || p.age >= 75;
    }
    EXPECT_EQ(dw[0].has_elder_75, any_old);
}

TEST(AssignHomes, NoInhabitedDwellings)
{
    auto pop = synthesize({}, default_stage_specs(), 20, 3);
    try {
        assign_homes(pop, {{1, 0, false, false}}, 1);
        FAIL();
    }
    catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NoDwellings);
    }
}

TEST(AssignHomes, OccupancyMatchesGeneratorReplay)
{
    // 100 agents over 50 dwellings, every third uninhabited
    Population pop;
    for (int i = 0; i < 30; ++i) {
        pop.patients.push_back(patient(i, 0, -1));
        pop.patients.back().age = 65 + i;
    }
    for (int i = 0; i < 70; ++i) {
        pop.caregivers.push_back(caregiver(i, -1));
    }
    std::vector<Dwelling> dw;
    for (int d = 0; d < 50; ++d) {
        dw.push_back({1000 + d, 0, d % 3 != 0, true});
    }
    const std::uint64_t seed = 424242;
    const auto out = assign_homes(pop, dw, seed);

    // replay: unbiased rejection sampling on the raw 64-bit stream
    std::vector<std::int64_t> inhabited;
    for (const auto& d : dw) {
        if (d.inhabited) {
            inhabited.push_back(d.id);
        }
    }
    std::mt19937_64 gen(seed);
    const std::uint64_t n = inhabited.size();
    auto draw = [&] {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = gen();
        } while (x >= limit);
        return inhabited[x % n];
    };
    std::map<std::int64_t, int> expect, got;
    std::set<std::int64_t> elder_homes;
    for (const auto& p : pop.patients) {
        const auto home = draw();
        EXPECT_EQ(p.home, home);
        ++expect[home];
        ++got[p.home];
        if (p.age >= 75) {
            elder_homes.insert(home);
        }
    }
    for (const auto& c : pop.caregivers) {
        const auto home = draw();
        EXPECT_EQ(c.home, home);
        ++expect[home];
        ++got[c.home];
    }
    EXPECT_EQ(got, expect);
    for (const auto& d : out) {
        EXPECT_EQ(d.has_elder_75, elder_homes.count(d.id) == 1) << d.id;
    }

    auto again = pop;
    assign_homes(again, dw, seed);
    EXPECT_EQ(dump(again), dump(pop));
}

// ---------------------------------------------------------------------------
// dyads

TEST(FormDyads, OnePatientOneCaregiver)
{
    const auto net = chain_with_dwellings(3);
    Population pop;
    pop.patients = {patient(0, 2, 0)};
    pop.caregivers = {caregiver(0, 2)};
    form_dyads(pop, net);
    ASSERT_EQ(pop.dyads.size(), 1u);
    EXPECT_EQ(pop.dyads[0].caregiver, std::optional<std::int64_t>(0));
    EXPECT_TRUE(pop.patients[0].has_caregiver);
    EXPECT_TRUE(pop.caregivers[0].supported);
}

TEST(FormDyads, NoCaregivers)
{
    const auto net = chain_with_dwellings(3);
    Population pop;
    pop.patients = {patient(0, 2, 0), patient(1, 0, 1)};
    form_dyads(pop, net);
    ASSERT_EQ(pop.dyads.size(), 2u);
    for (const auto& p : pop.patients) {
        EXPECT_FALSE(p.has_caregiver);
    }
    for (const auto& d : pop.dyads) {
        EXPECT_FALSE(d.caregiver);
    }
}

TEST(FormDyads, ThreePatientsTwoCaregiversHandReplay)
{
    // nodes 0..4 on a line. Order of service: p1 (stage 4, node 4), p2 (stage 4,
    // node 2), p0 (stage 1). p1 takes c0 at node 3 (100 m), p2 takes c1 at
    // node 1 (100 m), p0 is left without a caregiver.
    const auto net = chain_with_dwellings(5);
    Population pop;
    pop.patients = {patient(0, 1, 0), patient(1, 4, 4), patient(2, 4, 2)};
    pop.caregivers = {caregiver(0, 3), caregiver(1, 1)};
    form_dyads(pop, net);
    ASSERT_EQ(pop.dyads.size(), 3u);
    EXPECT_EQ(pop.dyads[0].caregiver, std::nullopt);
    EXPECT_EQ(pop.dyads[1].caregiver, std::optional<std::int64_t>(0));
    EXPECT_EQ(pop.dyads[2].caregiver, std::optional<std::int64_t>(1));
    EXPECT_FALSE(pop.patients[0].has_caregiver);
}

TEST(FormDyads, DistanceTieGoesToSmallerCaregiver)
{
    const auto net = chain_with_dwellings(5);
    Population pop;
    pop.patients = {patient(0, 3, 2)};
    pop.caregivers = {caregiver(0, 3), caregiver(1, 1)};
    form_dyads(pop, net);
    EXPECT_EQ(pop.dyads[0].caregiver, std::optional<std::int64_t>(0));
    pop.caregivers = {caregiver(0, 4), caregiver(1, 1), caregiver(2, 3)};
    form_dyads(pop, net);
    EXPECT_EQ(pop.dyads[0].caregiver, std::optional<std::int64_t>(1));
}

TEST(FormDyads, UnreachableCaregiverIsSkipped)
{
    auto base = chain_with_dwellings(3);
    auto nodes = base.nodes();
    nodes.push_back({9, 50, 50, 0});
    auto dw = base.dwellings();
    dw.push_back({9, 9, true, false});
    RoadNetwork net(nodes, base.edges(), dw);
    Population pop;
    pop.patients = {patient(0, 0, 0)};
    pop.caregivers = {caregiver(0, 9)};
    form_dyads(pop, net);
    EXPECT_FALSE(pop.patients[0].has_caregiver);
}

TEST(FormDyads, MatchesGreedyReplayOnRandomTowns)
{
    std::mt19937_64 gen(31);
    for (int town = 0; town < 25; ++town) {
        const auto base = oracle::geometric_graph(gen, 9);
        std::vector<Dwelling> dw;
        for (const auto& n : base.nodes()) {
            dw.push_back({n.id, n.id, true, false});
        }
        const auto net = base.with_dwellings(dw);
        Population pop;
        const int np = 2 + static_cast<int>(gen() % 6);
        const int nc = static_cast<int>(gen() % 6);
        for (int i = 0; i < np; ++i) {
            pop.patients.push_back(patient(i, static_cast<int>(gen() % 5), static_cast<std::int64_t>(gen() % 9)));
        }
        for (int i = 0; i < nc; ++i) {
            pop.caregivers.push_back(caregiver(i, static_cast<std::int64_t>(gen() % 9)));
        }
        form_dyads(pop, net);

        // replay
        std::vector<int> order(static_cast<std::size_t>(np));
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            return std::pair(-pop.patients[a].aging_stage, a) < std::pair(-pop.patients[b].aging_stage, b);
        });
        std::vector<bool> used(static_cast<std::size_t>(nc), false);
        std::map<std::int64_t, std::optional<std::int64_t>> expect;
        for (int p : order) {
            int best = -1;
            double best_d = kInf;
            for (int c = 0; c < nc; ++c) {
                if (used[c]) {
                    continue;
                }
                const double d =
                    shortest_path(net, pop.patients[p].home, pop.caregivers[c].home, Mode::walk).length;
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            if (best >= 0) {
                used[best] = true;
                expect[p] = best;
            }
            else {
                expect[p] = std::nullopt;
            }
        }
        std::set<std::int64_t> seen;
        for (const auto& d : pop.dyads) {
            EXPECT_EQ(d.caregiver, expect[d.patient]) << "town " << town << " patient " << d.patient;
            if (d.caregiver) {
                EXPECT_TRUE(seen.insert(*d.caregiver).second);
            }
        }
        EXPECT_EQ(pop.dyads.size(), static_cast<std::size_t>(np));
    }
}

// ---------------------------------------------------------------------------
// CSV

TEST(PopulationCsv, RoundTrip)
{
    auto pop = synthesize({}, default_stage_specs(), 746, 77);
    const auto net = chain_with_dwellings(30);
    assign_homes(pop, net.dwellings(), 8);
    form_dyads(pop, net);

    std::ostringstream ps, cs, ds;
    write_patients(ps, pop.patients);
    write_caregivers(cs, pop);
    write_dyads(ds, pop.dyads);

    Population back;
    back.patients = read_patients(csv::Table::parse(ps.str(), "patients.csv"));
    back.caregivers = read_caregivers(csv::Table::parse(cs.str(), "caregivers.csv"));
    back.dyads = read_dyads(csv::Table::parse(ds.str(), "dyads.csv"));
    EXPECT_EQ(dump(back), dump(pop));
    ASSERT_EQ(back.patients.size(), pop.patients.size());
    EXPECT_EQ(back.patients[3].income, pop.patients[3].income);
    EXPECT_EQ(back.caregivers[5].walk_propensity, pop.caregivers[5].walk_propensity);

    EXPECT_THROW(read_patients(csv::Table::parse("id,age\n1,70\n", "patients.csv")), Error);
}
