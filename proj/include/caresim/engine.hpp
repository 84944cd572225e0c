#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <unordered_map>
#include <vector>

#include "caresim/csv.hpp"
#include "caresim/indicators.hpp"
#include "caresim/network.hpp"
#include "caresim/population.hpp"
#include "caresim/rng.hpp"

namespace caresim {

/// Global simulation parameters. Speeds, thresholds and incomes default to
/// the case-study values; the remaining constants are modelling choices and
/// are all overridable.
struct SimConfig {
    TravelConfig travel;
    DemographyParams demography;
    IndicatorConfig indicators;
    std::vector<AgingStageSpec> stages = default_stage_specs();

    double gtperc = 0.3;              // walk-willing share
    double radius_preference_km = 2.5; // walking distance to an essential service
    double efforts_threshold = 2.5;
    int n_facilities = 5;
    int warmup_days = 14;
    int horizon_days = 56;
    double x1 = 1.0; // caregiver income multiplier
    double x2 = 1.0; // patient income multiplier
    std::optional<double> x3; // walk-willing share override
    double care_price = 15.0; // per hour
    std::uint64_t seed = 1;

    double day_hours = 18.0;
    double work_hours = 8.0;
    double round_trip_factor = 2.0;
    double unmet_worsening = 0.5;
    double days_per_month = 30.0;
    double buyout_hours = 2.0;
    double buyout_income_multiple = 2.0;
    int effort_window_days = 7;
    double cluster_link_m = 250.0;

    double walk_willing_share() const { return x3.value_or(gtperc); }

    void validate() const
    {
        auto fail = [](const std::string& what) { throw Error(ErrorCode::InvalidInput, what); };
        for (double s : {travel.wk_speed, travel.pr_speed, travel.pu_speed, travel.gr_speed}) {
            if (!(s > 0.0)) {
                fail("all speeds must be > 0");
            }
        }
        if (!(gtperc >= 0.0 && gtperc <= 1.0)) {
            fail("gtperc must be in [0,1]");
        }
        if (x3 && !(*x3 >= 0.0 && *x3 <= 1.0)) {
            fail("x3 must be in [0,1]");
        }
        if (!(warmup_days >= 0 && warmup_days < horizon_days)) {
            fail("warmup_days must be in [0, horizon_days)");
        }
        if (!(x1 >= 0.0) || !(x2 >= 0.0)) {
            fail("income multipliers must be >= 0");
        }
        if (!(care_price > 0.0) || !(days_per_month > 0.0)) {
            fail("care_price and days_per_month must be > 0");
        }
        if (!(demography.hrs_ass_max > 0.0) || !(demography.care_slot_hours > 0.0)) {
            fail("hrs_ass_max and care_slot_hours must be > 0");
        }
        if (effort_window_days < 1) {
            fail("effort_window_days must be >= 1");
        }
        if (n_facilities < 1) {
            fail("n_facilities must be >= 1");
        }
        if (!(radius_preference_km >= 0.0) || !(cluster_link_m >= 0.0)) {
            fail("radii must be >= 0");
        }
        indicators.validate();
        validate_stage_specs(stages);
    }
};

// ---------------------------------------------------------------------------
// Settlement clusters

/// Single-linkage partition of dwellings: two dwellings share a cluster
/// when a chain of dwellings links them with road distance <= link_m at each
/// step. Cluster ids are numbered in order of each cluster's first dwelling.
inline std::unordered_map<std::int64_t, int> settlement_clusters(const RoadNetwork& net, double link_m)
{
    const auto& dw = net.dwellings();
    std::vector<std::size_t> parent(dw.size());
    std::iota(parent.begin(), parent.end(), 0);
    auto root = [&](std::size_t i) {
        while (parent[i] != i) {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        return i;
    };
    auto unite = [&](std::size_t a, std::size_t b) {
        a = root(a);
        b = root(b);
        if (a != b) {
            parent[std::max(a, b)] = std::min(a, b);
        }
    };
    std::unordered_map<std::size_t, std::vector<std::size_t>> at_node; // node index -> dwellings
    for (std::size_t i = 0; i < dw.size(); ++i) {
        at_node[net.index_of(dw[i].node)].push_back(i);
    }
    std::vector<std::size_t> nodes;
    for (const auto& [node, _] : at_node) {
        nodes.push_back(node);
    }
    std::sort(nodes.begin(), nodes.end());
    for (auto node : nodes) {
        const auto& here = at_node[node];
        auto tree = network_distances(net, net.node_at(node).id, std::nullopt, link_m);
        for (auto other : nodes) {
            if (tree.reached(other) && tree.length[other] <= link_m) {
                unite(here.front(), at_node[other].front());
            }
        }
        for (auto d : here) {
            unite(here.front(), d);
        }
    }
    std::unordered_map<std::size_t, int> label;
    std::unordered_map<std::int64_t, int> out;
    for (std::size_t i = 0; i < dw.size(); ++i) {
        const auto r = root(i);
        auto it = label.find(r);
        if (it == label.end()) {
            it = label.emplace(r, static_cast<int>(label.size())).first;
        }
        out[dw[i].id] = it->second;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Records

/// One patient's care ledger for one day. For patients dead at the start of
/// the day every quantity is zero.
struct PatientDay {
    bool alive = false; // alive at the start of the day
    bool died = false;  // died at the end of the day
    int stage = 0;      // stage at the start of the day
    double need = 0.0;
    double purchased = 0.0;
    double delivered = 0.0;
    double unmet = 0.0;
    double travel_hours = 0.0; // caregiver one-way travel, when a trip happened
};

/// Pooled sums over living patients (and their active caregivers).
struct GroupDay {
    int patients = 0;
    double unmet_sum = 0.0;
    double walkability_sum = 0.0;
    int caregivers = 0; // dyads with an active caregiver
    double effort_sum = 0.0; // rolling effort of those caregivers
    int overwhelmed = 0;
};

struct DayRecord {
    int day = 0;
    std::vector<double> caregiver_effort;  // daily effort, by caregiver position
    std::vector<double> caregiver_rolling; // trailing-window mean effort
    std::vector<PatientDay> patients;      // by patient position
    int overwhelmed = 0;
    int active_caregivers = 0;
    double effort_sum = 0.0; // rolling effort over active caregivers
    int living_patients = 0;
    double unmet_sum = 0.0;
    double walkability_sum = 0.0;
    std::array<GroupDay, kStageCount> stages{};
    std::vector<GroupDay> clusters; // by cluster id

    double mean_effort() const { return active_caregivers ? effort_sum / active_caregivers : 0.0; }
    double mean_unmet() const { return living_patients ? unmet_sum / living_patients : 0.0; }
    double mean_walkability() const { return living_patients ? walkability_sum / living_patients : 0.0; }
};

/// Post-warm-up KPI means for one group (stage or cluster). Absent groups
/// are not represented at all; `effort` is NaN when the group never had an
/// active caregiver.
struct GroupKpi {
    double patient_days = 0.0;
    double effort = 0.0;
    double overwhelmed = 0.0; // mean daily count over days the group had living patients
    double walkability = 0.0;
    double unmet_hours = 0.0;
};

struct MicroConditions {
    double detour_ratio = 0.0; // NaN when no patient in the stage reaches an essential facility
    double walkability = 0.0;
    double household_proximity = 0.0;
    int patients = 0;
};

using StageMicro = std::array<std::optional<MicroConditions>, kStageCount>;

struct KpiSummary {
    double effort = 0.0;
    double overwhelmed = 0.0;
    double walkability = 0.0;
    double unmet_hours = 0.0;
    int days = 0;
    std::array<std::optional<GroupKpi>, kStageCount> stages;
    std::map<int, GroupKpi> clusters;
};

// ---------------------------------------------------------------------------
// State

struct DyadPlan {
    std::optional<std::size_t> caregiver; // position in population.caregivers
    bool reachable = false;               // caregiver can get to the patient
    Mode mode = Mode::walk;
    double travel_hours = 0.0; // one way
};

struct SimState {
    const RoadNetwork* net = nullptr;
    SimConfig config;
    Population population;
    std::vector<DyadPlan> plans;              // by patient position
    std::vector<NodeId> patient_node;         // home node by patient position
    std::vector<double> home_walkability;     // by patient position
    std::vector<char> essential_nearby;       // essential facility within radius_preference on foot
    std::vector<int> patient_cluster;         // by patient position
    int n_clusters = 0;
    std::vector<std::vector<double>> effort_history; // per caregiver, chronological
    std::vector<std::optional<std::size_t>> caregiver_patient; // caregiver -> patient position
    int day = 0;
};

namespace detail {

inline NodeId home_node(const RoadNetwork& net, std::int64_t dwelling_id)
{
    const auto* d = net.dwelling(dwelling_id);
    if (!d) {
        throw Error(ErrorCode::InvalidInput, "home " + std::to_string(dwelling_id) + " is not a dwelling");
    }
    return d->node;
}

inline bool essential_within(const RoadNetwork& net, NodeId origin, double radius_m)
{
    auto tree = network_distances(net, origin, Mode::walk, radius_m);
    for (const auto& f : net.facilities()) {
        if (!f.essential) {
            continue;
        }
        const auto idx = net.index_of(f.node);
        if (tree.reached(idx) && tree.length[idx] <= radius_m) {
            return true;
        }
    }
    return false;
}

inline DyadPlan plan_trip(const RoadNetwork& net, const SimConfig& cfg, const CaregiverAgent& cg, NodeId from,
                          NodeId to)
{
    DyadPlan plan;
    if (from == to) {
        plan.reachable = true;
        plan.mode = Mode::walk;
        return plan;
    }
    auto travel_by = [&](Mode m) -> std::optional<double> {
        try {
            return shortest_path(net, from, to, m, cfg.travel).travel_time / 60.0;
        }
        catch (const Error& e) {
            if (e.code() == ErrorCode::NoRoute) {
                return std::nullopt;
            }
            throw;
        }
    };
    const bool walk_willing = cg.walk_propensity < cfg.walk_willing_share();
    if (walk_willing) {
        auto dist = network_distances(net, from, Mode::walk, static_cast<double>(cg.walking_radius));
        const auto idx = net.index_of(to);
        if (dist.reached(idx) && dist.length[idx] <= cg.walking_radius) {
            if (auto t = travel_by(Mode::walk)) {
                plan = {std::nullopt, true, Mode::walk, *t};
                return plan;
            }
        }
    }
    if (auto t = travel_by(cg.mobility)) {
        plan = {std::nullopt, true, cg.mobility, *t};
        return plan;
    }
    if (cg.mobility != Mode::walk) {
        if (auto t = travel_by(Mode::walk)) {
            plan = {std::nullopt, true, Mode::walk, *t};
            return plan;
        }
    }
    return plan; // unreachable
}

} // namespace detail

/// Builds the simulation state. The network must carry the dwellings the
/// population was placed in.
inline SimState make_state(const RoadNetwork& net, Population population, const SimConfig& cfg)
{
    cfg.validate();
    SimState s;
    s.net = &net;
    s.config = cfg;
    s.population = std::move(population);
    auto& pop = s.population;
    const auto n_p = pop.patients.size();
    const auto n_c = pop.caregivers.size();

    std::unordered_map<std::int64_t, std::size_t> caregiver_pos;
    for (std::size_t i = 0; i < n_c; ++i) {
        caregiver_pos[pop.caregivers[i].id] = i;
    }
    std::unordered_map<std::int64_t, std::size_t> patient_pos;
    for (std::size_t i = 0; i < n_p; ++i) {
        patient_pos[pop.patients[i].id] = i;
    }

    auto clusters = settlement_clusters(net, cfg.cluster_link_m);
    for (const auto& [_, c] : clusters) {
        s.n_clusters = std::max(s.n_clusters, c + 1);
    }

    s.plans.assign(n_p, {});
    s.caregiver_patient.assign(n_c, std::nullopt);
    s.patient_node.resize(n_p);
    s.home_walkability.resize(n_p);
    s.essential_nearby.resize(n_p);
    s.patient_cluster.resize(n_p);
    s.effort_history.assign(n_c, {});

    std::unordered_map<NodeId, double> walk_cache;
    std::unordered_map<NodeId, char> access_cache;
    const double radius_m = cfg.radius_preference_km * 1000.0;
    for (std::size_t i = 0; i < n_p; ++i) {
        const auto& p = pop.patients[i];
        const NodeId node = detail::home_node(net, p.home);
        s.patient_node[i] = node;
        s.patient_cluster[i] = clusters.at(p.home);
        auto w = walk_cache.find(node);
        if (w == walk_cache.end()) {
            w = walk_cache.emplace(node, walkability_index(net, node, cfg.indicators, cfg.travel)).first;
        }
        s.home_walkability[i] = w->second;
        auto a = access_cache.find(node);
        if (a == access_cache.end()) {
            a = access_cache.emplace(node, detail::essential_within(net, node, radius_m) ? 1 : 0).first;
        }
        s.essential_nearby[i] = a->second;
    }

    for (const auto& dyad : pop.dyads) {
        if (!dyad.caregiver) {
            continue;
        }
        const auto pi = patient_pos.at(dyad.patient);
        const auto ci = caregiver_pos.at(*dyad.caregiver);
        const auto& cg = pop.caregivers[ci];
        auto plan = detail::plan_trip(net, cfg, cg, detail::home_node(net, cg.home), s.patient_node[pi]);
        plan.caregiver = ci;
        s.plans[pi] = plan;
        s.caregiver_patient[ci] = pi;
    }
    return s;
}

/// Hours of care bought per day: the patient's disposable income above the
/// pension base at care_price per hour over a 30-day month, plus a fixed
/// buy-out by caregivers whose income reaches the threshold.
inline double purchased_hours(const PatientAgent& p, const CaregiverAgent* cg, double need, const SimConfig& cfg)
{
    const double budget = std::max(0.0, cfg.x2 * p.income - cfg.demography.base_income_ret);
    double hours = std::floor(budget / (cfg.care_price * cfg.days_per_month));
    if (cg && cfg.x1 * cg->income >= cfg.buyout_income_multiple * cfg.demography.base_income) {
        hours += cfg.buyout_hours;
    }
    return quantize_down(std::min(need, hours), cfg.demography.care_slot_hours);
}

/// Care hours the caregiver can spend today after work and the round trip.
inline double time_budget(const CaregiverAgent& cg, double travel_hours, const SimConfig& cfg)
{
    const double work = cg.has_job ? cfg.work_hours : 0.0;
    return std::max(0.0, cfg.day_hours - work - cfg.round_trip_factor * travel_hours);
}

/// Advances the state by one day and returns that day's record.
inline DayRecord daily_tick(SimState& s, int day)
{
    const auto& cfg = s.config;
    auto& pop = s.population;
    const auto n_p = pop.patients.size();
    const auto n_c = pop.caregivers.size();
    const double slot = cfg.demography.care_slot_hours;

    DayRecord rec;
    rec.day = day;
    rec.caregiver_effort.assign(n_c, 0.0);
    rec.caregiver_rolling.assign(n_c, 0.0);
    rec.patients.assign(n_p, {});
    rec.clusters.assign(static_cast<std::size_t>(s.n_clusters), {});

    std::vector<char> active(n_c, 0);
    for (std::size_t i = 0; i < n_p; ++i) {
        auto& p = pop.patients[i];
        auto& pd = rec.patients[i];
        if (!p.alive) {
            continue;
        }
        pd.alive = true;
        pd.stage = p.aging_stage;
        pd.need = p.hrs_care_needed;

        const auto& plan = s.plans[i];
        const CaregiverAgent* cg = plan.caregiver ? &pop.caregivers[*plan.caregiver] : nullptr;
        pd.purchased = purchased_hours(p, cg, pd.need, cfg);
        const double remaining = pd.need - pd.purchased;
        if (cg) {
            active[*plan.caregiver] = 1;
            if (plan.reachable) {
                const double budget = time_budget(*cg, plan.travel_hours, cfg);
                pd.delivered = quantize_down(std::max(0.0, std::min({cg->hrs_support, remaining, budget})), slot);
            }
            if (pd.delivered > 0.0) {
                pd.travel_hours = plan.travel_hours;
                rec.caregiver_effort[*plan.caregiver] =
                    (pd.delivered + cfg.round_trip_factor * plan.travel_hours) / cfg.demography.hrs_ass_max;
            }
        }
        pd.unmet = std::max(0.0, remaining - pd.delivered);

        // Health worsening and stage progression.
        const auto& spec = cfg.stages[static_cast<std::size_t>(p.aging_stage)];
        p.worsening_points += (s.essential_nearby[i] ? 0.0 : spec.worsening_in_walk) + cfg.unmet_worsening * pd.unmet;
        if (p.worsening_points >= spec.worsening_threshold && p.aging_stage < kStageCount - 1) {
            ++p.aging_stage;
            p.worsening_points = 0.0;
            p.hrs_care_needed = stage_need(cfg.stages[static_cast<std::size_t>(p.aging_stage)], cfg.demography);
        }

        // Mortality: daily hazard from the annual probability of the current stage.
        const double daily = cfg.stages[static_cast<std::size_t>(p.aging_stage)].death_probability / 365.0;
        const double u = keyed_uniform(cfg.seed, {0xdeadULL, static_cast<std::uint64_t>(p.id),
                                                  static_cast<std::uint64_t>(day)});
        if (u < daily) {
            p.alive = false;
            pd.died = true;
        }
    }

    // Caregiver effort windows.
    const auto window = static_cast<std::size_t>(cfg.effort_window_days);
    std::vector<char> overwhelmed(n_c, 0);
    for (std::size_t c = 0; c < n_c; ++c) {
        auto& hist = s.effort_history[c];
        hist.push_back(rec.caregiver_effort[c]);
        const std::size_t from = hist.size() > window ? hist.size() - window : 0;
        double sum = 0.0;
        for (std::size_t k = from; k < hist.size(); ++k) {
            sum += hist[k];
        }
        rec.caregiver_rolling[c] = sum / static_cast<double>(hist.size() - from);
        pop.caregivers[c].efforts = rec.caregiver_rolling[c];
        if (sum > cfg.efforts_threshold) {
            overwhelmed[c] = 1;
            ++rec.overwhelmed;
        }
        if (active[c]) {
            ++rec.active_caregivers;
            rec.effort_sum += rec.caregiver_rolling[c];
        }
    }

    // Aggregates over living patients.
    for (std::size_t i = 0; i < n_p; ++i) {
        const auto& pd = rec.patients[i];
        if (!pd.alive) {
            continue;
        }
        ++rec.living_patients;
        rec.unmet_sum += pd.unmet;
        rec.walkability_sum += s.home_walkability[i];
        for (GroupDay* g : {&rec.stages[static_cast<std::size_t>(pd.stage)],
                            &rec.clusters[static_cast<std::size_t>(s.patient_cluster[i])]}) {
            ++g->patients;
            g->unmet_sum += pd.unmet;
            g->walkability_sum += s.home_walkability[i];
            if (const auto& c = s.plans[i].caregiver) {
                ++g->caregivers;
                g->effort_sum += rec.caregiver_rolling[*c];
                g->overwhelmed += overwhelmed[*c];
            }
        }
    }
    s.day = day;
    return rec;
}

/// Caregivers whose effort summed over the trailing window exceeds the
/// threshold, for the most recently simulated day.
inline int overwhelmed_count(const SimState& s)
{
    const auto window = static_cast<std::size_t>(s.config.effort_window_days);
    int count = 0;
    for (const auto& hist : s.effort_history) {
        const std::size_t from = hist.size() > window ? hist.size() - window : 0;
        double sum = 0.0;
        for (std::size_t k = from; k < hist.size(); ++k) {
            sum += hist[k];
        }
        count += sum > s.config.efforts_threshold ? 1 : 0;
    }
    return count;
}

/// KPI means over the records with day > warmup_days. Only the pooled
/// aggregates of each record are read.
inline KpiSummary summarize(const std::vector<DayRecord>& records, int warmup_days)
{
    KpiSummary out;
    double effort_sum = 0.0, unmet_sum = 0.0, walk_sum = 0.0, overwhelmed_sum = 0.0;
    double caregiver_days = 0.0, patient_days = 0.0;

    struct Pool {
        double patient_days = 0, caregiver_days = 0, effort = 0, unmet = 0, walk = 0, overwhelmed = 0, days = 0;
        void add(const GroupDay& g)
        {
            if (g.patients == 0) {
                return;
            }
            ++days;
            patient_days += g.patients;
            caregiver_days += g.caregivers;
            effort += g.effort_sum;
            unmet += g.unmet_sum;
            walk += g.walkability_sum;
            overwhelmed += g.overwhelmed;
        }
        std::optional<GroupKpi> result() const
        {
            if (patient_days == 0) {
                return std::nullopt;
            }
            GroupKpi k;
            k.patient_days = patient_days;
            k.effort = caregiver_days > 0 ? effort / caregiver_days : std::nan("");
            k.overwhelmed = overwhelmed / days;
            k.walkability = walk / patient_days;
            k.unmet_hours = unmet / patient_days;
            return k;
        }
    };
    std::array<Pool, kStageCount> stage_pools{};
    std::map<int, Pool> cluster_pools;

    for (const auto& r : records) {
        if (r.day <= warmup_days) {
            continue;
        }
        ++out.days;
        effort_sum += r.effort_sum;
        caregiver_days += r.active_caregivers;
        unmet_sum += r.unmet_sum;
        walk_sum += r.walkability_sum;
        patient_days += r.living_patients;
        overwhelmed_sum += r.overwhelmed;
        for (std::size_t s = 0; s < kStageCount; ++s) {
            stage_pools[s].add(r.stages[s]);
        }
        for (std::size_t c = 0; c < r.clusters.size(); ++c) {
            if (r.clusters[c].patients > 0) {
                cluster_pools[static_cast<int>(c)].add(r.clusters[c]);
            }
        }
    }
    if (out.days > 0) {
        out.effort = caregiver_days > 0 ? effort_sum / caregiver_days : 0.0;
        out.unmet_hours = patient_days > 0 ? unmet_sum / patient_days : 0.0;
        out.walkability = patient_days > 0 ? walk_sum / patient_days : 0.0;
        out.overwhelmed = overwhelmed_sum / out.days;
    }
    for (std::size_t s = 0; s < kStageCount; ++s) {
        out.stages[s] = stage_pools[s].result();
    }
    for (const auto& [c, pool] : cluster_pools) {
        if (auto k = pool.result()) {
            out.clusters[c] = *k;
        }
    }
    return out;
}

/// Per-stage means over living patients of the detour ratio to the nearest
/// essential facility, home walkability and household proximity.
inline StageMicro micro_conditions(const SimState& s)
{
    const auto& net = *s.net;
    const auto& cfg = s.config;
    std::unordered_map<NodeId, std::optional<double>> detour_cache;
    std::unordered_map<NodeId, double> proximity_cache;
    struct Acc {
        int n = 0, n_detour = 0;
        double detour = 0, walk = 0, prox = 0;
    };
    std::array<Acc, kStageCount> acc{};
    for (std::size_t i = 0; i < s.population.patients.size(); ++i) {
        const auto& p = s.population.patients[i];
        if (!p.alive) {
            continue;
        }
        const NodeId node = s.patient_node[i];
        auto d = detour_cache.find(node);
        if (d == detour_cache.end()) {
            d = detour_cache.emplace(node, essential_detour_ratio(net, node, cfg.travel)).first;
        }
        auto pr = proximity_cache.find(node);
        if (pr == proximity_cache.end()) {
            pr = proximity_cache.emplace(node, residential_proximity(net, node, cfg.indicators)).first;
        }
        auto& a = acc[static_cast<std::size_t>(p.aging_stage)];
        ++a.n;
        a.walk += s.home_walkability[i];
        a.prox += pr->second;
        if (d->second) {
            ++a.n_detour;
            a.detour += *d->second;
        }
    }
    StageMicro out;
    for (std::size_t st = 0; st < kStageCount; ++st) {
        const auto& a = acc[st];
        if (a.n == 0) {
            continue;
        }
        MicroConditions m;
        m.patients = a.n;
        m.detour_ratio = a.n_detour ? a.detour / a.n_detour : std::nan("");
        m.walkability = a.walk / a.n;
        m.household_proximity = a.prox / a.n;
        out[st] = m;
    }
    return out;
}

struct RunResult {
    KpiSummary summary;
    std::vector<DayRecord> days;
    StageMicro micro; // at the start of the run
};

/// Simulates horizon_days days. Deterministic in (network, population, config).
inline RunResult run(const RoadNetwork& net, Population population, const SimConfig& cfg)
{
    auto state = make_state(net, std::move(population), cfg);
    RunResult out;
    out.micro = micro_conditions(state);
    out.days.reserve(static_cast<std::size_t>(cfg.horizon_days));
    for (int day = 1; day <= cfg.horizon_days; ++day) {
        out.days.push_back(daily_tick(state, day));
    }
    out.summary = summarize(out.days, cfg.warmup_days);
    return out;
}

/// Per-day CSV: system KPIs, then stage and cluster columns.
inline void write_day_records(std::ostream& os, const std::vector<DayRecord>& records)
{
    std::size_t n_clusters = 0;
    for (const auto& r : records) {
        n_clusters = std::max(n_clusters, r.clusters.size());
    }
    csv::Writer w(os);
    std::vector<std::string> header = {"day",         "effort",          "overwhelmed",      "walkability",
                                       "unmet_hours", "living_patients", "active_caregivers"};
    for (int s = 0; s < kStageCount; ++s) {
        for (const char* f : {"_patients", "_effort", "_unmet_hours"}) {
            header.push_back("stage" + std::to_string(s) + f);
        }
    }
    for (std::size_t c = 0; c < n_clusters; ++c) {
        for (const char* f : {"_patients", "_effort", "_overwhelmed", "_walkability", "_unmet_hours"}) {
            header.push_back("cluster" + std::to_string(c) + f);
        }
    }
    w.header(header);
    auto mean = [](double sum, int n) { return n ? sum / n : std::nan(""); };
    for (const auto& r : records) {
        w.field(r.day).field(r.mean_effort()).field(r.overwhelmed).field(r.mean_walkability()).field(r.mean_unmet());
        w.field(r.living_patients).field(r.active_caregivers);
        for (const auto& g : r.stages) {
            w.field(g.patients).field(mean(g.effort_sum, g.caregivers)).field(mean(g.unmet_sum, g.patients));
        }
        for (std::size_t c = 0; c < n_clusters; ++c) {
            const GroupDay g = c < r.clusters.size() ? r.clusters[c] : GroupDay{};
            w.field(g.patients).field(mean(g.effort_sum, g.caregivers)).field(g.overwhelmed);
            w.field(mean(g.walkability_sum, g.patients)).field(mean(g.unmet_sum, g.patients));
        }
        w.end_row();
    }
}

} // namespace caresim
