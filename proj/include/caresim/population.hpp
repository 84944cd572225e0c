#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "caresim/error.hpp"
#include "caresim/network.hpp"
#include "caresim/rng.hpp"

namespace caresim {

inline constexpr int kStageCount = 5;

/// Per-stage severity parameters.
struct AgingStageSpec {
    int severity = 0;                // [0,4]
    int worsening_threshold = 15;    // [0,15]
    double base_assistance = 0.0;    // hours/day, [0,15]
    double worsening_in_walk = 0.0;  // points/day, [0,15]
    double base_adl = 18.0;          // [0,18]
    double death_probability = 0.0; // annual, [0,1]
};

/// Shipped defaults. The numeric values are modelling choices; only the
/// domains are externally given.
inline std::vector<AgingStageSpec> default_stage_specs()
{
    return {
        {0, 15, 1.0, 0.5, 18.0, 0.01},
        {1, 12, 3.0, 1.0, 14.0, 0.02},
        {2, 9, 6.0, 1.5, 10.0, 0.05},
        {3, 6, 9.0, 2.0, 6.0, 0.10},
        {4, 4, 12.0, 3.0, 3.0, 0.20},
    };
}

inline void validate_stage_specs(const std::vector<AgingStageSpec>& specs)
{
    if (specs.size() != kStageCount) {
        throw Error(ErrorCode::InvalidInput, "expected " + std::to_string(kStageCount) + " aging stages, got " +
                                                 std::to_string(specs.size()));
    }
    for (std::size_t i = 0; i < specs.size(); ++i) {
        const auto& s = specs[i];
        const std::string where = "stage " + std::to_string(i);
        auto in = [&](double v, double lo, double hi, const char* field) {
            if (!(v >= lo && v <= hi)) {
                throw Error(ErrorCode::InvalidInput, where + ": " + field + " outside [" + csv::format_double(lo) +
                                                         "," + csv::format_double(hi) + "]");
            }
        };
        if (s.severity != static_cast<int>(i)) {
            throw Error(ErrorCode::InvalidInput, where + ": severity must equal its position");
        }
        in(s.worsening_threshold, 0, 15, "worsening_threshold");
        in(s.base_assistance, 0, 15, "base_assistance");
        in(s.worsening_in_walk, 0, 15, "worsening_in_walk");
        in(s.base_adl, 0, 18, "base_adl");
        in(s.death_probability, 0, 1, "death_probability");
        if (i > 0) {
            if (s.base_assistance < specs[i - 1].base_assistance) {
                throw Error(ErrorCode::InvalidInput, where + ": base_assistance must be non-decreasing in severity");
            }
            if (s.death_probability < specs[i - 1].death_probability) {
                throw Error(ErrorCode::InvalidInput, where + ": death_probability must be non-decreasing in severity");
            }
        }
    }
}

inline std::vector<AgingStageSpec> parse_stage_specs(const nlohmann::json& j)
{
    if (!j.is_array()) {
        throw Error(ErrorCode::InvalidInput, "stage specs must be a JSON array");
    }
    std::vector<AgingStageSpec> specs;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const auto& o = j[i];
        AgingStageSpec s;
        try {
            s.severity = o.at("severity").get<int>();
            s.worsening_threshold = o.at("worsening_threshold").get<int>();
            s.base_assistance = o.at("base_assistance").get<double>();
            s.worsening_in_walk = o.at("worsening_in_walk").get<double>();
            s.base_adl = o.at("base_adl").get<double>();
            s.death_probability = o.at("death_probability").get<double>();
        }
        catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::InvalidInput, "stage " + std::to_string(i) + ": " + e.what());
        }
        specs.push_back(s);
    }
    validate_stage_specs(specs);
    return specs;
}

inline nlohmann::json stage_specs_to_json(const std::vector<AgingStageSpec>& specs)
{
    auto out = nlohmann::json::array();
    for (const auto& s : specs) {
        out.push_back({{"severity", s.severity},
                       {"worsening_threshold", s.worsening_threshold},
                       {"base_assistance", s.base_assistance},
                       {"worsening_in_walk", s.worsening_in_walk},
                       {"base_adl", s.base_adl},
                       {"death_probability", s.death_probability}});
    }
    return out;
}

enum class Sex : std::uint8_t { male, female };

struct PatientAgent {
    std::int64_t id = 0;
    int age = 65;
    Sex sex = Sex::male;
    double income = 700.0; // per month
    int life_expectancy = 20;
    std::int64_t home = -1; // dwelling id, -1 until placed
    Mode mobility = Mode::walk;
    int walking_radius = 0; // metres
    int aging_stage = 0;
    double hrs_care_needed = 0.0; // hours/day
    bool has_caregiver = false;
    bool single = false;
    bool has_child = false;
    bool education = false;
    bool divorced = false;
    double worsening_points = 0.0;
    bool alive = true;
};

struct CaregiverAgent {
    std::int64_t id = 0;
    int age = 40;
    Sex sex = Sex::male;
    double income = 1200.0;
    int life_expectancy = 40;
    std::int64_t home = -1;
    Mode mobility = Mode::car;
    int walking_radius = 0;
    double efforts = 0.0; // computed by the engine
    bool has_job = false;
    bool skilled_job = false;
    bool single = false;
    bool has_child = false;
    bool education = false;
    bool divorced = false;
    bool supported = false; // currently linked to a patient
    double hrs_support = 2.0;
    /// Uniform [0,1) draw; the caregiver is walk-willing when it falls below
    /// the configured walk-willing share. Fixed at synthesis so share sweeps
    /// stay coupled.
    double walk_propensity = 0.0;
};

struct Dyad {
    std::int64_t patient = 0;
    std::optional<std::int64_t> caregiver;
};

/// Demographic shares (proportions in [0,1]). JSON keys are the snake_case
/// forms of the census table rows.
struct DemographicMarginals {
    int population = 746;
    double urbanized = 0.964;
    double adults_with_education = 0.582;
    double adults_divorced = 0.088;
    double employment_males = 0.551;
    double employment_females = 0.426;
    double unemployed_males = 0.068;
    double unemployed_females = 0.104;
    double highly_skilled_jobs = 0.353;
    double unskilled_jobs = 0.135;
    double artisans_farmers = 0.218;
    double daily_mobility = 0.622;
    double private_transport = 0.723;
    double public_transport = 0.164;
    double pedestrian_transport = 0.101;
    double elderly_adults_ratio = 0.39;
    double elderly_over_75 = 0.129;
    double elderly_single = 0.33;
    double elderly_couples_no_children = 0.157;
    double elderly_couples_with_children = 0.051;
    double elderly_single_parent = 0.091;
    // Not tabulated; defaults are modelling choices.
    double female_share = 0.5;
    double green_transport = 0.0;
    std::optional<double> adults_single; // falls back to elderly_single

    double* share(const std::string& key)
    {
        for (auto& [name, member] : share_fields()) {
            if (name == key) {
                return &(this->*member);
            }
        }
        return nullptr;
    }

    static const std::vector<std::pair<std::string, double DemographicMarginals::*>>& share_fields()
    {
        using M = DemographicMarginals;
        static const std::vector<std::pair<std::string, double M::*>> fields = {
            {"urbanized", &M::urbanized},
            {"adults_with_education", &M::adults_with_education},
            {"adults_divorced", &M::adults_divorced},
            {"employment_males", &M::employment_males},
            {"employment_females", &M::employment_females},
            {"unemployed_males", &M::unemployed_males},
            {"unemployed_females", &M::unemployed_females},
            {"highly_skilled_jobs", &M::highly_skilled_jobs},
            {"unskilled_jobs", &M::unskilled_jobs},
            {"artisans_farmers", &M::artisans_farmers},
            {"daily_mobility", &M::daily_mobility},
            {"private_transport", &M::private_transport},
            {"public_transport", &M::public_transport},
            {"pedestrian_transport", &M::pedestrian_transport},
            {"elderly_adults_ratio", &M::elderly_adults_ratio},
            {"elderly_over_75", &M::elderly_over_75},
            {"elderly_single", &M::elderly_single},
            {"elderly_couples_no_children", &M::elderly_couples_no_children},
            {"elderly_couples_with_children", &M::elderly_couples_with_children},
            {"elderly_single_parent", &M::elderly_single_parent},
            {"female_share", &M::female_share},
            {"green_transport", &M::green_transport},
        };
        return fields;
    }

    double single_share_adults() const { return adults_single.value_or(elderly_single); }
    double has_child_share() const { return elderly_couples_with_children + elderly_single_parent; }
    double elder_fraction() const { return elderly_adults_ratio / (1.0 + elderly_adults_ratio); }

    void validate() const
    {
        auto fail = [](const std::string& key, double v, const char* why) {
            throw Error(ErrorCode::InvalidMarginals, "'" + key + "' = " + csv::format_double(v) + ": " + why);
        };
        if (population <= 0) {
            throw Error(ErrorCode::InvalidMarginals, "'population' must be > 0");
        }
        for (const auto& [name, member] : share_fields()) {
            const double v = this->*member;
            if (!(v >= 0.0 && v <= 1.0)) {
                fail(name, v, "share outside [0,1]");
            }
        }
        if (adults_single && !(*adults_single >= 0.0 && *adults_single <= 1.0)) {
            fail("adults_single", *adults_single, "share outside [0,1]");
        }
        if (private_transport + public_transport + green_transport > 1.0 + 1e-12) {
            fail("private_transport", private_transport, "motorised mobility shares sum above 1");
        }
        if (has_child_share() > 1.0 + 1e-12) {
            fail("elderly_single_parent", elderly_single_parent, "shares with children sum above 1");
        }
        if (elderly_over_75 > elder_fraction() + 1e-12) {
            fail("elderly_over_75", elderly_over_75, "exceeds the elderly share implied by elderly_adults_ratio");
        }
    }
};

inline DemographicMarginals parse_marginals(const nlohmann::json& j)
{
    if (!j.is_object()) {
        throw Error(ErrorCode::InvalidMarginals, "marginals must be a JSON object");
    }
    DemographicMarginals m;
    for (auto it = j.begin(); it != j.end(); ++it) {
        const auto& key = it.key();
        if (key == "population") {
            if (!it->is_number_integer()) {
                throw Error(ErrorCode::InvalidMarginals, "'population' must be an integer");
            }
            m.population = it->get<int>();
            continue;
        }
        if (!it->is_number()) {
            throw Error(ErrorCode::InvalidMarginals, "'" + key + "' must be a number");
        }
        if (key == "adults_single") {
            m.adults_single = it->get<double>();
            continue;
        }
        double* slot = m.share(key);
        if (!slot) {
            throw Error(ErrorCode::InvalidMarginals, "unknown key '" + key + "'");
        }
        *slot = it->get<double>();
    }
    m.validate();
    return m;
}

inline nlohmann::json marginals_to_json(const DemographicMarginals& m)
{
    nlohmann::json j;
    j["population"] = m.population;
    for (const auto& [name, member] : DemographicMarginals::share_fields()) {
        j[name] = m.*member;
    }
    if (m.adults_single) {
        j["adults_single"] = *m.adults_single;
    }
    return j;
}

/// Demographic thresholds and income bases shared with the engine config.
struct DemographyParams {
    int age_ref = 65;
    int age_work = 15;
    int age_gold = 75;
    double base_income = 1200.0;
    double base_income_ret = 700.0;
    double hrs_ass_max = 12.0;
    /// Care hours are scheduled in slots of this length (dyadic, so sums of
    /// hours stay exact).
    double care_slot_hours = 0.25;
    int max_age = 99;
    /// Geometric decay of the age distribution above age_gold.
    double old_age_decay = 0.9;
};

struct Population {
    std::vector<PatientAgent> patients;
    std::vector<CaregiverAgent> caregivers;
    std::vector<Dyad> dyads;
};

/// Aging stage from age band: five-year bands from age_ref, 85+ in stage 4.
inline int stage_for_age(int age, int age_ref)
{
    return std::clamp((age - age_ref) / 5, 0, kStageCount - 1);
}

inline double quantize_down(double hours, double slot) { return std::floor(hours / slot) * slot; }
inline double quantize_nearest(double hours, double slot) { return std::round(hours / slot) * slot; }

/// Care need of a stage: base assistance capped by hrs_ass_max, on the slot grid.
inline double stage_need(const AgingStageSpec& spec, const DemographyParams& p)
{
    return quantize_nearest(std::min(spec.base_assistance, p.hrs_ass_max), p.care_slot_hours);
}

namespace detail {

/// Marks exactly round(share * n) of the indices, chosen uniformly.
inline std::vector<char> quota(Rng& rng, std::size_t n, double share)
{
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) {
        order[i] = i;
    }
    rng.shuffle(order);
    const auto count = std::min(n, static_cast<std::size_t>(std::llround(share * static_cast<double>(n))));
    std::vector<char> mark(n, 0);
    for (std::size_t i = 0; i < count; ++i) {
        mark[order[i]] = 1;
    }
    return mark;
}

/// Symmetric uniform range around `base`, kept inside [lo, hi].
inline double income_around(Rng& rng, double base, double lo, double hi)
{
    const double half = std::max(0.0, std::min({0.5 * base, base - lo, hi - base}));
    return rng.uniform(base - half, base + half);
}

} // namespace detail

inline constexpr double kIncomeMin = 400.0;
inline constexpr double kIncomeMax = 3000.0;

/// Synthetic population of `n` agents: elders (age >= age_ref) become
/// patients, working-age agents become caregiver candidates. Each attribute
/// is assigned independently by quota: exactly round(share * m) members of
/// its eligible group receive it, chosen uniformly with the seeded stream.
inline Population synthesize(const DemographicMarginals& marginals, const std::vector<AgingStageSpec>& stages, int n,
                             std::uint64_t seed, const DemographyParams& params = {})
{
    marginals.validate();
    validate_stage_specs(stages);
    if (n <= 0) {
        throw Error(ErrorCode::InvalidInput, "population size must be > 0");
    }
    Rng rng(seed);
    const auto total = static_cast<std::size_t>(n);
    const auto n_elders =
        std::min(total, static_cast<std::size_t>(std::llround(marginals.elder_fraction() * static_cast<double>(n))));
    const auto n_adults = total - n_elders;
    const auto n_old = std::min(n_elders, static_cast<std::size_t>(std::llround(marginals.elderly_over_75 * n)));

    Population pop;
    pop.patients.resize(n_elders);
    pop.caregivers.resize(n_adults);

    // Ages. Elders 75+ follow a geometrically decaying profile.
    std::vector<int> elder_ages;
    elder_ages.reserve(n_elders);
    const int old_span = std::max(1, params.max_age - params.age_gold + 1);
    std::vector<double> old_cdf(static_cast<std::size_t>(old_span));
    double acc = 0.0;
    for (int k = 0; k < old_span; ++k) {
        acc += std::pow(params.old_age_decay, k);
        old_cdf[static_cast<std::size_t>(k)] = acc;
    }
    for (std::size_t i = 0; i < n_elders; ++i) {
        if (i < n_old) {
            const double u = rng.uniform() * acc;
            const auto k = std::upper_bound(old_cdf.begin(), old_cdf.end(), u) - old_cdf.begin();
            elder_ages.push_back(params.age_gold + static_cast<int>(std::min<std::ptrdiff_t>(k, old_span - 1)));
        }
        else {
            elder_ages.push_back(static_cast<int>(rng.integer(params.age_ref, params.age_gold - 1)));
        }
    }
    rng.shuffle(elder_ages);

    for (std::size_t i = 0; i < n_elders; ++i) {
        auto& p = pop.patients[i];
        p.id = static_cast<std::int64_t>(i);
        p.age = elder_ages[i];
        p.aging_stage = stage_for_age(p.age, params.age_ref);
        p.hrs_care_needed = stage_need(stages[static_cast<std::size_t>(p.aging_stage)], params);
    }
    for (std::size_t i = 0; i < n_adults; ++i) {
        auto& c = pop.caregivers[i];
        c.id = static_cast<std::int64_t>(i);
        c.age = static_cast<int>(rng.integer(params.age_work, params.age_ref - 1));
    }

    // Attributes over all agents: patients first, then caregivers.
    auto for_all = [&](const std::vector<char>& mark, auto patient_field, auto caregiver_field) {
        for (std::size_t i = 0; i < n_elders; ++i) {
            pop.patients[i].*patient_field = mark[i] != 0;
        }
        for (std::size_t i = 0; i < n_adults; ++i) {
            pop.caregivers[i].*caregiver_field = mark[n_elders + i] != 0;
        }
    };

    {
        auto female = detail::quota(rng, total, marginals.female_share);
        for (std::size_t i = 0; i < n_elders; ++i) {
            pop.patients[i].sex = female[i] ? Sex::female : Sex::male;
        }
        for (std::size_t i = 0; i < n_adults; ++i) {
            pop.caregivers[i].sex = female[n_elders + i] ? Sex::female : Sex::male;
        }
    }
    for_all(detail::quota(rng, total, marginals.adults_with_education), &PatientAgent::education,
            &CaregiverAgent::education);
    for_all(detail::quota(rng, total, marginals.adults_divorced), &PatientAgent::divorced, &CaregiverAgent::divorced);

    {
        auto single = detail::quota(rng, n_elders, marginals.elderly_single);
        auto child = detail::quota(rng, n_elders, marginals.has_child_share());
        for (std::size_t i = 0; i < n_elders; ++i) {
            pop.patients[i].single = single[i] != 0;
            pop.patients[i].has_child = child[i] != 0;
        }
    }
    {
        auto single = detail::quota(rng, n_adults, marginals.single_share_adults());
        auto child = detail::quota(rng, n_adults, marginals.has_child_share());
        for (std::size_t i = 0; i < n_adults; ++i) {
            pop.caregivers[i].single = single[i] != 0;
            pop.caregivers[i].has_child = child[i] != 0;
        }
    }

    // Employment by sex, then skill among the employed.
    for (auto sex : {Sex::male, Sex::female}) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < n_adults; ++i) {
            if (pop.caregivers[i].sex == sex) {
                members.push_back(i);
            }
        }
        const double share = sex == Sex::male ? marginals.employment_males : marginals.employment_females;
        auto employed = detail::quota(rng, members.size(), share);
        for (std::size_t k = 0; k < members.size(); ++k) {
            pop.caregivers[members[k]].has_job = employed[k] != 0;
        }
    }
    {
        std::vector<std::size_t> workers;
        for (std::size_t i = 0; i < n_adults; ++i) {
            if (pop.caregivers[i].has_job) {
                workers.push_back(i);
            }
        }
        auto skilled = detail::quota(rng, workers.size(), marginals.highly_skilled_jobs);
        for (std::size_t k = 0; k < workers.size(); ++k) {
            pop.caregivers[workers[k]].skilled_job = skilled[k] != 0;
        }
    }

    // Mobility split; the remainder walks.
    {
        std::vector<std::size_t> order(total);
        for (std::size_t i = 0; i < total; ++i) {
            order[i] = i;
        }
        rng.shuffle(order);
        auto count = [&](double share) { return static_cast<std::size_t>(std::llround(share * static_cast<double>(n))); };
        const auto n_car = std::min(total, count(marginals.private_transport));
        const auto n_pub = std::min(total - n_car, count(marginals.public_transport));
        const auto n_green = std::min(total - n_car - n_pub, count(marginals.green_transport));
        for (std::size_t r = 0; r < total; ++r) {
            Mode m = Mode::walk;
            if (r < n_car) {
                m = Mode::car;
            }
            else if (r < n_car + n_pub) {
                m = Mode::public_transport;
            }
            else if (r < n_car + n_pub + n_green) {
                m = Mode::green;
            }
            const auto i = order[r];
            if (i < n_elders) {
                pop.patients[i].mobility = m;
            }
            else {
                pop.caregivers[i - n_elders].mobility = m;
            }
        }
    }

    // Continuous attributes, one agent at a time.
    for (auto& p : pop.patients) {
        p.income = detail::income_around(rng, params.base_income_ret, kIncomeMin, kIncomeMax);
        p.life_expectancy = static_cast<int>(rng.integer(20, 50));
        p.walking_radius = static_cast<int>(rng.integer(0, 1500));
    }
    for (auto& c : pop.caregivers) {
        c.income = detail::income_around(rng, params.base_income, kIncomeMin, kIncomeMax);
        c.life_expectancy = static_cast<int>(rng.integer(20, 50));
        c.walking_radius = static_cast<int>(rng.integer(0, 1500));
        c.hrs_support =
            std::max(2.0, quantize_down(rng.uniform(2.0, params.hrs_ass_max), params.care_slot_hours));
        c.walk_propensity = rng.uniform();
    }
    return pop;
}

/// Places every agent on a uniformly drawn inhabited dwelling (patients
/// first, then caregivers, one draw each) and recomputes the has_elder_75
/// flags. Returns the updated dwelling list.
inline std::vector<Dwelling> assign_homes(Population& pop, std::vector<Dwelling> dwellings, std::uint64_t seed,
                                          int age_gold = 75)
{
    std::vector<std::size_t> inhabited;
    for (std::size_t i = 0; i < dwellings.size(); ++i) {
        if (dwellings[i].inhabited) {
            inhabited.push_back(i);
        }
    }
    if (inhabited.empty()) {
        throw Error(ErrorCode::NoDwellings, "no inhabited dwelling to place agents in");
    }
    Rng rng(seed);
    for (auto& d : dwellings) {
        d.has_elder_75 = false;
    }
    for (auto& p : pop.patients) {
        auto& d = dwellings[inhabited[rng.below(inhabited.size())]];
        p.home = d.id;
        if (p.age >= age_gold) {
            d.has_elder_75 = true;
        }
    }
    for (auto& c : pop.caregivers) {
        c.home = dwellings[inhabited[rng.below(inhabited.size())]].id;
    }
    return dwellings;
}

/// Greedy matching: patients by severity (descending, then id) each take the
/// nearest unmatched caregiver by walking network distance between homes;
/// distance ties go to the smaller caregiver id. Caregivers with no walking
/// route to the patient are not eligible.
inline void form_dyads(Population& pop, const RoadNetwork& net)
{
    std::vector<std::size_t> order(pop.patients.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto& pa = pop.patients[a];
        const auto& pb = pop.patients[b];
        if (pa.aging_stage != pb.aging_stage) {
            return pa.aging_stage > pb.aging_stage;
        }
        return pa.id < pb.id;
    });

    auto home_node = [&](std::int64_t dwelling_id) {
        const auto* d = net.dwelling(dwelling_id);
        if (!d) {
            throw Error(ErrorCode::InvalidInput, "agent home " + std::to_string(dwelling_id) + " is not a dwelling");
        }
        return d->node;
    };
    std::vector<std::size_t> caregiver_node(pop.caregivers.size());
    for (std::size_t c = 0; c < pop.caregivers.size(); ++c) {
        caregiver_node[c] = net.index_of(home_node(pop.caregivers[c].home));
        pop.caregivers[c].supported = false;
    }

    std::vector<char> taken(pop.caregivers.size(), 0);
    std::unordered_map<NodeId, ShortestPathTree> trees;
    pop.dyads.clear();
    for (auto pi : order) {
        auto& patient = pop.patients[pi];
        const NodeId origin = home_node(patient.home);
        auto it = trees.find(origin);
        if (it == trees.end()) {
            it = trees.emplace(origin, network_distances(net, origin, Mode::walk)).first;
        }
        const auto& tree = it->second;
        std::optional<std::size_t> best;
        double best_d = kInf;
        for (std::size_t c = 0; c < pop.caregivers.size(); ++c) {
            if (taken[c]) {
                continue;
            }
            const double d = tree.length[caregiver_node[c]];
            if (d < best_d) { // strict: equal distance keeps the smaller id
                best_d = d;
                best = c;
            }
        }
        Dyad dyad{patient.id, std::nullopt};
        if (best) {
            taken[*best] = 1;
            pop.caregivers[*best].supported = true;
            dyad.caregiver = pop.caregivers[*best].id;
        }
        patient.has_caregiver = dyad.caregiver.has_value();
        pop.dyads.push_back(dyad);
    }
    std::sort(pop.dyads.begin(), pop.dyads.end(), [](const Dyad& a, const Dyad& b) { return a.patient < b.patient; });
}

/// A target share next to the share realised in a synthetic population.
struct MarginalCheck {
    std::string key;
    double target = 0.0;
    double realized = 0.0;
};

inline std::vector<MarginalCheck> realized_shares(const Population& pop, const DemographicMarginals& m,
                                                  const DemographyParams& params = {})
{
    const double n_p = static_cast<double>(pop.patients.size());
    const double n_c = static_cast<double>(pop.caregivers.size());
    const double n = n_p + n_c;
    auto frac = [](double num, double den) { return den > 0 ? num / den : 0.0; };

    double old = 0, edu = 0, div = 0, female = 0, car = 0, pub = 0, green = 0, walk = 0;
    double p_single = 0, p_child = 0, c_single = 0, c_child = 0;
    double males = 0, females = 0, males_emp = 0, females_emp = 0, emp = 0, skilled = 0;
    auto count_mode = [&](Mode mode) {
        switch (mode) {
        case Mode::car: ++car; break;
        case Mode::public_transport: ++pub; break;
        case Mode::green: ++green; break;
        case Mode::walk: ++walk; break;
        }
    };
    for (const auto& p : pop.patients) {
        old += p.age >= params.age_gold;
        edu += p.education;
        div += p.divorced;
        female += p.sex == Sex::female;
        p_single += p.single;
        p_child += p.has_child;
        count_mode(p.mobility);
    }
    for (const auto& c : pop.caregivers) {
        edu += c.education;
        div += c.divorced;
        female += c.sex == Sex::female;
        c_single += c.single;
        c_child += c.has_child;
        count_mode(c.mobility);
        if (c.sex == Sex::male) {
            ++males;
            males_emp += c.has_job;
        }
        else {
            ++females;
            females_emp += c.has_job;
        }
        emp += c.has_job;
        skilled += c.has_job && c.skilled_job;
    }
    return {
        {"elderly_adults_ratio", m.elderly_adults_ratio, frac(n_p, n_c)},
        {"elderly_over_75", m.elderly_over_75, frac(old, n)},
        {"adults_with_education", m.adults_with_education, frac(edu, n)},
        {"adults_divorced", m.adults_divorced, frac(div, n)},
        {"female_share", m.female_share, frac(female, n)},
        {"employment_males", m.employment_males, frac(males_emp, males)},
        {"employment_females", m.employment_females, frac(females_emp, females)},
        {"highly_skilled_jobs", m.highly_skilled_jobs, frac(skilled, emp)},
        {"private_transport", m.private_transport, frac(car, n)},
        {"public_transport", m.public_transport, frac(pub, n)},
        {"green_transport", m.green_transport, frac(green, n)},
        {"pedestrian_transport_with_remainder",
         1.0 - m.private_transport - m.public_transport - m.green_transport, frac(walk, n)},
        {"elderly_single", m.elderly_single, frac(p_single, n_p)},
        {"elderly_with_children", m.has_child_share(), frac(p_child, n_p)},
        {"adults_single", m.single_share_adults(), frac(c_single, n_c)},
        {"adults_with_children", m.has_child_share(), frac(c_child, n_c)},
    };
}

inline nlohmann::json read_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::InvalidInput, path + ": cannot open file");
    }
    try {
        return nlohmann::json::parse(in);
    }
    catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::InvalidInput, path + ": " + e.what());
    }
}

} // namespace caresim
