#pragma once

#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "caresim/scenarios.hpp"
#include "caresim/stats.hpp"

namespace caresim {

inline constexpr std::array<const char*, 4> kKpiNames = {"effort", "overwhelmed", "walkability", "unmet_hours"};

namespace detail {

inline double kpi_value(const ReplicateRecord& r, std::size_t k)
{
    switch (k) {
    case 0: return r.effort;
    case 1: return r.overwhelmed;
    case 2: return r.walkability;
    default: return r.unmet_hours;
    }
}

inline double kpi_value(const GroupKpi& g, std::size_t k)
{
    switch (k) {
    case 0: return g.effort;
    case 1: return g.overwhelmed;
    case 2: return g.walkability;
    default: return g.unmet_hours;
    }
}

inline nlohmann::json number_or_null(double x)
{
    return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr);
}

inline nlohmann::json summary_json(const stats::PairedSummary& s)
{
    return {{"n", s.n},
            {"mean_a", number_or_null(s.mean_a)},
            {"mean_b", number_or_null(s.mean_b)},
            {"delta", number_or_null(s.delta)},
            {"sd_diff", number_or_null(s.sd_diff)},
            {"pct_change", number_or_null(s.pct_change)},
            {"cohens_d", number_or_null(s.cohens_d)},
            {"degenerate", s.degenerate}};
}

/// Paired summary plus t-test, with the failure reason in place of numbers
/// when a statistic is undefined.
inline nlohmann::json paired_block(const std::vector<double>& a, const std::vector<double>& b)
{
    nlohmann::json j;
    try {
        const auto s = stats::paired_summary(a, b);
        j = summary_json(s);
        try {
            const auto t = stats::paired_t_test(a, b);
            j["t"] = number_or_null(t.t);
            j["df"] = t.df;
            j["p"] = number_or_null(t.p);
        }
        catch (const Error& e) {
            j["t"] = nullptr;
            j["df"] = nullptr;
            j["p"] = nullptr;
            j["note"] = std::string(to_string(e.code()));
        }
    }
    catch (const Error& e) {
        j = {{"n", a.size()}, {"note", std::string(to_string(e.code()))}};
    }
    return j;
}

/// Drops pairs where either side is NaN.
inline void complete_pairs(std::vector<double>& a, std::vector<double>& b)
{
    std::size_t w = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!std::isnan(a[i]) && !std::isnan(b[i])) {
            a[w] = a[i];
            b[w] = b[i];
            ++w;
        }
    }
    a.resize(w);
    b.resize(w);
}

inline std::optional<double> json_number(const nlohmann::json& j, const char* key)
{
    if (j.contains(key) && j[key].is_number()) {
        return j[key].get<double>();
    }
    return std::nullopt;
}

} // namespace detail

/// Scenario-0 and scenario-1 records matched by (sweep point, replicate).
struct PairedRecords {
    std::string scenario_a;
    std::string scenario_b;
    std::vector<const ReplicateRecord*> a;
    std::vector<const ReplicateRecord*> b;
};

inline PairedRecords pair_records(const std::vector<ReplicateRecord>& records)
{
    std::map<std::pair<std::size_t, int>, std::array<const ReplicateRecord*, 2>> cells;
    PairedRecords out;
    for (const auto& r : records) {
        auto& slot = cells[{r.sweep.index, r.replicate}][static_cast<std::size_t>(r.scenario_index)];
        if (slot) {
            throw Error(ErrorCode::InvalidInput, "duplicate record for scenario " + std::to_string(r.scenario_index) +
                                                     ", replicate " + std::to_string(r.replicate) + ", sweep point " +
                                                     std::to_string(r.sweep.index));
        }
        slot = &r;
        (r.scenario_index == 0 ? out.scenario_a : out.scenario_b) = r.scenario;
    }
    for (const auto& [key, pair] : cells) {
        if (!pair[0] || !pair[1]) {
            throw Error(ErrorCode::InvalidInput, "replicate " + std::to_string(key.second) + " at sweep point " +
                                                     std::to_string(key.first) + " lacks a partner scenario");
        }
        out.a.push_back(pair[0]);
        out.b.push_back(pair[1]);
    }
    if (out.a.size() < 2) {
        throw Error(ErrorCode::TooFewPairs, "at least 2 paired replicates required");
    }
    return out;
}

/// One (scenario, replicate, cluster) group mean per KPI, averaged over sweep points.
inline std::vector<stats::GroupMean> sim_cluster_means(const std::vector<ReplicateRecord>& records)
{
    std::vector<stats::KeyedObservation> obs;
    for (const auto& r : records) {
        for (const auto& [c, g] : r.clusters) {
            stats::KeyedObservation o;
            o.key = {r.scenario_index, r.replicate, c};
            for (std::size_t k = 0; k < kKpiNames.size(); ++k) {
                o.values.push_back(detail::kpi_value(g, k));
            }
            obs.push_back(std::move(o));
        }
    }
    return stats::aggregate_sim_cluster(obs);
}

/// Full analysis of an experiment's replicate records.
inline nlohmann::json analyze(const std::vector<ReplicateRecord>& records)
{
    using nlohmann::json;
    const auto paired = pair_records(records);
    json out;
    out["methods"] = {
        {"sd", "sample standard deviation (n - 1 denominator) of paired differences"},
        {"effect_size", "Cohen's d = mean difference / SD of differences; 0 and flagged degenerate when SD is 0"},
        {"pct_change", "100 * (mean_b - mean_a) / mean_a; null when mean_a is 0"},
        {"t_test", "paired two-sided t-test, df = n - 1, Student t distribution"},
        {"icc", "one-way ANOVA ICC(1) on sim x cluster means grouped by cluster; negative estimates set to 0 and "
                "flagged"},
        {"design_effect", "1 + (mean cluster size - 1) * icc"},
        {"regression", "kpi ~ 1 + scenario_b indicator on sim x cluster means; CR1 cluster-robust errors, clusters = "
                       "replicate x settlement cluster, scale G/(G-1) * (N-1)/(N-k), t with G - 1 df"},
        {"pairing", "replicate level: matched by (sweep point, replicate); sim x cluster level: matched by "
                    "(replicate, cluster), averaged over sweep points"},
    };
    out["scenarios"] = {paired.scenario_a, paired.scenario_b};
    out["pairs"] = paired.a.size();

    // replicate level
    json rep;
    std::array<json, kKpiNames.size()> rep_blocks;
    for (std::size_t k = 0; k < kKpiNames.size(); ++k) {
        std::vector<double> a, b;
        for (std::size_t i = 0; i < paired.a.size(); ++i) {
            a.push_back(detail::kpi_value(*paired.a[i], k));
            b.push_back(detail::kpi_value(*paired.b[i], k));
        }
        rep_blocks[k] = detail::paired_block(a, b);
        rep[kKpiNames[k]] = rep_blocks[k];
    }
    out["replicate_level"] = rep;

    // sim x cluster level
    const auto groups = sim_cluster_means(records);
    std::map<std::pair<int, int>, std::array<const stats::GroupMean*, 2>> by_cell;
    for (const auto& g : groups) {
        by_cell[{g.key.replicate, g.key.cluster}][static_cast<std::size_t>(g.key.scenario)] = &g;
    }
    json sc;
    sc["groups"] = groups.size();
    for (std::size_t k = 0; k < kKpiNames.size(); ++k) {
        std::vector<double> a, b;
        for (const auto& [_, pair] : by_cell) {
            if (pair[0] && pair[1]) {
                a.push_back(pair[0]->means[k]);
                b.push_back(pair[1]->means[k]);
            }
        }
        detail::complete_pairs(a, b);
        sc[kKpiNames[k]] = detail::paired_block(a, b);
    }
    out["sim_cluster_level"] = sc;

    // ICC and design effect
    json icc;
    for (std::size_t k = 0; k < kKpiNames.size(); ++k) {
        std::map<int, std::vector<double>> by_cluster;
        for (const auto& g : groups) {
            if (!std::isnan(g.means[k])) {
                by_cluster[g.key.cluster].push_back(g.means[k]);
            }
        }
        std::vector<std::vector<double>> cl;
        std::size_t n = 0;
        for (auto& [_, v] : by_cluster) {
            n += v.size();
            cl.push_back(std::move(v));
        }
        try {
            const auto r = stats::icc_oneway(cl);
            const double m = static_cast<double>(n) / static_cast<double>(r.groups);
            icc[kKpiNames[k]] = {{"icc", r.icc},
                                 {"raw", detail::number_or_null(r.raw)},
                                 {"clipped", r.clipped},
                                 {"clusters", r.groups},
                                 {"observations", r.observations},
                                 {"mean_cluster_size", m},
                                 {"design_effect", stats::design_effect(r.icc, m)}};
        }
        catch (const Error& e) {
            icc[kKpiNames[k]] = {{"note", std::string(to_string(e.code()))}};
        }
    }
    out["icc"] = icc;

    // cluster-robust regression
    json reg;
    for (std::size_t k = 0; k < kKpiNames.size(); ++k) {
        std::vector<const stats::GroupMean*> rows;
        for (const auto& g : groups) {
            if (!std::isnan(g.means[k])) {
                rows.push_back(&g);
            }
        }
        Eigen::MatrixXd X(static_cast<Eigen::Index>(rows.size()), 2);
        Eigen::VectorXd y(static_cast<Eigen::Index>(rows.size()));
        std::vector<std::int64_t> ids;
        std::map<std::pair<int, int>, std::int64_t> cluster_index;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const auto ii = static_cast<Eigen::Index>(i);
            X(ii, 0) = 1.0;
            X(ii, 1) = rows[i]->key.scenario == 1 ? 1.0 : 0.0;
            y(ii) = rows[i]->means[k];
            auto [it, _] = cluster_index.try_emplace({rows[i]->key.replicate, rows[i]->key.cluster},
                                                     static_cast<std::int64_t>(cluster_index.size()));
            ids.push_back(it->second);
        }
        try {
            const auto r = stats::cluster_robust_ols(X, y, ids);
            json terms = json::array();
            const std::array<const char*, 2> names = {"intercept", "scenario_b"};
            for (std::size_t j = 0; j < 2; ++j) {
                terms.push_back({{"term", names[j]},
                                 {"estimate", r.coefficients[j]},
                                 {"std_error", r.std_errors[j]},
                                 {"t", detail::number_or_null(r.t_stats[j])},
                                 {"p", r.p_values[j]}});
            }
            reg[kKpiNames[k]] = {{"terms", terms}, {"observations", r.n_obs}, {"clusters", r.n_clusters},
                                 {"df", r.df}};
        }
        catch (const Error& e) {
            reg[kKpiNames[k]] = {{"note", std::string(to_string(e.code()))}};
        }
    }
    out["regression"] = reg;

    // stage-level and micro-level comparisons
    json stages = json::array();
    for (std::size_t s = 0; s < kStageCount; ++s) {
        json st;
        st["stage"] = s;
        const std::array<std::pair<const char*, double GroupKpi::*>, 2> kpis = {
            std::pair{"effort", &GroupKpi::effort}, std::pair{"unmet_hours", &GroupKpi::unmet_hours}};
        for (const auto& [name, field] : kpis) {
            std::vector<double> a, b;
            for (std::size_t i = 0; i < paired.a.size(); ++i) {
                const auto& ka = paired.a[i]->stages[s];
                const auto& kb = paired.b[i]->stages[s];
                a.push_back(ka ? (*ka).*field : std::nan(""));
                b.push_back(kb ? (*kb).*field : std::nan(""));
            }
            detail::complete_pairs(a, b);
            st[name] = detail::paired_block(a, b);
        }
        const std::array<std::pair<const char*, double MicroConditions::*>, 3> micro = {
            std::pair{"detour_ratio", &MicroConditions::detour_ratio},
            std::pair{"walkability", &MicroConditions::walkability},
            std::pair{"proximity", &MicroConditions::household_proximity}};
        json mj;
        for (const auto& [name, field] : micro) {
            std::vector<double> a, b;
            for (std::size_t i = 0; i < paired.a.size(); ++i) {
                const auto& ma = paired.a[i]->micro[s];
                const auto& mb = paired.b[i]->micro[s];
                a.push_back(ma ? (*ma).*field : std::nan(""));
                b.push_back(mb ? (*mb).*field : std::nan(""));
            }
            detail::complete_pairs(a, b);
            mj[name] = detail::paired_block(a, b);
        }
        st["micro"] = mj;
        stages.push_back(st);
    }
    out["stages"] = stages;

    // synthesis: labels derived from the blocks above
    const double alpha = 0.05;
    auto direction = [](const json& block) -> std::string {
        const auto d = detail::json_number(block, "delta");
        if (!d || *d == 0.0) {
            return "unchanged";
        }
        return *d > 0 ? "increase" : "decrease";
    };
    auto significant = [&](const json& block) {
        const auto p = detail::json_number(block, "p");
        return p && *p < alpha;
    };

    json system;
    std::vector<std::string> changed;
    for (std::size_t k = 0; k < kKpiNames.size(); ++k) {
        const auto& b = rep_blocks[k];
        const bool sig = significant(b);
        system[kKpiNames[k]] = {{"direction", direction(b)},
                                {"significant", sig},
                                {"pct_change", b.contains("pct_change") ? b["pct_change"] : json(nullptr)},
                                {"cohens_d", b.contains("cohens_d") ? b["cohens_d"] : json(nullptr)}};
        if (sig) {
            changed.emplace_back(kKpiNames[k]);
        }
    }
    system["significant_kpis"] = changed;
    system["verdict"] = changed.empty() ? "no significant system-level change" : "significant system-level change";

    json stage_syn;
    std::vector<std::size_t> worse_unmet, worse_effort;
    for (std::size_t s = 0; s < kStageCount; ++s) {
        const auto& st = stages[s];
        if (significant(st["unmet_hours"]) && direction(st["unmet_hours"]) == "increase") {
            worse_unmet.push_back(s);
        }
        if (significant(st["effort"]) && direction(st["effort"]) == "increase") {
            worse_effort.push_back(s);
        }
    }
    stage_syn["stages_with_more_unmet_need"] = worse_unmet;
    stage_syn["stages_with_more_caregiver_effort"] = worse_effort;

    json micro_syn;
    for (const char* name : {"detour_ratio", "walkability", "proximity"}) {
        json per_stage = json::array();
        for (std::size_t s = 0; s < kStageCount; ++s) {
            const auto& b = stages[s]["micro"][name];
            per_stage.push_back({{"stage", s}, {"direction", direction(b)}, {"significant", significant(b)}});
        }
        micro_syn[name] = per_stage;
    }

    out["synthesis"] = {{"alpha", alpha}, {"system", system}, {"stage", stage_syn}, {"micro", micro_syn}};
    return out;
}

} // namespace caresim
