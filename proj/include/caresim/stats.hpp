#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <tuple>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/special_functions/beta.hpp>

#include "caresim/error.hpp"

namespace caresim::stats {

// ---------------------------------------------------------------------------
// Student t distribution

/// Two-sided tail probability P(|T| >= |t|) for T ~ t(df), via the
/// regularized incomplete beta I_{df/(df+t^2)}(df/2, 1/2).
inline double student_t_two_sided(double t, double df)
{
    if (!(df > 0.0)) {
        throw Error(ErrorCode::InvalidInput, "degrees of freedom must be > 0");
    }
    if (std::isnan(t)) {
        return std::nan("");
    }
    if (std::isinf(t)) {
        return 0.0;
    }
    if (t == 0.0) {
        return 1.0;
    }
    const double t2 = t * t;
    // Evaluate the complementary form when x is close to 1 to keep precision.
    if (t2 < df) {
        const double y = t2 / (df + t2);
        return boost::math::ibetac(0.5, 0.5 * df, y);
    }
    const double x = df / (df + t2);
    return boost::math::ibeta(0.5 * df, 0.5, x);
}

/// P(T <= t) for T ~ t(df).
inline double student_t_cdf(double t, double df)
{
    const double tail = 0.5 * student_t_two_sided(t, df);
    return t >= 0.0 ? 1.0 - tail : tail;
}

// ---------------------------------------------------------------------------
// Paired comparisons

struct PairedSummary {
    double mean_a = 0.0;
    double mean_b = 0.0;
    double delta = 0.0;      // mean_b - mean_a
    double sd_diff = 0.0;    // sample SD of b - a
    double pct_change = 0.0; // NaN when mean_a == 0
    double cohens_d = 0.0;   // 0 and `degenerate` when sd_diff == 0
    bool degenerate = false;
    std::size_t n = 0;
};

namespace detail {

inline double mean(std::span<const double> v)
{
    double s = 0.0;
    for (double x : v) {
        s += x;
    }
    return s / static_cast<double>(v.size());
}

inline void check_pairs(std::span<const double> a, std::span<const double> b)
{
    if (a.size() != b.size()) {
        throw Error(ErrorCode::LengthMismatch, "paired vectors differ in length (" + std::to_string(a.size()) + " vs " +
                                                   std::to_string(b.size()) + ")");
    }
    if (a.size() < 2) {
        throw Error(ErrorCode::TooFewPairs, "at least 2 pairs required");
    }
}

} // namespace detail

inline PairedSummary paired_summary(std::span<const double> a, std::span<const double> b)
{
    detail::check_pairs(a, b);
    PairedSummary s;
    s.n = a.size();
    s.mean_a = detail::mean(a);
    s.mean_b = detail::mean(b);
    s.delta = s.mean_b - s.mean_a;

    std::vector<double> diff(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        diff[i] = b[i] - a[i];
    }
    const double md = detail::mean(diff);
    double ss = 0.0;
    for (double d : diff) {
        ss += (d - md) * (d - md);
    }
    s.sd_diff = std::sqrt(ss / static_cast<double>(s.n - 1));
    s.pct_change = s.mean_a != 0.0 ? 100.0 * s.delta / s.mean_a : std::nan("");
    if (s.sd_diff > 0.0) {
        s.cohens_d = s.delta / s.sd_diff;
    }
    else {
        s.cohens_d = 0.0;
        s.degenerate = true;
    }
    return s;
}

struct TTestResult {
    double t = 0.0;
    double df = 0.0;
    double p = 1.0;
};

/// Paired t-test of b against a, two-sided.
inline TTestResult paired_t_test(std::span<const double> a, std::span<const double> b)
{
    const auto s = paired_summary(a, b);
    if (!(s.sd_diff > 0.0)) {
        throw Error(ErrorCode::DegenerateVariance, "paired differences have zero variance");
    }
    TTestResult r;
    r.df = static_cast<double>(s.n - 1);
    r.t = s.delta / (s.sd_diff / std::sqrt(static_cast<double>(s.n)));
    r.p = student_t_two_sided(r.t, r.df);
    return r;
}

// ---------------------------------------------------------------------------
// Intraclass correlation

struct IccResult {
    double icc = 0.0;
    bool clipped = false; // raw estimate was negative (or undefined) and set to 0
    double raw = 0.0;
    double msb = 0.0;
    double msw = 0.0;
    double n0 = 0.0; // size-corrected mean group size
    std::size_t groups = 0;
    std::size_t observations = 0;
};

/// One-way random-effects ICC(1) from ANOVA mean squares, with the
/// unbalanced mean group size n0 = (N - sum n_g^2 / N) / (G - 1).
inline IccResult icc_oneway(const std::vector<std::vector<double>>& groups)
{
    IccResult r;
    std::size_t n = 0;
    for (const auto& g : groups) {
        if (!g.empty()) {
            ++r.groups;
            n += g.size();
        }
    }
    r.observations = n;
    if (r.groups < 2) {
        throw Error(ErrorCode::TooFewGroups, "ICC needs at least 2 non-empty groups");
    }
    if (n < r.groups + 2) {
        throw Error(ErrorCode::TooFewGroups, "ICC needs at least 2 within-group degrees of freedom");
    }
    const double N = static_cast<double>(n);
    const double G = static_cast<double>(r.groups);

    double grand = 0.0;
    for (const auto& g : groups) {
        for (double x : g) {
            grand += x;
        }
    }
    grand /= N;

    double ssb = 0.0, ssw = 0.0, sum_sq_sizes = 0.0;
    for (const auto& g : groups) {
        if (g.empty()) {
            continue;
        }
        const double m = detail::mean(g);
        const double ng = static_cast<double>(g.size());
        ssb += ng * (m - grand) * (m - grand);
        for (double x : g) {
            ssw += (x - m) * (x - m);
        }
        sum_sq_sizes += ng * ng;
    }
    r.msb = ssb / (G - 1.0);
    r.msw = ssw / (N - G);
    r.n0 = (N - sum_sq_sizes / N) / (G - 1.0);
    const double denom = r.msb + (r.n0 - 1.0) * r.msw;
    r.raw = denom > 0.0 ? (r.msb - r.msw) / denom : std::nan("");
    if (!(r.raw >= 0.0)) {
        r.icc = 0.0;
        r.clipped = true;
    }
    else {
        r.icc = std::min(r.raw, 1.0);
    }
    return r;
}

/// Variance inflation of cluster sampling: 1 + (m - 1) * icc.
inline double design_effect(double icc, double mean_cluster_size)
{
    if (!(icc >= 0.0 && icc <= 1.0)) {
        throw Error(ErrorCode::InvalidInput, "icc must be in [0,1]");
    }
    if (!(mean_cluster_size >= 1.0)) {
        throw Error(ErrorCode::InvalidInput, "mean cluster size must be >= 1");
    }
    return 1.0 + (mean_cluster_size - 1.0) * icc;
}

// ---------------------------------------------------------------------------
// Cluster-robust OLS

struct RegressionResult {
    std::vector<double> coefficients;
    std::vector<double> std_errors;
    std::vector<double> t_stats;
    std::vector<double> p_values;
    std::size_t n_obs = 0;
    std::size_t n_clusters = 0;
    double df = 0.0; // G - 1
};

/// OLS with CR1 cluster-robust variance
///   V = c (X'X)^-1 [sum_g X_g' u_g u_g' X_g] (X'X)^-1,  c = G/(G-1) (N-1)/(N-k).
/// Coefficients solve the normal equations with a column-pivoted QR;
/// t statistics are referred to t(G - 1).
inline RegressionResult cluster_robust_ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                           const std::vector<std::int64_t>& cluster_ids)
{
    const auto n = static_cast<std::size_t>(X.rows());
    const auto k = static_cast<std::size_t>(X.cols());
    if (static_cast<std::size_t>(y.size()) != n || cluster_ids.size() != n) {
        throw Error(ErrorCode::LengthMismatch, "X, y and cluster ids must have the same number of rows");
    }
    if (n < k + 1) {
        throw Error(ErrorCode::RankDeficient, "need more rows than columns");
    }
    std::map<std::int64_t, std::vector<Eigen::Index>> clusters;
    for (std::size_t i = 0; i < n; ++i) {
        clusters[cluster_ids[i]].push_back(static_cast<Eigen::Index>(i));
    }
    if (clusters.size() < 2) {
        throw Error(ErrorCode::SingleCluster, "cluster-robust errors need at least 2 clusters");
    }

    const Eigen::MatrixXd xtx = X.transpose() * X;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(xtx);
    if (static_cast<std::size_t>(qr.rank()) < k) {
        throw Error(ErrorCode::RankDeficient, "design matrix is rank deficient");
    }
    const Eigen::VectorXd beta = qr.solve(X.transpose() * y);
    const Eigen::MatrixXd bread = qr.inverse();
    const Eigen::VectorXd resid = y - X * beta;

    Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
    for (const auto& [_, rows] : clusters) {
        Eigen::VectorXd score = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(k));
        for (auto i : rows) {
            score += X.row(i).transpose() * resid(i);
        }
        meat += score * score.transpose();
    }
    const double G = static_cast<double>(clusters.size());
    const double N = static_cast<double>(n);
    const double K = static_cast<double>(k);
    const double scale = G / (G - 1.0) * (N - 1.0) / (N - K);
    const Eigen::MatrixXd vcov = scale * bread * meat * bread;

    RegressionResult r;
    r.n_obs = n;
    r.n_clusters = clusters.size();
    r.df = G - 1.0;
    for (std::size_t j = 0; j < k; ++j) {
        const auto jj = static_cast<Eigen::Index>(j);
        const double b = beta(jj);
        const double se = std::sqrt(std::max(0.0, vcov(jj, jj)));
        double t = 0.0;
        double p = 1.0;
        if (se > 0.0) {
            t = b / se;
            p = student_t_two_sided(t, r.df);
        }
        else if (b != 0.0) {
            t = std::copysign(std::numeric_limits<double>::infinity(), b);
            p = 0.0;
        }
        r.coefficients.push_back(b);
        r.std_errors.push_back(se);
        r.t_stats.push_back(t);
        r.p_values.push_back(p);
    }
    return r;
}

// ---------------------------------------------------------------------------
// sim x cluster aggregation

struct SimClusterKey {
    int scenario = 0;
    int replicate = 0;
    int cluster = 0;

    auto operator<=>(const SimClusterKey&) const = default;
};

struct KeyedObservation {
    SimClusterKey key;
    std::vector<double> values; // NaN marks a missing value
};

struct GroupMean {
    SimClusterKey key;
    std::vector<double> means; // NaN when no value was present
    std::size_t count = 0;     // observations in the group
};

/// Arithmetic mean of each value per (scenario, replicate, cluster), in key order.
inline std::vector<GroupMean> aggregate_sim_cluster(const std::vector<KeyedObservation>& records)
{
    struct Acc {
        std::vector<double> sum;
        std::vector<std::size_t> n;
        std::size_t count = 0;
    };
    std::map<SimClusterKey, Acc> groups;
    for (const auto& r : records) {
        auto& acc = groups[r.key];
        if (acc.sum.size() < r.values.size()) {
            acc.sum.resize(r.values.size(), 0.0);
            acc.n.resize(r.values.size(), 0);
        }
        ++acc.count;
        for (std::size_t j = 0; j < r.values.size(); ++j) {
            if (!std::isnan(r.values[j])) {
                acc.sum[j] += r.values[j];
                ++acc.n[j];
            }
        }
    }
    std::vector<GroupMean> out;
    out.reserve(groups.size());
    for (const auto& [key, acc] : groups) {
        GroupMean g;
        g.key = key;
        g.count = acc.count;
        for (std::size_t j = 0; j < acc.sum.size(); ++j) {
            g.means.push_back(acc.n[j] ? acc.sum[j] / static_cast<double>(acc.n[j]) : std::nan(""));
        }
        out.push_back(std::move(g));
    }
    return out;
}

} // namespace caresim::stats
