#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "caresim/network.hpp"
#include "oracles.hpp"

namespace fixtures {

using namespace caresim;

// Facilities of every kind at the origin, perfect straight streets around it.
inline RoadNetwork plaza()
{
    std::vector<Node> nodes = {{0, 0, 0, 0}, {1, 100, 0, 0}, {2, 0, 100, 0}, {3, -100, 0, 0}};
    std::vector<Edge> edges = {oracle::edge(0, 1, 100.0), oracle::edge(0, 2, 100.0), oracle::edge(0, 3, 100.0)};
    std::vector<Facility> fac;
    for (int k = 0; k < 5; ++k) {
        fac.push_back({k, k, 0, k == 0});
    }
    return RoadNetwork(nodes, edges, {}, fac);
}

// Random attributes and facilities on top of a geometric graph.
inline RoadNetwork decorate(std::mt19937_64& gen, const RoadNetwork& base, int n_facilities)
{
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<Edge> edges;
    for (auto e : base.edges()) {
        e.surface = unit(gen);
        e.width = 3.0 * unit(gen);
        e.safety = unit(gen);
        edges.push_back(e);
    }
    std::vector<Facility> fac;
    for (int f = 0; f < n_facilities; ++f) {
        const auto node = base.nodes()[gen() % base.node_count()].id;
        fac.push_back({f, static_cast<int>(gen() % 5), node, unit(gen) < 0.5});
    }
    return RoadNetwork(base.nodes(), edges, {}, fac);
}

/// Random one-way layouts for ICC checks; balanced ones share a group size.
/// The first two groups always carry an extra observation.
inline std::vector<std::vector<double>> random_groups(std::mt19937_64& gen, bool balanced)
{
    std::uniform_int_distribution<int> n_groups(2, 12);
    std::uniform_int_distribution<int> size(1, 9);
    std::normal_distribution<double> effect(0.0, 2.0);
    std::normal_distribution<double> noise(0.0, 1.0);
    const int g = n_groups(gen);
    const int fixed = size(gen) + 1;
    std::vector<std::vector<double>> out;
    for (int i = 0; i < g; ++i) {
        const double mu = 10.0 + effect(gen);
        const int n = balanced ? fixed : size(gen);
        std::vector<double> v;
        for (int j = 0; j < n; ++j) {
            v.push_back(mu + noise(gen));
        }
        out.push_back(v);
    }
    out[0].push_back(out[0][0] + 0.5);
    out[1].push_back(out[1][0] - 0.5);
    return out;
}

struct ClusteredData {
    std::vector<std::vector<double>> rows; // intercept first
    std::vector<double> y;
    std::vector<std::int64_t> ids;
};

/// Regression data with k columns, cluster random effects and
/// heteroskedastic noise. Cluster ids are deliberately non-contiguous.
inline ClusteredData clustered_regression(std::mt19937_64& gen, int k)
{
    std::normal_distribution<double> noise(0.0, 1.0);
    std::uniform_int_distribution<int> n_clusters(3, 30);
    std::uniform_int_distribution<int> per(1, 8);
    ClusteredData d;
    const int g = n_clusters(gen);
    for (int c = 0; c < g; ++c) {
        const double u = noise(gen);
        const int m = per(gen);
        for (int i = 0; i < m; ++i) {
            std::vector<double> row{1.0};
            for (int j = 1; j < k; ++j) {
                row.push_back(noise(gen) + (j == 1 ? c % 2 : 0));
            }
            double yi = 1.0 + u + noise(gen) * (1.0 + 0.5 * std::fabs(row[1]));
            for (int j = 1; j < k; ++j) {
                yi += 0.3 * j * row[static_cast<std::size_t>(j)];
            }
            d.rows.push_back(row);
            d.y.push_back(yi);
            d.ids.push_back(1000 - 7 * c);
        }
    }
    // top up tiny draws so the design has more rows than columns
    while (d.rows.size() < static_cast<std::size_t>(k + 2)) {
        std::vector<double> row{1.0};
        for (int j = 1; j < k; ++j) {
            row.push_back(noise(gen));
        }
        d.rows.push_back(row);
        d.y.push_back(noise(gen));
        d.ids.push_back(d.ids.size() % 2 ? 1 : 2);
    }
    return d;
}

inline Eigen::MatrixXd to_matrix(const std::vector<std::vector<double>>& rows)
{
    Eigen::MatrixXd X(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < rows[i].size(); ++j) {
            X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
        }
    }
    return X;
}

} // namespace fixtures
