#pragma once

#include <cmath>
#include <optional>
#include <unordered_map>
#include <vector>

#include "caresim/network.hpp"

namespace caresim {

/// Tunables of the accessibility indicators. None of the weights are
/// empirically calibrated; all are exposed so sweeps can probe them.
struct IndicatorConfig {
    double walk_range_minutes = 15.0;
    double buffer_m = 300.0;
    /// One weight per facility kind; empty means uniform over the network's kinds.
    std::vector<double> kind_weights;
    SuitabilityWeights suitability;
    double s_min = 0.4;
    double gamma_vuln = 0.0;
    double alpha = 0.4; // service accessibility
    double beta = 0.4;  // infrastructure suitability
    double gamma = 0.2; // route efficiency

    std::vector<double> weights_for(int n_kinds) const
    {
        if (kind_weights.empty()) {
            return std::vector<double>(static_cast<std::size_t>(n_kinds), 1.0 / n_kinds);
        }
        if (kind_weights.size() != static_cast<std::size_t>(n_kinds)) {
            throw Error(ErrorCode::InvalidInput, "kind_weights has " + std::to_string(kind_weights.size()) +
                                                     " entries, network has " + std::to_string(n_kinds) +
                                                     " facility kinds");
        }
        return kind_weights;
    }

    void validate() const
    {
        auto check_sum = [](double s, const char* what) {
            if (std::abs(s - 1.0) > 1e-9) {
                throw Error(ErrorCode::InvalidInput, std::string(what) + " must sum to 1");
            }
        };
        auto non_negative = [](double w, const char* what) {
            if (!(w >= 0.0)) {
                throw Error(ErrorCode::InvalidInput, std::string(what) + " must be non-negative");
            }
        };
        if (!(walk_range_minutes >= 0.0)) {
            throw Error(ErrorCode::InvalidInput, "walk_range_minutes must be >= 0");
        }
        if (!(buffer_m >= 0.0)) {
            throw Error(ErrorCode::InvalidInput, "buffer_m must be >= 0");
        }
        if (!kind_weights.empty()) {
            double s = 0.0;
            for (double w : kind_weights) {
                non_negative(w, "kind_weights");
                s += w;
            }
            check_sum(s, "kind_weights");
        }
        const auto& sw = suitability;
        for (double w : {sw.surface, sw.width, sw.slope, sw.safety}) {
            non_negative(w, "suitability_weights");
        }
        check_sum(sw.surface + sw.width + sw.slope + sw.safety, "suitability_weights");
        if (!(sw.width_saturation_m > 0.0) || !(sw.slope_cutoff > 0.0)) {
            throw Error(ErrorCode::InvalidInput, "suitability shape constants must be > 0");
        }
        for (double w : {alpha, beta, gamma}) {
            non_negative(w, "walkability_weights");
        }
        check_sum(alpha + beta + gamma, "walkability_weights");
        if (!(s_min >= 0.0 && s_min <= 1.0)) {
            throw Error(ErrorCode::InvalidInput, "s_min must be in [0,1]");
        }
        non_negative(gamma_vuln, "gamma_vuln");
    }
};

inline double infrastructure_suitability(const Edge& edge, const IndicatorConfig& cfg)
{
    return edge_suitability(edge, cfg.suitability);
}

/// Walking path length over straight-line distance (>= 1).
inline double route_efficiency(const RoadNetwork& net, NodeId origin, NodeId dest, const TravelConfig& travel = {})
{
    const double chord = straight_line(net, origin, dest);
    if (origin == dest || chord == 0.0) {
        throw Error(ErrorCode::DegenerateGeometry, "route efficiency undefined between nodes " +
                                                       std::to_string(origin) + " and " + std::to_string(dest) +
                                                       " (zero straight-line distance)");
    }
    const auto path = shortest_path(net, origin, dest, Mode::walk, travel);
    return path.length / chord;
}

namespace detail {

inline ShortestPathTree walk_tree(const RoadNetwork& net, NodeId origin, double minutes, const TravelConfig& travel)
{
    SearchOptions opt;
    opt.mode = Mode::walk;
    opt.bound = minutes;
    return search(net, net.index_of(origin), opt, travel);
}

inline bool within(const ShortestPathTree& t, std::size_t idx, double minutes)
{
    return t.reached(idx) && t.cost[idx] <= minutes;
}

inline double service_score(const RoadNetwork& net, const ShortestPathTree& t, const IndicatorConfig& cfg)
{
    const auto weights = cfg.weights_for(net.n_kinds());
    std::vector<char> present(weights.size(), 0);
    for (const auto& f : net.facilities()) {
        if (within(t, net.index_of(f.node), cfg.walk_range_minutes)) {
            present[static_cast<std::size_t>(f.kind)] = 1;
        }
    }
    double score = 0.0;
    for (std::size_t k = 0; k < weights.size(); ++k) {
        if (present[k]) {
            score += weights[k];
        }
    }
    return score;
}

} // namespace detail

/// Weighted share of facility kinds with at least one facility inside the
/// walking range.
inline double service_accessibility(const RoadNetwork& net, NodeId origin, const IndicatorConfig& cfg,
                                    const TravelConfig& travel = {})
{
    auto tree = detail::walk_tree(net, origin, cfg.walk_range_minutes, travel);
    return detail::service_score(net, tree, cfg);
}

/// Inhabited dwellings within buffer_m of walking distance, each weighted
/// by 1 + gamma_vuln when it hosts an elder aged 75+.
inline double residential_proximity(const RoadNetwork& net, NodeId origin, const IndicatorConfig& cfg)
{
    double total = 0.0;
    for (const auto& d : dwellings_within(net, origin, cfg.buffer_m)) {
        total += 1.0 + (d.has_elder_75 ? cfg.gamma_vuln : 0.0);
    }
    return total;
}

/// True when an essential facility is reachable on foot within the walking
/// range using only edges with suitability >= s_min.
inline bool has_safe_essential_access(const RoadNetwork& net, NodeId origin, const IndicatorConfig& cfg,
                                      const TravelConfig& travel = {})
{
    SearchOptions opt;
    opt.mode = Mode::walk;
    opt.bound = cfg.walk_range_minutes;
    opt.edge_filter = [&](const Edge& e) { return infrastructure_suitability(e, cfg) >= cfg.s_min; };
    auto tree = search(net, net.index_of(origin), opt, travel);
    for (const auto& f : net.facilities()) {
        if (f.essential && detail::within(tree, net.index_of(f.node), cfg.walk_range_minutes)) {
            return true;
        }
    }
    return false;
}

/// Fraction of residents (home nodes) with safe walking access to an
/// essential facility.
inline double overall_service_access(const RoadNetwork& net, const std::vector<NodeId>& residents,
                                     const IndicatorConfig& cfg, const TravelConfig& travel = {})
{
    if (residents.empty()) {
        throw Error(ErrorCode::EmptyPopulation, "overall service access needs at least one resident");
    }
    std::unordered_map<NodeId, bool> cache;
    std::size_t served = 0;
    for (auto home : residents) {
        auto it = cache.find(home);
        if (it == cache.end()) {
            it = cache.emplace(home, has_safe_essential_access(net, home, cfg, travel)).first;
        }
        served += it->second ? 1 : 0;
    }
    return static_cast<double>(served) / static_cast<double>(residents.size());
}

/// The three terms of the walkability blend, each in [0,1].
struct WalkabilityTerms {
    double service = 0.0;
    double infrastructure = 0.0;
    double directness = 0.0;
};

inline WalkabilityTerms walkability_terms(const RoadNetwork& net, NodeId origin, const IndicatorConfig& cfg,
                                          const TravelConfig& travel = {})
{
    const double range = cfg.walk_range_minutes;
    auto tree = detail::walk_tree(net, origin, range, travel);
    WalkabilityTerms terms;
    terms.service = detail::service_score(net, tree, cfg);

    // Mean suitability of walkable edges with both ends inside the range.
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& e : net.edges()) {
        if (!e.modes.contains(Mode::walk)) {
            continue;
        }
        if (detail::within(tree, net.index_of(e.u), range) && detail::within(tree, net.index_of(e.v), range)) {
            sum += infrastructure_suitability(e, cfg);
            ++count;
        }
    }
    terms.infrastructure = count ? sum / static_cast<double>(count) : 0.0;

    // Directness of the route to the nearest reachable facility of any kind.
    const Facility* nearest = nullptr;
    double best = kInf;
    for (const auto& f : net.facilities()) {
        const auto idx = net.index_of(f.node);
        if (!detail::within(tree, idx, range)) {
            continue;
        }
        if (tree.cost[idx] < best || (tree.cost[idx] == best && nearest && f.id < nearest->id)) {
            best = tree.cost[idx];
            nearest = &f;
        }
    }
    if (nearest) {
        const double chord = straight_line(net, origin, nearest->node);
        const double path = tree.length[net.index_of(nearest->node)];
        terms.directness = (chord == 0.0 || path == 0.0) ? 1.0 : std::min(1.0, 1.0 / (path / chord));
    }
    return terms;
}

/// Composite 0-100 walkability score at a node.
inline double walkability_index(const RoadNetwork& net, NodeId origin, const IndicatorConfig& cfg,
                                const TravelConfig& travel = {})
{
    const auto t = walkability_terms(net, origin, cfg, travel);
    const double score = 100.0 * (cfg.alpha * t.service + cfg.beta * t.infrastructure + cfg.gamma * t.directness);
    return std::clamp(score, 0.0, 100.0);
}

/// Detour ratio from `origin` to the essential facility with the shortest
/// walking time. 1 when the origin hosts one; nullopt when none is reachable.
inline std::optional<double> essential_detour_ratio(const RoadNetwork& net, NodeId origin,
                                                    const TravelConfig& travel = {})
{
    SearchOptions opt;
    opt.mode = Mode::walk;
    auto tree = search(net, net.index_of(origin), opt, travel);
    const Facility* nearest = nullptr;
    double best = kInf;
    for (const auto& f : net.facilities()) {
        if (!f.essential) {
            continue;
        }
        const auto idx = net.index_of(f.node);
        if (!tree.reached(idx)) {
            continue;
        }
        if (tree.cost[idx] < best || (tree.cost[idx] == best && nearest && f.id < nearest->id)) {
            best = tree.cost[idx];
            nearest = &f;
        }
    }
    if (!nearest) {
        return std::nullopt;
    }
    const double chord = straight_line(net, origin, nearest->node);
    if (nearest->node == origin || chord == 0.0) {
        return 1.0;
    }
    return tree.length[net.index_of(nearest->node)] / chord;
}

// ---------------------------------------------------------------------------
// Grid export

struct GridSpec {
    double xmin = 0.0;
    double ymin = 0.0;
    double xmax = 0.0;
    double ymax = 0.0;
    double cell = 50.0;

    /// Bounding box of the network's nodes.
    static GridSpec around(const RoadNetwork& net, double cell)
    {
        GridSpec g;
        g.cell = cell;
        if (net.nodes().empty()) {
            return g;
        }
        g.xmin = g.ymin = kInf;
        g.xmax = g.ymax = -kInf;
        for (const auto& n : net.nodes()) {
            g.xmin = std::min(g.xmin, n.x);
            g.xmax = std::max(g.xmax, n.x);
            g.ymin = std::min(g.ymin, n.y);
            g.ymax = std::max(g.ymax, n.y);
        }
        return g;
    }

    std::size_t columns() const
    {
        return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil((xmax - xmin) / cell)));
    }
    std::size_t rows() const
    {
        return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil((ymax - ymin) / cell)));
    }
};

struct GridCell {
    double x = 0.0; // cell centre
    double y = 0.0;
    double walkability = 0.0;
};

/// Walkability evaluated at the network node nearest to each cell centre,
/// row-major from (xmin, ymin).
inline std::vector<GridCell> walkability_grid(const RoadNetwork& net, const GridSpec& spec,
                                              const IndicatorConfig& cfg, const TravelConfig& travel = {})
{
    if (!(spec.cell > 0.0)) {
        throw Error(ErrorCode::InvalidInput, "grid cell size must be > 0");
    }
    std::unordered_map<NodeId, double> cache;
    std::vector<GridCell> out;
    const auto nx = spec.columns();
    const auto ny = spec.rows();
    out.reserve(nx * ny);
    for (std::size_t j = 0; j < ny; ++j) {
        for (std::size_t i = 0; i < nx; ++i) {
            GridCell c;
            c.x = spec.xmin + (static_cast<double>(i) + 0.5) * spec.cell;
            c.y = spec.ymin + (static_cast<double>(j) + 0.5) * spec.cell;
            if (auto node = nearest_node(net, c.x, c.y)) {
                auto it = cache.find(*node);
                if (it == cache.end()) {
                    it = cache.emplace(*node, walkability_index(net, *node, cfg, travel)).first;
                }
                c.walkability = it->second;
            }
            out.push_back(c);
        }
    }
    return out;
}

} // namespace caresim
