#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <queue>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "caresim/csv.hpp"
#include "caresim/error.hpp"

namespace caresim {

using NodeId = std::int64_t;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Mode : std::uint8_t { walk = 0, car = 1, public_transport = 2, green = 3 };

inline constexpr std::string_view mode_name(Mode m)
{
    switch (m) {
    case Mode::walk: return "walk";
    case Mode::car: return "car";
    case Mode::public_transport: return "public";
    case Mode::green: return "green";
    }
    return "walk";
}

inline std::optional<Mode> parse_mode(std::string_view s)
{
    if (s == "walk") return Mode::walk;
    if (s == "car") return Mode::car;
    if (s == "public") return Mode::public_transport;
    if (s == "green") return Mode::green;
    return std::nullopt;
}

/// Bit set over Mode.
class ModeSet {
public:
    constexpr ModeSet() = default;
    constexpr ModeSet(std::initializer_list<Mode> modes)
    {
        for (auto m : modes) {
            insert(m);
        }
    }

    static constexpr ModeSet all() { return ModeSet{Mode::walk, Mode::car, Mode::public_transport, Mode::green}; }

    constexpr void insert(Mode m) { bits_ |= static_cast<std::uint8_t>(1u << static_cast<unsigned>(m)); }
    constexpr bool contains(Mode m) const { return (bits_ >> static_cast<unsigned>(m)) & 1u; }
    constexpr bool empty() const { return bits_ == 0; }
    constexpr bool operator==(const ModeSet&) const = default;

    /// Pipe-separated tokens, e.g. "walk|car".
    std::string to_string() const
    {
        std::string out;
        for (auto m : {Mode::walk, Mode::car, Mode::public_transport, Mode::green}) {
            if (contains(m)) {
                if (!out.empty()) {
                    out += '|';
                }
                out += mode_name(m);
            }
        }
        return out;
    }

private:
    std::uint8_t bits_ = 0;
};

/// Base speeds in km/h.
struct TravelConfig {
    double wk_speed = 4.0;
    double pr_speed = 40.0;
    double pu_speed = 30.0;
    double gr_speed = 10.0;
};

struct Node {
    NodeId id = 0;
    double x = 0.0; // planar metres
    double y = 0.0;
    double elevation = 0.0;
};

/// Undirected road segment. `slope` is the grade when traversed u -> v.
struct Edge {
    NodeId u = 0;
    NodeId v = 0;
    double length = 0.0;
    double slope = 0.0;
    double surface = 1.0;
    double width = 0.0;
    double safety = 1.0;
    ModeSet modes = ModeSet::all();
};

struct Dwelling {
    std::int64_t id = 0;
    NodeId node = 0;
    bool inhabited = true;
    bool has_elder_75 = false;
};

struct Facility {
    std::int64_t id = 0;
    int kind = 0;
    NodeId node = 0;
    bool essential = false;
};

/// Weights and shape constants of the pedestrian infrastructure suitability
/// score. Defaults: (surface, width, slope, safety) = (0.3, 0.2, 0.3, 0.2).
struct SuitabilityWeights {
    double surface = 0.3;
    double width = 0.2;
    double slope = 0.3;
    double safety = 0.2;
    double width_saturation_m = 2.0;
    double slope_cutoff = 0.15;
};

/// Suitability of one edge in [0,1]:
///   ws*surface + ww*min(width/2, 1) + wsl*max(0, 1 - |slope|/0.15) + wsa*safety
inline double edge_suitability(const Edge& e, const SuitabilityWeights& w)
{
    const double width_term = std::min(e.width / w.width_saturation_m, 1.0);
    const double slope_term = std::max(0.0, 1.0 - std::abs(e.slope) / w.slope_cutoff);
    return w.surface * e.surface + w.width * width_term + w.slope * slope_term + w.safety * e.safety;
}

/// Result of a point-to-point query. `nodes` holds the full node sequence
/// including both endpoints; for origin == destination it holds the origin
/// alone and the path has no edges.
struct PathResult {
    std::vector<NodeId> nodes;
    double length = 0.0;
    double travel_time = 0.0; // minutes
    double min_edge_suitability = 1.0;

    std::size_t edge_count() const { return nodes.empty() ? 0 : nodes.size() - 1; }
};

namespace detail {

struct Arc {
    std::size_t to;
    std::size_t edge;
    bool forward; // traversal u -> v
};

struct Topology {
    std::vector<Node> nodes;
    std::vector<Edge> edges;
    std::unordered_map<NodeId, std::size_t> index;
    std::vector<std::vector<Arc>> adjacency;
};

} // namespace detail

/// Attributed road graph plus the dwellings and facilities placed on it.
/// The topology is shared and immutable; dwellings and facilities are held
/// by value so scenario variants are cheap copies.
class RoadNetwork {
public:
    RoadNetwork() = default;

    RoadNetwork(std::vector<Node> nodes, std::vector<Edge> edges, std::vector<Dwelling> dwellings = {},
                std::vector<Facility> facilities = {}, int n_kinds = 5)
        : n_kinds_(n_kinds)
    {
        auto topo = std::make_shared<detail::Topology>();
        topo->nodes = std::move(nodes);
        topo->edges = std::move(edges);
        for (std::size_t i = 0; i < topo->nodes.size(); ++i) {
            const auto& n = topo->nodes[i];
            if (!std::isfinite(n.x) || !std::isfinite(n.y) || !std::isfinite(n.elevation)) {
                throw Error(ErrorCode::InvalidInput, "node " + std::to_string(n.id) + ": non-finite coordinate");
            }
            if (!topo->index.emplace(n.id, i).second) {
                throw Error(ErrorCode::InvalidInput, "duplicate node id " + std::to_string(n.id));
            }
        }
        topo->adjacency.resize(topo->nodes.size());
        for (std::size_t k = 0; k < topo->edges.size(); ++k) {
            const auto& e = topo->edges[k];
            validate_edge(e, "edge " + std::to_string(k));
            auto iu = topo->index.find(e.u);
            auto iv = topo->index.find(e.v);
            if (iu == topo->index.end() || iv == topo->index.end()) {
                throw Error(ErrorCode::UnknownNode, "edge " + std::to_string(k) + ": endpoint not in network");
            }
            topo->adjacency[iu->second].push_back({iv->second, k, true});
            topo->adjacency[iv->second].push_back({iu->second, k, false});
        }
        topo_ = std::move(topo);
        set_dwellings(std::move(dwellings));
        set_facilities(std::move(facilities));
    }

    static void validate_edge(const Edge& e, const std::string& where)
    {
        if (!(e.length > 0.0) || !std::isfinite(e.length)) {
            throw Error(ErrorCode::InvalidInput, where + ": length must be > 0");
        }
        if (!(std::abs(e.slope) <= 1.0)) {
            throw Error(ErrorCode::InvalidInput, where + ": |slope| must be <= 1");
        }
        if (!(e.surface >= 0.0 && e.surface <= 1.0)) {
            throw Error(ErrorCode::InvalidInput, where + ": surface must be in [0,1]");
        }
        if (!(e.safety >= 0.0 && e.safety <= 1.0)) {
            throw Error(ErrorCode::InvalidInput, where + ": safety must be in [0,1]");
        }
        if (!(e.width >= 0.0) || !std::isfinite(e.width)) {
            throw Error(ErrorCode::InvalidInput, where + ": width must be >= 0");
        }
        if (e.modes.empty()) {
            throw Error(ErrorCode::InvalidInput, where + ": modes must be non-empty");
        }
    }

    const std::vector<Node>& nodes() const { return topo().nodes; }
    const std::vector<Edge>& edges() const { return topo().edges; }
    const std::vector<Dwelling>& dwellings() const { return dwellings_; }
    const std::vector<Facility>& facilities() const { return facilities_; }
    int n_kinds() const { return n_kinds_; }

    std::size_t node_count() const { return topo().nodes.size(); }

    std::optional<std::size_t> find(NodeId id) const
    {
        auto it = topo().index.find(id);
        if (it == topo().index.end()) {
            return std::nullopt;
        }
        return it->second;
    }

    std::size_t index_of(NodeId id) const
    {
        auto idx = find(id);
        if (!idx) {
            throw Error(ErrorCode::UnknownNode, "node " + std::to_string(id) + " not in network");
        }
        return *idx;
    }

    const Node& node(NodeId id) const { return topo().nodes[index_of(id)]; }
    const Node& node_at(std::size_t idx) const { return topo().nodes[idx]; }
    const std::vector<detail::Arc>& arcs(std::size_t idx) const { return topo().adjacency[idx]; }

    const Facility* facility(std::int64_t id) const
    {
        for (const auto& f : facilities_) {
            if (f.id == id) {
                return &f;
            }
        }
        return nullptr;
    }

    const Dwelling* dwelling(std::int64_t id) const
    {
        auto it = dwelling_index_.find(id);
        return it == dwelling_index_.end() ? nullptr : &dwellings_[it->second];
    }

    RoadNetwork with_facilities(std::vector<Facility> facilities) const
    {
        RoadNetwork copy = *this;
        copy.set_facilities(std::move(facilities));
        return copy;
    }

    RoadNetwork with_dwellings(std::vector<Dwelling> dwellings) const
    {
        RoadNetwork copy = *this;
        copy.set_dwellings(std::move(dwellings));
        return copy;
    }

private:
    const detail::Topology& topo() const
    {
        static const detail::Topology empty;
        return topo_ ? *topo_ : empty;
    }

    void set_dwellings(std::vector<Dwelling> dwellings)
    {
        dwelling_index_.clear();
        for (std::size_t i = 0; i < dwellings.size(); ++i) {
            const auto& d = dwellings[i];
            if (!find(d.node)) {
                throw Error(ErrorCode::UnknownNode, "dwelling " + std::to_string(d.id) + ": node " +
                                                        std::to_string(d.node) + " not in network");
            }
            if (!dwelling_index_.emplace(d.id, i).second) {
                throw Error(ErrorCode::InvalidInput, "duplicate dwelling id " + std::to_string(d.id));
            }
        }
        dwellings_ = std::move(dwellings);
    }

    void set_facilities(std::vector<Facility> facilities)
    {
        std::unordered_map<std::int64_t, int> seen;
        for (const auto& f : facilities) {
            if (!find(f.node)) {
                throw Error(ErrorCode::UnknownNode, "facility " + std::to_string(f.id) + ": node " +
                                                        std::to_string(f.node) + " not in network");
            }
            if (f.kind < 0 || f.kind >= n_kinds_) {
                throw Error(ErrorCode::InvalidInput, "facility " + std::to_string(f.id) + ": kind " +
                                                         std::to_string(f.kind) + " outside [0," +
                                                         std::to_string(n_kinds_) + ")");
            }
            if (!seen.emplace(f.id, 0).second) {
                throw Error(ErrorCode::InvalidInput, "duplicate facility id " + std::to_string(f.id));
            }
        }
        facilities_ = std::move(facilities);
    }

    std::shared_ptr<const detail::Topology> topo_;
    std::vector<Dwelling> dwellings_;
    std::unordered_map<std::int64_t, std::size_t> dwelling_index_;
    std::vector<Facility> facilities_;
    int n_kinds_ = 5;
};

// ---------------------------------------------------------------------------
// Travel speed

/// Travel speed in km/h. Walking follows a Tobler-style exponential in the
/// grade, normalised so that flat ground gives exactly wk_speed, and clamped
/// to [0.2, 1.2] x wk_speed. Vehicle modes ignore slope.
inline double effective_speed(Mode mode, double slope, const TravelConfig& cfg)
{
    switch (mode) {
    case Mode::walk: {
        const double factor = std::exp(-3.5 * (std::abs(slope + 0.05) - 0.05));
        return std::clamp(cfg.wk_speed * factor, 0.2 * cfg.wk_speed, 1.2 * cfg.wk_speed);
    }
    case Mode::car: return cfg.pr_speed;
    case Mode::public_transport: return cfg.pu_speed;
    case Mode::green: return cfg.gr_speed;
    }
    return cfg.wk_speed;
}

/// Minutes to cover `length_m` metres at `speed_kmh`.
inline double minutes_for(double length_m, double speed_kmh)
{
    return (length_m * 60.0) / (speed_kmh * 1000.0);
}

inline double edge_minutes(const Edge& e, bool forward, Mode mode, const TravelConfig& cfg)
{
    const double grade = forward ? e.slope : -e.slope;
    return minutes_for(e.length, effective_speed(mode, grade, cfg));
}

// ---------------------------------------------------------------------------
// Single-source search

enum class Metric { time, length };

struct SearchOptions {
    /// Mode the edges must permit; nullopt admits every edge (length metric only).
    std::optional<Mode> mode = Mode::walk;
    Metric metric = Metric::time;
    /// Labels whose cost exceeds this bound are not expanded.
    double bound = kInf;
    /// Extra edge predicate (e.g. a safe-edge filter).
    std::function<bool(const Edge&)> edge_filter;
    /// Stop once this node index is settled.
    std::optional<std::size_t> target;
};

/// Dijkstra labels indexed by node position. Cost ties are broken by fewer
/// edges and then by the lexicographically smallest node-id sequence.
struct ShortestPathTree {
    std::size_t origin = 0;
    std::vector<double> cost;
    std::vector<double> time;   // minutes (0 under the length metric without a mode)
    std::vector<double> length; // metres
    std::vector<std::uint32_t> hops;
    std::vector<std::int64_t> pred;      // node index, -1 for origin / unreached
    std::vector<std::int64_t> pred_edge; // edge index

    bool reached(std::size_t idx) const { return std::isfinite(cost[idx]); }

    std::vector<std::size_t> path_indices(std::size_t idx) const
    {
        std::vector<std::size_t> out;
        if (!reached(idx)) {
            return out;
        }
        for (std::int64_t cur = static_cast<std::int64_t>(idx); cur >= 0; cur = pred[static_cast<std::size_t>(cur)]) {
            out.push_back(static_cast<std::size_t>(cur));
        }
        std::reverse(out.begin(), out.end());
        return out;
    }
};

namespace detail {

// Lexicographic comparison of the node-id sequences leading to a and b.
// Both chains have equal length when called from the relaxation step.
inline bool chain_less(const RoadNetwork& net, const ShortestPathTree& t, std::size_t a, std::size_t b)
{
    auto pa = t.path_indices(a);
    auto pb = t.path_indices(b);
    return std::lexicographical_compare(pa.begin(), pa.end(), pb.begin(), pb.end(), [&](std::size_t x, std::size_t y) {
        return net.node_at(x).id < net.node_at(y).id;
    });
}

} // namespace detail

inline ShortestPathTree search(const RoadNetwork& net, std::size_t origin, const SearchOptions& opt,
                               const TravelConfig& travel = {})
{
    const std::size_t n = net.node_count();
    ShortestPathTree t;
    t.origin = origin;
    t.cost.assign(n, kInf);
    t.time.assign(n, kInf);
    t.length.assign(n, kInf);
    t.hops.assign(n, 0);
    t.pred.assign(n, -1);
    t.pred_edge.assign(n, -1);
    if (origin >= n) {
        return t;
    }
    if (opt.metric == Metric::time && !opt.mode) {
        throw Error(ErrorCode::InvalidInput, "time metric requires a travel mode");
    }

    std::vector<char> settled(n, 0);
    using Key = std::tuple<double, std::uint32_t, std::size_t>;
    std::priority_queue<Key, std::vector<Key>, std::greater<>> queue;

    t.cost[origin] = 0.0;
    t.time[origin] = 0.0;
    t.length[origin] = 0.0;
    queue.emplace(0.0, 0u, origin);

    while (!queue.empty()) {
        auto [c, h, u] = queue.top();
        queue.pop();
        if (settled[u] || c != t.cost[u] || h != t.hops[u]) {
            continue;
        }
        settled[u] = 1;
        if (opt.target && *opt.target == u) {
            break;
        }
        for (const auto& arc : net.arcs(u)) {
            const Edge& e = net.edges()[arc.edge];
            if (opt.mode && !e.modes.contains(*opt.mode)) {
                continue;
            }
            if (opt.edge_filter && !opt.edge_filter(e)) {
                continue;
            }
            const std::size_t v = arc.to;
            if (settled[v]) {
                continue;
            }
            const double dt = opt.mode ? edge_minutes(e, arc.forward, *opt.mode, travel) : 0.0;
            const double step = opt.metric == Metric::time ? dt : e.length;
            const double nc = c + step;
            if (nc > opt.bound) {
                continue;
            }
            const std::uint32_t nh = h + 1;
            bool better = nc < t.cost[v] || (nc == t.cost[v] && nh < t.hops[v]);
            if (!better && nc == t.cost[v] && nh == t.hops[v] && t.pred[v] >= 0) {
                better = detail::chain_less(net, t, u, static_cast<std::size_t>(t.pred[v]));
            }
            if (better) {
                const bool key_changed = nc != t.cost[v] || nh != t.hops[v];
                t.cost[v] = nc;
                t.hops[v] = nh;
                t.time[v] = t.time[u] + dt;
                t.length[v] = t.length[u] + e.length;
                t.pred[v] = static_cast<std::int64_t>(u);
                t.pred_edge[v] = static_cast<std::int64_t>(arc.edge);
                if (key_changed) {
                    queue.emplace(nc, nh, v);
                }
            }
        }
    }
    // Drop labels that were pushed but lie beyond a target stop; they are
    // tentative and must not be reported as shortest.
    if (opt.target) {
        for (std::size_t i = 0; i < n; ++i) {
            if (!settled[i]) {
                t.cost[i] = kInf;
                t.time[i] = kInf;
                t.length[i] = kInf;
                t.pred[i] = -1;
                t.pred_edge[i] = -1;
            }
        }
    }
    return t;
}

// ---------------------------------------------------------------------------
// Queries

/// Planar Euclidean distance between two nodes (elevation ignored).
inline double straight_line(const RoadNetwork& net, NodeId a, NodeId b)
{
    const auto& na = net.node(a);
    const auto& nb = net.node(b);
    return std::hypot(na.x - nb.x, na.y - nb.y);
}

inline PathResult extract_path(const RoadNetwork& net, const ShortestPathTree& t, std::size_t dest,
                               const SuitabilityWeights& suit = {})
{
    PathResult r;
    for (auto idx : t.path_indices(dest)) {
        r.nodes.push_back(net.node_at(idx).id);
    }
    r.length = t.length[dest];
    r.travel_time = t.time[dest];
    for (std::int64_t cur = static_cast<std::int64_t>(dest); t.pred[static_cast<std::size_t>(cur)] >= 0;
         cur = t.pred[static_cast<std::size_t>(cur)]) {
        const auto& e = net.edges()[static_cast<std::size_t>(t.pred_edge[static_cast<std::size_t>(cur)])];
        r.min_edge_suitability = std::min(r.min_edge_suitability, edge_suitability(e, suit));
    }
    return r;
}

/// Minimum-travel-time path using edges that permit `mode`.
inline PathResult shortest_path(const RoadNetwork& net, NodeId origin, NodeId dest, Mode mode,
                                const TravelConfig& travel = {}, const SuitabilityWeights& suit = {})
{
    const auto o = net.index_of(origin);
    const auto d = net.index_of(dest);
    SearchOptions opt;
    opt.mode = mode;
    opt.target = d;
    auto tree = search(net, o, opt, travel);
    if (!tree.reached(d)) {
        throw Error(ErrorCode::NoRoute, "no " + std::string(mode_name(mode)) + " route from node " +
                                            std::to_string(origin) + " to node " + std::to_string(dest));
    }
    return extract_path(net, tree, d, suit);
}

/// Nodes whose shortest travel time from origin is at most `minutes`,
/// sorted by id. Always contains the origin.
inline std::vector<NodeId> reachable_nodes(const RoadNetwork& net, NodeId origin, double minutes, Mode mode,
                                           const TravelConfig& travel = {})
{
    SearchOptions opt;
    opt.mode = mode;
    opt.bound = minutes;
    auto tree = search(net, net.index_of(origin), opt, travel);
    std::vector<NodeId> out;
    for (std::size_t i = 0; i < net.node_count(); ++i) {
        if (tree.reached(i) && tree.cost[i] <= minutes) {
            out.push_back(net.node_at(i).id);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

/// Shortest network distance in metres over edges permitting `mode`
/// (any edge when mode is nullopt), bounded by `bound_m`.
inline ShortestPathTree network_distances(const RoadNetwork& net, NodeId origin, std::optional<Mode> mode,
                                          double bound_m = kInf)
{
    SearchOptions opt;
    opt.mode = mode;
    opt.metric = Metric::length;
    opt.bound = bound_m;
    return search(net, net.index_of(origin), opt);
}

/// Inhabited dwellings whose walking network distance from `node` is at
/// most `radius_m`, in dwelling order.
inline std::vector<Dwelling> dwellings_within(const RoadNetwork& net, NodeId node, double radius_m)
{
    auto tree = network_distances(net, node, Mode::walk, radius_m);
    std::vector<Dwelling> out;
    for (const auto& d : net.dwellings()) {
        if (!d.inhabited) {
            continue;
        }
        const auto idx = net.index_of(d.node);
        if (tree.reached(idx) && tree.length[idx] <= radius_m) {
            out.push_back(d);
        }
    }
    return out;
}

/// Node closest to (x, y) in the plane; ties go to the smaller id.
inline std::optional<NodeId> nearest_node(const RoadNetwork& net, double x, double y)
{
    std::optional<NodeId> best;
    double best_d = kInf;
    for (const auto& n : net.nodes()) {
        const double d = std::hypot(n.x - x, n.y - y);
        if (d < best_d || (d == best_d && best && n.id < *best)) {
            best_d = d;
            best = n.id;
        }
    }
    return best;
}

// ---------------------------------------------------------------------------
// CSV ingest

struct NetworkFiles {
    std::string nodes;
    std::string edges;
    std::string dwellings;
    std::string facilities;
};

inline ModeSet parse_modes(const std::string& text, const std::string& where)
{
    ModeSet set;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto bar = text.find('|', start);
        auto token = text.substr(start, bar == std::string::npos ? std::string::npos : bar - start);
        auto mode = parse_mode(token);
        if (!mode) {
            throw Error(ErrorCode::InvalidInput, where + ": unknown mode '" + token + "'");
        }
        set.insert(*mode);
        if (bar == std::string::npos) {
            break;
        }
        start = bar + 1;
    }
    return set;
}

inline std::vector<Node> read_nodes(const csv::Table& t)
{
    t.require_columns({"id", "x", "y", "elevation"});
    std::vector<Node> out;
    for (const auto& row : t.rows()) {
        Node n{t.integer(row, "id"), t.number(row, "x"), t.number(row, "y"), t.number(row, "elevation")};
        if (!std::isfinite(n.x) || !std::isfinite(n.y) || !std::isfinite(n.elevation)) {
            throw Error(ErrorCode::InvalidInput, t.where(row) + ": coordinates must be finite");
        }
        out.push_back(n);
    }
    return out;
}

inline std::vector<Edge> read_edges(const csv::Table& t)
{
    t.require_columns({"u", "v", "length", "slope", "surface", "width", "safety", "modes"});
    std::vector<Edge> out;
    for (const auto& row : t.rows()) {
        Edge e;
        e.u = t.integer(row, "u");
        e.v = t.integer(row, "v");
        e.length = t.number(row, "length");
        e.slope = t.number(row, "slope");
        e.surface = t.number(row, "surface");
        e.width = t.number(row, "width");
        e.safety = t.number(row, "safety");
        e.modes = parse_modes(t.cell(row, "modes"), t.where(row));
        RoadNetwork::validate_edge(e, t.where(row));
        out.push_back(e);
    }
    return out;
}

inline std::vector<Dwelling> read_dwellings(const csv::Table& t)
{
    t.require_columns({"id", "node", "inhabited", "has_elder_75"});
    std::vector<Dwelling> out;
    for (const auto& row : t.rows()) {
        out.push_back({t.integer(row, "id"), t.integer(row, "node"), t.boolean(row, "inhabited"),
                       t.boolean(row, "has_elder_75")});
    }
    return out;
}

inline std::vector<Facility> read_facilities(const csv::Table& t)
{
    t.require_columns({"id", "kind", "node", "essential"});
    std::vector<Facility> out;
    for (const auto& row : t.rows()) {
        const auto kind = t.integer(row, "kind");
        if (kind < 0 || kind > std::numeric_limits<int>::max()) {
            throw Error(ErrorCode::InvalidInput, t.where(row) + ": kind must be a non-negative index");
        }
        out.push_back({t.integer(row, "id"), static_cast<int>(kind), t.integer(row, "node"),
                       t.boolean(row, "essential")});
    }
    return out;
}

inline RoadNetwork load_network(const NetworkFiles& files, int n_kinds = 5)
{
    auto nodes = read_nodes(csv::Table::read_file(files.nodes));
    auto edges_table = csv::Table::read_file(files.edges);
    auto edges = read_edges(edges_table);
    std::unordered_map<NodeId, int> ids;
    for (const auto& n : nodes) {
        ids[n.id] = 0;
    }
    for (std::size_t k = 0; k < edges.size(); ++k) {
        if (!ids.count(edges[k].u) || !ids.count(edges[k].v)) {
            throw Error(ErrorCode::UnknownNode, edges_table.where(edges_table.rows()[k]) + ": endpoint not in " +
                                                    files.nodes);
        }
    }
    std::vector<Dwelling> dwellings;
    if (!files.dwellings.empty()) {
        dwellings = read_dwellings(csv::Table::read_file(files.dwellings));
    }
    std::vector<Facility> facilities;
    if (!files.facilities.empty()) {
        facilities = read_facilities(csv::Table::read_file(files.facilities));
    }
    return RoadNetwork(std::move(nodes), std::move(edges), std::move(dwellings), std::move(facilities), n_kinds);
}

} // namespace caresim
