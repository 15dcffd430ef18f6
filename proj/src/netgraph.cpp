#include "cvqkd/netgraph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <set>
#include <sstream>

#include "cvqkd/errors.hpp"

namespace cvqkd::netgraph {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool ok, const std::string& msg) {
    if (!ok) throw validation_error(msg);
}

bool is_pairing(NodeKind a, NodeKind b, NodeKind x, NodeKind y) {
    return (a == x && b == y) || (a == y && b == x);
}

}  // namespace

LinkClassification classify_link(NodeKind kind_a, NodeKind kind_b, LinkFamily family,
                                 bool intersat_station_kept) {
    using K = NodeKind;
    switch (family) {
        case LinkFamily::fibre:
            require(is_pairing(kind_a, kind_b, K::ogs, K::ogs),
                    "fibre links connect two ground stations");
            return {GeometryClass::stationary_stationary, Dynamics::static_link,
                    Uniformity::uniform, false};
        case LinkFamily::satellite_ground:
            require(is_pairing(kind_a, kind_b, K::ogs, K::satellite),
                    "satellite-ground links connect an OGS and a satellite");
            return {GeometryClass::stationary_moving, Dynamics::dynamic_link,
                    Uniformity::non_uniform, true};
        case LinkFamily::submarine_ground:
            require(is_pairing(kind_a, kind_b, K::ogs, K::submarine),
                    "submarine-ground links connect an OGS and a submarine");
            return {GeometryClass::stationary_moving, Dynamics::dynamic_link,
                    Uniformity::uniform, false};
        case LinkFamily::satellite_submarine:
            require(is_pairing(kind_a, kind_b, K::satellite, K::submarine),
                    "satellite-submarine links connect a satellite and a submarine");
            return {GeometryClass::moving_moving, Dynamics::dynamic_link,
                    Uniformity::non_uniform, true};
        case LinkFamily::inter_satellite:
            require(is_pairing(kind_a, kind_b, K::satellite, K::satellite),
                    "inter-satellite links connect two satellites");
            return {GeometryClass::moving_moving,
                    intersat_station_kept ? Dynamics::static_link : Dynamics::dynamic_link,
                    Uniformity::uniform, false};
        case LinkFamily::inter_submarine:
            require(is_pairing(kind_a, kind_b, K::submarine, K::submarine),
                    "inter-submarine links connect two submarines");
            return {GeometryClass::moving_moving, Dynamics::dynamic_link,
                    Uniformity::uniform, false};
    }
    throw validation_error("unsupported link family");
}

const Node* NetworkGraph::find_node(const std::string& id) const {
    for (const auto& n : nodes) {
        if (n.id == id) return &n;
    }
    return nullptr;
}

void NetworkGraph::validate() const {
    std::set<std::string> ids;
    for (const auto& n : nodes) {
        require(!n.id.empty(), "node id must not be empty");
        require(ids.insert(n.id).second, "duplicate node id: " + n.id);
        if (n.moving() && !n.fixed_position) {
            require(!n.trajectory.empty(),
                    "moving node needs at least one trajectory sample: " + n.id);
        }
    }
    std::set<std::string> link_ids;
    for (const auto& l : links) {
        require(link_ids.insert(l.id).second, "duplicate link id: " + l.id);
        const Node* a = find_node(l.node_a);
        const Node* b = find_node(l.node_b);
        require(a != nullptr, "link " + l.id + ": unknown endpoint " + l.node_a);
        require(b != nullptr, "link " + l.id + ": unknown endpoint " + l.node_b);
        classify_link(a->kind, b->kind, l.family);  // throws on bad pairing
    }
}

namespace {

double window_weight(const CapacityData& cap, TimeWindow w, const std::string& link_id,
                     std::vector<std::string>& uncovered) {
    if (cap.is_static) return cap.static_bits;
    const double lo = cap.coverage_start_s.value_or(-kInf);
    const double hi = cap.coverage_end_s.value_or(kInf);
    if (w.start_s < lo || w.end_s > hi) {
        uncovered.push_back(link_id);
        return 0.0;
    }
    double bits = 0.0;
    for (const auto& win : cap.windows) {
        const double span = win.end_s - win.start_s;
        if (span <= 0.0) continue;
        const double overlap =
            std::min(w.end_s, win.end_s) - std::max(w.start_s, win.start_s);
        if (overlap > 0.0) bits += win.bits * overlap / span;
    }
    return bits;
}

}  // namespace

Snapshot snapshot_capacities(const NetworkGraph& graph, TimeWindow window) {
    graph.validate();
    require(window.end_s >= window.start_s, "time window must have end >= start");

    Snapshot snap{&graph, window, {}, {}};
    snap.weight_ab.reserve(graph.links.size());
    snap.weight_ba.reserve(graph.links.size());
    std::vector<std::string> uncovered;
    for (const auto& link : graph.links) {
        const double ab = window_weight(link.capacity_ab, window, link.id, uncovered);
        const double ba = link.classification.direction_dependent
                              ? window_weight(link.capacity_ba, window, link.id, uncovered)
                              : ab;
        snap.weight_ab.push_back(ab);
        snap.weight_ba.push_back(ba);
    }
    if (!uncovered.empty()) {
        std::sort(uncovered.begin(), uncovered.end());
        uncovered.erase(std::unique(uncovered.begin(), uncovered.end()), uncovered.end());
        std::ostringstream msg;
        msg << "window not covered by capacity data for links:";
        for (const auto& id : uncovered) msg << ' ' << id;
        throw validation_error(msg.str());
    }
    return snap;
}

namespace {

// Directed adjacency with parallel edges collapsed to their max weight.
std::map<std::string, std::map<std::string, double>> build_adjacency(const Snapshot& s) {
    std::map<std::string, std::map<std::string, double>> adj;
    for (const auto& n : s.graph->nodes) adj[n.id];  // ensure isolated nodes exist
    for (std::size_t i = 0; i < s.graph->links.size(); ++i) {
        const auto& l = s.graph->links[i];
        auto relax = [&adj](const std::string& u, const std::string& v, double w) {
            auto [it, inserted] = adj[u].try_emplace(v, w);
            if (!inserted && w > it->second) it->second = w;
        };
        relax(l.node_a, l.node_b, s.weight_ab[i]);
        relax(l.node_b, l.node_a, s.weight_ba[i]);
    }
    return adj;
}

bool relay_allowed(const Snapshot& s, const std::string& id, const std::string& src,
                   const std::string& dst) {
    if (id == src || id == dst) return true;
    const Node* n = s.graph->find_node(id);
    return n != nullptr && n->trusted;
}

Route make_trivial_route(const std::string& node) {
    Route r;
    r.reachable = true;
    r.nodes = {node};
    r.bottleneck = kInf;
    return r;
}

std::vector<double> hop_weights(const std::map<std::string, std::map<std::string, double>>& adj,
                                const std::vector<std::string>& nodes) {
    std::vector<double> caps;
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        caps.push_back(adj.at(nodes[i]).at(nodes[i + 1]));
    }
    return caps;
}

// Fewest hops among paths restricted to `usable` edges, lexicographic
// smallest node sequence. Returns empty when dst is unreachable.
std::vector<std::string> min_hop_lex_path(
    const std::map<std::string, std::map<std::string, double>>& adj,
    const std::function<bool(const std::string&, const std::string&, double)>& usable,
    const std::string& src, const std::string& dst) {
    // Hop distance to dst over reversed usable edges.
    std::map<std::string, int> dist;
    std::deque<std::string> queue{dst};
    dist[dst] = 0;
    while (!queue.empty()) {
        const std::string u = queue.front();
        queue.pop_front();
        for (const auto& [v, nbrs] : adj) {
            (void)nbrs;
            if (dist.count(v)) continue;
            const auto it = adj.at(v).find(u);
            if (it != adj.at(v).end() && usable(v, u, it->second)) {
                dist[v] = dist.at(u) + 1;
                queue.push_back(v);
            }
        }
    }
    if (!dist.count(src)) return {};

    // Greedy walk: smallest-id neighbour that stays on a shortest path.
    std::vector<std::string> path{src};
    std::string cur = src;
    while (cur != dst) {
        const int want = dist.at(cur) - 1;
        const std::string* next = nullptr;
        for (const auto& [v, w] : adj.at(cur)) {
            if (!usable(cur, v, w)) continue;
            const auto it = dist.find(v);
            if (it == dist.end() || it->second != want) continue;
            if (next == nullptr || v < *next) next = &v;
        }
        if (next == nullptr) return {};
        path.push_back(*next);
        cur = *next;
    }
    return path;
}

}  // namespace

Route widest_path(const Snapshot& snapshot, const std::string& src, const std::string& dst,
                  RouteObjective objective) {
    require(snapshot.graph != nullptr, "snapshot has no graph");
    require(snapshot.graph->find_node(src) != nullptr, "unknown source node: " + src);
    require(snapshot.graph->find_node(dst) != nullptr, "unknown destination node: " + dst);
    if (src == dst) return make_trivial_route(src);

    const auto adj = build_adjacency(snapshot);
    const auto trusted_edge = [&](const std::string& u, const std::string& v, double) {
        return relay_allowed(snapshot, u, src, dst) && relay_allowed(snapshot, v, src, dst);
    };

    Route route;
    if (objective == RouteObjective::fewest_hops) {
        route.nodes = min_hop_lex_path(adj, trusted_edge, src, dst);
    } else {
        // Stage 1: maximum bottleneck via Dijkstra on the min-edge metric.
        std::map<std::string, double> best;
        for (const auto& [id, _] : adj) best[id] = -kInf;
        best[src] = kInf;
        using Item = std::pair<double, std::string>;
        std::priority_queue<Item> heap;
        heap.push({kInf, src});
        while (!heap.empty()) {
            const auto [b, u] = heap.top();
            heap.pop();
            if (b < best.at(u)) continue;
            for (const auto& [v, w] : adj.at(u)) {
                if (!trusted_edge(u, v, w)) continue;
                const double nb = std::min(b, w);
                if (nb > best.at(v)) {
                    best[v] = nb;
                    heap.push({nb, v});
                }
            }
        }
        if (best.at(dst) > -kInf) {
            // Stage 2: fewest hops / lexicographic among max-bottleneck paths,
            // which only use edges of weight >= the optimum.
            const double bstar = best.at(dst);
            const auto on_widest = [&](const std::string& u, const std::string& v,
                                       double w) { return trusted_edge(u, v, w) && w >= bstar; };
            route.nodes = min_hop_lex_path(adj, on_widest, src, dst);
        }
    }

    if (route.nodes.empty()) {
        route.reachable = false;
        // Distinguish plain unreachability from trust blocking.
        const auto any_edge = [](const std::string&, const std::string&, double) {
            return true;
        };
        if (!min_hop_lex_path(adj, any_edge, src, dst).empty()) {
            std::ostringstream msg;
            msg << "unreachable: every path relays through untrusted nodes:";
            for (const auto& n : snapshot.graph->nodes) {
                if (!n.trusted) msg << ' ' << n.id;
            }
            route.note = msg.str();
        } else {
            route.note = "unreachable: no path from " + src + " to " + dst;
        }
        return route;
    }

    route.reachable = true;
    route.hop_capacities = hop_weights(adj, route.nodes);
    route.bottleneck = *std::min_element(route.hop_capacities.begin(),
                                         route.hop_capacities.end());
    return route;
}

MultiTargetRoute multi_target_route(const Snapshot& snapshot,
                                    std::span<const std::string> targets,
                                    double key_size_bits) {
    require(targets.size() >= 2, "need at least two targets");
    for (const auto& t : targets) {
        const Node* n = snapshot.graph->find_node(t);
        require(n != nullptr, "unknown target node: " + t);
        require(n->trusted, "target node is untrusted: " + t);
    }

    MultiTargetRoute out;
    out.combined.nodes.push_back(targets[0]);
    for (std::size_t i = 0; i + 1 < targets.size(); ++i) {
        Route seg = widest_path(snapshot, targets[i], targets[i + 1]);
        if (!seg.reachable) {
            out.reachable = false;
            out.note = "segment " + targets[i] + " -> " + targets[i + 1] + " " + seg.note;
            out.segments.push_back(std::move(seg));
            return out;
        }
        for (std::size_t k = 1; k < seg.nodes.size(); ++k) {
            out.combined.nodes.push_back(seg.nodes[k]);
        }
        for (double c : seg.hop_capacities) out.combined.hop_capacities.push_back(c);
        out.segments.push_back(std::move(seg));
    }

    out.reachable = true;
    out.combined.reachable = true;
    out.combined.bottleneck =
        out.combined.hop_capacities.empty()
            ? kInf
            : *std::min_element(out.combined.hop_capacities.begin(),
                                out.combined.hop_capacities.end());
    if (out.combined.hop_capacities.empty()) {
        out.feasibility = {true, true, true, {}, {}};
    } else {
        out.feasibility =
            passes::check_relay_feasibility(out.combined.hop_capacities, key_size_bits);
    }
    return out;
}

Route brute_force_widest_path(const Snapshot& snapshot, const std::string& src,
                              const std::string& dst, std::size_t max_nodes) {
    require(snapshot.graph != nullptr, "snapshot has no graph");
    if (snapshot.graph->nodes.size() > max_nodes) {
        throw validation_error("brute force refused: graph exceeds node cap");
    }
    require(snapshot.graph->find_node(src) != nullptr, "unknown source node: " + src);
    require(snapshot.graph->find_node(dst) != nullptr, "unknown destination node: " + dst);
    if (src == dst) return make_trivial_route(src);

    const auto adj = build_adjacency(snapshot);

    std::vector<std::string> stack{src};
    std::set<std::string> visited{src};
    std::vector<std::string> best_path;
    double best_bottleneck = -kInf;

    auto better = [&](const std::vector<std::string>& cand, double b) {
        if (b != best_bottleneck) return b > best_bottleneck;
        if (cand.size() != best_path.size()) return cand.size() < best_path.size();
        return cand < best_path;
    };

    std::function<void(double)> dfs = [&](double bottleneck) {
        const std::string u = stack.back();  // copy: recursion reallocates the stack
        if (u == dst) {
            if (best_path.empty() || better(stack, bottleneck)) {
                best_path = stack;
                best_bottleneck = bottleneck;
            }
            return;
        }
        for (const auto& [v, w] : adj.at(u)) {
            if (visited.count(v)) continue;
            if (!relay_allowed(snapshot, u, src, dst) ||
                !relay_allowed(snapshot, v, src, dst)) {
                continue;
            }
            visited.insert(v);
            stack.push_back(v);
            dfs(std::min(bottleneck, w));
            stack.pop_back();
            visited.erase(v);
        }
    };
    dfs(kInf);

    Route route;
    if (best_path.empty()) {
        route.reachable = false;
        route.note = "unreachable: no path from " + src + " to " + dst;
        return route;
    }
    route.reachable = true;
    route.nodes = best_path;
    route.hop_capacities = hop_weights(adj, route.nodes);
    route.bottleneck = best_bottleneck;
    return route;
}

}  // namespace cvqkd::netgraph
