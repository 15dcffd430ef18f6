#pragma once

// The CVQKD network as a graph: classified links with time-dependent
// capacities, capacity snapshots, and maximum-bottleneck routing.

#include <optional>
#include <string>
#include <vector>

#include "cvqkd/passes.hpp"

namespace cvqkd::netgraph {

enum class NodeKind { ogs, satellite, submarine, hap };

struct TrajectorySample {
    double time_s;
    double lat_deg;
    double lon_deg;
    double alt_km;
};

struct Node {
    std::string id;
    NodeKind kind = NodeKind::ogs;
    bool trusted = true;
    // Fixed position, or trajectory samples for a moving node.
    std::optional<TrajectorySample> fixed_position;
    std::vector<TrajectorySample> trajectory;

    bool moving() const {
        return kind == NodeKind::satellite || kind == NodeKind::submarine ||
               kind == NodeKind::hap;
    }
};

enum class LinkFamily {
    fibre,
    satellite_ground,
    submarine_ground,
    satellite_submarine,
    inter_satellite,
    inter_submarine,
};

enum class GeometryClass { stationary_stationary, stationary_moving, moving_moving };
enum class Dynamics { static_link, dynamic_link };
enum class Uniformity { uniform, non_uniform };

struct LinkClassification {
    GeometryClass geometry;
    Dynamics dynamics;
    Uniformity uniformity;
    bool direction_dependent;  // true iff non-uniform
};

// Classifies a node pairing under a link family. Inter-satellite links are
// dynamic unless the constellation holds station (fixed relative positions).
LinkClassification classify_link(NodeKind kind_a, NodeKind kind_b, LinkFamily family,
                                 bool intersat_station_kept = false);

// One supplied capacity window: `bits` are available uniformly across
// [start_s, end_s) (piecewise-constant rate, zero in gaps).
struct CapacityWindow {
    double start_s;
    double end_s;
    double bits;
};

struct CapacityData {
    bool is_static = true;
    double static_bits = 0.0;                 // window-independent weight
    std::vector<CapacityWindow> windows;      // dynamic links
    // Declared data horizon for dynamic links; queries outside it are an
    // error. Unset means unbounded (gaps count as zero capacity).
    std::optional<double> coverage_start_s;
    std::optional<double> coverage_end_s;
};

struct Link {
    std::string id;
    std::string node_a;
    std::string node_b;
    LinkFamily family;
    LinkClassification classification;
    CapacityData capacity_ab;  // a -> b
    CapacityData capacity_ba;  // b -> a; ignored unless direction-dependent
};

struct NetworkGraph {
    std::vector<Node> nodes;
    std::vector<Link> links;

    const Node* find_node(const std::string& id) const;
    void validate() const;  // unique ids, endpoints exist, families consistent
};

struct TimeWindow {
    double start_s;
    double end_s;
};

// Immutable per-window view: every link annotated with directed weights.
struct Snapshot {
    const NetworkGraph* graph;
    TimeWindow window;
    std::vector<double> weight_ab;  // parallel to graph->links
    std::vector<double> weight_ba;
};

// Evaluates every link's capacity over the window. Throws validation_error
// listing link ids whose dynamic data does not cover the window.
Snapshot snapshot_capacities(const NetworkGraph& graph, TimeWindow window);

struct Route {
    bool reachable = false;
    std::vector<std::string> nodes;       // empty when unreachable
    std::vector<double> hop_capacities;   // per-hop weights along the route
    double bottleneck = 0.0;              // min hop capacity
    std::string note;                     // unreachable/blocked diagnostics
};

enum class RouteObjective {
    widest,     // maximize the bottleneck capacity
    fewest_hops  // plain hop-count shortest path
};

// Maximum-bottleneck route. Deterministic tie-break: larger bottleneck,
// then fewer hops, then lexicographically smaller node-id sequence.
// Untrusted nodes are never used as interior relays; when that blocks every
// path the result is unreachable and names the blocked nodes.
Route widest_path(const Snapshot& snapshot, const std::string& src,
                  const std::string& dst,
                  RouteObjective objective = RouteObjective::widest);

struct MultiTargetRoute {
    bool reachable = false;
    Route combined;                       // concatenated node sequence
    std::vector<Route> segments;          // per consecutive target pair
    passes::FeasibilityVerdict feasibility;
    std::string note;
};

// Routes through the ordered targets, concatenating widest paths, then
// applies the relay feasibility conditions to the per-hop capacities.
MultiTargetRoute multi_target_route(const Snapshot& snapshot,
                                    std::span<const std::string> targets,
                                    double key_size_bits);

// Exhaustive simple-path enumeration for graphs of at most max_nodes nodes;
// test oracle with the same tie-break rules as widest_path.
Route brute_force_widest_path(const Snapshot& snapshot, const std::string& src,
                              const std::string& dst, std::size_t max_nodes = 10);

}  // namespace cvqkd::netgraph
