#pragma once

#include "bridgenav/graph.hpp"

#include <istream>
#include <limits>
#include <string_view>
#include <utility>
#include <vector>

namespace bridgenav {

struct ShortestPaths {
    int source = 0;
    std::vector<double> dist;
    /// Predecessor vertex and the edge used to reach it (-1 at the source or when unreachable).
    std::vector<int> pred;
    std::vector<int> pred_edge;

    bool reachable(int v) const { return dist[static_cast<std::size_t>(v)] < std::numeric_limits<double>::infinity(); }
    /// Edge indices from source to v, in travel order.
    std::vector<int> edge_path(int v) const;
};

/// Exact shortest-path tree; ties broken toward the smaller predecessor id.
ShortestPaths dijkstra(const WeightedGraph& g, int src);

/// Odd-degree vertices in increasing id order (parallel edges count separately).
std::vector<int> odd_vertices(const WeightedGraph& g);

struct Pairing {
    std::vector<std::pair<int, int>> pairs;
    double cost = 0.0;
};

/// Minimum-weight perfect matching of `odd` under `metric` (indexed by vertex id).
/// Exact bitmask DP up to 16 vertices; greedy with pair-swap improvement above.
Pairing min_weight_pairing(const std::vector<int>& odd, const std::vector<std::vector<double>>& metric);

enum class AugmentCase { EulerianCase, BothOdd, TargetOdd, SourceOdd, BothEven, ClosedCircuit };

std::string_view to_string(AugmentCase c);

struct AugmentedGraph {
    struct Duplicate {
        int u = 0;
        int v = 0;
        double w = 0.0;
        /// Base edge this copy shadows.
        int base_edge = -1;
    };

    WeightedGraph base;
    std::vector<Duplicate> duplicated;
    AugmentCase provenance = AugmentCase::EulerianCase;
    /// Odd vertices left to the pairing step after the case analysis.
    std::vector<int> paired_odd;
    /// Total weight of duplicated edges before same-edge copies were cancelled in pairs.
    double raw_duplicate_weight = 0.0;

    double duplicate_weight() const;
};

/// Adds shortest-path copies so that the odd-degree set becomes exactly
/// {v_s, v_t} (empty when v_s == v_t).
AugmentedGraph augment_for_open_trail(const WeightedGraph& g, int v_s, int v_t);

struct RoutePlan {
    std::vector<int> walk;
    /// Augmented edge index per step: < base.edges.size() for base edges, otherwise a duplicate.
    std::vector<int> edge_sequence;
    /// Base edge served by each step.
    std::vector<int> base_edge_sequence;
    /// Visits per base edge.
    std::vector<int> edge_visits;
    double total_length = 0.0;
    AugmentCase provenance = AugmentCase::EulerianCase;
};

/// Hierholzer extraction of a trail that uses every augmented edge once.
RoutePlan euler_trail(const AugmentedGraph& ag, int v_s, int v_t);

RoutePlan vocpp(const WeightedGraph& g, int v_s, int v_t);

/// Exact open-postman optimum by enumerating duplicate subsets (|E| <= 14).
RoutePlan brute_force_ocpp(const WeightedGraph& g, int v_s, int v_t);

/// Parses "u v w" lines ('#' comments allowed). Vertex tokens are names.
WeightedGraph parse_edge_list(std::istream& in);

} // namespace bridgenav
