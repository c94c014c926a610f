#include "bridgenav/route.hpp"

#include "bridgenav/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <queue>
#include <sstream>
#include <string>

namespace bridgenav {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using Adjacency = std::vector<std::vector<int>>;

Adjacency adjacency(std::size_t n, const std::vector<WeightedGraph::Edge>& edges)
{
    Adjacency adj(n);
    for (std::size_t i = 0; i < edges.size(); ++i) {
        adj[static_cast<std::size_t>(edges[i].u)].push_back(static_cast<int>(i));
        adj[static_cast<std::size_t>(edges[i].v)].push_back(static_cast<int>(i));
    }
    return adj;
}

int other_end(const WeightedGraph::Edge& e, int v)
{
    return e.u == v ? e.v : e.u;
}

void check_vertex(const WeightedGraph& g, int v)
{
    if (v < 0 || static_cast<std::size_t>(v) >= g.vertex_count)
        throw Error(Errc::UnknownVertex, "vertex " + std::to_string(v) + " out of range");
}

std::vector<int> degrees(std::size_t n, const std::vector<WeightedGraph::Edge>& edges)
{
    std::vector<int> deg(n, 0);
    for (const auto& e : edges) {
        ++deg[static_cast<std::size_t>(e.u)];
        ++deg[static_cast<std::size_t>(e.v)];
    }
    return deg;
}

// Every edge must be reachable from v_s, and v_t must be reachable too.
void check_connected(const WeightedGraph& g, const ShortestPaths& from_s, int v_t)
{
    if (!from_s.reachable(v_t))
        throw Error(Errc::DisconnectedEndpoints, "v_s and v_t lie in different components");
    for (const auto& e : g.edges)
        if (!from_s.reachable(e.u))
            throw Error(Errc::DisconnectedEndpoints, "some edges are unreachable from v_s");
}

} // namespace

std::vector<int> ShortestPaths::edge_path(int v) const
{
    std::vector<int> path;
    if (!reachable(v))
        return path;
    while (v != source) {
        path.push_back(pred_edge[static_cast<std::size_t>(v)]);
        v = pred[static_cast<std::size_t>(v)];
    }
    std::reverse(path.begin(), path.end());
    return path;
}

ShortestPaths dijkstra(const WeightedGraph& g, int src)
{
    check_vertex(g, src);
    const std::size_t n = g.vertex_count;
    ShortestPaths sp;
    sp.source = src;
    sp.dist.assign(n, kInf);
    sp.pred.assign(n, -1);
    sp.pred_edge.assign(n, -1);
    std::vector<bool> done(n, false);
    const Adjacency adj = adjacency(n, g.edges);

    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    sp.dist[static_cast<std::size_t>(src)] = 0.0;
    pq.emplace(0.0, src);
    while (!pq.empty()) {
        const auto [d, u] = pq.top();
        pq.pop();
        const auto uu = static_cast<std::size_t>(u);
        if (done[uu] || d > sp.dist[uu])
            continue;
        done[uu] = true;
        for (int ei : adj[uu]) {
            const auto& e = g.edges[static_cast<std::size_t>(ei)];
            const int v = other_end(e, u);
            const auto vv = static_cast<std::size_t>(v);
            if (done[vv])
                continue;
            const double nd = d + e.w;
            const bool better = nd < sp.dist[vv];
            const bool tie = nd == sp.dist[vv] &&
                             (u < sp.pred[vv] || (u == sp.pred[vv] && ei < sp.pred_edge[vv]));
            if (better || tie) {
                sp.dist[vv] = nd;
                sp.pred[vv] = u;
                sp.pred_edge[vv] = ei;
                if (better)
                    pq.emplace(nd, v);
            }
        }
    }
    return sp;
}

std::vector<int> odd_vertices(const WeightedGraph& g)
{
    const auto deg = degrees(g.vertex_count, g.edges);
    std::vector<int> odd;
    for (std::size_t v = 0; v < deg.size(); ++v)
        if (deg[v] % 2 != 0)
            odd.push_back(static_cast<int>(v));
    return odd;
}

Pairing min_weight_pairing(const std::vector<int>& odd, const std::vector<std::vector<double>>& metric)
{
    const std::size_t n = odd.size();
    if (n % 2 != 0)
        throw Error(Errc::OddCardinality, "cannot pair an odd number of vertices");
    auto d = [&](std::size_t i, std::size_t j) {
        return metric[static_cast<std::size_t>(odd[i])][static_cast<std::size_t>(odd[j])];
    };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (!std::isfinite(d(i, j)))
                throw Error(Errc::Disconnected, "odd vertices " + std::to_string(odd[i]) + " and " +
                                                    std::to_string(odd[j]) + " are not connected");
    Pairing out;
    if (n == 0)
        return out;

    if (n <= 16) {
        const std::uint32_t full = (1u << n) - 1u;
        std::vector<double> dp(full + 1u, kInf);
        std::vector<std::uint32_t> from(full + 1u, 0);
        std::vector<std::pair<std::uint8_t, std::uint8_t>> step(full + 1u);
        dp[0] = 0.0;
        for (std::uint32_t mask = 0; mask < full; ++mask) {
            if (dp[mask] == kInf)
                continue;
            std::size_t i = 0;
            while (mask & (1u << i))
                ++i;
            for (std::size_t j = i + 1; j < n; ++j) {
                if (mask & (1u << j))
                    continue;
                const std::uint32_t next = mask | (1u << i) | (1u << j);
                const double c = dp[mask] + d(i, j);
                if (c < dp[next]) {
                    dp[next] = c;
                    from[next] = mask;
                    step[next] = {static_cast<std::uint8_t>(i), static_cast<std::uint8_t>(j)};
                }
            }
        }
        for (std::uint32_t m = full; m != 0; m = from[m])
            out.pairs.emplace_back(odd[step[m].first], odd[step[m].second]);
        std::reverse(out.pairs.begin(), out.pairs.end());
        out.cost = dp[full];
        return out;
    }

    // Greedy closest pairs, then pair swaps while they help.
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    std::vector<bool> used(n, false);
    for (std::size_t round = 0; round < n / 2; ++round) {
        double best = kInf;
        std::pair<std::size_t, std::size_t> pick{0, 0};
        for (std::size_t i = 0; i < n; ++i) {
            if (used[i])
                continue;
            for (std::size_t j = i + 1; j < n; ++j)
                if (!used[j] && d(i, j) < best) {
                    best = d(i, j);
                    pick = {i, j};
                }
        }
        used[pick.first] = used[pick.second] = true;
        pairs.push_back(pick);
    }
    bool improved = true;
    while (improved) {
        improved = false;
        for (std::size_t p = 0; p < pairs.size(); ++p) {
            for (std::size_t q = p + 1; q < pairs.size(); ++q) {
                auto [a, b] = pairs[p];
                auto [c, e] = pairs[q];
                const double cur = d(a, b) + d(c, e);
                const double alt1 = d(a, c) + d(b, e);
                const double alt2 = d(a, e) + d(b, c);
                if (alt1 < cur - 1e-12 && alt1 <= alt2) {
                    pairs[p] = {a, c};
                    pairs[q] = {b, e};
                    improved = true;
                } else if (alt2 < cur - 1e-12) {
                    pairs[p] = {a, e};
                    pairs[q] = {b, c};
                    improved = true;
                }
            }
        }
    }
    for (auto [i, j] : pairs) {
        out.pairs.emplace_back(odd[i], odd[j]);
        out.cost += d(i, j);
    }
    return out;
}

std::string_view to_string(AugmentCase c)
{
    switch (c) {
    case AugmentCase::EulerianCase: return "eulerian";
    case AugmentCase::BothOdd: return "both_odd";
    case AugmentCase::TargetOdd: return "target_odd";
    case AugmentCase::SourceOdd: return "source_odd";
    case AugmentCase::BothEven: return "both_even";
    case AugmentCase::ClosedCircuit: return "closed_circuit";
    }
    return "eulerian";
}

double AugmentedGraph::duplicate_weight() const
{
    double s = 0.0;
    for (const auto& d : duplicated)
        s += d.w;
    return s;
}

namespace {

std::vector<int> expected_odd(int v_s, int v_t)
{
    if (v_s == v_t)
        return {};
    return {std::min(v_s, v_t), std::max(v_s, v_t)};
}

void check_parity(const AugmentedGraph& ag, int v_s, int v_t)
{
    auto deg = degrees(ag.base.vertex_count, ag.base.edges);
    for (const auto& d : ag.duplicated) {
        ++deg[static_cast<std::size_t>(d.u)];
        ++deg[static_cast<std::size_t>(d.v)];
    }
    std::vector<int> odd;
    for (std::size_t v = 0; v < deg.size(); ++v)
        if (deg[v] % 2 != 0)
            odd.push_back(static_cast<int>(v));
    if (odd != expected_odd(v_s, v_t))
        throw Error(Errc::ParityViolation, "odd-degree set differs from the trail endpoints");
}

} // namespace

AugmentedGraph augment_for_open_trail(const WeightedGraph& g, int v_s, int v_t)
{
    if (g.vertex_count == 0)
        throw Error(Errc::EmptyGraph, "graph has no vertices");
    check_vertex(g, v_s);
    check_vertex(g, v_t);
    const ShortestPaths from_s = dijkstra(g, v_s);
    check_connected(g, from_s, v_t);
    const ShortestPaths from_t = dijkstra(g, v_t);

    AugmentedGraph ag;
    ag.base = g;
    std::vector<int> copies(g.edges.size(), 0);
    auto duplicate_path = [&](const std::vector<int>& path) {
        for (int e : path)
            ++copies[static_cast<std::size_t>(e)];
    };

    const std::vector<int> odd = odd_vertices(g);
    auto is_odd = [&](int v) { return std::binary_search(odd.begin(), odd.end(), v); };
    auto without = [&](std::initializer_list<int> drop) {
        std::vector<int> rest;
        for (int v : odd)
            if (std::find(drop.begin(), drop.end(), v) == drop.end())
                rest.push_back(v);
        return rest;
    };
    // Nearest odd vertex to `from`, excluding `skip`; smallest id on ties.
    auto nearest_odd = [&](const ShortestPaths& from, int skip) {
        int best = -1;
        for (int c : odd)
            if (c != skip && (best < 0 || from.dist[static_cast<std::size_t>(c)] <
                                              from.dist[static_cast<std::size_t>(best)]))
                best = c;
        return best;
    };

    std::vector<int> remaining;
    if (v_s == v_t) {
        ag.provenance = AugmentCase::ClosedCircuit;
        remaining = odd;
    } else if (odd.empty()) {
        ag.provenance = AugmentCase::EulerianCase;
        duplicate_path(from_s.edge_path(v_t));
    } else if (is_odd(v_s) && is_odd(v_t)) {
        ag.provenance = AugmentCase::BothOdd;
        remaining = without({v_s, v_t});
    } else if (is_odd(v_t)) {
        ag.provenance = AugmentCase::TargetOdd;
        const int v_c = nearest_odd(from_s, v_t);
        duplicate_path(from_s.edge_path(v_c));
        remaining = without({v_t, v_c});
    } else if (is_odd(v_s)) {
        ag.provenance = AugmentCase::SourceOdd;
        const int v_c = nearest_odd(from_t, v_s);
        duplicate_path(from_t.edge_path(v_c));
        remaining = without({v_s, v_c});
    } else {
        ag.provenance = AugmentCase::BothEven;
        int c1 = -1, c2 = -1;
        double best = kInf;
        for (int a : odd)
            for (int b : odd) {
                if (a == b)
                    continue;
                const double cost = from_s.dist[static_cast<std::size_t>(a)] + from_t.dist[static_cast<std::size_t>(b)];
                if (cost < best) {
                    best = cost;
                    c1 = a;
                    c2 = b;
                }
            }
        duplicate_path(from_s.edge_path(c1));
        duplicate_path(from_t.edge_path(c2));
        remaining = without({c1, c2});
    }

    ag.paired_odd = remaining;
    if (!remaining.empty()) {
        std::vector<ShortestPaths> trees;
        std::vector<std::vector<double>> metric(g.vertex_count, std::vector<double>(g.vertex_count, kInf));
        std::map<int, std::size_t> tree_of;
        for (int v : remaining) {
            tree_of[v] = trees.size();
            trees.push_back(dijkstra(g, v));
            for (int w : remaining)
                metric[static_cast<std::size_t>(v)][static_cast<std::size_t>(w)] =
                    trees.back().dist[static_cast<std::size_t>(w)];
        }
        const Pairing pairing = min_weight_pairing(remaining, metric);
        for (auto [a, b] : pairing.pairs)
            duplicate_path(trees[tree_of[a]].edge_path(b));
    }

    // Two copies of one edge change no parity; keep at most one.
    for (std::size_t e = 0; e < copies.size(); ++e) {
        ag.raw_duplicate_weight += copies[e] * g.edges[e].w;
        if (copies[e] % 2 != 0) {
            const auto& be = g.edges[e];
            ag.duplicated.push_back({be.u, be.v, be.w, static_cast<int>(e)});
        }
    }
    check_parity(ag, v_s, v_t);
    return ag;
}

RoutePlan euler_trail(const AugmentedGraph& ag, int v_s, int v_t)
{
    const WeightedGraph& g = ag.base;
    check_vertex(g, v_s);
    check_vertex(g, v_t);
    check_parity(ag, v_s, v_t);

    std::vector<WeightedGraph::Edge> all = g.edges;
    for (const auto& d : ag.duplicated)
        all.push_back({d.u, d.v, d.w});

    RoutePlan plan;
    plan.provenance = ag.provenance;
    plan.edge_visits.assign(g.edges.size(), 1);
    for (const auto& d : ag.duplicated)
        ++plan.edge_visits[static_cast<std::size_t>(d.base_edge)];

    if (all.empty()) {
        if (v_s != v_t)
            throw Error(Errc::Disconnected, "no edges join v_s and v_t");
        plan.walk = {v_s};
        return plan;
    }

    const Adjacency adj = adjacency(g.vertex_count, all);
    {
        // connectivity over edge-bearing vertices
        std::vector<bool> seen(g.vertex_count, false);
        std::vector<int> stack{v_s};
        seen[static_cast<std::size_t>(v_s)] = true;
        while (!stack.empty()) {
            const int u = stack.back();
            stack.pop_back();
            for (int ei : adj[static_cast<std::size_t>(u)]) {
                const int w = other_end(all[static_cast<std::size_t>(ei)], u);
                if (!seen[static_cast<std::size_t>(w)]) {
                    seen[static_cast<std::size_t>(w)] = true;
                    stack.push_back(w);
                }
            }
        }
        for (const auto& e : all)
            if (!seen[static_cast<std::size_t>(e.u)])
                throw Error(Errc::Disconnected, "edges are not all reachable from v_s");
    }

    std::vector<bool> used(all.size(), false);
    std::vector<std::size_t> cursor(g.vertex_count, 0);
    std::vector<std::pair<int, int>> stack{{v_s, -1}};
    std::vector<std::pair<int, int>> trail;
    while (!stack.empty()) {
        const int v = stack.back().first;
        auto& cur = cursor[static_cast<std::size_t>(v)];
        const auto& nbrs = adj[static_cast<std::size_t>(v)];
        while (cur < nbrs.size() && used[static_cast<std::size_t>(nbrs[cur])])
            ++cur;
        if (cur < nbrs.size()) {
            const int ei = nbrs[cur];
            used[static_cast<std::size_t>(ei)] = true;
            stack.emplace_back(other_end(all[static_cast<std::size_t>(ei)], v), ei);
        } else {
            trail.push_back(stack.back());
            stack.pop_back();
        }
    }
    std::reverse(trail.begin(), trail.end());
    if (trail.size() != all.size() + 1 || trail.front().first != v_s || trail.back().first != v_t)
        throw Error(Errc::ParityViolation, "trail extraction did not end at v_t");

    for (std::size_t i = 0; i < trail.size(); ++i) {
        plan.walk.push_back(trail[i].first);
        if (i > 0) {
            const int ei = trail[i].second;
            plan.edge_sequence.push_back(ei);
            const auto n_base = static_cast<int>(g.edges.size());
            plan.base_edge_sequence.push_back(
                ei < n_base ? ei : ag.duplicated[static_cast<std::size_t>(ei - n_base)].base_edge);
            plan.total_length += all[static_cast<std::size_t>(trail[i].second)].w;
        }
    }
    return plan;
}

RoutePlan vocpp(const WeightedGraph& g, int v_s, int v_t)
{
    return euler_trail(augment_for_open_trail(g, v_s, v_t), v_s, v_t);
}

RoutePlan brute_force_ocpp(const WeightedGraph& g, int v_s, int v_t)
{
    if (g.edges.size() > 14)
        throw Error(Errc::TooLarge, "exhaustive search is limited to 14 edges");
    if (g.vertex_count == 0)
        throw Error(Errc::EmptyGraph, "graph has no vertices");
    check_vertex(g, v_s);
    check_vertex(g, v_t);
    check_connected(g, dijkstra(g, v_s), v_t);

    // Vertex parity as a bitmask over a compact renumbering.
    std::map<int, int> compact;
    auto slot = [&](int v) {
        auto [it, fresh] = compact.try_emplace(v, static_cast<int>(compact.size()));
        return it->second;
    };
    std::vector<std::uint64_t> toggle(g.edges.size());
    std::uint64_t base = 0;
    for (std::size_t i = 0; i < g.edges.size(); ++i) {
        toggle[i] = (std::uint64_t{1} << slot(g.edges[i].u)) ^ (std::uint64_t{1} << slot(g.edges[i].v));
        base ^= toggle[i];
    }
    std::uint64_t target = 0;
    if (v_s != v_t)
        target = (std::uint64_t{1} << slot(v_s)) ^ (std::uint64_t{1} << slot(v_t));

    const std::uint32_t limit = 1u << g.edges.size();
    double best = kInf;
    std::uint32_t best_mask = 0;
    for (std::uint32_t mask = 0; mask < limit; ++mask) {
        std::uint64_t parity = base;
        double cost = 0.0;
        for (std::size_t i = 0; i < g.edges.size(); ++i)
            if (mask & (1u << i)) {
                parity ^= toggle[i];
                cost += g.edges[i].w;
            }
        if (parity == target && cost < best) {
            best = cost;
            best_mask = mask;
        }
    }
    if (best == kInf)
        throw Error(Errc::ParityViolation, "no duplicate set realises the requested endpoints");

    AugmentedGraph ag;
    ag.base = g;
    for (std::size_t i = 0; i < g.edges.size(); ++i)
        if (best_mask & (1u << i))
            ag.duplicated.push_back({g.edges[i].u, g.edges[i].v, g.edges[i].w, static_cast<int>(i)});
    ag.raw_duplicate_weight = ag.duplicate_weight();
    return euler_trail(ag, v_s, v_t);
}

WeightedGraph parse_edge_list(std::istream& in)
{
    WeightedGraph g;
    std::map<std::string, int> ids;
    auto id = [&](const std::string& name) {
        auto [it, fresh] = ids.try_emplace(name, static_cast<int>(g.names.size()));
        if (fresh)
            g.names.push_back(name);
        return it->second;
    };
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        std::istringstream ss(line);
        std::string a, b, wtok, extra;
        if (!(ss >> a))
            continue;
        if (!(ss >> b >> wtok) || (ss >> extra))
            throw Error(Errc::ParseError, "line " + std::to_string(line_no) + ": expected 'u v w'");
        double w = 0.0;
        try {
            std::size_t pos = 0;
            w = std::stod(wtok, &pos);
            if (pos != wtok.size())
                throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw Error(Errc::ParseError, "line " + std::to_string(line_no) + ": bad weight '" + wtok + "'");
        }
        if (!std::isfinite(w) || w < 0.0)
            throw Error(Errc::ParseError, "line " + std::to_string(line_no) + ": weight must be finite and >= 0");
        if (a == b)
            throw Error(Errc::ParseError, "line " + std::to_string(line_no) + ": self-loops are not supported");
        const int u = id(a);
        const int v = id(b);
        g.edges.push_back({u, v, w});
    }
    g.vertex_count = g.names.size();
    return g;
}

} // namespace bridgenav
