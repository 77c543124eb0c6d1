#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include "og/errors.hpp"
#include "og/matrix.hpp"

namespace og {

struct Edge {
    int src = 0;
    int dst = 0;
    double weight = 1.0;
};

/// Weighted graph with per-node internal opinions. Undirected graphs
/// store each edge once with src < dst; for all Laplacian work they are
/// expanded to the bidirected form, so A = 2L holds for them.
///
/// Optional extensions:
///  - node_weights: per-node coefficient on the internal-opinion cost term
///  - fixed: nodes whose opinion is pinned to their `opinions` entry and
///    who incur no cost themselves; the remaining nodes then carry no
///    internal-opinion term of their own
///
/// Instances are immutable after construction; every mutation-style
/// operation returns a new Graph.
struct Graph {
    bool directed = true;
    int n = 0;
    std::vector<Edge> edges;  // canonical: sorted by (src, dst), pairs merged
    Vec opinions;
    std::optional<Vec> node_weights;
    std::vector<int> fixed;  // sorted, unique

    bool has_node_weights() const { return node_weights.has_value(); }
    bool has_fixed() const { return !fixed.empty(); }
    bool is_fixed(int v) const { return std::binary_search(fixed.begin(), fixed.end(), v); }

    double node_weight(int v) const { return node_weights ? (*node_weights)[v] : 1.0; }
};

/// Validates and canonicalizes a graph description: bounds checks,
/// positive weights, no self-loops, duplicate (src,dst) pairs merged by
/// weight summation, undirected edges normalized to src < dst.
inline Graph build_graph(bool directed, int n, std::vector<Edge> edges, Vec opinions,
                         std::optional<Vec> node_weights = std::nullopt,
                         std::vector<int> fixed = {}) {
    if (n < 0) throw std::invalid_argument("graph: negative node count");
    if (static_cast<int>(opinions.size()) != n)
        throw std::invalid_argument("graph: opinion vector length mismatch");
    if (node_weights) {
        if (static_cast<int>(node_weights->size()) != n)
            throw std::invalid_argument("graph: node_weights length mismatch");
        for (double w : *node_weights)
            if (!(w >= 0.0) || !std::isfinite(w))
                throw std::invalid_argument("graph: node weights must be nonnegative");
    }
    for (double s : opinions)
        if (!std::isfinite(s)) throw std::invalid_argument("graph: opinion not finite");
    for (int v : fixed)
        if (v < 0 || v >= n) throw std::invalid_argument("graph: fixed node index out of range");
    std::sort(fixed.begin(), fixed.end());
    fixed.erase(std::unique(fixed.begin(), fixed.end()), fixed.end());
    if (!fixed.empty() && node_weights)
        throw std::invalid_argument("graph: fixed nodes and node weights cannot be combined");

    std::map<std::pair<int, int>, double> merged;
    for (Edge e : edges) {
        if (e.src < 0 || e.src >= n || e.dst < 0 || e.dst >= n)
            throw std::invalid_argument("graph: edge index out of range");
        if (e.src == e.dst) throw std::invalid_argument("graph: self-loop");
        if (!(e.weight > 0.0) || !std::isfinite(e.weight))
            throw std::invalid_argument("graph: edge weight must be positive");
        if (!directed && e.src > e.dst) std::swap(e.src, e.dst);
        merged[{e.src, e.dst}] += e.weight;
    }

    Graph g;
    g.directed = directed;
    g.n = n;
    g.opinions = std::move(opinions);
    g.node_weights = std::move(node_weights);
    g.fixed = std::move(fixed);
    g.edges.reserve(merged.size());
    for (const auto& [key, w] : merged) g.edges.push_back({key.first, key.second, w});
    return g;
}

/// The bidirected expansion: undirected edges become a pair of opposite
/// directed edges of the same weight. Directed graphs pass through.
inline std::vector<Edge> directed_edges(const Graph& g) {
    if (g.directed) return g.edges;
    std::vector<Edge> out;
    out.reserve(2 * g.edges.size());
    for (const Edge& e : g.edges) {
        out.push_back(e);
        out.push_back({e.dst, e.src, e.weight});
    }
    return out;
}

struct LaplacianPair {
    Matrix l;  // out-degree Laplacian
    Matrix a;  // Laplacian of the symmetrized graph (pair weight w_ij + w_ji)
};

/// L is built from out-edges; A is the Laplacian of the undirected graph
/// whose pair weights are w_ij + w_ji, so A = 2L for undirected inputs
/// and A = L + L' exactly on Eulerian graphs.
inline LaplacianPair laplacians(const Graph& g) {
    Matrix l(g.n, g.n);
    for (const Edge& e : directed_edges(g)) {
        l(e.src, e.src) += e.weight;
        l(e.src, e.dst) -= e.weight;
    }
    Matrix a(g.n, g.n);
    if (!g.directed) {
        a = l * 2.0;
    } else {
        for (const Edge& e : g.edges) {
            a(e.src, e.src) += e.weight;
            a(e.dst, e.dst) += e.weight;
            a(e.src, e.dst) -= e.weight;
            a(e.dst, e.src) -= e.weight;
        }
    }
    return {std::move(l), std::move(a)};
}

/// Maximum weighted degree: max over nodes of in-weight and out-weight
/// sums (for undirected graphs the two coincide).
inline double max_degree(const Graph& g) {
    Vec in(g.n, 0.0), out(g.n, 0.0);
    for (const Edge& e : directed_edges(g)) {
        out[e.src] += e.weight;
        in[e.dst] += e.weight;
    }
    double best = 0.0;
    for (int v = 0; v < g.n; ++v) best = std::max({best, in[v], out[v]});
    return best;
}

/// True iff every node's total in-weight equals its total out-weight.
/// Undirected graphs are trivially Eulerian.
inline bool is_eulerian(const Graph& g) {
    if (!g.directed) return true;
    Vec in(g.n, 0.0), out(g.n, 0.0);
    double scale = 1.0;
    for (const Edge& e : g.edges) {
        out[e.src] += e.weight;
        in[e.dst] += e.weight;
        scale = std::max(scale, e.weight);
    }
    for (int v = 0; v < g.n; ++v)
        if (std::abs(in[v] - out[v]) > 1e-12 * scale) return false;
    return true;
}

/// True iff no ordered pair has both orientations present.
inline bool is_asymmetric(const Graph& g) {
    if (!g.directed) return g.edges.empty();
    std::map<std::pair<int, int>, bool> seen;
    for (const Edge& e : g.edges) seen[{e.src, e.dst}] = true;
    for (const Edge& e : g.edges)
        if (seen.count({e.dst, e.src})) return false;
    return true;
}

/// Connected components of the symmetrized support graph, each sorted,
/// ordered by smallest member.
inline std::vector<std::vector<int>> connected_components(const Graph& g) {
    std::vector<int> parent(g.n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int v) {
        while (parent[v] != v) v = parent[v] = parent[parent[v]];
        return v;
    };
    for (const Edge& e : g.edges) {
        int a = find(e.src), b = find(e.dst);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
    std::map<int, std::vector<int>> groups;
    for (int v = 0; v < g.n; ++v) groups[find(v)].push_back(v);
    std::vector<std::vector<int>> out;
    out.reserve(groups.size());
    for (auto& [root, nodes] : groups) out.push_back(std::move(nodes));
    return out;
}

/// Exact edge expansion of the symmetrized graph:
///   alpha = min over subsets S (1 <= |S| <= n/2) of w(boundary(S)) / |S|,
/// by exhaustive enumeration in Gray-code order. Hard-guarded at n <= 24.
inline double edge_expansion(const Graph& g) {
    if (g.n > 24)
        throw unsupported_error("edge_expansion: graph too large for exact enumeration (n > 24)");
    if (connected_components(g).size() != 1)
        throw unsupported_error("edge_expansion: symmetrized graph is disconnected");
    if (g.n < 2) throw unsupported_error("edge_expansion: needs at least two nodes");

    // Symmetrized adjacency, one entry per unordered pair (w_ij + w_ji
    // for directed graphs, the stored weight for undirected ones).
    std::map<std::pair<int, int>, double> und;
    for (const Edge& e : g.edges) {
        auto key = std::minmax(e.src, e.dst);
        und[{key.first, key.second}] += e.weight;
    }
    std::vector<std::vector<std::pair<int, double>>> adj(g.n);
    for (const auto& [key, w] : und) {
        adj[key.first].push_back({key.second, w});
        adj[key.second].push_back({key.first, w});
    }

    const std::uint32_t total = 1u << g.n;
    double boundary = 0.0;
    int size = 0;
    std::uint32_t mask = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::uint32_t k = 1; k < total; ++k) {
        const std::uint32_t gray = k ^ (k >> 1);
        const int v = std::countr_zero(gray ^ mask);  // the flipped vertex
        const bool entering = (gray >> v) & 1u;
        for (const auto& [u, w] : adj[v]) {
            const bool u_in = (mask >> u) & 1u;
            // Edge (v,u) switches boundary status when exactly one endpoint is in.
            if (entering)
                boundary += u_in ? -w : w;
            else
                boundary += u_in ? w : -w;
        }
        size += entering ? 1 : -1;
        mask = gray;
        // Subsets up to half the graph, rounding up on odd n.
        if (size >= 1 && 2 * size <= g.n + 1) best = std::min(best, boundary / size);
    }
    return best;
}

inline Graph with_opinions(const Graph& g, Vec opinions) {
    return build_graph(g.directed, g.n, g.edges, std::move(opinions), g.node_weights, g.fixed);
}

inline Graph scale_weights(const Graph& g, double alpha) {
    if (!(alpha > 0.0) || !std::isfinite(alpha))
        throw std::invalid_argument("scale_weights: factor must be positive");
    std::vector<Edge> edges = g.edges;
    for (Edge& e : edges) e.weight *= alpha;
    return build_graph(g.directed, g.n, std::move(edges), g.opinions, g.node_weights, g.fixed);
}

/// Returns a new graph with weight rho added to the (directed) edge
/// (i,j); on undirected graphs the undirected edge gains the weight.
inline Graph add_edge_weight(const Graph& g, int i, int j, double rho) {
    if (i == j) throw std::invalid_argument("add_edge_weight: endpoints equal");
    if (i < 0 || i >= g.n || j < 0 || j >= g.n)
        throw std::invalid_argument("add_edge_weight: index out of range");
    if (!(rho > 0.0) || !std::isfinite(rho))
        throw std::invalid_argument("add_edge_weight: weight must be positive");
    std::vector<Edge> edges = g.edges;
    edges.push_back({i, j, rho});
    return build_graph(g.directed, g.n, std::move(edges), g.opinions, g.node_weights, g.fixed);
}

}  // namespace og
