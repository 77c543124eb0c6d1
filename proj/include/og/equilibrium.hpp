#pragma once

#include <deque>
#include <string>

#include "og/graph.hpp"
#include "og/linalg.hpp"

namespace og {

struct EquilibriumResult {
    Vec opinions;
    double social_cost = 0.0;
    double residual = 0.0;
    int iterations = 0;  // 0 for direct solves
    bool converged = true;
};

/// Instance on the non-fixed nodes equivalent to a fixed-opinion game:
/// each free node gets the weighted average of its fixed neighbors as
/// internal opinion and the total weight to them as node weight. Costs
/// satisfy cost_original(z) = cost_reduced(z|free) + offset.
struct FixedReduction {
    Graph reduced;
    double offset = 0.0;
    std::vector<int> free_nodes;  // reduced index -> original index
};

namespace detail {

inline std::vector<std::vector<std::pair<int, double>>> out_adjacency(const Graph& g) {
    std::vector<std::vector<std::pair<int, double>>> adj(g.n);
    for (const Edge& e : directed_edges(g)) adj[e.src].push_back({e.dst, e.weight});
    return adj;
}

/// Every node must have an out-path to some positively weighted node,
/// otherwise the Nash system (L + diag(w)) is singular.
inline void check_nash_anchored(const Graph& g) {
    if (!g.has_node_weights()) return;
    std::vector<std::vector<int>> rev(g.n);
    for (const Edge& e : directed_edges(g)) rev[e.dst].push_back(e.src);
    std::vector<char> ok(g.n, 0);
    std::deque<int> queue;
    for (int v = 0; v < g.n; ++v)
        if (g.node_weight(v) > 0.0) {
            ok[v] = 1;
            queue.push_back(v);
        }
    while (!queue.empty()) {
        const int v = queue.front();
        queue.pop_front();
        for (int u : rev[v])
            if (!ok[u]) {
                ok[u] = 1;
                queue.push_back(u);
            }
    }
    for (int v = 0; v < g.n; ++v)
        if (!ok[v])
            throw numeric_error("nash: node " + std::to_string(v) +
                                " cannot reach any positively weighted node; equilibrium underdetermined");
}

/// The optimum system (A + diag(w)) is singular on any component whose
/// node weights are all zero.
inline void check_opt_anchored(const Graph& g) {
    if (!g.has_node_weights()) return;
    for (const auto& comp : connected_components(g)) {
        double total = 0.0;
        for (int v : comp) total += g.node_weight(v);
        if (!(total > 0.0))
            throw numeric_error("optimum: component containing node " + std::to_string(comp.front()) +
                                " has no positive node weight; optimum underdetermined");
    }
}

inline EquilibriumResult solve_with_diagonal(const Graph& g, const Matrix& base, double social);

}  // namespace detail

FixedReduction reduce_fixed_opinions(const Graph& g);
double social_cost(const Graph& g, const Vec& z);

/// Cost of node i at opinion profile z, Eq.-(2) style:
/// w_i (z_i - s_i)^2 + sum over out-neighbors j of w_ij (z_i - z_j)^2.
/// In the fixed-opinion model fixed nodes incur no cost and free nodes
/// carry no internal term.
inline double node_cost(const Graph& g, const Vec& z, int i) {
    if (static_cast<int>(z.size()) != g.n) throw std::invalid_argument("node_cost: length mismatch");
    if (i < 0 || i >= g.n) throw std::invalid_argument("node_cost: index out of range");
    if (g.has_fixed() && g.is_fixed(i)) return 0.0;
    auto clamped = [&](int v) { return (g.has_fixed() && g.is_fixed(v)) ? g.opinions[v] : z[v]; };
    const double zi = clamped(i);
    double cost = 0.0;
    if (!g.has_fixed()) {
        const double d = zi - g.opinions[i];
        cost += g.node_weight(i) * d * d;
    }
    for (const Edge& e : directed_edges(g)) {
        if (e.src != i) continue;
        const double d = zi - clamped(e.dst);
        cost += e.weight * d * d;
    }
    return cost;
}

inline double social_cost(const Graph& g, const Vec& z) {
    if (static_cast<int>(z.size()) != g.n) throw std::invalid_argument("social_cost: length mismatch");
    auto clamped = [&](int v) { return (g.has_fixed() && g.is_fixed(v)) ? g.opinions[v] : z[v]; };
    double cost = 0.0;
    if (!g.has_fixed()) {
        for (int i = 0; i < g.n; ++i) {
            const double d = z[i] - g.opinions[i];
            cost += g.node_weight(i) * d * d;
        }
    }
    for (const Edge& e : directed_edges(g)) {
        if (g.has_fixed() && g.is_fixed(e.src)) continue;
        const double d = clamped(e.src) - clamped(e.dst);
        cost += e.weight * d * d;
    }
    return cost;
}

namespace detail {

/// Shared direct-solve path: (base + diag(w)) z = diag(w) s.
inline EquilibriumResult solve_diagonal_system(const Graph& g, const Matrix& base) {
    Matrix m = base;
    Vec rhs(g.n);
    for (int i = 0; i < g.n; ++i) {
        const double w = g.node_weight(i);
        m(i, i) += w;
        rhs[i] = w * g.opinions[i];
    }
    EquilibriumResult res;
    res.opinions = g.n > 0 ? solve_linear(m, rhs) : Vec{};
    res.residual = g.n > 0 ? relative_residual(m, res.opinions, rhs) : 0.0;
    return res;
}

inline EquilibriumResult embed_fixed(const Graph& g, const FixedReduction& red,
                                     EquilibriumResult inner) {
    EquilibriumResult out;
    out.opinions = g.opinions;  // fixed nodes keep their pinned value
    for (size_t k = 0; k < red.free_nodes.size(); ++k)
        out.opinions[red.free_nodes[k]] = inner.opinions[k];
    out.residual = inner.residual;
    out.iterations = inner.iterations;
    out.converged = inner.converged;
    out.social_cost = social_cost(g, out.opinions);
    return out;
}

}  // namespace detail

/// Nash equilibrium by direct solve of (L + diag(w)) y = diag(w) s.
/// Fixed-opinion instances are reduced first and re-embedded.
inline EquilibriumResult nash_direct(const Graph& g) {
    if (g.has_fixed()) {
        FixedReduction red = reduce_fixed_opinions(g);
        return detail::embed_fixed(g, red, nash_direct(red.reduced));
    }
    detail::check_nash_anchored(g);
    EquilibriumResult res = detail::solve_diagonal_system(g, laplacians(g).l);
    res.social_cost = social_cost(g, res.opinions);
    return res;
}

/// Social optimum by direct solve of (A + diag(w)) x = diag(w) s.
inline EquilibriumResult social_opt(const Graph& g) {
    if (g.has_fixed()) {
        FixedReduction red = reduce_fixed_opinions(g);
        return detail::embed_fixed(g, red, social_opt(red.reduced));
    }
    detail::check_opt_anchored(g);
    EquilibriumResult res = detail::solve_diagonal_system(g, laplacians(g).a);
    res.social_cost = social_cost(g, res.opinions);
    return res;
}

inline EquilibriumResult nash_node_weighted(const Graph& g) {
    if (!g.has_node_weights()) throw std::invalid_argument("nash_node_weighted: node_weights absent");
    return nash_direct(g);
}

inline EquilibriumResult opt_node_weighted(const Graph& g) {
    if (!g.has_node_weights()) throw std::invalid_argument("opt_node_weighted: node_weights absent");
    return social_opt(g);
}

/// Synchronous repeated averaging from z0 = s until the largest per-step
/// change drops to `tol`. max_iter <= 0 selects the default 100 n + 1000.
inline EquilibriumResult nash_iterative(const Graph& g, double tol = 1e-12, int max_iter = -1) {
    if (!(tol > 0.0)) throw std::invalid_argument("nash_iterative: tol must be positive");
    if (max_iter <= 0) max_iter = 100 * g.n + 1000;
    const auto adj = detail::out_adjacency(g);

    Vec z = g.opinions;
    Vec next(g.n);
    EquilibriumResult res;
    res.converged = false;
    double change = 0.0;
    for (int it = 1; it <= max_iter; ++it) {
        change = 0.0;
        for (int i = 0; i < g.n; ++i) {
            if (g.has_fixed() && g.is_fixed(i)) {
                next[i] = g.opinions[i];
                continue;
            }
            const bool internal = !g.has_fixed();
            double num = internal ? g.node_weight(i) * g.opinions[i] : 0.0;
            double den = internal ? g.node_weight(i) : 0.0;
            for (const auto& [j, w] : adj[i]) {
                num += w * z[j];
                den += w;
            }
            next[i] = den > 0.0 ? num / den : z[i];
            change = std::max(change, std::abs(next[i] - z[i]));
        }
        z.swap(next);
        res.iterations = it;
        if (change <= tol) {
            res.converged = true;
            break;
        }
    }
    res.opinions = std::move(z);
    res.residual = change;
    res.social_cost = social_cost(g, res.opinions);
    return res;
}

inline FixedReduction reduce_fixed_opinions(const Graph& g) {
    if (!g.has_fixed()) throw std::invalid_argument("reduce_fixed_opinions: no fixed nodes");
    FixedReduction red;
    std::vector<int> index(g.n, -1);
    for (int v = 0; v < g.n; ++v)
        if (!g.is_fixed(v)) {
            index[v] = static_cast<int>(red.free_nodes.size());
            red.free_nodes.push_back(v);
        }
    const int m = static_cast<int>(red.free_nodes.size());

    Vec anchor_weight(m, 0.0), anchor_num(m, 0.0), anchor_sq(m, 0.0);
    std::vector<Edge> edges;
    for (const Edge& e : g.edges) {
        const bool src_fixed = g.is_fixed(e.src);
        const bool dst_fixed = g.is_fixed(e.dst);
        if (!src_fixed && !dst_fixed) {
            edges.push_back({index[e.src], index[e.dst], e.weight});
        } else if (!src_fixed && dst_fixed) {
            const int i = index[e.src];
            anchor_weight[i] += e.weight;
            anchor_num[i] += e.weight * g.opinions[e.dst];
            anchor_sq[i] += e.weight * g.opinions[e.dst] * g.opinions[e.dst];
        } else if (src_fixed && !dst_fixed && !g.directed) {
            const int i = index[e.dst];
            anchor_weight[i] += e.weight;
            anchor_num[i] += e.weight * g.opinions[e.src];
            anchor_sq[i] += e.weight * g.opinions[e.src] * g.opinions[e.src];
        }
        // Directed edges out of a fixed node carry no cost and drop out.
    }

    Vec s(m, 0.0);
    Vec w(m, 0.0);
    red.offset = 0.0;
    for (int i = 0; i < m; ++i) {
        w[i] = anchor_weight[i];
        if (anchor_weight[i] > 0.0) {
            s[i] = anchor_num[i] / anchor_weight[i];
            red.offset += anchor_sq[i] - anchor_num[i] * anchor_num[i] / anchor_weight[i];
        }
    }
    red.reduced = build_graph(g.directed, m, std::move(edges), std::move(s), std::move(w), {});
    return red;
}

}  // namespace og
