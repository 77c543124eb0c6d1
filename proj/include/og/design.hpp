#pragma once

#include <cmath>
#include <limits>
#include <utility>

#include "og/equilibrium.hpp"
#include "og/graph.hpp"
#include "og/linalg.hpp"
#include "og/poa.hpp"

namespace og {

namespace detail {

inline void require_plain(const Graph& g, const char* who) {
    if (g.has_node_weights() || g.has_fixed())
        throw unsupported_error(std::string(who) + ": requires uniform node weights");
}

inline void require_no_fixed(const Graph& g, const char* who) {
    if (g.has_fixed())
        throw unsupported_error(std::string(who) + ": fixed-opinion instances not supported");
}

inline void check_pair(const Graph& g, int i, int j, const char* who) {
    if (i == j) throw std::invalid_argument(std::string(who) + ": endpoints equal");
    if (i < 0 || i >= g.n || j < 0 || j >= g.n)
        throw std::invalid_argument(std::string(who) + ": index out of range");
}

}  // namespace detail

/// v_i = (L+I)^{-1} e_i: the direction the Nash equilibrium moves when
/// node i gains out-weight. Entries lie in [0,1] with the i-th entry the
/// unique maximum.
struct InfluenceVector {
    int source = 0;
    Vec values;
};

inline InfluenceVector influence_vector(const Graph& g, int i) {
    detail::require_plain(g, "influence_vector");
    if (i < 0 || i >= g.n) throw std::invalid_argument("influence_vector: index out of range");
    const Matrix m = laplacians(g).l + Matrix::identity(g.n);
    Vec v = solve_linear(m, unit_vector(g.n, i));
    double max_other = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < g.n; ++j) {
        if (v[j] < -1e-9 || v[j] > 1.0 + 1e-9)
            throw numeric_error("influence_vector: entry escaped [0,1]");
        if (j != i) max_other = std::max(max_other, v[j]);
    }
    if (g.n > 1 && !(v[i] > max_other))
        throw numeric_error("influence_vector: source entry is not the unique maximum");
    return {i, std::move(v)};
}

/// Nash equilibrium after adding weight rho to the directed edge (i,j),
/// via the rank-one update
///   y' = y - v_i * rho (y_i - y_j) / (1 + rho (v_ii - v_ij)),
/// with no refactorization.
inline Vec rank_one_nash(const Graph& g, int i, int j, double rho) {
    detail::require_plain(g, "rank_one_nash");
    detail::check_pair(g, i, j, "rank_one_nash");
    if (!(rho >= 0.0) || !std::isfinite(rho))
        throw std::invalid_argument("rank_one_nash: rho must be nonnegative");
    const Vec y = nash_direct(g).opinions;
    const InfluenceVector vi = influence_vector(g, i);
    const double phi =
        rho * (y[i] - y[j]) / (1.0 + rho * (vi.values[i] - vi.values[j]));
    Vec out = y;
    for (int k = 0; k < g.n; ++k) out[k] -= phi * vi.values[k];
    return out;
}

/// Outcome of optimizing the weight added to one directed edge. The cost
/// of the shifted equilibrium is the quadratic
///   c'(y') = alpha phi^2 - 2 beta phi + baseline_cost
/// in the path coordinate phi, which ranges from 0 (rho = 0) to phi_max
/// (rho -> infinity, where i and j agree).
struct EdgePlan {
    int i = 0;
    int j = 0;
    double rho_star = 0.0;  // surrogate cap when saturated
    bool saturated = false;
    double phi_star = 0.0;
    double phi_max = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 0.0;
    double predicted_cost = 0.0;
    double baseline_cost = 0.0;
    // Filled by steepest_descent_design when the plan is enacted.
    double applied_rho = 0.0;
    double cost_after = std::numeric_limits<double>::quiet_NaN();
};

inline EdgePlan optimal_edge_weight(const Graph& g, int i, int j, double rho_cap = 1e6) {
    detail::require_plain(g, "optimal_edge_weight");
    detail::check_pair(g, i, j, "optimal_edge_weight");
    const Matrix a_plus_i = laplacians(g).a + Matrix::identity(g.n);
    const Vec y = nash_direct(g).opinions;
    const Vec v = influence_vector(g, i).values;

    EdgePlan plan;
    plan.i = i;
    plan.j = j;
    plan.baseline_cost = social_cost(g, y);
    const double dy = y[i] - y[j];
    const double dv = v[i] - v[j];
    plan.phi_max = dv > 0.0 ? dy / dv : 0.0;
    plan.alpha = quad_form(a_plus_i, v) - dv;
    plan.beta = dot(v, a_plus_i * y - g.opinions) - 0.5 * dy;
    plan.gamma = -2.0 * plan.beta * dy;

    const auto q = [&](double phi) {
        return plan.alpha * phi * phi - 2.0 * plan.beta * phi + plan.baseline_cost;
    };
    double best_phi = 0.0;
    double best_cost = plan.baseline_cost;
    if (plan.alpha > 0.0) {
        const double interior = plan.beta / plan.alpha;
        const bool inside = plan.phi_max > 0.0 ? (interior > 0.0 && interior < plan.phi_max)
                                               : (interior < 0.0 && interior > plan.phi_max);
        if (inside && q(interior) < best_cost) {
            best_phi = interior;
            best_cost = q(interior);
        }
    }
    if (plan.phi_max != 0.0 && q(plan.phi_max) < best_cost) {
        best_phi = plan.phi_max;
        best_cost = q(plan.phi_max);
    }
    plan.phi_star = best_phi;
    plan.predicted_cost = best_cost;
    if (best_phi != 0.0 && std::abs(best_phi - plan.phi_max) <= 1e-9 * std::abs(plan.phi_max)) {
        plan.saturated = true;
        plan.rho_star = rho_cap;
    } else {
        plan.saturated = false;
        plan.rho_star = best_phi == 0.0 ? 0.0 : best_phi / (dy - best_phi * dv);
    }
    return plan;
}

/// Derivative of the shifted Nash cost in rho at rho = 0:
///   gamma_ij = (y_i - y_j)^2 - 2 (y_i - y_j) v_i'((A+I)y - s).
inline double edge_gradient(const Graph& g, int i, int j) {
    detail::require_plain(g, "edge_gradient");
    detail::check_pair(g, i, j, "edge_gradient");
    const Matrix a_plus_i = laplacians(g).a + Matrix::identity(g.n);
    const Vec y = nash_direct(g).opinions;
    const Vec v = influence_vector(g, i).values;
    const double dy = y[i] - y[j];
    return dy * dy - 2.0 * dy * dot(v, a_plus_i * y - g.opinions);
}

struct DesignResult {
    Graph graph;
    std::vector<EdgePlan> steps;
};

/// Steepest descent on candidate edge additions: each round picks the
/// most negative gradient (lexicographic tie-break), applies its optimal
/// weight capped at step_weight, and stops early once no candidate
/// improves. Candidate set defaults to all ordered non-self pairs.
inline DesignResult steepest_descent_design(const Graph& g, int budget, double step_weight,
                                            std::vector<std::pair<int, int>> candidates = {}) {
    detail::require_plain(g, "steepest_descent_design");
    if (budget < 0) throw std::invalid_argument("steepest_descent_design: negative budget");
    if (!(step_weight > 0.0)) throw std::invalid_argument("steepest_descent_design: step cap must be positive");
    if (candidates.empty()) {
        for (int i = 0; i < g.n; ++i)
            for (int j = 0; j < g.n; ++j)
                if (i != j) candidates.push_back({i, j});
    } else {
        for (auto [i, j] : candidates) detail::check_pair(g, i, j, "steepest_descent_design");
        std::sort(candidates.begin(), candidates.end());
        candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    }

    DesignResult out{g, {}};
    for (int step = 0; step < budget; ++step) {
        const Matrix n_inv = inverse(laplacians(out.graph).l + Matrix::identity(out.graph.n));
        const Matrix a_plus_i = laplacians(out.graph).a + Matrix::identity(out.graph.n);
        const Vec y = nash_direct(out.graph).opinions;
        const Vec resid = a_plus_i * y - out.graph.opinions;
        const Vec w = transpose(n_inv) * resid;  // w[i] = v_i' resid

        double best_gamma = 0.0;
        std::pair<int, int> best_pair{-1, -1};
        for (const auto& [i, j] : candidates) {
            const double dy = y[i] - y[j];
            const double gamma = dy * dy - 2.0 * dy * w[i];
            if (gamma < best_gamma) {
                best_gamma = gamma;
                best_pair = {i, j};
            }
        }
        if (best_pair.first < 0 || best_gamma >= -1e-12) break;

        EdgePlan plan = optimal_edge_weight(out.graph, best_pair.first, best_pair.second);
        plan.applied_rho = plan.saturated ? step_weight : std::min(plan.rho_star, step_weight);
        if (!(plan.applied_rho > 0.0)) break;
        out.graph = add_edge_weight(out.graph, best_pair.first, best_pair.second, plan.applied_rho);
        plan.cost_after = nash_direct(out.graph).social_cost;
        out.steps.push_back(plan);
    }
    return out;
}

struct BidirectCertificate {
    double nash_after = 0.0;  // Nash cost on the bidirected graph
    double opt_before = 0.0;  // optimal cost on the input graph
    double ratio = 1.0;
    double bound = 9.0 / 4.0;
};

/// Approximation by bidirection: add the reverse copy of every edge.
/// With unweighted semantics only missing reverses are added (bound
/// 9/4); the weighted variant always adds an equal-weight reverse
/// (bound 2). Undirected input passes through with bound 9/8.
inline std::pair<Graph, BidirectCertificate> bidirect_approx(const Graph& g,
                                                             bool weighted_variant = false) {
    detail::require_no_fixed(g, "bidirect_approx");
    BidirectCertificate cert;
    Graph out = g;
    if (!g.directed) {
        cert.bound = 9.0 / 8.0;
    } else {
        std::vector<Edge> edges = g.edges;
        if (weighted_variant) {
            for (const Edge& e : g.edges) edges.push_back({e.dst, e.src, e.weight});
        } else {
            std::map<std::pair<int, int>, double> present;
            for (const Edge& e : g.edges) present[{e.src, e.dst}] = e.weight;
            for (const Edge& e : g.edges)
                if (!present.count({e.dst, e.src})) edges.push_back({e.dst, e.src, e.weight});
        }
        out = build_graph(true, g.n, std::move(edges), g.opinions, g.node_weights, {});
        cert.bound = weighted_variant ? 2.0 : 9.0 / 4.0;
    }
    cert.nash_after = nash_direct(out).social_cost;
    cert.opt_before = social_opt(g).social_cost;
    const double tiny = detail::zero_cost_threshold(g.opinions);
    cert.ratio = detail::safe_ratio(cert.nash_after, cert.opt_before, tiny);
    if (cert.ratio > cert.bound + 1e-9)
        throw numeric_error("bidirect_approx: certificate ratio exceeds its bound");
    return {std::move(out), cert};
}

struct BruteForceResult {
    std::vector<int> chosen;  // indices into the candidate list
    double cost = 0.0;
    Graph graph;
};

/// Exhaustive search over candidate-edge subsets of size at most k, each
/// added with `unit_weight`, minimizing the Nash social cost. When
/// exclude_node >= 0 that node's own cost is left out of the objective
/// (the media-source variant). Ties go to the lexicographically first
/// subset.
inline BruteForceResult brute_force_design(const Graph& g,
                                           const std::vector<std::pair<int, int>>& candidates,
                                           int k, double unit_weight, int exclude_node = -1) {
    detail::require_no_fixed(g, "brute_force_design");
    if (static_cast<int>(candidates.size()) > 20)
        throw unsupported_error("brute_force_design: candidate set too large for exhaustive search");
    for (auto [i, j] : candidates) detail::check_pair(g, i, j, "brute_force_design");
    if (!(unit_weight > 0.0)) throw std::invalid_argument("brute_force_design: unit weight must be positive");
    if (exclude_node >= g.n) throw std::invalid_argument("brute_force_design: exclude node out of range");
    const int m = static_cast<int>(candidates.size());
    k = std::min(k, m);

    const auto objective = [&](const Graph& h) {
        const EquilibriumResult nash = nash_direct(h);
        double cost = nash.social_cost;
        if (exclude_node >= 0) cost -= node_cost(h, nash.opinions, exclude_node);
        return cost;
    };

    BruteForceResult best;
    best.graph = g;
    best.cost = objective(g);

    // Depth-first enumeration visits subsets in lexicographic order.
    std::vector<int> chosen;
    auto visit = [&](auto&& self, const Graph& cur, int next) -> void {
        if (static_cast<int>(chosen.size()) >= k) return;
        for (int c = next; c < m; ++c) {
            Graph expanded = add_edge_weight(cur, candidates[c].first, candidates[c].second, unit_weight);
            chosen.push_back(c);
            const double cost = objective(expanded);
            if (cost < best.cost) {
                best.cost = cost;
                best.chosen = chosen;
                best.graph = expanded;
            }
            self(self, expanded, c + 1);
            chosen.pop_back();
        }
    };
    visit(visit, g, 0);
    return best;
}

/// Verifies the cap on what edge addition can buy: the Nash cost of g
/// over the Nash cost of the augmented g_prime never beats PoA(g).
/// Returns (ratio, bound).
inline std::pair<double, double> improvement_bound_check(const Graph& g, const Graph& g_prime) {
    if (g.n != g_prime.n || g.directed != g_prime.directed)
        throw std::invalid_argument("improvement_bound_check: incompatible graphs");
    if (g.opinions != g_prime.opinions)
        throw std::invalid_argument("improvement_bound_check: internal opinions differ");
    std::map<std::pair<int, int>, double> weights;
    for (const Edge& e : g_prime.edges) weights[{e.src, e.dst}] = e.weight;
    for (const Edge& e : g.edges) {
        auto it = weights.find({e.src, e.dst});
        if (it == weights.end() || e.weight > it->second + 1e-12 * std::max(1.0, e.weight))
            throw std::invalid_argument("improvement_bound_check: edge sets not nested");
    }

    const double before = nash_direct(g).social_cost;
    const double after = nash_direct(g_prime).social_cost;
    const double tiny = detail::zero_cost_threshold(g.opinions);
    const double ratio = detail::safe_ratio(before, after, tiny);
    const double bound = poa(g).poa;
    if (ratio > bound + 1e-9)
        throw numeric_error("improvement_bound_check: improvement exceeded the PoA bound");
    return {ratio, bound};
}

}  // namespace og
