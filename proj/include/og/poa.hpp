#pragma once

#include <optional>
#include <string>

#include "og/equilibrium.hpp"
#include "og/graph.hpp"
#include "og/linalg.hpp"

namespace og {

struct ComponentPoA {
    std::vector<int> nodes;
    double poa = 1.0;
};

struct PoAReport {
    double poa = 1.0;
    double nash_cost = 0.0;
    double opt_cost = 0.0;
    std::optional<Vec> worst_s;              // mean-zero, unit B-norm
    std::optional<double> extremal_eigenvalue;
    std::vector<ComponentPoA> per_component;
};

/// Ratio of the Nash-equilibrium eigenvalue form to the optimal one for
/// a symmetrized-Laplacian eigenvalue lambda:
///   phi(lambda) = (lambda+4)(lambda+1) / (lambda+2)^2,
/// maximized at lambda = 2 where phi = 9/8.
inline double phi_curve(double lambda) {
    const double d = lambda + 2.0;
    return (lambda + 4.0) * (lambda + 1.0) / (d * d);
}

namespace detail {

inline Matrix restrict_matrix(const Matrix& m, const std::vector<int>& nodes) {
    Matrix out(static_cast<int>(nodes.size()), static_cast<int>(nodes.size()));
    for (size_t i = 0; i < nodes.size(); ++i)
        for (size_t j = 0; j < nodes.size(); ++j) out(i, j) = m(nodes[i], nodes[j]);
    return out;
}

/// Basis of the mean-zero subspace: column j is e_j - e_{j+1}.
inline Matrix p_matrix(int n) {
    Matrix p(n, std::max(0, n - 1));
    for (int j = 0; j + 1 < n; ++j) {
        p(j, j) = 1.0;
        p(j + 1, j) = -1.0;
    }
    return p;
}

/// Costs this small relative to the opinion scale are treated as zero
/// when forming ratios (the constant-s convention: PoA = 1).
inline double zero_cost_threshold(const Vec& s) {
    const double m = inf_norm(s);
    return 1e-13 * (1.0 + m * m);
}

inline double safe_ratio(double nash, double opt, double tiny) {
    if (opt <= tiny && nash <= 16.0 * tiny) return 1.0;
    if (opt <= 0.0) return 1.0;
    return nash / opt;
}

inline void require_uniform(const Graph& g, const char* who) {
    if (g.has_node_weights() || g.has_fixed())
        throw unsupported_error(std::string(who) +
                                ": worst-case analysis requires uniform node weights");
}

}  // namespace detail

/// Price of anarchy for the given internal opinions: Nash cost over
/// optimal cost, with a per-component breakdown. Both solves honor node
/// weights and fixed-opinion extensions.
inline PoAReport poa(const Graph& g) {
    const EquilibriumResult nash = nash_direct(g);
    const EquilibriumResult opt = social_opt(g);
    const double tiny = detail::zero_cost_threshold(g.opinions);

    PoAReport rep;
    rep.nash_cost = nash.social_cost;
    rep.opt_cost = opt.social_cost;
    rep.poa = detail::safe_ratio(nash.social_cost, opt.social_cost, tiny);
    for (const auto& comp : connected_components(g)) {
        double cn = 0.0, co = 0.0;
        for (int v : comp) {
            cn += node_cost(g, nash.opinions, v);
            co += node_cost(g, opt.opinions, v);
        }
        rep.per_component.push_back({comp, detail::safe_ratio(cn, co, tiny)});
    }
    return rep;
}

/// Worst-case PoA over all internal-opinion vectors for an undirected
/// graph: per component the maximum of phi over the nonzero eigenvalues
/// of A, attained at the matching eigenvector.
inline PoAReport undirected_worst(const Graph& g) {
    if (g.directed) throw unsupported_error("undirected_worst: graph is directed");
    detail::require_uniform(g, "undirected_worst");

    const Matrix a = laplacians(g).a;
    PoAReport rep;
    rep.poa = 1.0;
    Vec best_vec;
    double best_lambda = 0.0;
    int best_comp = -1;

    const auto comps = connected_components(g);
    for (size_t ci = 0; ci < comps.size(); ++ci) {
        const auto& comp = comps[ci];
        double comp_poa = 1.0;
        if (comp.size() > 1) {
            const Matrix ac = detail::restrict_matrix(a, comp);
            const SymmetricEigenDecomposition eig = sym_eigen(ac);
            const double zero_tol = 1e-9 * std::max(1.0, inf_norm(ac));
            for (int k = 0; k < static_cast<int>(comp.size()); ++k) {
                const double lambda = eig.eigenvalues[k];
                if (lambda <= zero_tol) continue;
                const double value = phi_curve(lambda);
                if (value > comp_poa) {
                    comp_poa = value;
                    if (value > rep.poa) {
                        rep.poa = value;
                        best_lambda = lambda;
                        best_vec = eig.eigenvectors.col(k);
                        best_comp = static_cast<int>(ci);
                    }
                }
            }
        }
        rep.per_component.push_back({comp, comp_poa});
    }

    if (best_comp >= 0) {
        // Unit B-norm: for an A-eigenvector, s'Bs = lambda/(1+lambda) |s|^2.
        const double scale = std::sqrt((1.0 + best_lambda) / best_lambda);
        Vec s(g.n, 0.0);
        const auto& comp = comps[best_comp];
        for (size_t i = 0; i < comp.size(); ++i) s[comp[i]] = scale * best_vec[i];
        canonical_sign(s);
        rep.worst_s = s;
        rep.extremal_eigenvalue = best_lambda;
        const PoAReport at = poa(with_opinions(g, s));
        rep.nash_cost = at.nash_cost;
        rep.opt_cost = at.opt_cost;
    }
    return rep;
}

/// Weight factor alpha = 2 / lambda_i that rescales the graph so the
/// selected eigenvalue of A lands on 2, making the worst-case PoA
/// exactly 9/8. `which_eigenvalue` indexes sym_eigen(A) ascending.
inline double scale_to_tight(const Graph& g, int which_eigenvalue) {
    if (g.directed) throw unsupported_error("scale_to_tight: graph is directed");
    const Matrix a = laplacians(g).a;
    const SymmetricEigenDecomposition eig = sym_eigen(a);
    if (which_eigenvalue < 0 || which_eigenvalue >= g.n)
        throw std::invalid_argument("scale_to_tight: eigenvalue index out of range");
    const double lambda = eig.eigenvalues[which_eigenvalue];
    if (lambda <= 1e-9 * std::max(1.0, inf_norm(a)))
        throw std::invalid_argument("scale_to_tight: selected eigenvalue is zero");
    return 2.0 / lambda;
}

/// Quadratic forms of the two costs in the internal opinions:
/// s'Bs is the optimal cost and s'Cs the Nash cost.
struct CostMatrices {
    Matrix b;  // I - (A+I)^{-1}
    Matrix c;  // ((L+I)^{-1}-I)'((L+I)^{-1}-I) + (L+I)^{-T} A (L+I)^{-1}
    Matrix p;  // mean-zero basis, n x (n-1)
};

inline CostMatrices cost_matrices(const Graph& g) {
    const LaplacianPair lap = laplacians(g);
    const Matrix eye = Matrix::identity(g.n);
    const Matrix b = symmetrize(eye - inverse(lap.a + eye));
    const Matrix n = inverse(lap.l + eye);
    const Matrix nmi = n - eye;
    const Matrix c = symmetrize(transpose(nmi) * nmi + transpose(n) * (lap.a * n));
    return {b, c, detail::p_matrix(g.n)};
}

/// Worst-case PoA for a general (directed or undirected) graph via the
/// generalized eigenproblem on the mean-zero projections of C and B,
/// handled per connected component of the symmetrized graph.
inline PoAReport directed_worst(const Graph& g) {
    detail::require_uniform(g, "directed_worst");
    const LaplacianPair lap = laplacians(g);
    const Matrix eye = Matrix::identity(g.n);

    PoAReport rep;
    rep.poa = 1.0;
    Vec best_s;
    double best_lambda = 0.0;
    bool have_best = false;

    const auto comps = connected_components(g);
    for (const auto& comp : comps) {
        double comp_poa = 1.0;
        if (comp.size() > 1) {
            const int nc = static_cast<int>(comp.size());
            const Matrix ac = detail::restrict_matrix(lap.a, comp);
            const Matrix lc = detail::restrict_matrix(lap.l, comp);
            const Matrix ic = Matrix::identity(nc);
            const Matrix bc = symmetrize(ic - inverse(ac + ic));
            const Matrix nc_inv = inverse(lc + ic);
            const Matrix nmi = nc_inv - ic;
            const Matrix cc = symmetrize(transpose(nmi) * nmi + transpose(nc_inv) * (ac * nc_inv));
            const Matrix p = detail::p_matrix(nc);
            const Matrix bbar = symmetrize(transpose(p) * (bc * p));
            const Matrix cbar = symmetrize(transpose(p) * (cc * p));
            GenEigenMax top;
            try {
                top = gen_eigen_max(cbar, bbar);
            } catch (const numeric_error& e) {
                throw numeric_error("directed_worst: degenerate component containing node " +
                                    std::to_string(comp.front()) + ": " + e.what());
            }
            comp_poa = top.lambda;
            if (!have_best || comp_poa > best_lambda) {
                Vec sc = p * top.vector;  // mean-zero on the component
                Vec s(g.n, 0.0);
                for (size_t i = 0; i < comp.size(); ++i) s[comp[i]] = sc[i];
                best_s = std::move(s);
                best_lambda = comp_poa;
                have_best = true;
            }
        }
        rep.per_component.push_back({comp, comp_poa});
    }

    if (have_best) {
        rep.poa = best_lambda;
        canonical_sign(best_s);
        rep.worst_s = best_s;
        rep.extremal_eigenvalue = best_lambda;
        const PoAReport at = poa(with_opinions(g, best_s));
        rep.nash_cost = at.nash_cost;
        rep.opt_cost = at.opt_cost;
        if (std::abs(at.poa - rep.poa) > 1e-6 * rep.poa)
            throw numeric_error("directed_worst: extremal vector does not reproduce its eigenvalue");
    }
    return rep;
}

/// The Laplacian-like matrix M = (I-C)^{-1} - I, which for Eulerian
/// graphs equals A + LL'. Both routes are computed and compared; the
/// verified A + LL' form is returned.
inline Matrix eulerian_m(const Graph& g) {
    if (!is_eulerian(g)) throw unsupported_error("eulerian_m: graph is not Eulerian");
    const LaplacianPair lap = laplacians(g);
    const Matrix eye = Matrix::identity(g.n);
    const CostMatrices cm = cost_matrices(g);
    Matrix i_minus_c = eye - cm.c;
    Matrix m_schur;
    try {
        m_schur = inverse(i_minus_c) - eye;
    } catch (const numeric_error& e) {
        throw numeric_error(std::string("eulerian_m: I - C singular: ") + e.what());
    }
    const Matrix m_explicit = lap.a + lap.l * transpose(lap.l);
    if (max_abs(m_schur - m_explicit) > 1e-8)
        throw numeric_error("eulerian_m: Schur form disagrees with A + LL'");
    return m_explicit;
}

struct MinG {
    double value = 0.0;
    Vec minimizer;
};

/// Minimizes g(z) = z'Mz + |z-s|^2 with M = (I-C)^{-1} - I and checks
/// the minimum against the Nash cost, which it must equal.
inline MinG min_g(const Graph& g) {
    const Matrix eye = Matrix::identity(g.n);
    const CostMatrices cm = cost_matrices(g);
    const Matrix i_minus_c = eye - cm.c;
    try {
        cholesky(i_minus_c);
    } catch (const numeric_error& e) {
        throw numeric_error(std::string("min_g: I - C not positive definite: ") + e.what());
    }
    const Matrix m = inverse(i_minus_c) - eye;

    MinG out;
    out.minimizer = g.n > 0 ? solve_linear(m + eye, g.opinions) : Vec{};
    const Vec diff = out.minimizer - g.opinions;
    out.value = quad_form(m, out.minimizer) + dot(diff, diff);

    const double nash_cost = nash_direct(g).social_cost;
    if (std::abs(out.value - nash_cost) > 1e-9 * std::max(1.0, nash_cost))
        throw numeric_error("min_g: minimum does not match the Nash cost");
    return out;
}

/// beta = 1 + max over mean-zero z of z'LL'z / z'Az. For unit-weight
/// Eulerian graphs this is checked against the Delta + 1 bound.
inline double eulerian_beta(const Graph& g) {
    if (!is_eulerian(g)) throw unsupported_error("eulerian_beta: graph is not Eulerian");
    if (connected_components(g).size() != 1)
        throw unsupported_error("eulerian_beta: symmetrized graph is disconnected");
    const LaplacianPair lap = laplacians(g);
    const Matrix llt = lap.l * transpose(lap.l);
    const Matrix p = detail::p_matrix(g.n);
    const Matrix num = symmetrize(transpose(p) * (llt * p));
    const Matrix den = symmetrize(transpose(p) * (lap.a * p));
    const double beta = 1.0 + gen_eigen_max(num, den).lambda;

    bool unit_weights = true;
    for (const Edge& e : g.edges)
        if (e.weight != 1.0) unit_weights = false;
    if (unit_weights && beta > max_degree(g) + 1.0 + 1e-9)
        throw numeric_error("eulerian_beta: bound beta <= Delta + 1 violated on an unweighted graph");
    return beta;
}

/// PoA bound (beta + beta lambda2) / (1 + beta lambda2) where lambda2 is
/// the second-smallest eigenvalue of A.
inline double poa_bound_from_beta(double beta, double lambda2) {
    if (!(beta >= 1.0)) throw std::invalid_argument("poa_bound_from_beta: beta must be >= 1");
    if (!(lambda2 > 0.0)) throw std::invalid_argument("poa_bound_from_beta: lambda2 must be positive");
    return (beta + beta * lambda2) / (1.0 + beta * lambda2);
}

/// Expansion-based PoA bound 2 Delta (1 + Delta) / alpha^2 for
/// asymmetric Eulerian expanders.
inline double expander_bound(double delta, double alpha) {
    if (!(delta >= 1.0)) throw std::invalid_argument("expander_bound: delta must be >= 1");
    if (!(alpha > 0.0)) throw std::invalid_argument("expander_bound: alpha must be positive");
    return 2.0 * delta * (1.0 + delta) / (alpha * alpha);
}

struct TreeCost {
    double cost = 0.0;
    Vec layer_opinions;  // entry i is the common Nash opinion 2^{-i} at layer i
};

/// Nash social cost of the in-directed 2^k-ary tree with root opinion 1:
/// closed form 2^{k-1} (n^{(k-2)/k} - 1) / (2^{k-2} - 1) for k > 2 with
/// n = 2^{k depth}; smaller k fall back to direct summation.
inline TreeCost tree_nash_cost(int k, int depth) {
    if (k < 1) throw std::invalid_argument("tree_nash_cost: k must be >= 1");
    if (depth < 0) throw std::invalid_argument("tree_nash_cost: depth must be >= 0");
    TreeCost out;
    out.layer_opinions.resize(depth + 1);
    for (int i = 0; i <= depth; ++i) out.layer_opinions[i] = std::ldexp(1.0, -i);
    if (depth == 0) return out;
    if (k > 2) {
        const double q = std::ldexp(1.0, k - 2);  // 2^{k-2}
        const double qd = std::pow(q, depth);     // n^{(k-2)/k}
        out.cost = std::ldexp(1.0, k - 1) * (qd - 1.0) / (q - 1.0);
    } else {
        double sum = 0.0;
        for (int i = 1; i <= depth; ++i) sum += std::ldexp(1.0, i * k) * std::ldexp(1.0, 1 - 2 * i);
        out.cost = sum;
    }
    return out;
}

}  // namespace og
