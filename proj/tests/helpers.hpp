#pragma once

// Shared fixtures and independent oracles for the test suites. Oracles
// here deliberately avoid the library's solution path where they can
// (hand-built systems, enumeration, finite differences).

#include <random>
#include <vector>

#include "og/equilibrium.hpp"
#include "og/graph.hpp"
#include "og/instances.hpp"
#include "og/linalg.hpp"

namespace test {

inline og::Vec random_vec(std::mt19937_64& rng, int n, double lo = -1.0, double hi = 1.0) {
    std::uniform_real_distribution<double> dist(lo, hi);
    og::Vec v(n);
    for (double& x : v) x = dist(rng);
    return v;
}

/// Random graph that is connected on its symmetrized support
/// (regenerated over seeds until it is).
inline og::Graph random_connected(int n, double density, double wmin, double wmax,
                                  std::uint64_t seed, bool directed) {
    for (std::uint64_t s = seed;; ++s) {
        og::Graph g = og::gen_random(n, density, wmin, wmax, s, directed);
        if (og::connected_components(g).size() == 1) return g;
    }
}

/// Nash equilibrium of a fixed-opinion instance computed directly from
/// the clamped best-response equations, without the reduction the
/// library uses: free node i solves
///   z_i * (sum_j w_ij) = sum_{j free} w_ij z_j + sum_{j fixed} w_ij s_j.
inline og::Vec clamped_nash_oracle(const og::Graph& g) {
    std::vector<int> free_nodes;
    std::vector<int> index(g.n, -1);
    for (int v = 0; v < g.n; ++v)
        if (!g.is_fixed(v)) {
            index[v] = static_cast<int>(free_nodes.size());
            free_nodes.push_back(v);
        }
    const int m = static_cast<int>(free_nodes.size());
    og::Matrix mat(m, m);
    og::Vec rhs(m, 0.0);
    for (const og::Edge& e : og::directed_edges(g)) {
        if (g.is_fixed(e.src)) continue;
        const int i = index[e.src];
        mat(i, i) += e.weight;
        if (g.is_fixed(e.dst))
            rhs[i] += e.weight * g.opinions[e.dst];
        else
            mat(i, index[e.dst]) -= e.weight;
    }
    const og::Vec zfree = og::solve_linear(mat, rhs);
    og::Vec z = g.opinions;
    for (int i = 0; i < m; ++i) z[free_nodes[i]] = zfree[i];
    return z;
}

/// True iff some subset of a sums to exactly t (direct enumeration).
inline bool subset_sum_exists(const std::vector<long long>& a, long long t) {
    const int n = static_cast<int>(a.size());
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        long long sum = 0;
        for (int i = 0; i < n; ++i)
            if (mask & (1u << i)) sum += a[i];
        if (sum == t) return true;
    }
    return false;
}

}  // namespace test
