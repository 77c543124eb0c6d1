#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <set>

#include "og/graph.hpp"
#include "og/poa.hpp"

namespace og {

/// Three-node path with unit weights and internal opinions (0, 1/2, 1):
/// the extremal undirected instance (Nash cost 3/8, optimal cost 1/3).
inline Graph gen_path3() {
    return build_graph(false, 3, {{0, 1, 1.0}, {1, 2, 1.0}}, {0.0, 0.5, 1.0});
}

/// In-directed star: n-1 leaves with opinion 0 all linking to a center
/// (node 0) with opinion 1 and no out-edges.
inline Graph gen_star(int n) {
    if (n < 2) throw std::invalid_argument("gen_star: need at least two nodes");
    std::vector<Edge> edges;
    Vec s(n, 0.0);
    s[0] = 1.0;
    for (int leaf = 1; leaf < n; ++leaf) edges.push_back({leaf, 0, 1.0});
    return build_graph(true, n, std::move(edges), std::move(s));
}

/// 2^k-ary tree with all edges directed toward the root (node 0), root
/// opinion 1, all others 0. Layer i occupies a contiguous index range;
/// its Nash opinion is 2^{-i}.
inline Graph gen_kary_tree(int k, int depth) {
    if (k < 1 || k > 16) throw std::invalid_argument("gen_kary_tree: k out of range");
    if (depth < 0) throw std::invalid_argument("gen_kary_tree: negative depth");
    const long long b = 1ll << k;
    long long total = 0, layer = 1;
    for (int i = 0; i <= depth; ++i) {
        total += layer;
        layer *= b;
        if (total > 200000) throw std::invalid_argument("gen_kary_tree: tree too large");
    }
    const int n = static_cast<int>(total);
    std::vector<Edge> edges;
    edges.reserve(n - 1);
    for (int child = 1; child < n; ++child) {
        const int parent = static_cast<int>((child - 1) / b);
        edges.push_back({child, parent, 1.0});
    }
    Vec s(n, 0.0);
    s[0] = 1.0;
    return build_graph(true, n, std::move(edges), std::move(s));
}

/// Directed n-cycle with unit weights. Opinions default to the
/// worst-case internal opinions from the generalized eigenproblem.
inline Graph gen_cycle(int n, std::optional<Vec> opinions = std::nullopt) {
    if (n < 3) throw std::invalid_argument("gen_cycle: need at least three nodes");
    std::vector<Edge> edges;
    edges.reserve(n);
    for (int i = 0; i < n; ++i) edges.push_back({i, (i + 1) % n, 1.0});
    Graph g = build_graph(true, n, std::move(edges), opinions ? *opinions : Vec(n, 0.0));
    if (!opinions) {
        const PoAReport worst = directed_worst(g);
        if (worst.worst_s) g = with_opinions(g, *worst.worst_s);
    }
    return g;
}

/// Seed-deterministic random graph: each ordered pair (unordered when
/// undirected) carries an edge with probability `density`, weight
/// uniform in [wmin, wmax]; opinions uniform in [0, 1].
inline Graph gen_random(int n, double density, double wmin, double wmax, std::uint64_t seed,
                        bool directed = true) {
    if (n < 0) throw std::invalid_argument("gen_random: negative n");
    if (!(density >= 0.0 && density <= 1.0)) throw std::invalid_argument("gen_random: density in [0,1]");
    if (!(wmin > 0.0 && wmin <= wmax)) throw std::invalid_argument("gen_random: bad weight range");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::uniform_real_distribution<double> weight(wmin, wmax);
    std::vector<Edge> edges;
    for (int i = 0; i < n; ++i)
        for (int j = directed ? 0 : i + 1; j < n; ++j) {
            if (i == j) continue;
            if (coin(rng) < density) edges.push_back({i, j, weight(rng)});
        }
    Vec s(n);
    for (double& x : s) x = coin(rng);
    return build_graph(directed, n, std::move(edges), std::move(s));
}

/// Unit-weight Eulerian graph built as a superposition of directed
/// cycles: the first cycle spans every node (so the result is
/// connected), later ones run over random subsets and are resampled
/// rather than allowed to duplicate an existing edge.
inline Graph gen_random_eulerian(int n, int cycles, std::uint64_t seed) {
    if (n < 2) throw std::invalid_argument("gen_random_eulerian: need at least two nodes");
    if (cycles < 1) throw std::invalid_argument("gen_random_eulerian: need at least one cycle");
    std::mt19937_64 rng(seed);
    std::set<std::pair<int, int>> present;
    std::vector<Edge> edges;

    auto try_add_cycle = [&](std::vector<int> nodes) {
        std::vector<std::pair<int, int>> cand;
        for (size_t t = 0; t < nodes.size(); ++t) {
            const int u = nodes[t];
            const int v = nodes[(t + 1) % nodes.size()];
            if (present.count({u, v})) return false;
            cand.push_back({u, v});
        }
        for (auto [u, v] : cand) {
            present.insert({u, v});
            edges.push_back({u, v, 1.0});
        }
        return true;
    };

    std::vector<int> all(n);
    std::iota(all.begin(), all.end(), 0);
    std::shuffle(all.begin(), all.end(), rng);
    try_add_cycle(all);

    std::uniform_int_distribution<int> size_dist(2, n);
    for (int c = 1; c < cycles; ++c) {
        for (int attempt = 0; attempt < 60; ++attempt) {
            std::vector<int> pool(n);
            std::iota(pool.begin(), pool.end(), 0);
            std::shuffle(pool.begin(), pool.end(), rng);
            pool.resize(size_dist(rng));
            if (try_add_cycle(std::move(pool))) break;
        }
    }

    std::uniform_real_distribution<double> uni(0.0, 1.0);
    Vec s(n);
    for (double& x : s) x = uni(rng);
    return build_graph(true, n, std::move(edges), std::move(s));
}

// ---------------------------------------------------------------------------
// Hardness gadgets (with their analytically known cost tables)
// ---------------------------------------------------------------------------

/// Subset-sum gadget: an in-directed star whose center w has opinion 1
/// and n peripheral followers with opinion 0, plus one isolated node per
/// item with opinion -a_i / t. Adding edges from w to an item set F
/// drives the star cost (excluding w itself) to
///   2 n ((1 + sum_{j in F} s_j) / (2 (1 + |F|)))^2,
/// which vanishes exactly when the chosen items sum to t.
struct SubsetSumGadget {
    Graph graph;
    int center = 0;
    std::vector<int> peripherals;
    std::vector<int> items;
    std::vector<long long> a;
    long long t = 1;

    double expected_tilde_cost(const std::vector<int>& chosen) const {
        double sum = 0.0;
        for (int idx : chosen) sum += graph.opinions[items.at(idx)];
        const double n_items = static_cast<double>(items.size());
        const double y_w = (1.0 + sum) / (2.0 * (1.0 + static_cast<double>(chosen.size())));
        return 2.0 * n_items * y_w * y_w;
    }
};

inline SubsetSumGadget gen_subset_sum_gadget(const std::vector<long long>& a, long long t) {
    if (a.empty()) throw std::invalid_argument("subset-sum gadget: no items");
    if (t <= 0) throw std::invalid_argument("subset-sum gadget: target must be positive");
    for (long long x : a)
        if (x <= 0) throw std::invalid_argument("subset-sum gadget: items must be positive");
    const int n_items = static_cast<int>(a.size());
    SubsetSumGadget gadget;
    gadget.a = a;
    gadget.t = t;
    gadget.center = 0;
    const int n = 1 + 2 * n_items;
    std::vector<Edge> edges;
    Vec s(n, 0.0);
    s[0] = 1.0;
    for (int p = 0; p < n_items; ++p) {
        gadget.peripherals.push_back(1 + p);
        edges.push_back({1 + p, 0, 1.0});
    }
    for (int j = 0; j < n_items; ++j) {
        const int node = 1 + n_items + j;
        gadget.items.push_back(node);
        s[node] = -static_cast<double>(a[j]) / static_cast<double>(t);
    }
    gadget.graph = build_graph(true, n, std::move(edges), std::move(s));
    return gadget;
}

/// Vertex-cover gadget: per source edge (i,j) a node v_ij with opinion 1
/// watching u_i and u_j, an in-directed star of 24 zero-opinion
/// peripherals on each v_ij, a node u_i with opinion 1 per source
/// vertex, and an isolated node w with opinion -3. The star cost (v plus
/// its peripherals) under each membership configuration of {v, u_i, u_j}
/// in the edge-to-w set follows the fixed six-row table.
struct VertexCoverGadget {
    struct Star {
        int v = 0;
        std::vector<int> peripherals;
        int ui = 0;
        int uj = 0;
    };
    Graph graph;
    std::vector<Star> stars;     // one per source edge
    std::vector<int> u_nodes;    // one per source vertex
    int w = 0;

    // Star costs for the configurations
    //   1: none of v,u_i,u_j linked to w     2: only v
    //   3: v and u_i                         4: v, u_i and u_j
    //   5: only u_i                          6: u_i and u_j
    static constexpr std::array<double, 6> kStarCost = {12.0, 12.0, 14.0, 20.0, 4.0, 4.0};
};

inline VertexCoverGadget gen_vertex_cover_gadget(int nv,
                                                 const std::vector<std::pair<int, int>>& eprime) {
    if (nv < 1) throw std::invalid_argument("vertex-cover gadget: empty vertex set");
    VertexCoverGadget gadget;
    std::vector<Edge> edges;
    Vec s;
    auto new_node = [&](double opinion) {
        s.push_back(opinion);
        return static_cast<int>(s.size()) - 1;
    };

    std::vector<int> u(nv);
    std::vector<std::pair<int, int>> pend;
    for (const auto& [i, j] : eprime) {
        if (i < 0 || i >= nv || j < 0 || j >= nv || i == j)
            throw std::invalid_argument("vertex-cover gadget: bad source edge");
        VertexCoverGadget::Star star;
        star.v = new_node(1.0);
        for (int p = 0; p < 24; ++p) {
            star.peripherals.push_back(new_node(0.0));
            edges.push_back({star.peripherals.back(), star.v, 1.0});
        }
        gadget.stars.push_back(star);
    }
    for (int i = 0; i < nv; ++i) u[i] = new_node(1.0);
    gadget.u_nodes = u;
    for (size_t t = 0; t < eprime.size(); ++t) {
        gadget.stars[t].ui = u[eprime[t].first];
        gadget.stars[t].uj = u[eprime[t].second];
        edges.push_back({gadget.stars[t].v, gadget.stars[t].ui, 1.0});
        edges.push_back({gadget.stars[t].v, gadget.stars[t].uj, 1.0});
    }
    gadget.w = new_node(-3.0);
    const int n = static_cast<int>(s.size());
    gadget.graph = build_graph(true, n, std::move(edges), std::move(s));
    return gadget;
}

/// Dense-k-subgraph gadget: a node v_ij with opinion 0 per source edge
/// watching u_i and u_j; a node u_i with opinion 1 per source vertex,
/// each with an in-directed star of 20 zero-opinion peripherals; and an
/// isolated w with opinion -1. Once u-to-w edges are added, v_ij costs 0
/// when both endpoints were linked and 2/3 otherwise.
struct DenseSubgraphGadget {
    struct VEdge {
        int v = 0;
        int ui = 0;
        int uj = 0;
    };
    Graph graph;
    std::vector<VEdge> v_nodes;                    // one per source edge
    std::vector<int> u_nodes;                      // one per source vertex
    std::vector<std::vector<int>> u_peripherals;   // 20 per u node
    int w = 0;
    int k = 0;

    static constexpr double kCostBothInT = 0.0;
    static constexpr double kCostOtherwise = 2.0 / 3.0;
};

inline DenseSubgraphGadget gen_dense_subgraph_gadget(int nv,
                                                     const std::vector<std::pair<int, int>>& eprime,
                                                     int k) {
    if (nv < 1) throw std::invalid_argument("dense-subgraph gadget: empty vertex set");
    if (k < 0 || k > nv) throw std::invalid_argument("dense-subgraph gadget: k out of range");
    DenseSubgraphGadget gadget;
    gadget.k = k;
    std::vector<Edge> edges;
    Vec s;
    auto new_node = [&](double opinion) {
        s.push_back(opinion);
        return static_cast<int>(s.size()) - 1;
    };

    for (const auto& [i, j] : eprime) {
        if (i < 0 || i >= nv || j < 0 || j >= nv || i == j)
            throw std::invalid_argument("dense-subgraph gadget: bad source edge");
        gadget.v_nodes.push_back({new_node(0.0), i, j});
    }
    for (int i = 0; i < nv; ++i) {
        const int ui = new_node(1.0);
        gadget.u_nodes.push_back(ui);
        std::vector<int> per;
        for (int p = 0; p < 20; ++p) {
            per.push_back(new_node(0.0));
            edges.push_back({per.back(), ui, 1.0});
        }
        gadget.u_peripherals.push_back(std::move(per));
    }
    for (auto& ve : gadget.v_nodes) {
        ve.ui = gadget.u_nodes[ve.ui];
        ve.uj = gadget.u_nodes[ve.uj];
        edges.push_back({ve.v, ve.ui, 1.0});
        edges.push_back({ve.v, ve.uj, 1.0});
    }
    gadget.w = new_node(-1.0);
    const int n = static_cast<int>(s.size());
    gadget.graph = build_graph(true, n, std::move(edges), std::move(s));
    return gadget;
}

}  // namespace og
