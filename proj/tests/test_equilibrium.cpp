#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "helpers.hpp"
#include "og/equilibrium.hpp"
#include "og/instances.hpp"
#include "og/poa.hpp"

using Catch::Matchers::WithinAbs;
using namespace og;  // vector operators
using og::Graph;
using og::Vec;

TEST_CASE("node_cost on the path-3 Nash profile") {
    const Graph g = og::gen_path3();
    const Vec nash{0.25, 0.5, 0.75};
    REQUIRE_THAT(og::node_cost(g, nash, 0), WithinAbs(0.125, 1e-12));
    REQUIRE_THAT(og::node_cost(g, nash, 1), WithinAbs(0.125, 1e-12));
    REQUIRE_THAT(og::node_cost(g, nash, 2), WithinAbs(0.125, 1e-12));
}

TEST_CASE("node_cost vanishes at z = s on an edgeless graph") {
    const Graph g = og::build_graph(true, 3, {}, {0.3, -1.0, 2.0});
    for (int i = 0; i < 3; ++i) REQUIRE(og::node_cost(g, g.opinions, i) == 0.0);
}

TEST_CASE("node_cost of a star leaf at Nash is 1/2") {
    const Graph g = og::gen_star(9);
    const Vec nash = og::nash_direct(g).opinions;
    REQUIRE_THAT(og::node_cost(g, nash, 3), WithinAbs(0.5, 1e-12));
}

TEST_CASE("social_cost reproduces the figure-one values") {
    const Graph g = og::gen_path3();
    REQUIRE_THAT(og::social_cost(g, {0.25, 0.5, 0.75}), WithinAbs(3.0 / 8.0, 1e-12));
    REQUIRE_THAT(og::social_cost(g, {1.0 / 3.0, 0.5, 2.0 / 3.0}), WithinAbs(1.0 / 3.0, 1e-12));
    const Graph edgeless = og::build_graph(false, 2, {}, {1.0, -1.0});
    REQUIRE(og::social_cost(edgeless, edgeless.opinions) == 0.0);
}

TEST_CASE("social_cost equals the sum of node costs and the matrix form") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 10; ++trial) {
        const Graph g = og::gen_random(3 + trial, 0.5, 0.3, 2.0, 400 + trial, trial % 2 == 0);
        const Vec z = test::random_vec(rng, g.n);
        double total = 0.0;
        for (int i = 0; i < g.n; ++i) total += og::node_cost(g, z, i);
        const double direct = og::social_cost(g, z);
        REQUIRE_THAT(direct, WithinAbs(total, 1e-10 * std::max(1.0, total)));

        const Vec diff = z - g.opinions;
        const double matrix_form = og::dot(diff, diff) + og::quad_form(og::laplacians(g).a, z);
        REQUIRE_THAT(direct, WithinAbs(matrix_form, 1e-10 * std::max(1.0, matrix_form)));
    }
}

TEST_CASE("nash_direct solves the named instances") {
    const auto p3 = og::nash_direct(og::gen_path3());
    REQUIRE_THAT(p3.opinions[0], WithinAbs(0.25, 1e-9));
    REQUIRE_THAT(p3.opinions[1], WithinAbs(0.5, 1e-9));
    REQUIRE_THAT(p3.opinions[2], WithinAbs(0.75, 1e-9));
    REQUIRE_THAT(p3.social_cost, WithinAbs(0.375, 1e-9));
    REQUIRE(p3.iterations == 0);
    REQUIRE(p3.residual <= 1e-10);

    const auto star = og::nash_direct(og::gen_star(9));
    REQUIRE_THAT(star.opinions[0], WithinAbs(1.0, 1e-9));
    for (int leaf = 1; leaf < 9; ++leaf) REQUIRE_THAT(star.opinions[leaf], WithinAbs(0.5, 1e-9));
    REQUIRE_THAT(star.social_cost, WithinAbs(4.0, 1e-9));

    const Graph edgeless = og::build_graph(true, 3, {}, {0.1, 0.2, 0.3});
    const auto r = og::nash_direct(edgeless);
    REQUIRE(r.opinions == edgeless.opinions);
    REQUIRE(r.social_cost == 0.0);
}

TEST_CASE("nash_iterative converges to the direct solution") {
    const auto it = og::nash_iterative(og::gen_path3(), 1e-12);
    REQUIRE(it.converged);
    REQUIRE_THAT(it.opinions[0], WithinAbs(0.25, 1e-10));
    REQUIRE_THAT(it.opinions[1], WithinAbs(0.5, 1e-10));
    REQUIRE_THAT(it.opinions[2], WithinAbs(0.75, 1e-10));

    const Graph edgeless = og::build_graph(true, 2, {}, {0.4, 0.6});
    const auto one_step = og::nash_iterative(edgeless, 1e-12);
    REQUIRE(one_step.converged);
    REQUIRE(one_step.iterations == 1);
    REQUIRE(one_step.opinions == edgeless.opinions);

    for (int trial = 0; trial < 5; ++trial) {
        const Graph g = og::gen_random(8, 0.5, 0.2, 1.5, 600 + trial, true);
        const Vec direct = og::nash_direct(g).opinions;
        const Vec iter = og::nash_iterative(g, 1e-12).opinions;
        REQUIRE(og::inf_norm(direct - iter) <= 1e-8);
    }
}

TEST_CASE("nash_iterative reports when the iteration cap is hit") {
    const auto r = og::nash_iterative(og::gen_path3(), 1e-14, 1);
    REQUIRE_FALSE(r.converged);
    REQUIRE(r.iterations == 1);
    REQUIRE(r.opinions.size() == 3);  // best iterate still returned
    REQUIRE_THROWS_AS(og::nash_iterative(og::gen_path3(), 0.0), std::invalid_argument);
}

TEST_CASE("social_opt solves the named instances") {
    const auto p3 = og::social_opt(og::gen_path3());
    REQUIRE_THAT(p3.opinions[0], WithinAbs(1.0 / 3.0, 1e-9));
    REQUIRE_THAT(p3.opinions[1], WithinAbs(0.5, 1e-9));
    REQUIRE_THAT(p3.opinions[2], WithinAbs(2.0 / 3.0, 1e-9));
    REQUIRE_THAT(p3.social_cost, WithinAbs(1.0 / 3.0, 1e-9));

    const auto star = og::social_opt(og::gen_star(9));
    REQUIRE_THAT(star.opinions[0], WithinAbs(0.2, 1e-9));
    for (int leaf = 1; leaf < 9; ++leaf) REQUIRE_THAT(star.opinions[leaf], WithinAbs(0.1, 1e-9));
    REQUIRE_THAT(star.social_cost, WithinAbs(0.8, 1e-9));

    // Constant opinions: A annihilates them, so x = s at zero cost.
    const Graph g = og::build_graph(false, 4, {{0, 1, 1.0}, {1, 2, 1.0}, {2, 3, 1.0}},
                                    Vec(4, 0.7));
    const auto r = og::social_opt(g);
    REQUIRE(og::inf_norm(r.opinions - g.opinions) <= 1e-12);
    REQUIRE(r.social_cost <= 1e-12);
}

TEST_CASE("unit node weights reduce to the plain solvers") {
    const Graph plain = og::gen_path3();
    const Graph weighted = og::build_graph(false, 3, plain.edges, plain.opinions, Vec(3, 1.0));
    REQUIRE(og::inf_norm(og::nash_node_weighted(weighted).opinions -
                         og::nash_direct(plain).opinions) <= 1e-12);
    REQUIRE(og::inf_norm(og::opt_node_weighted(weighted).opinions -
                         og::social_opt(plain).opinions) <= 1e-12);
    REQUIRE_THROWS_AS(og::nash_node_weighted(plain), std::invalid_argument);
    REQUIRE_THROWS_AS(og::opt_node_weighted(plain), std::invalid_argument);
}

TEST_CASE("directed node weights can make the equilibrium arbitrarily bad") {
    // Two nodes, edge (0,1), opinions (0,1), weights (1, eps): the Nash
    // cost stays 1/2 while the optimum collapses to order eps.
    const double eps = 1e-6;
    const Graph g = og::build_graph(true, 2, {{0, 1, 1.0}}, {0.0, 1.0}, Vec{1.0, eps});
    REQUIRE_THAT(og::nash_node_weighted(g).social_cost, WithinAbs(0.5, 1e-9));
    REQUIRE(og::opt_node_weighted(g).social_cost <= eps);
}

TEST_CASE("zero-one node weights keep the undirected PoA under 9/8") {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 20; ++trial) {
        Graph g = test::random_connected(4 + trial % 5, 0.6, 0.3, 2.0, 800 + trial, false);
        Vec w(g.n);
        for (double& x : w) x = rng() % 2 ? 1.0 : 0.0;
        w[0] = 1.0;  // anchor
        g = og::build_graph(false, g.n, g.edges, test::random_vec(rng, g.n), w);
        const auto rep = og::poa(g);
        REQUIRE(rep.poa <= 9.0 / 8.0 + 1e-9);
    }
}

TEST_CASE("unanchored components are rejected") {
    // Isolated node with zero weight: no equation pins it.
    const Graph g = og::build_graph(true, 3, {{0, 1, 1.0}}, {0.0, 1.0, 0.5}, Vec{1.0, 1.0, 0.0});
    REQUIRE_THROWS_AS(og::social_opt(g), og::numeric_error);
    REQUIRE_THROWS_AS(og::nash_direct(g), og::numeric_error);

    // Zero-weight sink: Nash is underdetermined even though the
    // component has an anchor elsewhere.
    const Graph sink = og::build_graph(true, 2, {{0, 1, 1.0}}, {0.0, 1.0}, Vec{1.0, 0.0});
    REQUIRE_THROWS_AS(og::nash_direct(sink), og::numeric_error);
    REQUIRE_NOTHROW(og::social_opt(sink));
}

TEST_CASE("reduce_fixed_opinions averages fixed neighbors") {
    // One free node, one fixed neighbor with opinion 0.7.
    const Graph g1 = og::build_graph(false, 2, {{0, 1, 1.0}}, {0.0, 0.7}, std::nullopt, {1});
    const auto r1 = og::reduce_fixed_opinions(g1);
    REQUIRE(r1.reduced.n == 1);
    REQUIRE_THAT(r1.reduced.opinions[0], WithinAbs(0.7, 1e-12));
    REQUIRE_THAT((*r1.reduced.node_weights)[0], WithinAbs(1.0, 1e-12));

    // Two unit-weight fixed neighbors with opinions 0 and 1.
    const Graph g2 = og::build_graph(false, 3, {{0, 2, 1.0}, {1, 2, 1.0}}, {0.0, 1.0, 0.0},
                                     std::nullopt, {0, 1});
    const auto r2 = og::reduce_fixed_opinions(g2);
    REQUIRE(r2.reduced.n == 1);
    REQUIRE_THAT(r2.reduced.opinions[0], WithinAbs(0.5, 1e-12));
    REQUIRE_THAT((*r2.reduced.node_weights)[0], WithinAbs(2.0, 1e-12));

    REQUIRE_THROWS_AS(og::reduce_fixed_opinions(og::gen_path3()), std::invalid_argument);
}

TEST_CASE("fixed-opinion Nash matches the clamped oracle and offset claim") {
    std::mt19937_64 rng(55);
    for (int trial = 0; trial < 12; ++trial) {
        Graph g = test::random_connected(5 + trial % 4, 0.6, 0.3, 2.0, 300 + trial, trial % 2 == 0);
        std::vector<int> fixed;
        for (int v = 0; v < g.n; ++v)
            if (rng() % 3 == 0) fixed.push_back(v);
        if (fixed.empty()) fixed.push_back(0);
        if (static_cast<int>(fixed.size()) == g.n) fixed.pop_back();
        g = og::build_graph(g.directed, g.n, g.edges, test::random_vec(rng, g.n), std::nullopt,
                            fixed);

        const auto nash = og::nash_direct(g);
        const Vec oracle = test::clamped_nash_oracle(g);
        REQUIRE(og::inf_norm(nash.opinions - oracle) <= 1e-9);

        // Costs on the original and reduced instances differ by the offset.
        const auto red = og::reduce_fixed_opinions(g);
        REQUIRE(red.offset >= -1e-12);
        Vec reduced_z(red.reduced.n);
        for (size_t k = 0; k < red.free_nodes.size(); ++k)
            reduced_z[k] = nash.opinions[red.free_nodes[k]];
        const double lhs = og::social_cost(g, nash.opinions);
        const double rhs = og::social_cost(red.reduced, reduced_z) + red.offset;
        REQUIRE_THAT(lhs, WithinAbs(rhs, 1e-9 * std::max(1.0, rhs)));

        // And the reduced instance's own Nash agrees on the free nodes.
        const auto inner = og::nash_direct(red.reduced);
        for (size_t k = 0; k < red.free_nodes.size(); ++k)
            REQUIRE_THAT(inner.opinions[k], WithinAbs(nash.opinions[red.free_nodes[k]], 1e-9));
    }
}

TEST_CASE("optimum minimizes the social cost") {
    std::mt19937_64 rng(19);
    for (int trial = 0; trial < 5; ++trial) {
        const Graph g = og::gen_random(6, 0.5, 0.3, 2.0, 210 + trial, trial % 2 == 0);
        const auto opt = og::social_opt(g);
        const auto nash = og::nash_direct(g);
        REQUIRE(opt.social_cost <= nash.social_cost + 1e-12);
        for (int probe = 0; probe < 100; ++probe) {
            const Vec z = test::random_vec(rng, g.n);
            REQUIRE(opt.social_cost <= og::social_cost(g, z) + 1e-12);
        }
    }
}

TEST_CASE("Nash opinions are averaging fixed points") {
    for (int trial = 0; trial < 6; ++trial) {
        const Graph g = og::gen_random(7, 0.5, 0.2, 2.0, 20 + trial, true);
        const Vec y = og::nash_direct(g).opinions;
        for (int i = 0; i < g.n; ++i) {
            double num = g.opinions[i], den = 1.0;
            for (const og::Edge& e : og::directed_edges(g)) {
                if (e.src != i) continue;
                num += e.weight * y[e.dst];
                den += e.weight;
            }
            REQUIRE_THAT(y[i], WithinAbs(num / den, 1e-10));
        }
    }
}

TEST_CASE("equilibria are shift covariant and scale homogeneous") {
    const Graph g = og::gen_random(6, 0.6, 0.3, 1.5, 9, true);
    const auto base_nash = og::nash_direct(g);
    const auto base_opt = og::social_opt(g);

    const double c = 2.7;
    Vec shifted = g.opinions;
    for (double& x : shifted) x += c;
    const auto nash_shift = og::nash_direct(og::with_opinions(g, shifted));
    for (int i = 0; i < g.n; ++i)
        REQUIRE_THAT(nash_shift.opinions[i], WithinAbs(base_nash.opinions[i] + c, 1e-9));
    REQUIRE_THAT(nash_shift.social_cost, WithinAbs(base_nash.social_cost, 1e-9));
    const auto opt_shift = og::social_opt(og::with_opinions(g, shifted));
    REQUIRE_THAT(opt_shift.social_cost, WithinAbs(base_opt.social_cost, 1e-9));

    const auto nash_scaled = og::nash_direct(og::with_opinions(g, c * g.opinions));
    for (int i = 0; i < g.n; ++i)
        REQUIRE_THAT(nash_scaled.opinions[i], WithinAbs(c * base_nash.opinions[i], 1e-9));
    REQUIRE_THAT(nash_scaled.social_cost, WithinAbs(c * c * base_nash.social_cost, 1e-8));
}

TEST_CASE("iterative and direct solvers agree on larger graphs") {
    for (int trial = 0; trial < 4; ++trial) {
        const Graph g = og::gen_random(50, 0.15, 0.2, 1.2, 40 + trial, trial % 2 == 0);
        const Vec direct = og::nash_direct(g).opinions;
        const auto iter = og::nash_iterative(g, 1e-12);
        REQUIRE(iter.converged);
        REQUIRE(og::inf_norm(direct - iter.opinions) <= 1e-8);
    }
}

TEST_CASE("undirected Nash cost is within twice the optimum") {
    for (int trial = 0; trial < 10; ++trial) {
        const Graph g = og::gen_random(8, 0.5, 0.2, 2.5, 1200 + trial, false);
        REQUIRE(og::nash_direct(g).social_cost <=
                2.0 * og::social_opt(g).social_cost + 1e-9);
    }
}
