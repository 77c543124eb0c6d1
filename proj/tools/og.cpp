// og: command-line front end for the opinion-formation game toolkit.
//
// Subcommands: nash, opt, poa, worst, bounds, design edge|greedy|bidirect|brute,
// gen path3|star|tree|cycle|random|eulerian|gadget-subsetsum|gadget-vc|gadget-dks.
// Graph documents are JSON (see README). Reports go to standard output.
//
// Exit codes: 0 success, 2 input error, 3 numerical failure,
// 4 unsupported analysis for the instance class.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <functional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "og/design.hpp"
#include "og/equilibrium.hpp"
#include "og/graph_io.hpp"
#include "og/instances.hpp"
#include "og/poa.hpp"

namespace {

using nlohmann::json;

double round12(double x) {
    if (!std::isfinite(x)) return x;
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return std::strtod(buf, nullptr);
}

json jnum(double x) { return json(round12(x)); }

json jvec(const og::Vec& v) {
    json arr = json::array();
    for (double x : v) arr.push_back(jnum(x));
    return arr;
}

og::Graph load_graph(const std::string& path) {
    std::string text;
    if (path == "-") {
        std::ostringstream ss;
        ss << std::cin.rdbuf();
        text = ss.str();
    } else {
        std::ifstream in(path);
        if (!in) throw std::invalid_argument("cannot open graph file: " + path);
        std::ostringstream ss;
        ss << in.rdbuf();
        text = ss.str();
    }
    return og::read_graph(text);
}

void flatten_tsv(const json& node, const std::string& prefix, std::ostream& out) {
    if (node.is_object()) {
        for (auto it = node.begin(); it != node.end(); ++it)
            flatten_tsv(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
    } else if (node.is_array()) {
        int idx = 0;
        for (const json& x : node) flatten_tsv(x, prefix + "[" + std::to_string(idx++) + "]", out);
    } else {
        out << prefix << '\t' << node.dump() << '\n';
    }
}

void emit_report(const std::string& command, const og::Graph& g, json result,
                 const json& tolerances, double ms, const std::string& format) {
    json rep;
    rep["command"] = command;
    rep["input"] = {{"n", g.n}, {"edges", static_cast<int>(g.edges.size())}, {"directed", g.directed}};
    rep["tolerances"] = tolerances;
    rep["result"] = std::move(result);
    rep["timing_ms"] = round12(ms);
    if (format == "tsv")
        flatten_tsv(rep, "", std::cout);
    else
        std::cout << rep.dump(2) << '\n';
}

json equilibrium_json(const og::EquilibriumResult& r) {
    json out;
    out["opinions"] = jvec(r.opinions);
    out["social_cost"] = jnum(r.social_cost);
    out["residual"] = jnum(r.residual);
    out["iterations"] = r.iterations;
    out["converged"] = r.converged;
    return out;
}

json poa_json(const og::PoAReport& r) {
    json out;
    out["poa"] = jnum(r.poa);
    out["nash_cost"] = jnum(r.nash_cost);
    out["opt_cost"] = jnum(r.opt_cost);
    if (r.worst_s) out["worst_s"] = jvec(*r.worst_s);
    if (r.extremal_eigenvalue) out["extremal_eigenvalue"] = jnum(*r.extremal_eigenvalue);
    json comps = json::array();
    for (const auto& c : r.per_component)
        comps.push_back({{"nodes", c.nodes}, {"poa", jnum(c.poa)}});
    out["per_component"] = std::move(comps);
    return out;
}

json plan_json(const og::EdgePlan& p) {
    json out;
    out["i"] = p.i;
    out["j"] = p.j;
    out["saturated"] = p.saturated;
    out["rho_star"] = jnum(p.rho_star);
    out["phi_star"] = jnum(p.phi_star);
    out["phi_max"] = jnum(p.phi_max);
    out["alpha"] = jnum(p.alpha);
    out["beta"] = jnum(p.beta);
    out["gamma"] = jnum(p.gamma);
    out["predicted_cost"] = jnum(p.predicted_cost);
    out["baseline_cost"] = jnum(p.baseline_cost);
    if (p.applied_rho > 0.0) {
        out["applied_rho"] = jnum(p.applied_rho);
        out["cost_after"] = jnum(p.cost_after);
    }
    return out;
}

std::vector<std::pair<int, int>> parse_pairs(const std::string& text) {
    std::vector<std::pair<int, int>> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        const auto dash = item.find('-');
        if (dash == std::string::npos)
            throw std::invalid_argument("expected 'i-j' pair list, got '" + item + "'");
        out.push_back({std::stoi(item.substr(0, dash)), std::stoi(item.substr(dash + 1))});
    }
    return out;
}

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
            .count();
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"opinion-formation game toolkit"};
    app.require_subcommand(1);

    std::string format = "json";
    double tol = 1e-12;
    app.add_option("--format", format, "output format: json|tsv")->expected(1);
    app.add_option("--tol", tol, "convergence tolerance for iterative methods");

    std::string file = "-";
    std::string method = "direct";
    int max_iter = -1;
    auto* cmd_nash = app.add_subcommand("nash", "Nash equilibrium of a graph document");
    cmd_nash->add_option("file", file, "graph document ('-' for stdin)");
    cmd_nash->add_option("--method", method, "direct|iterative");
    cmd_nash->add_option("--max-iter", max_iter, "iteration cap for --method iterative");

    auto* cmd_opt = app.add_subcommand("opt", "social optimum");
    cmd_opt->add_option("file", file, "graph document");

    auto* cmd_poa = app.add_subcommand("poa", "price of anarchy at the given opinions");
    cmd_poa->add_option("file", file, "graph document");

    std::string worst_method = "general";
    auto* cmd_worst = app.add_subcommand("worst", "worst-case PoA over internal opinions");
    cmd_worst->add_option("file", file, "graph document");
    cmd_worst->add_option("--method", worst_method,
                          "general (eigenproblem) | undirected (phi curve)");

    auto* cmd_bounds = app.add_subcommand("bounds", "Eulerian beta and PoA bounds");
    cmd_bounds->add_option("file", file, "graph document");

    auto* cmd_design = app.add_subcommand("design", "edge-addition design");
    cmd_design->require_subcommand(1);
    int from = 0, to = 0, budget = 1, brute_k = 1, exclude = -1;
    double cap = 1e6, step_cap = 1.0, unit = 1.0;
    bool weighted_variant = false;
    std::string cand_text;
    auto* d_edge = cmd_design->add_subcommand("edge", "optimal weight for one edge");
    d_edge->add_option("file", file, "graph document");
    d_edge->add_option("--from", from, "source node")->required();
    d_edge->add_option("--to", to, "target node")->required();
    d_edge->add_option("--cap", cap, "surrogate weight for saturated plans");
    auto* d_greedy = cmd_design->add_subcommand("greedy", "steepest-descent edge additions");
    d_greedy->add_option("file", file, "graph document");
    d_greedy->add_option("--budget", budget, "maximum number of additions");
    d_greedy->add_option("--cap", step_cap, "per-step weight cap");
    d_greedy->add_option("--candidates", cand_text, "candidate pairs 'i-j,i-j' (default: all)");
    auto* d_bidirect = cmd_design->add_subcommand("bidirect", "bidirection approximation");
    d_bidirect->add_option("file", file, "graph document");
    d_bidirect->add_flag("--weighted", weighted_variant, "always add an equal-weight reverse");
    auto* d_brute = cmd_design->add_subcommand("brute", "exhaustive subset search");
    d_brute->add_option("file", file, "graph document");
    d_brute->add_option("--candidates", cand_text, "candidate pairs 'i-j,i-j'")->required();
    d_brute->add_option("--k", brute_k, "maximum subset size")->required();
    d_brute->add_option("--unit", unit, "weight added per chosen edge");
    d_brute->add_option("--exclude", exclude, "node whose own cost is excluded");

    auto* cmd_gen = app.add_subcommand("gen", "emit a generated graph document");
    cmd_gen->require_subcommand(1);
    int gen_n = 9, gen_k = 3, gen_depth = 2, gen_cycles = 3, gen_nv = 2, gads_k = 1;
    double density = 0.3, wmin = 0.5, wmax = 1.5;
    std::uint64_t seed = 1;
    bool undirected = false;
    std::vector<long long> items;
    long long target = 1;
    std::string gedges = "0-1";
    cmd_gen->add_subcommand("path3", "three-node path, opinions (0, 1/2, 1)");
    auto* g_star = cmd_gen->add_subcommand("star", "in-directed star");
    g_star->add_option("--n", gen_n, "node count");
    auto* g_tree = cmd_gen->add_subcommand("tree", "in-directed 2^k-ary tree");
    g_tree->add_option("--k", gen_k, "log2 of the branching factor");
    g_tree->add_option("--depth", gen_depth, "tree depth");
    auto* g_cycle = cmd_gen->add_subcommand("cycle", "directed cycle with worst-case opinions");
    g_cycle->add_option("--n", gen_n, "node count");
    auto* g_random = cmd_gen->add_subcommand("random", "random graph");
    g_random->add_option("--n", gen_n, "node count");
    g_random->add_option("--density", density, "edge probability");
    g_random->add_option("--wmin", wmin, "minimum weight");
    g_random->add_option("--wmax", wmax, "maximum weight");
    g_random->add_option("--seed", seed, "RNG seed");
    g_random->add_flag("--undirected", undirected, "generate an undirected graph");
    auto* g_euler = cmd_gen->add_subcommand("eulerian", "random cycle-superposition Eulerian graph");
    g_euler->add_option("--n", gen_n, "node count");
    g_euler->add_option("--cycles", gen_cycles, "number of superposed cycles");
    g_euler->add_option("--seed", seed, "RNG seed");
    auto* g_ss = cmd_gen->add_subcommand("gadget-subsetsum", "subset-sum hardness gadget");
    g_ss->add_option("--items", items, "item values")->required();
    g_ss->add_option("--target", target, "target sum")->required();
    auto* g_vc = cmd_gen->add_subcommand("gadget-vc", "vertex-cover hardness gadget");
    g_vc->add_option("--nv", gen_nv, "source vertex count");
    g_vc->add_option("--edges", gedges, "source edges 'i-j,i-j'");
    auto* g_dks = cmd_gen->add_subcommand("gadget-dks", "dense-k-subgraph hardness gadget");
    g_dks->add_option("--nv", gen_nv, "source vertex count");
    g_dks->add_option("--edges", gedges, "source edges 'i-j,i-j'");
    g_dks->add_option("--k", gads_k, "subgraph size");

    const std::function<void(CLI::App*)> enable_fallthrough = [&](CLI::App* a) {
        a->fallthrough();
        for (CLI::App* sc : a->get_subcommands([](CLI::App*) { return true; }))
            enable_fallthrough(sc);
    };
    enable_fallthrough(&app);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        json tolerances = {{"tol", jnum(tol)}, {"solve_residual", 1e-10}};
        if (*cmd_gen) {
            og::Graph g;
            if (*cmd_gen->get_subcommand("path3")) g = og::gen_path3();
            else if (*g_star) g = og::gen_star(gen_n);
            else if (*g_tree) g = og::gen_kary_tree(gen_k, gen_depth);
            else if (*g_cycle) g = og::gen_cycle(gen_n);
            else if (*g_random) g = og::gen_random(gen_n, density, wmin, wmax, seed, !undirected);
            else if (*g_euler) g = og::gen_random_eulerian(gen_n, gen_cycles, seed);
            else if (*g_ss) g = og::gen_subset_sum_gadget(items, target).graph;
            else if (*g_vc) g = og::gen_vertex_cover_gadget(gen_nv, parse_pairs(gedges)).graph;
            else if (*g_dks) g = og::gen_dense_subgraph_gadget(gen_nv, parse_pairs(gedges), gads_k).graph;
            std::cout << og::write_graph(g);
            return 0;
        }

        const og::Graph g = load_graph(file);
        Timer timer;

        if (*cmd_nash) {
            og::EquilibriumResult r;
            if (method == "direct") r = og::nash_direct(g);
            else if (method == "iterative") r = og::nash_iterative(g, tol, max_iter);
            else throw std::invalid_argument("nash: unknown --method " + method);
            if (!r.converged) throw og::numeric_error("nash: iteration cap reached before convergence");
            emit_report("nash", g, equilibrium_json(r), tolerances, timer.ms(), format);
        } else if (*cmd_opt) {
            emit_report("opt", g, equilibrium_json(og::social_opt(g)), tolerances, timer.ms(), format);
        } else if (*cmd_poa) {
            emit_report("poa", g, poa_json(og::poa(g)), tolerances, timer.ms(), format);
        } else if (*cmd_worst) {
            og::PoAReport r;
            if (worst_method == "general") r = og::directed_worst(g);
            else if (worst_method == "undirected") r = og::undirected_worst(g);
            else throw std::invalid_argument("worst: unknown --method " + worst_method);
            emit_report("worst", g, poa_json(r), tolerances, timer.ms(), format);
        } else if (*cmd_bounds) {
            const double beta = og::eulerian_beta(g);  // exits 4 on non-Eulerian input
            const og::Matrix a = og::laplacians(g).a;
            const auto eig = og::sym_eigen(a);
            const double lambda2 = eig.eigenvalues.size() > 1 ? eig.eigenvalues[1] : 0.0;
            json result;
            result["eulerian"] = true;
            result["beta"] = jnum(beta);
            result["max_degree"] = jnum(og::max_degree(g));
            result["lambda2"] = jnum(lambda2);
            if (lambda2 > 0.0) result["poa_bound"] = jnum(og::poa_bound_from_beta(beta, lambda2));
            if (g.n <= 24 && og::connected_components(g).size() == 1) {
                const double alpha = og::edge_expansion(g);
                result["edge_expansion"] = jnum(alpha);
                result["asymmetric"] = og::is_asymmetric(g);
                if (alpha > 0.0 && og::max_degree(g) >= 1.0)
                    result["expander_bound"] = jnum(og::expander_bound(og::max_degree(g), alpha));
            }
            emit_report("bounds", g, std::move(result), tolerances, timer.ms(), format);
        } else if (*d_edge) {
            og::EdgePlan plan = og::optimal_edge_weight(g, from, to, cap);
            json result = plan_json(plan);
            const double rho = plan.saturated ? cap : plan.rho_star;
            result["graph"] = og::graph_to_json(rho > 0.0 ? og::add_edge_weight(g, from, to, rho) : g);
            emit_report("design edge", g, std::move(result), tolerances, timer.ms(), format);
        } else if (*d_greedy) {
            og::DesignResult r = og::steepest_descent_design(g, budget, step_cap,
                                                             parse_pairs(cand_text));
            json steps = json::array();
            for (const auto& p : r.steps) steps.push_back(plan_json(p));
            json result;
            result["steps"] = std::move(steps);
            result["initial_cost"] = jnum(og::nash_direct(g).social_cost);
            result["final_cost"] = jnum(og::nash_direct(r.graph).social_cost);
            result["graph"] = og::graph_to_json(r.graph);
            emit_report("design greedy", g, std::move(result), tolerances, timer.ms(), format);
        } else if (*d_bidirect) {
            auto [g2, cert] = og::bidirect_approx(g, weighted_variant);
            json result;
            result["nash_after"] = jnum(cert.nash_after);
            result["opt_before"] = jnum(cert.opt_before);
            result["ratio"] = jnum(cert.ratio);
            result["bound"] = jnum(cert.bound);
            result["graph"] = og::graph_to_json(g2);
            emit_report("design bidirect", g, std::move(result), tolerances, timer.ms(), format);
        } else if (*d_brute) {
            const auto candidates = parse_pairs(cand_text);
            og::BruteForceResult r = og::brute_force_design(g, candidates, brute_k, unit, exclude);
            json chosen_edges = json::array();
            for (int c : r.chosen)
                chosen_edges.push_back({{"src", candidates[c].first}, {"dst", candidates[c].second}});
            json result;
            result["chosen"] = r.chosen;
            result["chosen_edges"] = std::move(chosen_edges);
            result["cost"] = jnum(r.cost);
            result["graph"] = og::graph_to_json(r.graph);
            emit_report("design brute", g, std::move(result), tolerances, timer.ms(), format);
        }
        return 0;
    } catch (const og::unsupported_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const og::numeric_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
