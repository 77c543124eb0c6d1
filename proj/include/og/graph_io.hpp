#pragma once

#include <string>

#include <json.hpp>

#include "og/graph.hpp"

namespace og {

/// Graph document format (JSON):
/// {
///   "directed": bool,
///   "n": int,
///   "edges": [{"src": int, "dst": int, "weight": real}, ...],
///   "opinions": [real, ...],                 // length n
///   "node_weights": [real, ...],             // optional, length n
///   "fixed": [int, ...]                      // optional
/// }
/// Indices are 0-based. Values are read as 64-bit floats.

inline Graph graph_from_json(const nlohmann::json& doc) {
    using nlohmann::json;
    if (!doc.is_object()) throw std::invalid_argument("graph document: not an object");
    auto require = [&](const char* key) -> const json& {
        auto it = doc.find(key);
        if (it == doc.end())
            throw std::invalid_argument(std::string("graph document: missing field '") + key + "'");
        return *it;
    };

    const json& jdir = require("directed");
    if (!jdir.is_boolean()) throw std::invalid_argument("graph document: 'directed' must be boolean");
    const json& jn = require("n");
    if (!jn.is_number_integer()) throw std::invalid_argument("graph document: 'n' must be an integer");
    const json& jedges = require("edges");
    if (!jedges.is_array()) throw std::invalid_argument("graph document: 'edges' must be an array");
    const json& jop = require("opinions");
    if (!jop.is_array()) throw std::invalid_argument("graph document: 'opinions' must be an array");

    std::vector<Edge> edges;
    edges.reserve(jedges.size());
    for (const json& je : jedges) {
        if (!je.is_object() || !je.contains("src") || !je.contains("dst") || !je.contains("weight"))
            throw std::invalid_argument("graph document: edge needs src, dst, weight");
        if (!je["src"].is_number_integer() || !je["dst"].is_number_integer() ||
            !je["weight"].is_number())
            throw std::invalid_argument("graph document: edge field of wrong type");
        edges.push_back({je["src"].get<int>(), je["dst"].get<int>(), je["weight"].get<double>()});
    }

    auto read_reals = [](const json& arr, const char* what) {
        Vec v;
        v.reserve(arr.size());
        for (const json& x : arr) {
            if (!x.is_number())
                throw std::invalid_argument(std::string("graph document: ") + what + " entry not a number");
            v.push_back(x.get<double>());
        }
        return v;
    };

    Vec opinions = read_reals(jop, "opinions");

    std::optional<Vec> node_weights;
    if (doc.contains("node_weights")) {
        if (!doc["node_weights"].is_array())
            throw std::invalid_argument("graph document: 'node_weights' must be an array");
        node_weights = read_reals(doc["node_weights"], "node_weights");
    }

    std::vector<int> fixed;
    if (doc.contains("fixed")) {
        if (!doc["fixed"].is_array())
            throw std::invalid_argument("graph document: 'fixed' must be an array");
        for (const json& x : doc["fixed"]) {
            if (!x.is_number_integer())
                throw std::invalid_argument("graph document: fixed entry not an integer");
            fixed.push_back(x.get<int>());
        }
    }

    return build_graph(jdir.get<bool>(), jn.get<int>(), std::move(edges), std::move(opinions),
                       std::move(node_weights), std::move(fixed));
}

inline nlohmann::json graph_to_json(const Graph& g) {
    nlohmann::json doc;
    doc["directed"] = g.directed;
    doc["n"] = g.n;
    nlohmann::json edges = nlohmann::json::array();
    for (const Edge& e : g.edges)
        edges.push_back({{"src", e.src}, {"dst", e.dst}, {"weight", e.weight}});
    doc["edges"] = std::move(edges);
    doc["opinions"] = g.opinions;
    if (g.node_weights) doc["node_weights"] = *g.node_weights;
    if (!g.fixed.empty()) doc["fixed"] = g.fixed;
    return doc;
}

inline Graph read_graph(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(std::string("graph document: parse error: ") + e.what());
    }
    return graph_from_json(doc);
}

inline std::string write_graph(const Graph& g) { return graph_to_json(g).dump(2) + "\n"; }

}  // namespace og
