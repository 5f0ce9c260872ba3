#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "swarmsched/errors.hpp"
#include "swarmsched/graph.hpp"
#include "swarmsched/textio.hpp"

namespace swarmsched {

// Graph file format: a UTF-8 JSON object
//   { "n": <int>, "edges": [[u, v], ...], "kinds": ["mac"|"cmp"|"any", ...] }
// with 0-based vertex ids. Unknown extra fields are ignored on load so that
// files which extend the format (e.g. workload files carrying per-vertex
// work) still parse as plain graphs. Load/save round-trips losslessly.

inline LabeledDigraph graph_from_json(const nlohmann::json& j, const std::string& origin) {
    if (!j.is_object()) throw ParseError(origin + ": expected a JSON object");
    if (!j.contains("n") || !j.contains("edges") || !j.contains("kinds"))
        throw ParseError(origin + ": missing required field (n, edges, kinds)");
    if (!j["n"].is_number_integer()) throw ParseError(origin + ": field 'n' must be an integer");
    const int n = j["n"].get<int>();
    if (n <= 0) throw InvariantError(origin + ": vertex count must be positive");

    std::vector<std::pair<int, int>> edges;
    if (!j["edges"].is_array()) throw ParseError(origin + ": field 'edges' must be a list");
    for (const auto& e : j["edges"]) {
        if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer())
            throw ParseError(origin + ": each edge must be a [u, v] integer pair");
        edges.emplace_back(e[0].get<int>(), e[1].get<int>());
    }

    std::vector<ComputeKind> kinds;
    if (!j["kinds"].is_array()) throw ParseError(origin + ": field 'kinds' must be a list");
    for (const auto& k : j["kinds"]) {
        if (!k.is_string()) throw ParseError(origin + ": kinds must be strings");
        kinds.push_back(kind_from_name(k.get<std::string>()));
    }

    return LabeledDigraph(n, std::move(edges), std::move(kinds));
}

inline LabeledDigraph parse_graph(const std::string& text, const std::string& origin = "<string>") {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(origin + ": " + e.what());
    }
    return graph_from_json(j, origin);
}

inline LabeledDigraph load_graph(const std::string& path) {
    return parse_graph(read_text_file(path), path);
}

inline nlohmann::ordered_json graph_to_json(const LabeledDigraph& g) {
    nlohmann::ordered_json j;
    j["n"] = g.size();
    auto edges = nlohmann::ordered_json::array();
    for (const auto& [u, v] : g.edge_list()) edges.push_back({u, v});
    j["edges"] = std::move(edges);
    auto kinds = nlohmann::ordered_json::array();
    for (ComputeKind k : g.kinds) kinds.push_back(kind_name(k));
    j["kinds"] = std::move(kinds);
    return j;
}

inline std::string serialize_graph(const LabeledDigraph& g) {
    return graph_to_json(g).dump(2) + "\n";
}

inline void save_graph(const LabeledDigraph& g, const std::string& path) {
    write_text_file(path, serialize_graph(g));
}

}  // namespace swarmsched
