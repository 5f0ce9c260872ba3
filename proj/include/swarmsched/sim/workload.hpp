#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "swarmsched/errors.hpp"
#include "swarmsched/graph.hpp"
#include "swarmsched/graph_io.hpp"
#include "swarmsched/rng.hpp"
#include "swarmsched/sim/platform.hpp"
#include "swarmsched/textio.hpp"

namespace swarmsched::sim {

// A schedulable model: a layer DAG plus per-layer work in MAC-ops.
struct WorkloadModel {
    LabeledDigraph graph;
    std::vector<int64_t> work;

    void validate() const {
        if (static_cast<int>(work.size()) != graph.size())
            throw InvariantError("work list length must equal layer count");
        for (int64_t w : work)
            if (w <= 0) throw InvariantError("per-layer work must be positive");
        if (!is_acyclic(graph)) throw InvariantError("workload graph must be acyclic");
    }

    int64_t total_work() const {
        int64_t t = 0;
        for (int64_t w : work) t += w;
        return t;
    }

    friend bool operator==(const WorkloadModel&, const WorkloadModel&) = default;
};

// Workload files are graph files extended with a "work" array (MAC-ops per
// layer). Plain graph files without it are not schedulable, so loading
// rejects them rather than inventing numbers.
inline WorkloadModel workload_from_json(const nlohmann::json& doc, const std::string& origin) {
    WorkloadModel model;
    model.graph = graph_from_json(doc, origin);
    if (!doc.contains("work")) throw ParseError(origin + ": workload needs a \"work\" array");
    if (!doc["work"].is_array()) throw ParseError(origin + ": \"work\" must be an array");
    for (const auto& w : doc["work"]) {
        if (!w.is_number_integer()) throw ParseError(origin + ": \"work\" entries must be integers");
        model.work.push_back(w.get<int64_t>());
    }
    model.validate();
    return model;
}

inline WorkloadModel parse_workload(const std::string& text, const std::string& origin) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(origin + ": " + e.what());
    }
    return workload_from_json(doc, origin);
}

inline WorkloadModel load_workload(const std::string& path) { return parse_workload(read_text_file(path), path); }

inline std::string serialize_workload(const WorkloadModel& model) {
    nlohmann::ordered_json doc = graph_to_json(model.graph);
    doc["work"] = model.work;
    return doc.dump(2) + "\n";
}

inline void save_workload(const WorkloadModel& model, const std::string& path) {
    write_text_file(path, serialize_workload(model));
}

// Synthetic workload families, shaped like the usual suspects:
//   simple  — short MAC chain (small CNN-ish)
//   middle  — medium chain with skip links and some compare layers (NAS-ish)
//   complex — deep chain with two skip distances and a heavier compare mix
// All draws come from one stream in a fixed order (layer count, then work
// per layer, then kinds, then skip links), so a (class, seed) pair always
// produces the same file. Work is a multiple of 16; fan-in/out stays <= 3
// so tile graphs remain mesh-placeable.
enum class WorkloadClass : uint8_t { Simple, Middle, Complex };

inline const char* workload_class_name(WorkloadClass c) {
    switch (c) {
        case WorkloadClass::Simple:
            return "simple";
        case WorkloadClass::Middle:
            return "middle";
        default:
            return "complex";
    }
}

inline WorkloadClass workload_class_from_name(const std::string& name) {
    if (name == "simple") return WorkloadClass::Simple;
    if (name == "middle") return WorkloadClass::Middle;
    if (name == "complex") return WorkloadClass::Complex;
    throw ParseError("unknown workload class: " + name);
}

inline WorkloadModel generate_workload(WorkloadClass cls, uint64_t seed) {
    SplitMix64 rng(derive_stream(seed, static_cast<uint64_t>(cls) + 1, 0));
    int layers = 0;
    int64_t work_scale = 0;
    int cmp_percent = 0, skip2_percent = 0, skip3_percent = 0;
    switch (cls) {
        case WorkloadClass::Simple:
            layers = 4 + static_cast<int>(rng.next_below(3));
            work_scale = 8;
            break;
        case WorkloadClass::Middle:
            layers = 8 + static_cast<int>(rng.next_below(3));
            work_scale = 16;
            cmp_percent = 20;
            skip2_percent = 30;
            break;
        case WorkloadClass::Complex:
            layers = 12 + static_cast<int>(rng.next_below(5));
            work_scale = 32;
            cmp_percent = 25;
            skip2_percent = 35;
            skip3_percent = 20;
            break;
    }
    WorkloadModel model;
    model.work.reserve(layers);
    for (int i = 0; i < layers; ++i)
        model.work.push_back(16 * (1 + static_cast<int64_t>(rng.next_below(static_cast<uint64_t>(work_scale)))));
    std::vector<ComputeKind> kinds(layers, ComputeKind::MacIntensive);
    for (int i = 0; i < layers; ++i)
        if (cmp_percent > 0 && rng.next_below(100) < static_cast<uint64_t>(cmp_percent))
            kinds[i] = ComputeKind::CompareIntensive;
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i + 1 < layers; ++i) edges.emplace_back(i, i + 1);
    for (int i = 0; i + 2 < layers; ++i)
        if (skip2_percent > 0 && rng.next_below(100) < static_cast<uint64_t>(skip2_percent)) edges.emplace_back(i, i + 2);
    for (int i = 0; i + 3 < layers; ++i)
        if (skip3_percent > 0 && rng.next_below(100) < static_cast<uint64_t>(skip3_percent)) edges.emplace_back(i, i + 3);
    model.graph = LabeledDigraph(layers, std::move(edges), std::move(kinds));
    model.validate();
    return model;
}

// A workload split into PE-sized tiles: the query graph handed to the
// matcher, plus per-tile bookkeeping the simulator needs.
struct TiledWorkload {
    LabeledDigraph graph;          // tile DAG (query graph)
    std::vector<int64_t> tile_work;  // MAC-ops (= cycles on one PE) per tile
    std::vector<int> layer_of_tile;

    int size() const { return graph.size(); }
};

// Layer l splits into t_l = ceil(work_l / capacity) tiles, capacity being
// one engine array's MACs per cycle (pe_rows * pe_cols). Each tile inherits
// its layer's kind and carries an equal share of the layer's work except
// the last, which takes the remainder. Dependencies cascade in a pipeline
// pattern: tile i of layer l feeds tile (i mod t_l') of each successor l'.
inline TiledWorkload tile_workload(const WorkloadModel& model, const Platform& platform) {
    model.validate();
    const int64_t capacity = platform.pes_per_engine();
    const int layers = model.graph.size();
    std::vector<int> first_tile(layers + 1, 0);
    TiledWorkload tiled;
    for (int l = 0; l < layers; ++l) {
        const int64_t t = (model.work[l] + capacity - 1) / capacity;
        first_tile[l + 1] = first_tile[l] + static_cast<int>(t);
        for (int64_t i = 0; i < t; ++i) {
            const int64_t begin = i * capacity;
            tiled.tile_work.push_back(std::min(capacity, model.work[l] - begin));
            tiled.layer_of_tile.push_back(l);
        }
    }
    const int n = first_tile[layers];
    std::vector<ComputeKind> kinds(n);
    for (int v = 0; v < n; ++v) kinds[v] = model.graph.kinds[tiled.layer_of_tile[v]];
    std::vector<std::pair<int, int>> edges;
    for (const auto& [l, l2] : model.graph.edge_list()) {
        const int t_dst = first_tile[l2 + 1] - first_tile[l2];
        for (int i = 0; i < first_tile[l + 1] - first_tile[l]; ++i)
            edges.emplace_back(first_tile[l] + i, first_tile[l2] + (i % t_dst));
    }
    tiled.graph = LabeledDigraph(n, std::move(edges), std::move(kinds));
    if (!is_acyclic(tiled.graph)) throw InvariantError("tile graph must be acyclic");
    return tiled;
}

// Makespan with unlimited PEs and free communication: the longest
// work-weighted path through the tile DAG, in cycles. Deadlines for
// generated tasks are arrival + slack_factor * ideal_makespan / clock.
inline int64_t ideal_makespan_cycles(const TiledWorkload& tiled) {
    const int n = tiled.size();
    std::vector<int64_t> finish(n, 0);
    // vertices are emitted in topological order by construction (edges go
    // from lower to higher layer, and tiles are numbered layer-major)
    int64_t best = 0;
    for (int v = 0; v < n; ++v) {
        int64_t start = 0;
        for (int u = 0; u < n; ++u)
            if (tiled.graph.adj(u, v)) start = std::max(start, finish[u]);
        finish[v] = start + tiled.tile_work[v];
        best = std::max(best, finish[v]);
    }
    return best;
}

}  // namespace swarmsched::sim
