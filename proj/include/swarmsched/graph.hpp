#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "swarmsched/errors.hpp"
#include "swarmsched/matrix.hpp"

namespace swarmsched {

// Vertex compute class. MacIntensive and CompareIntensive vertices only
// match their own class; Generic matches anything (in both directions).
enum class ComputeKind : uint8_t {
    MacIntensive,
    CompareIntensive,
    Generic,
};

inline bool kinds_compatible(ComputeKind query, ComputeKind target) {
    return query == target || query == ComputeKind::Generic || target == ComputeKind::Generic;
}

inline const char* kind_name(ComputeKind k) {
    switch (k) {
        case ComputeKind::MacIntensive: return "mac";
        case ComputeKind::CompareIntensive: return "cmp";
        case ComputeKind::Generic: return "any";
    }
    return "any";
}

inline ComputeKind kind_from_name(const std::string& name) {
    if (name == "mac") return ComputeKind::MacIntensive;
    if (name == "cmp") return ComputeKind::CompareIntensive;
    if (name == "any") return ComputeKind::Generic;
    throw ParseError("unknown compute kind: '" + name + "'");
}

// Directed graph with one compute kind per vertex. Adjacency is a dense
// 0/1 matrix (adj(u, v) == 1 means edge u -> v); vertices are 0-based.
// Self-loops are rejected. Workload graphs must additionally be acyclic,
// which is enforced where workloads are ingested, not here: target graphs
// legitimately contain bidirectional link pairs.
struct LabeledDigraph {
    BitMatrix adj;
    std::vector<ComputeKind> kinds;

    LabeledDigraph() = default;

    LabeledDigraph(int n, std::vector<std::pair<int, int>> edges, std::vector<ComputeKind> vertex_kinds)
        : adj(n, n), kinds(std::move(vertex_kinds)) {
        // negative n is rejected by the adjacency matrix constructor above
        if (static_cast<int>(kinds.size()) != n) throw InvariantError("kind list length must equal vertex count");
        for (const auto& [u, v] : edges) {
            if (u < 0 || u >= n || v < 0 || v >= n)
                throw InvariantError("edge endpoint out of range");
            if (u == v) throw InvariantError("self-loops are not allowed");
            adj(u, v) = 1;  // duplicate edges collapse; adjacency is a set
        }
    }

    int size() const { return adj.rows(); }

    bool has_edge(int u, int v) const { return adj(u, v) != 0; }

    std::vector<std::pair<int, int>> edge_list() const {
        std::vector<std::pair<int, int>> out;
        for (int u = 0; u < size(); ++u)
            for (int v = 0; v < size(); ++v)
                if (adj(u, v)) out.emplace_back(u, v);
        return out;
    }

    friend bool operator==(const LabeledDigraph&, const LabeledDigraph&) = default;
};

// (in-degree, out-degree) per vertex.
inline std::vector<std::pair<int, int>> degree_profile(const LabeledDigraph& g) {
    const int n = g.size();
    std::vector<std::pair<int, int>> deg(n, {0, 0});
    for (int u = 0; u < n; ++u) {
        for (int v = 0; v < n; ++v) {
            if (g.adj(u, v)) {
                ++deg[u].second;
                ++deg[v].first;
            }
        }
    }
    return deg;
}

inline bool is_acyclic(const LabeledDigraph& g) {
    const int n = g.size();
    std::vector<int> indeg(n, 0);
    for (int u = 0; u < n; ++u)
        for (int v = 0; v < n; ++v)
            if (g.adj(u, v)) ++indeg[v];
    std::vector<int> queue;
    queue.reserve(n);
    for (int v = 0; v < n; ++v)
        if (indeg[v] == 0) queue.push_back(v);
    int seen = 0;
    for (size_t head = 0; head < queue.size(); ++head) {
        const int u = queue[head];
        ++seen;
        for (int v = 0; v < n; ++v)
            if (g.adj(u, v) && --indeg[v] == 0) queue.push_back(v);
    }
    return seen == n;
}

// Injective assignment of query vertices to target vertices. to[i] is the
// target vertex hosting query vertex i; entries are pairwise distinct.
struct DiscreteMapping {
    std::vector<int> to;

    DiscreteMapping() = default;
    explicit DiscreteMapping(std::vector<int> assignment) : to(std::move(assignment)) {}

    int size() const { return static_cast<int>(to.size()); }
    int operator[](int i) const { return to[i]; }

    friend bool operator==(const DiscreteMapping&, const DiscreteMapping&) = default;
    friend auto operator<=>(const DiscreteMapping&, const DiscreteMapping&) = default;
};

// True iff `map` embeds q into g: every query edge (i, j) lands on a target
// edge (map[i], map[j]). Kind compatibility and injectivity are properties
// of how mappings are produced (mask construction, assignment search); this
// checks the edge-preservation condition, the part that varies per mapping.
inline bool is_embedding(const DiscreteMapping& map, const LabeledDigraph& q, const LabeledDigraph& g) {
    const int n = q.size();
    const int m = g.size();
    if (map.size() != n) throw DimensionError("mapping length does not match query size");
    for (int i = 0; i < n; ++i)
        if (map[i] < 0 || map[i] >= m) throw DimensionError("mapping target out of range");
    std::vector<uint8_t> taken(m, 0);  // mappings are injective by invariant; reject violations
    for (int i = 0; i < n; ++i) {
        if (taken[map[i]]) return false;
        taken[map[i]] = 1;
    }
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (q.adj(i, j) && !g.adj(map[i], map[j])) return false;
        }
    }
    return true;
}

// Per-pair admissibility of query vertex -> target vertex. bits(i, j) == 1
// iff kinds are compatible and the target vertex has at least the query
// vertex's in- and out-degree. A query row with no admissible target makes
// the instance infeasible; that is reported by the flag, not by throwing,
// so callers can decide how to surface it.
struct CompatibilityMask {
    BitMatrix bits;

    int query_size() const { return bits.rows(); }
    int target_size() const { return bits.cols(); }

    bool has_empty_row() const {
        for (int i = 0; i < bits.rows(); ++i) {
            bool any = false;
            for (int j = 0; j < bits.cols(); ++j) any = any || bits(i, j);
            if (!any) return true;
        }
        return false;
    }

    int support(int row) const {
        int count = 0;
        for (int j = 0; j < bits.cols(); ++j) count += bits(row, j);
        return count;
    }

    friend bool operator==(const CompatibilityMask&, const CompatibilityMask&) = default;
};

inline CompatibilityMask build_mask(const LabeledDigraph& q, const LabeledDigraph& g) {
    const int n = q.size();
    const int m = g.size();
    const auto qdeg = degree_profile(q);
    const auto gdeg = degree_profile(g);
    CompatibilityMask mask;
    mask.bits = BitMatrix(n, m);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < m; ++j) {
            const bool ok = kinds_compatible(q.kinds[i], g.kinds[j]) &&
                            qdeg[i].first <= gdeg[j].first &&
                            qdeg[i].second <= gdeg[j].second;
            mask.bits(i, j) = ok ? 1 : 0;
        }
    }
    return mask;
}

}  // namespace swarmsched
