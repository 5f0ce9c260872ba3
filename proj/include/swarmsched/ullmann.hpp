#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <vector>

#include "swarmsched/graph.hpp"
#include "swarmsched/matrix.hpp"

namespace swarmsched {

// Neighbor-consistency refinement. A bit (i, j) survives only if every
// query successor i' of i can land on some target successor j' of j with
// bits(i', j') set, and symmetrically for predecessors. Iterates to the
// greatest fixpoint; a pass over the whole mask can only clear bits, so at
// most n*m passes are needed (one bit cleared per pass in the worst case).
//
// Sound: never removes a pair that participates in any full embedding.
// Rows may become empty, which proves the instance has no embedding.
inline CompatibilityMask refine(const CompatibilityMask& mask, const LabeledDigraph& q, const LabeledDigraph& g) {
    const int n = q.size();
    const int m = g.size();
    if (mask.bits.rows() != n || mask.bits.cols() != m)
        throw DimensionError("mask shape does not match graph sizes");

    CompatibilityMask out = mask;
    const int max_passes = n * m;
    for (int pass = 0; pass < max_passes; ++pass) {
        bool changed = false;
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < m; ++j) {
                if (!out.bits(i, j)) continue;
                bool keep = true;
                for (int i2 = 0; i2 < n && keep; ++i2) {
                    if (q.adj(i, i2)) {  // i' must map onto a successor of j
                        bool witness = false;
                        for (int j2 = 0; j2 < m && !witness; ++j2)
                            witness = g.adj(j, j2) && out.bits(i2, j2);
                        keep = witness;
                    }
                }
                for (int i2 = 0; i2 < n && keep; ++i2) {
                    if (q.adj(i2, i)) {  // predecessors, symmetrically
                        bool witness = false;
                        for (int j2 = 0; j2 < m && !witness; ++j2)
                            witness = g.adj(j2, j) && out.bits(i2, j2);
                        keep = witness;
                    }
                }
                if (!keep) {
                    out.bits(i, j) = 0;
                    changed = true;
                }
            }
        }
        if (!changed) break;
    }
    return out;
}

namespace detail {

// Shared backtracking core. Assigns query vertices in `var_order`; for the
// vertex at depth d, candidate targets are tried in the order produced by
// `candidates(d)`. Counts one node expansion per attempted assignment; a
// budget of 0 means unbounded. Consistency is checked against already
// assigned neighbors only, which is exact because var_order covers all
// vertices before a mapping is reported.
class EmbedSearch {
public:
    EmbedSearch(const LabeledDigraph& q, const LabeledDigraph& g, const CompatibilityMask& mask)
        : q_(q), g_(g), mask_(mask), assigned_(q.size(), -1), used_(g.size(), 0) {}

    // Returns false from visit() to stop the search.
    template <typename Candidates, typename Visit>
    bool run(const std::vector<int>& var_order, const Candidates& candidates, Visit&& visit,
             int64_t budget) {
        budget_ = budget;
        expansions_ = 0;
        exhausted_ = false;
        return descend(var_order, candidates, visit, 0);
    }

    bool budget_exhausted() const { return exhausted_; }

private:
    template <typename Candidates, typename Visit>
    bool descend(const std::vector<int>& var_order, const Candidates& candidates, Visit& visit, int depth) {
        if (depth == q_.size()) {
            return visit(assigned_);
        }
        const int i = var_order[depth];
        for (int j : candidates(depth)) {
            if (used_[j] || !mask_.bits(i, j)) continue;
            if (budget_ > 0 && expansions_ >= budget_) {
                exhausted_ = true;
                return false;
            }
            ++expansions_;
            if (!consistent(i, j)) continue;
            assigned_[i] = j;
            used_[j] = 1;
            const bool keep_going = descend(var_order, candidates, visit, depth + 1);
            assigned_[i] = -1;
            used_[j] = 0;
            if (!keep_going) return false;
        }
        return true;
    }

    bool consistent(int i, int j) const {
        for (int i2 = 0; i2 < q_.size(); ++i2) {
            const int j2 = assigned_[i2];
            if (j2 < 0) continue;
            if (q_.adj(i, i2) && !g_.adj(j, j2)) return false;
            if (q_.adj(i2, i) && !g_.adj(j2, j)) return false;
        }
        return true;
    }

    const LabeledDigraph& q_;
    const LabeledDigraph& g_;
    const CompatibilityMask& mask_;
    std::vector<int> assigned_;
    std::vector<uint8_t> used_;
    int64_t budget_ = 0;
    int64_t expansions_ = 0;
    bool exhausted_ = false;
};

}  // namespace detail

// All embeddings of q into g, found by depth-first backtracking over the
// refined mask. Query vertices are assigned in index order with ascending
// target candidates, so results come out in lexicographic order of the
// assignment vector. limit == 0 means enumerate everything.
inline std::vector<DiscreteMapping> enumerate_embeddings(const LabeledDigraph& q, const LabeledDigraph& g,
                                                         size_t limit = 0) {
    const CompatibilityMask refined = refine(build_mask(q, g), q, g);
    std::vector<DiscreteMapping> found;
    if (refined.has_empty_row()) return found;

    std::vector<int> var_order(q.size());
    for (int i = 0; i < q.size(); ++i) var_order[i] = i;
    std::vector<int> ascending(g.size());
    for (int j = 0; j < g.size(); ++j) ascending[j] = j;

    detail::EmbedSearch search(q, g, refined);
    search.run(
        var_order, [&](int) -> const std::vector<int>& { return ascending; },
        [&](const std::vector<int>& assigned) {
            found.emplace_back(assigned);
            return limit == 0 || found.size() < limit;
        },
        /*budget=*/0);
    return found;
}

// Finds any one embedding with a bounded deterministic search: refinement,
// then depth-first backtracking in index/ascending order, giving up after
// `budget` node expansions (0 = unbounded). Unlike enumerate_embeddings the
// result is not guaranteed lexicographically first when a budget is set,
// only deterministic. The scheduler uses this for greedy zero-latency
// placement, where a bounded answer matters more than an exhaustive one.
inline std::optional<DiscreteMapping> find_embedding(const LabeledDigraph& q, const LabeledDigraph& g,
                                                     int64_t budget = 0) {
    const CompatibilityMask refined = refine(build_mask(q, g), q, g);
    if (refined.has_empty_row()) return std::nullopt;

    std::vector<int> var_order(q.size());
    for (int i = 0; i < q.size(); ++i) var_order[i] = i;
    std::vector<int> ascending(g.size());
    for (int j = 0; j < g.size(); ++j) ascending[j] = j;

    std::optional<DiscreteMapping> found;
    detail::EmbedSearch search(q, g, refined);
    search.run(
        var_order, [&](int) -> const std::vector<int>& { return ascending; },
        [&](const std::vector<int>& assigned) {
            found.emplace(assigned);
            return false;
        },
        budget);
    return found;
}

// Repairs a candidate assignment into a true embedding, or proves it cannot
// within budget. If the candidate already embeds, it is returned unchanged.
// Otherwise a backtracking search runs over the refined mask with
//   - variable order: query vertices by descending (indeg + outdeg),
//     ties by ascending index (most constrained first), and
//   - value order: the candidate's own target first, then remaining targets
//     by descending score (when a score matrix is supplied; the swarm passes
//     its relaxed state here), ties and the scoreless case by ascending index.
// The search charges one node expansion per attempted assignment and gives
// up after `budget` expansions (default 4*n*m), returning nullopt. nullopt
// therefore means "no embedding found within budget", and when the search
// space was exhausted first, "no embedding exists".
inline std::optional<DiscreteMapping> repair_mapping(const DiscreteMapping& candidate, const LabeledDigraph& q,
                                                     const LabeledDigraph& g, const CompatibilityMask& refined,
                                                     int64_t budget, const Matrix<double>* scores = nullptr) {
    const int n = q.size();
    const int m = g.size();
    if (candidate.size() != n) throw DimensionError("candidate length does not match query size");
    if (is_embedding(candidate, q, g)) return candidate;
    if (refined.has_empty_row()) return std::nullopt;

    std::vector<int> var_order(n);
    for (int i = 0; i < n; ++i) var_order[i] = i;
    const auto deg = degree_profile(q);
    std::stable_sort(var_order.begin(), var_order.end(), [&](int a, int b) {
        return deg[a].first + deg[a].second > deg[b].first + deg[b].second;
    });

    // Candidate target orders per depth, built once up front.
    std::vector<std::vector<int>> order_at_depth(n);
    for (int d = 0; d < n; ++d) {
        const int i = var_order[d];
        std::vector<int>& ord = order_at_depth[d];
        ord.reserve(m);
        for (int j = 0; j < m; ++j) ord.push_back(j);
        std::stable_sort(ord.begin(), ord.end(), [&](int a, int b) {
            const bool cand_a = a == candidate[i];
            const bool cand_b = b == candidate[i];
            if (cand_a != cand_b) return cand_a;
            if (scores != nullptr && (*scores)(i, a) != (*scores)(i, b))
                return (*scores)(i, a) > (*scores)(i, b);
            return a < b;
        });
    }

    std::optional<DiscreteMapping> result;
    detail::EmbedSearch search(q, g, refined);
    search.run(
        var_order, [&](int depth) -> const std::vector<int>& { return order_at_depth[depth]; },
        [&](const std::vector<int>& assigned) {
            result = DiscreteMapping(assigned);
            return false;  // first full embedding wins
        },
        budget);
    return result;
}

// Public repair entry point: refines the supplied mask, then searches with
// the default budget of 4*n*m node expansions.
inline std::optional<DiscreteMapping> ullmann_refine_mapping(const DiscreteMapping& candidate,
                                                             const LabeledDigraph& q, const LabeledDigraph& g,
                                                             const CompatibilityMask& mask) {
    const CompatibilityMask refined = refine(mask, q, g);
    const int64_t budget = 4LL * q.size() * g.size();
    return repair_mapping(candidate, q, g, refined, budget);
}

}  // namespace swarmsched
