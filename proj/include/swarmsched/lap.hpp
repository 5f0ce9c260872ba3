#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "swarmsched/errors.hpp"
#include "swarmsched/matrix.hpp"

namespace swarmsched {

template <typename W>
struct AssignmentResult {
    std::vector<int> assignment;  // row -> column
    W value;                      // sum of selected weights
};

namespace detail {

// Shortest-augmenting-path solver (Jonker-Volgenant potentials scheme) for
// the rectangular min-cost assignment with rows <= cols. Returns the
// column->row matching and the final dual potentials, which certify
// optimality: cost(i,j) - u[i] - v[j] >= 0 everywhere, with equality on
// matched pairs, and v[j] < 0 only on matched columns.
template <typename W>
struct LapDuals {
    std::vector<int> row_of_col;  // -1 if free
    std::vector<int> col_of_row;
    std::vector<W> u, v;
};

template <typename W>
LapDuals<W> solve_min_assignment(const Matrix<W>& cost) {
    const int n = cost.rows();
    const int m = cost.cols();
    const W inf = std::numeric_limits<W>::max() / 4;

    // 1-indexed working arrays, the classic formulation.
    std::vector<W> u(n + 1, W{}), v(m + 1, W{});
    std::vector<int> p(m + 1, 0), way(m + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<W> minv(m + 1, inf);
        std::vector<char> used(m + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            int j1 = 0;
            W delta = inf;
            for (int j = 1; j <= m; ++j) {
                if (used[j]) continue;
                const W cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= m; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    LapDuals<W> out;
    out.row_of_col.assign(m, -1);
    out.col_of_row.assign(n, -1);
    out.u.assign(n, W{});
    out.v.assign(m, W{});
    for (int j = 1; j <= m; ++j) {
        if (p[j] != 0) {
            out.row_of_col[j - 1] = p[j] - 1;
            out.col_of_row[p[j] - 1] = j - 1;
        }
    }
    for (int i = 1; i <= n; ++i) out.u[i - 1] = u[i];
    for (int j = 1; j <= m; ++j) out.v[j - 1] = v[j];
    return out;
}

// Alternating-path machinery over the tight-edge subgraph, used to extract
// the lexicographically smallest optimal assignment. By complementary
// slackness, an assignment is optimal iff it uses tight edges only and
// covers every column whose dual says the column is scarce (v[j] < 0).
class TightExtractor {
public:
    TightExtractor(int n, int m, const std::vector<std::vector<int>>& tight_cols,
                   const std::vector<char>& required_col, std::vector<int> col_of_row)
        : n_(n), m_(m), tight_(tight_cols), required_(required_col), match_col_(std::move(col_of_row)) {
        match_row_.assign(m_, -1);
        for (int i = 0; i < n_; ++i)
            if (match_col_[i] >= 0) match_row_[match_col_[i]] = i;
        fixed_row_.assign(n_, 0);
        fixed_col_.assign(m_, 0);
    }

    // Lexicographic extraction: for each row in index order, commit the
    // smallest tight column that still admits a completion (all remaining
    // rows matched, all required columns covered).
    std::vector<int> extract() {
        std::vector<int> result(n_, -1);
        for (int i = 0; i < n_; ++i) {
            for (int j : tight_[i]) {
                if (fixed_col_[j]) continue;
                if (try_fix(i, j)) {
                    result[i] = j;
                    fixed_row_[i] = 1;
                    fixed_col_[j] = 1;
                    break;
                }
            }
            if (result[i] < 0) throw InvariantError("tight-graph extraction lost feasibility");
        }
        return result;
    }

private:
    // Attempts to force row i onto column j while keeping a witness matching
    // that saturates all unfixed rows and all required columns. On success
    // the witness is updated and true is returned; on failure the witness is
    // restored and false is returned.
    bool try_fix(int i, int j) {
        const std::vector<int> save_col = match_col_;
        const std::vector<int> save_row = match_row_;

        const int old_col = match_col_[i];
        const int displaced_row = match_row_[j];
        if (old_col == j) return true;

        // Pin the candidate pair first: the repair searches below must not
        // be able to route through column j and silently displace row i off
        // it again, or the committed result would diverge from the witness.
        fixed_row_[i] = 1;
        fixed_col_[j] = 1;

        // Point row i at j, detaching whoever held it.
        if (old_col >= 0) match_row_[old_col] = -1;
        match_col_[i] = j;
        match_row_[j] = i;
        bool ok = true;
        if (displaced_row >= 0) {
            match_col_[displaced_row] = -1;
            ok = rematch_row(displaced_row);
        }
        // Losing row i's old column may uncover a required column.
        if (ok && old_col >= 0 && required_[old_col] && match_row_[old_col] < 0) {
            ok = recover_column(old_col);
        }
        if (!ok) {
            match_col_ = save_col;
            match_row_ = save_row;
            fixed_row_[i] = 0;
            fixed_col_[j] = 0;
        }
        return ok;
    }

    // Kuhn-style augmenting search giving `row` a column; may displace other
    // rows along alternating paths but never touches fixed pairs.
    bool rematch_row(int row) {
        visited_col_.assign(m_, 0);
        return augment(row);
    }

    bool augment(int row) {
        for (int j : tight_[row]) {
            if (fixed_col_[j] || visited_col_[j]) continue;
            visited_col_[j] = 1;
            const int other = match_row_[j];
            if (other < 0 || augment(other)) {
                match_col_[row] = j;
                match_row_[j] = row;
                return true;
            }
        }
        return false;
    }

    // Covers required column c by stealing a row and cascading the hole to
    // some non-required column (alternating path over columns).
    bool recover_column(int c) {
        visited_col_.assign(m_, 0);
        return cover(c);
    }

    bool cover(int c) {
        visited_col_[c] = 1;
        for (int i = 0; i < n_; ++i) {
            if (fixed_row_[i]) continue;
            if (!tight_edge(i, c)) continue;
            const int freed = match_col_[i];
            if (freed == c) continue;
            match_col_[i] = c;
            match_row_[c] = i;
            if (freed < 0) return true;  // row was somehow free; column covered
            match_row_[freed] = -1;
            if (!required_[freed] || visited_col_[freed]) {
                if (!required_[freed]) return true;
            } else if (cover(freed)) {
                return true;
            }
            // undo and keep looking
            match_row_[freed] = i;
            match_col_[i] = freed;
            match_row_[c] = -1;
        }
        return false;
    }

    bool tight_edge(int row, int col) const {
        for (int j : tight_[row])
            if (j == col) return true;
        return false;
    }

    const int n_;
    const int m_;
    const std::vector<std::vector<int>>& tight_;
    const std::vector<char>& required_;
    std::vector<int> match_col_;
    std::vector<int> match_row_;
    std::vector<char> fixed_row_;
    std::vector<char> fixed_col_;
    std::vector<char> visited_col_;
};

}  // namespace detail

// Maximum-weight injective assignment of every row to a distinct allowed
// column (rows <= cols required), deterministic tie-break: among all optimal
// assignments, returns the lexicographically smallest assignment vector.
// tie_eps bounds the dual slack treated as "tight"; pass 0 for integer
// weights (exact) and a small absolute epsilon for floating-point weights.
// Throws InfeasibleError when no complete assignment exists within the mask.
template <typename W>
AssignmentResult<W> assignment_max_lex(const Matrix<W>& weights, const BitMatrix& allowed, W tie_eps) {
    const int n = weights.rows();
    const int m = weights.cols();
    if (!(allowed.rows() == n && allowed.cols() == m)) throw DimensionError("assignment mask shape mismatch");
    if (n > m) throw InfeasibleError("more rows than columns");

    // Forbidden pairs get a cost large enough that no optimal solution can
    // afford one, yet small enough to keep arithmetic exact.
    W max_abs = W{};
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) {
            const W a = weights(i, j) < W{} ? static_cast<W>(-weights(i, j)) : weights(i, j);
            if (a > max_abs) max_abs = a;
        }
    const W big = static_cast<W>((max_abs + 1) * (n + 1));

    Matrix<W> cost(n, m);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) cost(i, j) = allowed(i, j) ? static_cast<W>(-weights(i, j)) : big;

    auto duals = detail::solve_min_assignment(cost);

    for (int i = 0; i < n; ++i) {
        const int j = duals.col_of_row[i];
        if (j < 0 || !allowed(i, j))
            throw InfeasibleError("no injective assignment exists within the mask");
    }

    // Tight edges under the optimal duals; forbidden pairs are never tight
    // because their reduced cost stays near `big`.
    std::vector<std::vector<int>> tight(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < m; ++j) {
            if (!allowed(i, j)) continue;
            const W slack = cost(i, j) - duals.u[i] - duals.v[j];
            if (slack <= tie_eps) tight[i].push_back(j);
        }
    }
    std::vector<char> required(m, 0);
    for (int j = 0; j < m; ++j) required[j] = duals.v[j] < -tie_eps ? 1 : 0;

    detail::TightExtractor extractor(n, m, tight, required, duals.col_of_row);
    AssignmentResult<W> out;
    out.assignment = extractor.extract();
    out.value = W{};
    for (int i = 0; i < n; ++i) out.value += weights(i, out.assignment[i]);
    return out;
}

}  // namespace swarmsched
