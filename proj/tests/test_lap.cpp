#include "swarmsched/lap.hpp"

#include <gtest/gtest.h>

#include <optional>

#include "test_support.hpp"

using namespace swarmsched;
using testsupport::all_injections;

namespace {

BitMatrix full_mask(int n, int m) {
    BitMatrix b(n, m);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) b(i, j) = 1;
    return b;
}

// Exhaustive reference: max total weight over allowed injections, then the
// lexicographically smallest assignment among exact optima.
template <typename W>
std::optional<std::vector<int>> oracle_max_lex(const Matrix<W>& w, const BitMatrix& allowed) {
    std::optional<W> best;
    std::optional<std::vector<int>> pick;
    for (const auto& inj : all_injections(w.rows(), w.cols())) {
        bool ok = true;
        W value{};
        for (int i = 0; i < w.rows() && ok; ++i) {
            if (!allowed(i, inj[i])) ok = false;
            else value += w(i, inj[i]);
        }
        if (!ok) continue;
        if (!best || value > *best || (value == *best && inj < *pick)) {
            best = value;
            pick = inj;
        }
    }
    return pick;
}

}  // namespace

TEST(Assignment, PermutationMatrixIsFixpoint) {
    Matrix<double> w(2, 2, 0.0);
    w(0, 1) = 1.0;
    w(1, 0) = 1.0;
    const auto r = assignment_max_lex(w, full_mask(2, 2), 1e-9);
    EXPECT_EQ(r.assignment, (std::vector<int>{1, 0}));
    EXPECT_DOUBLE_EQ(r.value, 2.0);
}

TEST(Assignment, PicksHigherTotalOverGreedyRow) {
    Matrix<double> w(2, 2, 0.0);
    w(0, 0) = 0.9;
    w(0, 1) = 0.1;
    w(1, 0) = 0.8;
    w(1, 1) = 0.2;
    const auto r = assignment_max_lex(w, full_mask(2, 2), 1e-9);
    EXPECT_EQ(r.assignment, (std::vector<int>{0, 1}));  // 1.1 beats 0.9
}

TEST(Assignment, AllEqualWeightsGiveIdentity) {
    Matrix<int64_t> w(3, 5, 7);
    const auto r = assignment_max_lex<int64_t>(w, full_mask(3, 5), 0);
    EXPECT_EQ(r.assignment, (std::vector<int>{0, 1, 2}));
    EXPECT_EQ(r.value, 21);
}

TEST(Assignment, LexTieBreakAcrossEqualOptima) {
    // Optimal value 6 is reached by [0,2], [1,2], [2,0], [2,1]; the
    // lexicographically smallest is [0,2].
    Matrix<int64_t> w(2, 3, 0);
    w(0, 0) = 1;
    w(0, 1) = 1;
    w(0, 2) = 5;
    w(1, 0) = 1;
    w(1, 1) = 1;
    w(1, 2) = 5;
    const auto r = assignment_max_lex<int64_t>(w, full_mask(2, 3), 0);
    EXPECT_EQ(r.value, 6);
    EXPECT_EQ(r.assignment, (std::vector<int>{0, 2}));
}

TEST(Assignment, ForbiddenCellsNeverChosen) {
    Matrix<int64_t> w(2, 2, 0);
    w(0, 0) = 100;  // forbidden below
    w(0, 1) = 1;
    w(1, 0) = 1;
    w(1, 1) = 100;  // forbidden below
    BitMatrix allowed(2, 2);
    allowed(0, 1) = 1;
    allowed(1, 0) = 1;
    const auto r = assignment_max_lex<int64_t>(w, allowed, 0);
    EXPECT_EQ(r.assignment, (std::vector<int>{1, 0}));
    EXPECT_EQ(r.value, 2);
}

TEST(Assignment, InfeasibleCasesThrow) {
    Matrix<int64_t> w(3, 2, 1);
    EXPECT_THROW(assignment_max_lex<int64_t>(w, full_mask(3, 2), 0), InfeasibleError);

    Matrix<int64_t> w2(2, 2, 1);
    BitMatrix allowed(2, 2);
    allowed(0, 0) = 1;
    allowed(1, 0) = 1;  // both rows forced onto column 0
    EXPECT_THROW(assignment_max_lex<int64_t>(w2, allowed, 0), InfeasibleError);

    BitMatrix empty_row(2, 2);
    empty_row(1, 0) = empty_row(1, 1) = 1;
    EXPECT_THROW(assignment_max_lex<int64_t>(w2, empty_row, 0), InfeasibleError);
}

TEST(Assignment, NegativeWeightsHandled) {
    Matrix<int64_t> w(2, 2, 0);
    w(0, 0) = -5;
    w(0, 1) = -1;
    w(1, 0) = -1;
    w(1, 1) = -5;
    const auto r = assignment_max_lex<int64_t>(w, full_mask(2, 2), 0);
    EXPECT_EQ(r.assignment, (std::vector<int>{1, 0}));
    EXPECT_EQ(r.value, -2);
}

TEST(Assignment, MatchesExhaustiveOracleInteger) {
    SplitMix64 rng(9000);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 1 + static_cast<int>(rng.next_below(4));
        const int m = n + static_cast<int>(rng.next_below(static_cast<uint64_t>(7 - n)));
        Matrix<int64_t> w(n, m, 0);
        BitMatrix allowed(n, m);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < m; ++j) {
                w(i, j) = static_cast<int64_t>(rng.next_below(21)) - 10;
                allowed(i, j) = rng.next_below(100) < 80 ? 1 : 0;
            }
        const auto want = oracle_max_lex(w, allowed);
        if (!want) {
            EXPECT_THROW(assignment_max_lex<int64_t>(w, allowed, 0), InfeasibleError) << "trial " << trial;
            continue;
        }
        const auto got = assignment_max_lex<int64_t>(w, allowed, 0);
        EXPECT_EQ(got.assignment, *want) << "trial " << trial;
    }
}

TEST(Assignment, MatchesExhaustiveOracleExactDoubles) {
    // Weights are multiples of 0.25, so sums are exact in binary floating
    // point and the oracle's equality-based tie detection is valid.
    SplitMix64 rng(9100);
    for (int trial = 0; trial < 120; ++trial) {
        const int n = 2 + static_cast<int>(rng.next_below(3));
        const int m = n + static_cast<int>(rng.next_below(3));
        Matrix<double> w(n, m, 0.0);
        BitMatrix allowed(n, m);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < m; ++j) {
                w(i, j) = 0.25 * static_cast<double>(rng.next_below(9));
                allowed(i, j) = rng.next_below(100) < 85 ? 1 : 0;
            }
        const auto want = oracle_max_lex(w, allowed);
        if (!want) {
            EXPECT_THROW(assignment_max_lex(w, allowed, 1e-9), InfeasibleError) << "trial " << trial;
            continue;
        }
        const auto got = assignment_max_lex(w, allowed, 1e-9);
        EXPECT_EQ(got.assignment, *want) << "trial " << trial;
    }
}

TEST(Assignment, SingleRow) {
    Matrix<int64_t> w(1, 4, 0);
    w(0, 2) = 3;
    w(0, 3) = 3;
    const auto r = assignment_max_lex<int64_t>(w, full_mask(1, 4), 0);
    EXPECT_EQ(r.assignment, (std::vector<int>{2}));
}
