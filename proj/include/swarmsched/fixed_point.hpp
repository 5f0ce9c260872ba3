#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <mutex>
#include <optional>
#include <unordered_map>
#include <vector>

#include "swarmsched/graph.hpp"
#include "swarmsched/lap.hpp"
#include "swarmsched/matrix.hpp"
#include "swarmsched/rng.hpp"

namespace swarmsched {

// Quantized soft assignment: entries are 8-bit fractions with denominator
// 256 and every row sums to exactly 256. Storage is uint16 for one reason
// only: a row whose mask support is a single cell must hold the full row
// weight, 256, which does not fit in 8 bits. Every row with support >= 2
// keeps all entries in [0, 255] (the saturation rule below enforces it),
// matching an 8-bit datapath.
struct QuantizedMapping {
    Matrix<uint16_t> Sq;

    int rows() const { return Sq.rows(); }
    int cols() const { return Sq.cols(); }
    uint16_t operator()(int r, int c) const { return Sq(r, c); }
    uint16_t& operator()(int r, int c) { return Sq(r, c); }

    friend bool operator==(const QuantizedMapping&, const QuantizedMapping&) = default;
};

constexpr int kQuantOne = 256;          // row weight: 1.0 == 256/256
constexpr int64_t kQuantFitnessScale = int64_t{1} << 32;  // fitness unit: (256*256)^2

// Reciprocal unit replacing a divider: 1/s ~= mantissa * 2^-shift with a
// 16-bit mantissa in [2^15, 2^16) so the relative error is at most 2^-16.
// Entries are computed on demand and cached; the cache is append-only and
// safe for concurrent lookup.
class ReciprocalTable {
public:
    struct Entry {
        uint32_t mantissa;
        int shift;
    };

    Entry lookup(uint32_t divisor) {
        if (divisor == 0) throw DegenerateRowError("reciprocal of zero requested");
        {
            std::lock_guard<std::mutex> lock(mutex_);
            auto it = cache_.find(divisor);
            if (it != cache_.end()) return it->second;
        }
        const Entry e = compute(divisor);
        std::lock_guard<std::mutex> lock(mutex_);
        cache_.emplace(divisor, e);
        return e;
    }

    size_t size() const {
        std::lock_guard<std::mutex> lock(mutex_);
        return cache_.size();
    }

    static Entry compute(uint32_t divisor) {
        // Choose shift so 2^shift / divisor lands in (2^15, 2^16]; the exact
        // value then exceeds 2^15, bounding the rounding error by
        // 0.5 / 2^15 = 2^-16 relative. A result of exactly 2^16 (power-of-two
        // divisors and near-boundary roundings) renormalizes to 2^15 with one
        // less shift so the stored mantissa always fits in 16 bits.
        int bits = 0;
        for (uint32_t d = divisor; d != 0; d >>= 1) ++bits;
        int shift = bits + 15;
        const uint64_t num = uint64_t{1} << shift;
        uint32_t mantissa = static_cast<uint32_t>((num + divisor / 2) / divisor);
        if (mantissa == (uint32_t{1} << 16)) {
            mantissa >>= 1;
            --shift;
        }
        return Entry{mantissa, shift};
    }

private:
    mutable std::mutex mutex_;
    std::unordered_map<uint32_t, Entry> cache_;
};

namespace detail {

// Distributes `deficit` extra units over masked cells by largest remainder,
// ties broken toward the lowest column index, then resolves 8-bit
// saturation: any entry above 255 in a row with support >= 2 is capped and
// the surplus moves to the next-largest masked entry.
inline void finish_row_repair(uint16_t* row, const uint8_t* mask_row, int m, int deficit,
                              const std::vector<int64_t>& remainder) {
    std::vector<int> order;
    order.reserve(m);
    for (int j = 0; j < m; ++j)
        if (mask_row[j]) order.push_back(j);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return remainder[a] > remainder[b]; });
    for (int idx = 0; deficit > 0 && idx < static_cast<int>(order.size()); ++idx, --deficit)
        row[order[idx]] += 1;

    const int support = static_cast<int>(order.size());
    if (support < 2) return;  // single-support rows legitimately hold 256
    for (;;) {
        int hot = -1;
        for (int j = 0; j < m; ++j)
            if (mask_row[j] && row[j] > 255) hot = j;
        if (hot < 0) break;
        int surplus = row[hot] - 255;
        row[hot] = 255;
        // next-largest masked entry (excluding the capped one)
        int best = -1;
        for (int j = 0; j < m; ++j) {
            if (!mask_row[j] || j == hot) continue;
            if (best < 0 || row[j] > row[best]) best = j;
        }
        row[best] += static_cast<uint16_t>(surplus);
    }
}

}  // namespace detail

// Quantizes a row-stochastic float state to the 8-bit grid: per cell take
// floor(256 * S_ij), then repair each row to an exact sum of 256 by largest
// remainder (ties to the lowest column), then resolve saturation. Round
// trip error per cell is at most 2/256.
inline QuantizedMapping quantize_mapping(const Matrix<double>& s, const CompatibilityMask& mask) {
    const int n = mask.query_size();
    const int m = mask.target_size();
    if (s.rows() != n || s.cols() != m) throw DimensionError("quantize_mapping: shape mismatch");
    QuantizedMapping q;
    q.Sq = Matrix<uint16_t>(n, m, 0);
    std::vector<int64_t> remainder(m);
    for (int i = 0; i < n; ++i) {
        int sum = 0;
        for (int j = 0; j < m; ++j) {
            remainder[j] = 0;
            if (!mask.bits(i, j)) continue;
            const double scaled = kQuantOne * s(i, j);
            double whole = 0.0;
            const double frac = std::modf(scaled, &whole);
            q.Sq(i, j) = static_cast<uint16_t>(whole);
            // remainder on a 2^32 grid: exact ordering for the repair step
            remainder[j] = static_cast<int64_t>(frac * 4294967296.0);
            sum += q.Sq(i, j);
        }
        if (mask.support(i) == 0) throw InfeasibleError("quantize_mapping: mask row has empty support");
        detail::finish_row_repair(q.Sq.row_ptr(i), mask.bits.row_ptr(i), m, kQuantOne - sum, remainder);
    }
    return q;
}

inline Matrix<double> dequantize(const QuantizedMapping& q) {
    Matrix<double> s(q.rows(), q.cols());
    for (int i = 0; i < q.rows(); ++i)
        for (int j = 0; j < q.cols(); ++j) s(i, j) = static_cast<double>(q.Sq(i, j)) / kQuantOne;
    return s;
}

// Integer analogue of constrain(): zero outside the mask, then renormalize
// each row to sum 256 using the reciprocal table (multiply + shift, no
// divider), finishing with the largest-remainder repair. All arithmetic
// stays within int32 per partial product. A row that collapses to zero
// falls back to the uniform split over its mask support.
inline QuantizedMapping q_constrain(const QuantizedMapping& in, const CompatibilityMask& mask,
                                    ReciprocalTable& recip) {
    const int n = mask.query_size();
    const int m = mask.target_size();
    if (in.rows() != n || in.cols() != m) throw DimensionError("q_constrain: shape mismatch");
    QuantizedMapping out;
    out.Sq = Matrix<uint16_t>(n, m, 0);
    std::vector<int64_t> remainder(m);
    for (int i = 0; i < n; ++i) {
        uint32_t sum = 0;
        for (int j = 0; j < m; ++j)
            if (mask.bits(i, j)) sum += in.Sq(i, j);
        const int support = mask.support(i);
        if (support == 0) throw InfeasibleError("q_constrain: mask row has empty support");

        if (sum == 0) {
            // uniform fallback: floor(256 / support) per cell + remainder repair
            const uint16_t base = static_cast<uint16_t>(kQuantOne / support);
            int acc = 0;
            for (int j = 0; j < m; ++j) {
                remainder[j] = mask.bits(i, j) ? kQuantOne % support : 0;
                if (mask.bits(i, j)) {
                    out.Sq(i, j) = base;
                    acc += base;
                }
            }
            detail::finish_row_repair(out.Sq.row_ptr(i), mask.bits.row_ptr(i), m, kQuantOne - acc, remainder);
            continue;
        }

        if (sum == kQuantOne) {  // already normalized; the datapath skips the multiply
            for (int j = 0; j < m; ++j) out.Sq(i, j) = mask.bits(i, j) ? in.Sq(i, j) : 0;
            continue;
        }

        const ReciprocalTable::Entry e = recip.lookup(sum);
        const int shift = e.shift - 8;  // folds the *256 into the shift
        int acc = 0;
        for (int j = 0; j < m; ++j) {
            remainder[j] = 0;
            if (!mask.bits(i, j)) continue;
            const int32_t t = static_cast<int32_t>(in.Sq(i, j)) * static_cast<int32_t>(e.mantissa);
            const int32_t quo = t >> shift;
            out.Sq(i, j) = static_cast<uint16_t>(quo);
            remainder[j] = t - (static_cast<int64_t>(quo) << shift);
            acc += quo;
        }
        detail::finish_row_repair(out.Sq.row_ptr(i), mask.bits.row_ptr(i), m, kQuantOne - acc, remainder);
    }
    return out;
}

// Integer edge-preservation fitness on the accelerator scale:
//   f = -|| 2^16 Q - Sq G Sq^T ||_F^2.
// Row sums of 256 put (Sq G Sq^T) entries in [0, 2^16], so each residual
// fits comfortably: partial MACs accumulate in int32 (guarded for
// n, m <= 256), squared residuals in int64.
inline int64_t q_fitness(const QuantizedMapping& sq, const LabeledDigraph& q, const LabeledDigraph& g) {
    const int n = q.size();
    const int m = g.size();
    if (sq.rows() != n || sq.cols() != m) throw DimensionError("q_fitness: shape mismatch");
    if (n > 256 || m > 256)
        throw OverflowGuardError("q_fitness: int32 partial products are only guaranteed for n, m <= 256");

    Matrix<int32_t> sg(n, m, 0);  // Sq * G, entries <= 256
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < m; ++k) {
            const int32_t v = sq.Sq(i, k);
            if (v == 0) continue;
            for (int j = 0; j < m; ++j)
                if (g.adj(k, j)) sg(i, j) += v;
        }
    }
    int64_t total = 0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            int32_t dot = 0;  // (Sq G Sq^T)(i, j) <= 2^16
            for (int k = 0; k < m; ++k) dot += sg(i, k) * static_cast<int32_t>(sq.Sq(j, k));
            const int64_t r = (q.adj(i, j) ? int64_t{1} << 16 : 0) - dot;
            total += r * r;
        }
    }
    return -total;
}

// Hardware max-index unit: balanced binary reduction tree over the values;
// on ties the smaller index survives each comparator, so the result equals
// a left-to-right linear scan. Throws on empty input.
inline int argmax_index(const std::vector<int32_t>& values) {
    if (values.empty()) throw EmptyVectorError("argmax_index: empty input");
    std::vector<std::pair<int32_t, int>> level;
    level.reserve(values.size());
    for (int i = 0; i < static_cast<int>(values.size()); ++i) level.emplace_back(values[i], i);
    while (level.size() > 1) {
        std::vector<std::pair<int32_t, int>> next;
        next.reserve((level.size() + 1) / 2);
        for (size_t k = 0; k + 1 < level.size(); k += 2) {
            const auto& a = level[k];
            const auto& b = level[k + 1];
            next.push_back(b.first > a.first ? b : a);  // tie keeps the left (smaller index)
        }
        if (level.size() % 2 == 1) next.push_back(level.back());
        level = std::move(next);
    }
    return level[0].second;
}

// Greedy row-by-row rounding built on the max-index unit, mirroring how the
// hardware would discretize without an assignment solver: each row takes
// its largest entry among still-free masked columns. Can fail on column
// conflicts (a row left with no free masked column) and then returns
// nullopt; the swarm uses the exact assignment projection instead.
inline std::optional<DiscreteMapping> greedy_project(const QuantizedMapping& sq, const CompatibilityMask& mask) {
    const int n = mask.query_size();
    const int m = mask.target_size();
    if (sq.rows() != n || sq.cols() != m) throw DimensionError("greedy_project: shape mismatch");
    std::vector<char> used(m, 0);
    std::vector<int> assignment(n, -1);
    for (int i = 0; i < n; ++i) {
        std::vector<int32_t> row(m, -1);
        bool any = false;
        for (int j = 0; j < m; ++j) {
            if (mask.bits(i, j) && !used[j]) {
                row[j] = sq.Sq(i, j);
                any = true;
            }
        }
        if (!any) return std::nullopt;
        const int j = argmax_index(row);
        assignment[i] = j;
        used[j] = 1;
    }
    return DiscreteMapping(std::move(assignment));
}

}  // namespace swarmsched
