#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "swarmsched/graph.hpp"
#include "swarmsched/lap.hpp"
#include "swarmsched/matrix.hpp"
#include "swarmsched/rng.hpp"

namespace swarmsched {

// Continuous relaxation of an injective vertex assignment: a soft
// assignment matrix S in [0,1]^{n x m} whose rows sum to 1 (within 1e-9)
// and whose support stays inside the compatibility mask. V is the particle
// velocity; best_S / best_fitness track the particle's own best position.
struct RelaxedMapping {
    Matrix<double> S;
    Matrix<double> V;
    Matrix<double> best_S;
    double best_fitness;
};

// Row-wise projection back onto the feasible set: clip negatives to zero,
// zero out entries outside the mask, then normalize each row to sum 1.
// A row whose masked sum collapses to zero falls back to the uniform
// distribution over its mask support. Idempotent up to 1e-12.
inline Matrix<double> constrain(const Matrix<double>& s, const CompatibilityMask& mask) {
    const int n = mask.query_size();
    const int m = mask.target_size();
    if (s.rows() != n || s.cols() != m) throw DimensionError("constrain: state/mask shape mismatch");
    Matrix<double> out(n, m, 0.0);
    for (int i = 0; i < n; ++i) {
        double sum = 0.0;
        for (int j = 0; j < m; ++j) {
            if (!mask.bits(i, j)) continue;
            const double v = s(i, j) > 0.0 ? s(i, j) : 0.0;
            out(i, j) = v;
            sum += v;
        }
        if (sum > 0.0) {
            for (int j = 0; j < m; ++j) out(i, j) /= sum;
        } else {
            const int support = mask.support(i);
            if (support == 0) throw InfeasibleError("constrain: mask row has empty support");
            const double w = 1.0 / support;
            for (int j = 0; j < m; ++j) out(i, j) = mask.bits(i, j) ? w : 0.0;
        }
    }
    return out;
}

// Random feasible start: draw u_ij in (0, 1] for every cell (row-major,
// one draw per cell regardless of mask so the stream layout is fixed),
// zero outside the mask, normalize rows. Velocity starts at zero and the
// particle's best position starts at S itself with -inf fitness, so the
// self-attraction term is a no-op until the first real improvement.
inline RelaxedMapping init_relaxed(const CompatibilityMask& mask, SplitMix64& rng) {
    const int n = mask.query_size();
    const int m = mask.target_size();
    if (mask.has_empty_row()) throw InfeasibleError("init_relaxed: mask row has empty support");
    Matrix<double> u(n, m);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) u(i, j) = rng.uniform_open01();
    RelaxedMapping p;
    p.S = constrain(u, mask);
    p.V = Matrix<double>(n, m, 0.0);
    p.best_S = p.S;
    p.best_fitness = -std::numeric_limits<double>::infinity();
    return p;
}

// Edge-preservation fitness: f(S) = -||Q - S G S^T||_F^2, maximized at 0
// exactly when S is the indicator matrix of an embedding and the target
// subgraph induced on the image adds no extra edges over Q.
inline double fitness(const Matrix<double>& s, const LabeledDigraph& q, const LabeledDigraph& g) {
    const int n = q.size();
    const int m = g.size();
    if (s.rows() != n || s.cols() != m) throw DimensionError("fitness: state shape mismatch");
    Matrix<double> sg(n, m, 0.0);  // S * G
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < m; ++k) {
            const double sik = s(i, k);
            if (sik == 0.0) continue;
            for (int j = 0; j < m; ++j)
                if (g.adj(k, j)) sg(i, j) += sik;
        }
    }
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            double dot = 0.0;  // (S G S^T)(i, j)
            for (int k = 0; k < m; ++k) dot += sg(i, k) * s(j, k);
            const double r = static_cast<double>(q.adj(i, j)) - dot;
            total += r * r;
        }
    }
    return -total;
}

// Analytic gradient of ||Q - S G S^T||_F^2 with respect to S:
//   grad = -2 R S G^T - 2 R^T S G, with R = Q - S G S^T.
// Diagnostic only; the swarm itself is derivative-free.
inline Matrix<double> fitness_gradient(const Matrix<double>& s, const LabeledDigraph& q,
                                       const LabeledDigraph& g) {
    const int n = q.size();
    const int m = g.size();
    if (s.rows() != n || s.cols() != m) throw DimensionError("fitness_gradient: state shape mismatch");

    Matrix<double> sg(n, m, 0.0);   // S G
    Matrix<double> sgt(n, m, 0.0);  // S G^T
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < m; ++k) {
            const double sik = s(i, k);
            if (sik == 0.0) continue;
            for (int j = 0; j < m; ++j) {
                if (g.adj(k, j)) sg(i, j) += sik;
                if (g.adj(j, k)) sgt(i, j) += sik;
            }
        }
    }
    Matrix<double> r(n, n);  // residual Q - S G S^T
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            double dot = 0.0;
            for (int k = 0; k < m; ++k) dot += sg(i, k) * s(j, k);
            r(i, j) = static_cast<double>(q.adj(i, j)) - dot;
        }
    }
    Matrix<double> grad(n, m, 0.0);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < m; ++j) {
            double acc = 0.0;
            for (int k = 0; k < n; ++k) {
                acc += r(i, k) * sgt(k, j);  // (R S G^T)(i, j)
                acc += r(k, i) * sg(k, j);   // (R^T S G)(i, j)
            }
            grad(i, j) = -2.0 * acc;
        }
    }
    return grad;
}

// Rounds the soft assignment to the discrete one maximizing
// sum_i S(i, a_i) over injective mask-respecting assignments, solved as a
// linear assignment problem. Deterministic: among optimal assignments the
// lexicographically smallest is returned.
inline DiscreteMapping project(const Matrix<double>& s, const CompatibilityMask& mask) {
    if (s.rows() != mask.query_size() || s.cols() != mask.target_size())
        throw DimensionError("project: state/mask shape mismatch");
    if (mask.query_size() > mask.target_size())
        throw InfeasibleError("project: more query vertices than target vertices");
    auto res = assignment_max_lex<double>(s, mask.bits, 1e-9);
    return DiscreteMapping(std::move(res.assignment));
}

}  // namespace swarmsched
