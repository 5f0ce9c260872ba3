#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <set>
#include <type_traits>
#include <vector>

#include "swarmsched/fixed_point.hpp"
#include "swarmsched/graph.hpp"
#include "swarmsched/pool.hpp"
#include "swarmsched/relaxed.hpp"
#include "swarmsched/rng.hpp"
#include "swarmsched/ullmann.hpp"

namespace swarmsched {

enum class SwarmMode : uint8_t {
    Float,      // double-precision relaxation
    Quantized,  // 8-bit state, integer-only datapath, bit-exact
};

struct SwarmParams {
    int particles = 16;     // N
    int epochs = 10;        // T: restarts; best state and mappings carry over
    int inner_steps = 30;   // K: velocity/position steps per epoch
    double inertia = 0.72;  // w
    double c_local = 1.49;
    double c_global = 1.49;
    double c_consensus = 0.5;
    double v_max = 0.5;
    uint64_t seed = 0;
    SwarmMode mode = SwarmMode::Float;
    int workers = 1;
    int64_t time_budget_ms = 0;  // 0 = unbounded
    // Ablation switch for experiments: snap S to one-hot rows after every
    // inner step (the discrete coupling the relaxation replaces). Float only.
    bool hard_round = false;
};

// Shared cross-particle state. The global best is updated through a strict
// improve-if-better merge at the end of each inner step, processing
// particles in index order, so all outcomes are total-ordered by
// (fitness, particle index, step) and independent of worker count.
// The consensus attractor is recomputed at the end of every epoch that
// produced a feasible mapping, from that epoch's final population, and then
// guides the following epochs.
struct ControllerState {
    double best_fitness = -std::numeric_limits<double>::infinity();
    Matrix<double> best_S;
    bool has_best = false;
    std::optional<Matrix<double>> consensus;
    std::vector<DiscreteMapping> feasible;
};

struct MatchResult {
    std::vector<DiscreteMapping> mappings;  // distinct, in discovery order
    double best_fitness = -std::numeric_limits<double>::infinity();
    int64_t evaluations = 0;
    int epochs_used = 0;
    int64_t wall_model_cycles = 0;

    friend bool operator==(const MatchResult&, const MatchResult&) = default;
};

// Thrown when the optional wall-clock budget expires; carries everything
// accumulated so far so callers can still use the partial result.
struct TimeoutError : Error {
    MatchResult partial;
    explicit TimeoutError(MatchResult partial_result)
        : Error("swarm matcher exceeded its wall-clock budget"), partial(std::move(partial_result)) {}
};

// Per-step instrumentation: (epoch, particle, step, fitness, global_best),
// emitted in deterministic order after each step's merge.
using StepHook = std::function<void(int, int, int, double, double)>;

// Modeled datapath cost of one fitness evaluation: the two matrix products
// (2nm(n+m) MACs) plus masking/normalization traffic (4nm).
inline int64_t cost_per_iteration(int n, int m) {
    return 2LL * n * m * (n + m) + 4LL * n * m;
}

// One velocity update. Terms:
//   V' = w V + c_local r1 (best_S - S) + c_global r2 (S* - S)
//      + c_consensus r3 (consensus - S),
// elementwise, then clamped to [-v_max, v_max]. r1/r2/r3 are uniform [0,1)
// draws; r1 is drawn for every cell (row-major), then r2 only when a global
// best exists, then r3 only when a consensus exists, so the stream layout
// is fixed for a whole epoch and results cannot depend on scheduling.
inline Matrix<double> velocity_update(const RelaxedMapping& p, const ControllerState& ctrl,
                                      const SwarmParams& params, SplitMix64& rng) {
    const int n = p.S.rows();
    const int m = p.S.cols();
    Matrix<double> v(n, m);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j)
            v(i, j) = params.inertia * p.V(i, j) +
                      params.c_local * rng.uniform01() * (p.best_S(i, j) - p.S(i, j));
    if (ctrl.has_best) {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < m; ++j)
                v(i, j) += params.c_global * rng.uniform01() * (ctrl.best_S(i, j) - p.S(i, j));
    }
    if (ctrl.consensus.has_value()) {
        const Matrix<double>& cons = *ctrl.consensus;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < m; ++j)
                v(i, j) += params.c_consensus * rng.uniform01() * (cons(i, j) - p.S(i, j));
    }
    for (double& x : v.data()) x = std::clamp(x, -params.v_max, params.v_max);
    return v;
}

inline Matrix<double> position_update(const Matrix<double>& s, const Matrix<double>& v) {
    require_same_shape(s, v, "position_update");
    Matrix<double> out = s;
    for (size_t k = 0; k < out.data().size(); ++k) out.data()[k] += v.data()[k];
    return out;
}

// Soft-weighted blend of the elite quarter of the population
// (count = ceil(N/4), ranked by fitness, ties to the lower index):
// weight_i = exp(f_i - f_max) normalized over the elite, then the blend is
// re-constrained onto the mask. Population must be non-empty.
inline Matrix<double> elite_consensus(const std::vector<std::pair<Matrix<double>, double>>& population,
                                      const CompatibilityMask& mask) {
    if (population.empty()) throw EmptyVectorError("elite_consensus: empty population");
    const int count = static_cast<int>(population.size());
    const int elite = (count + 3) / 4;
    std::vector<int> order(count);
    for (int i = 0; i < count; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return population[a].second > population[b].second; });
    const double f_max = population[order[0]].second;
    std::vector<double> weight(elite);
    double total = 0.0;
    for (int e = 0; e < elite; ++e) {
        weight[e] = std::exp(population[order[e]].second - f_max);
        total += weight[e];
    }
    const int n = mask.query_size();
    const int m = mask.target_size();
    Matrix<double> blend(n, m, 0.0);
    for (int e = 0; e < elite; ++e) {
        const Matrix<double>& s = population[order[e]].first;
        const double w = weight[e] / total;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < m; ++j) blend(i, j) += w * s(i, j);
    }
    return constrain(blend, mask);
}

namespace detail {

// Snap each row to the one-hot vector at its masked argmax (ablation mode).
inline void hard_round_rows(Matrix<double>& s, const CompatibilityMask& mask) {
    for (int i = 0; i < s.rows(); ++i) {
        int best = -1;
        for (int j = 0; j < s.cols(); ++j) {
            if (!mask.bits(i, j)) continue;
            if (best < 0 || s(i, j) > s(i, best)) best = j;
        }
        for (int j = 0; j < s.cols(); ++j) s(i, j) = 0.0;
        s(i, best) = 1.0;
    }
}

// ---- mode traits ---------------------------------------------------------
// The epoch/step/projection skeleton is shared; the two arithmetic domains
// plug in through these traits.

struct FloatMode {
    using Fitness = double;
    struct Particle {
        RelaxedMapping state;
        double fitness = -std::numeric_limits<double>::infinity();
    };
    struct Shared {
        explicit Shared(const SwarmParams&) {}
    };

    static Particle init(const CompatibilityMask& mask, const SwarmParams&, Shared&, SplitMix64& rng) {
        return Particle{init_relaxed(mask, rng), -std::numeric_limits<double>::infinity()};
    }

    static void inner_step(Particle& p, const ControllerState& ctrl, const CompatibilityMask& mask,
                           const LabeledDigraph& q, const LabeledDigraph& g, const SwarmParams& params,
                           Shared&, SplitMix64& rng) {
        p.state.V = velocity_update(p.state, ctrl, params, rng);
        p.state.S = constrain(position_update(p.state.S, p.state.V), mask);
        if (params.hard_round) hard_round_rows(p.state.S, mask);
        p.fitness = fitness(p.state.S, q, g);
        if (p.fitness > p.state.best_fitness) {
            p.state.best_fitness = p.fitness;
            p.state.best_S = p.state.S;
        }
    }

    static double report_fitness(Fitness f) { return f; }

    static std::optional<DiscreteMapping> discretize(const Particle& p, const CompatibilityMask& mask,
                                                     const CompatibilityMask& refined, const LabeledDigraph& q,
                                                     const LabeledDigraph& g, Shared&) {
        DiscreteMapping candidate;
        try {
            candidate = project(p.state.S, mask);
        } catch (const InfeasibleError&) {
            return std::nullopt;
        }
        const int64_t budget = 4LL * q.size() * g.size();
        return repair_mapping(candidate, q, g, refined, budget, &p.state.S);
    }

    static void update_consensus(const std::vector<Particle>& pop, const CompatibilityMask& mask,
                                 const SwarmParams&, Shared&, ControllerState& ctrl) {
        std::vector<std::pair<Matrix<double>, double>> snapshot;
        snapshot.reserve(pop.size());
        for (const auto& p : pop) snapshot.emplace_back(p.state.S, p.fitness);
        ctrl.consensus = elite_consensus(snapshot, mask);
    }
};

// Quantized mode: all state and arithmetic integral, so results are
// bit-identical across platforms and worker counts. Coefficients live on a
// 256 grid (8 fractional bits); velocities are int16 with 8 fractional
// bits, clamped to +-v_max*256; random factors are single bytes. The
// consensus blend uses uniform weights over the elite instead of the float
// softmax: exp() on the int64 fitness scale would both leave the integer
// domain and collapse to a delta, so the integer controller averages.
struct QuantizedMode {
    using Fitness = int64_t;
    struct Particle {
        QuantizedMapping Sq;
        Matrix<int16_t> Vq;
        QuantizedMapping best_Sq;
        Fitness best_fitness = std::numeric_limits<int64_t>::min();
        Fitness fitness = std::numeric_limits<int64_t>::min();
    };
    struct QCtrl {
        bool has_best = false;
        QuantizedMapping best_Sq;
        std::optional<QuantizedMapping> consensus;
    };
    struct Shared {
        ReciprocalTable recip;
        QCtrl qctrl;
        int32_t w_fx, c_local_fx, c_global_fx, c_consensus_fx, v_max_fx;

        explicit Shared(const SwarmParams& params)
            : w_fx(static_cast<int32_t>(std::lround(params.inertia * 256.0))),
              c_local_fx(static_cast<int32_t>(std::lround(params.c_local * 256.0))),
              c_global_fx(static_cast<int32_t>(std::lround(params.c_global * 256.0))),
              c_consensus_fx(static_cast<int32_t>(std::lround(params.c_consensus * 256.0))),
              v_max_fx(static_cast<int32_t>(std::lround(params.v_max * 256.0))) {}
    };

    static Particle init(const CompatibilityMask& mask, const SwarmParams&, Shared& shared, SplitMix64& rng) {
        const int n = mask.query_size();
        const int m = mask.target_size();
        if (mask.has_empty_row()) throw InfeasibleError("init: mask row has empty support");
        QuantizedMapping u;
        u.Sq = Matrix<uint16_t>(n, m, 0);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < m; ++j) {
                const uint32_t b = rng.next_byte();  // draw per cell, mask applied after
                if (mask.bits(i, j)) u.Sq(i, j) = static_cast<uint16_t>(b == 0 ? 1 : b);
            }
        }
        Particle p;
        p.Sq = q_constrain(u, mask, shared.recip);
        p.Vq = Matrix<int16_t>(n, m, 0);
        p.best_Sq = p.Sq;
        return p;
    }

    static void inner_step(Particle& p, const ControllerState&, const CompatibilityMask& mask,
                           const LabeledDigraph& q, const LabeledDigraph& g, const SwarmParams&,
                           Shared& shared, SplitMix64& rng) {
        const int n = p.Sq.rows();
        const int m = p.Sq.cols();
        const QCtrl& qc = shared.qctrl;
        Matrix<int16_t> v(n, m);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < m; ++j) {
                int32_t acc = (shared.w_fx * static_cast<int32_t>(p.Vq(i, j))) >> 8;
                const int32_t r1 = static_cast<int32_t>(rng.next_byte());
                acc += (shared.c_local_fx * r1 *
                        (static_cast<int32_t>(p.best_Sq(i, j)) - static_cast<int32_t>(p.Sq(i, j)))) >>
                       16;
                v(i, j) = static_cast<int16_t>(std::clamp(acc, -shared.v_max_fx, shared.v_max_fx));
            }
        }
        if (qc.has_best) {
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < m; ++j) {
                    const int32_t r2 = static_cast<int32_t>(rng.next_byte());
                    int32_t acc = v(i, j) + ((shared.c_global_fx * r2 *
                                              (static_cast<int32_t>(qc.best_Sq.Sq(i, j)) -
                                               static_cast<int32_t>(p.Sq(i, j)))) >>
                                             16);
                    v(i, j) = static_cast<int16_t>(std::clamp(acc, -shared.v_max_fx, shared.v_max_fx));
                }
        }
        if (qc.consensus.has_value()) {
            const QuantizedMapping& cons = *qc.consensus;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < m; ++j) {
                    const int32_t r3 = static_cast<int32_t>(rng.next_byte());
                    int32_t acc = v(i, j) + ((shared.c_consensus_fx * r3 *
                                              (static_cast<int32_t>(cons.Sq(i, j)) -
                                               static_cast<int32_t>(p.Sq(i, j)))) >>
                                             16);
                    v(i, j) = static_cast<int16_t>(std::clamp(acc, -shared.v_max_fx, shared.v_max_fx));
                }
        }
        p.Vq = std::move(v);
        QuantizedMapping raw;
        raw.Sq = Matrix<uint16_t>(n, m, 0);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < m; ++j) {
                const int32_t x = static_cast<int32_t>(p.Sq(i, j)) + static_cast<int32_t>(p.Vq(i, j));
                raw.Sq(i, j) = static_cast<uint16_t>(x < 0 ? 0 : x);  // clip, mask+normalize next
            }
        p.Sq = q_constrain(raw, mask, shared.recip);
        p.fitness = q_fitness(p.Sq, q, g);
        if (p.fitness > p.best_fitness) {
            p.best_fitness = p.fitness;
            p.best_Sq = p.Sq;
        }
    }

    // Fitness on the reporting scale: integer units of 2^-32.
    static double report_fitness(Fitness f) {
        return static_cast<double>(f) / static_cast<double>(kQuantFitnessScale);
    }

    static std::optional<DiscreteMapping> discretize(const Particle& p, const CompatibilityMask& mask,
                                                     const CompatibilityMask& refined, const LabeledDigraph& q,
                                                     const LabeledDigraph& g, Shared&) {
        Matrix<int64_t> w(p.Sq.rows(), p.Sq.cols());
        for (int i = 0; i < w.rows(); ++i)
            for (int j = 0; j < w.cols(); ++j) w(i, j) = p.Sq.Sq(i, j);
        std::optional<DiscreteMapping> candidate;
        try {
            candidate = DiscreteMapping{assignment_max_lex<int64_t>(w, mask.bits, 0).assignment};
        } catch (const InfeasibleError&) {
            return std::nullopt;
        }
        Matrix<double> scores(w.rows(), w.cols());
        for (int i = 0; i < w.rows(); ++i)
            for (int j = 0; j < w.cols(); ++j) scores(i, j) = static_cast<double>(w(i, j));
        const int64_t budget = 4LL * q.size() * g.size();
        return repair_mapping(*candidate, q, g, refined, budget, &scores);
    }

    static void update_consensus(const std::vector<Particle>& pop, const CompatibilityMask& mask,
                                 const SwarmParams&, Shared& shared, ControllerState&) {
        const int count = static_cast<int>(pop.size());
        const int elite = (count + 3) / 4;
        std::vector<int> order(count);
        for (int i = 0; i < count; ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return pop[a].fitness > pop[b].fitness; });
        QuantizedMapping sum;
        sum.Sq = Matrix<uint16_t>(mask.query_size(), mask.target_size(), 0);
        for (int e = 0; e < elite; ++e) {
            const QuantizedMapping& s = pop[order[e]].Sq;
            for (int i = 0; i < sum.rows(); ++i)
                for (int j = 0; j < sum.cols(); ++j) sum.Sq(i, j) += s.Sq(i, j);
        }
        shared.qctrl.consensus = q_constrain(sum, mask, shared.recip);
    }
};

}  // namespace detail

// Runs the full matcher: per epoch, reinitialize all particles; per inner
// step, advance every particle (velocity, position, mask, normalize,
// fitness, local best) and then merge the global best serially in particle
// order; after the K inner steps, discretize every particle (exact
// assignment projection followed by neighbor-consistency repair), collect
// feasible mappings, and refresh the consensus attractor if the epoch found
// any. Global best, consensus, and the feasible set persist across epochs;
// particles do not. Deterministic for a fixed (params, inputs): particle
// streams are derived from (seed, epoch, particle) and every cross-particle
// reduction is ordered, so worker count cannot change any result.
inline MatchResult run_matcher(const LabeledDigraph& q, const LabeledDigraph& g, const SwarmParams& params,
                               const StepHook& hook = StepHook()) {
    const int n = q.size();
    const int m = g.size();
    if (params.particles < 1 || params.epochs < 1 || params.inner_steps < 1)
        throw ConfigError("swarm sizes must be at least 1");
    if (params.particles > 1024) throw ConfigError("particle count above supported bound (1024)");
    if (params.hard_round && params.mode == SwarmMode::Quantized)
        throw ConfigError("hard rounding ablation is a float-mode experiment");
    if (n > m) throw InfeasibleError("query has more vertices than the target");
    const CompatibilityMask mask = build_mask(q, g);
    if (mask.has_empty_row())
        throw InfeasibleError("a query vertex has no compatible target vertex");
    const CompatibilityMask refined = refine(mask, q, g);

    MatchResult result;
    result.wall_model_cycles = 0;
    std::set<std::vector<int>> seen;
    ControllerState ctrl;
    const auto t_start = std::chrono::steady_clock::now();

    const auto run_mode = [&](auto mode_tag) {
        using Mode = decltype(mode_tag);
        typename Mode::Shared shared(params);
        const int N = params.particles;
        WorkerPool pool(std::max(1, params.workers));
        std::vector<typename Mode::Particle> particles(N);
        std::vector<SplitMix64> streams;

        // Quantized global best lives beside the float controller view.
        typename Mode::Fitness best_fit = std::numeric_limits<typename Mode::Fitness>::lowest();

        for (int epoch = 1; epoch <= params.epochs; ++epoch) {
            streams.clear();
            for (int i = 0; i < N; ++i) streams.emplace_back(derive_stream(params.seed, epoch, i));
            pool.parallel_for(N, [&](int i) { particles[i] = Mode::init(mask, params, shared, streams[i]); });

            for (int step = 0; step < params.inner_steps; ++step) {
                pool.parallel_for(N, [&](int i) {
                    Mode::inner_step(particles[i], ctrl, mask, q, g, params, shared, streams[i]);
                });
                for (int i = 0; i < N; ++i) {  // strict improve-if-better, index order
                    if (particles[i].fitness > best_fit) {
                        best_fit = particles[i].fitness;
                        ctrl.best_fitness = Mode::report_fitness(best_fit);
                        ctrl.has_best = true;
                        if constexpr (std::is_same_v<Mode, detail::FloatMode>) {
                            ctrl.best_S = particles[i].state.S;
                        } else {
                            shared.qctrl.has_best = true;
                            shared.qctrl.best_Sq = particles[i].Sq;
                        }
                    }
                }
                result.evaluations += N;
                if (hook) {
                    for (int i = 0; i < N; ++i)
                        hook(epoch, i, step, Mode::report_fitness(particles[i].fitness), ctrl.best_fitness);
                }
            }

            std::vector<std::optional<DiscreteMapping>> found(N);
            pool.parallel_for(N, [&](int i) { found[i] = Mode::discretize(particles[i], mask, refined, q, g, shared); });
            bool any_feasible = false;
            for (int i = 0; i < N; ++i) {
                if (!found[i].has_value()) continue;
                if (!is_embedding(*found[i], q, g))
                    throw InvariantError("repair produced a non-embedding");  // unreachable guard
                any_feasible = true;
                if (seen.insert(found[i]->to).second) {
                    ctrl.feasible.push_back(*found[i]);
                    result.mappings.push_back(*found[i]);
                }
            }
            if (any_feasible) Mode::update_consensus(particles, mask, params, shared, ctrl);
            result.epochs_used = epoch;

            if (params.time_budget_ms > 0) {
                const auto elapsed =
                    std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t_start);
                if (elapsed.count() > params.time_budget_ms && epoch < params.epochs) {
                    result.best_fitness = ctrl.best_fitness;
                    result.wall_model_cycles =
                        static_cast<int64_t>(result.epochs_used) * params.inner_steps * N * cost_per_iteration(n, m);
                    throw TimeoutError(result);
                }
            }
        }
        result.best_fitness = ctrl.best_fitness;
        result.wall_model_cycles =
            static_cast<int64_t>(result.epochs_used) * params.inner_steps * N * cost_per_iteration(n, m);
    };

    if (params.mode == SwarmMode::Float) {
        run_mode(detail::FloatMode{});
    } else {
        run_mode(detail::QuantizedMode{});
    }
    return result;
}

}  // namespace swarmsched
