#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "swarmsched/errors.hpp"
#include "swarmsched/rng.hpp"
#include "swarmsched/sim/scenario.hpp"
#include "swarmsched/sim/simulator.hpp"
#include "swarmsched/sim/trace.hpp"
#include "swarmsched/textio.hpp"

namespace swarmsched::sim {

// Per-task total latency (arrival to completion, scheduling included),
// keyed by task id. Every arrived task gets a TaskDone, so both maps cover
// the same ids for a completed simulation.
inline std::map<int, double> task_latencies(const Trace& trace) {
    std::map<int, double> arrive, done;
    for (const TraceEvent& e : trace.events) {
        if (e.kind == EventKind::Arrive) arrive[e.task] = e.time;
        if (e.kind == EventKind::TaskDone) done[e.task] = e.time;
    }
    std::map<int, double> latency;
    for (const auto& [task, t0] : arrive) {
        auto it = done.find(task);
        if (it == done.end()) throw MismatchError("trace has no completion for task " + format_int(task));
        latency[task] = it->second - t0;
    }
    return latency;
}

// Ratio of summed per-task latencies, baseline over measured. Both traces
// must cover the same task ids.
inline double compute_speedup(const Trace& base, const Trace& ours) {
    const auto lat_base = task_latencies(base);
    const auto lat_ours = task_latencies(ours);
    if (lat_base.size() != lat_ours.size()) throw MismatchError("traces cover different task sets");
    double sum_base = 0, sum_ours = 0;
    for (const auto& [task, l] : lat_base) {
        if (!lat_ours.count(task)) throw MismatchError("traces cover different task sets");
        sum_base += l;
        sum_ours += lat_ours.at(task);
    }
    if (sum_ours == 0) return 1.0;  // both empty or instantaneous
    return sum_base / sum_ours;
}

inline double compute_energy_joules(const Trace& trace, const EnergyConstants& ec) {
    const double pj = static_cast<double>(trace.mac_ops) * ec.mac_pj +
                      static_cast<double>(trace.noc_bit_hops) * ec.noc_pj_per_bit_hop +
                      static_cast<double>(trace.dram_bytes) * ec.dram_pj_per_byte +
                      static_cast<double>(trace.sram_bytes) * ec.sram_pj_per_byte;
    return pj * 1e-12;
}

inline int count_deadline_misses(const Trace& trace) {
    int n = 0;
    for (const TraceEvent& e : trace.events)
        if (e.kind == EventKind::DeadlineMiss) ++n;
    return n;
}

// Largest sustainable arrival rate, by bisection on lambda with common
// random numbers: each Poisson template's unit-rate arrival sequence is
// drawn once from its seed and rescaled by 1/lambda per probe, so probes
// differ only in rate, never in luck. Success = a probe's simulation ends
// with zero deadline misses. Returns the largest probed lambda that
// succeeded (the bisection's lower envelope, lambda_hi if it passes
// outright); throws NoFeasibleRateError when even lambda_lo fails.
inline double compute_lbt(const Scenario& sc, double lambda_lo, double lambda_hi, double tol,
                          const SimOptions& opt = {}) {
    if (!(lambda_lo > 0) || !(lambda_hi > lambda_lo)) throw ConfigError("need 0 < lambda_lo < lambda_hi");
    if (!(tol > 0)) throw ConfigError("tolerance must be positive");

    // unit-rate arrival times per Poisson template, enough for lambda_hi
    std::vector<std::vector<double>> units(sc.tasks.size());
    for (size_t i = 0; i < sc.tasks.size(); ++i) {
        if (!sc.tasks[i].poisson) continue;
        SplitMix64 rng(sc.tasks[i].poisson->seed);
        const double max_u = lambda_hi * sc.tasks[i].poisson->horizon;
        double u = 0.0;
        while (true) {
            u += -std::log(rng.uniform_open01());
            if (u > max_u) break;
            units[i].push_back(u);
        }
    }

    const auto probe = [&](double lambda) {
        std::vector<TaskInstance> instances;
        for (int i = 0; i < static_cast<int>(sc.tasks.size()); ++i) {
            if (sc.tasks[i].arrival) {
                instances.push_back({i, *sc.tasks[i].arrival});
                continue;
            }
            const double horizon = sc.tasks[i].poisson->horizon;
            for (double u : units[i]) {
                if (u > lambda * horizon) break;
                instances.push_back({i, u / lambda});
            }
        }
        const Trace trace = run_simulation_with_arrivals(sc, instances, opt);
        return count_deadline_misses(trace) == 0;
    };

    if (!probe(lambda_lo)) throw NoFeasibleRateError("no feasible rate: lambda_lo already misses deadlines");
    if (probe(lambda_hi)) return lambda_hi;
    double lo = lambda_lo, hi = lambda_hi;
    while (hi - lo > tol) {
        const double mid = lo + (hi - lo) / 2.0;
        if (probe(mid))
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

// metric,value,unit rows; the stable machine-readable summary format.
struct MetricRow {
    std::string metric;
    double value = 0;
    std::string unit;
};

inline std::string metrics_to_csv(const std::vector<MetricRow>& rows) {
    std::string out = "metric,value,unit\n";
    for (const MetricRow& r : rows) out += r.metric + "," + format_real(r.value) + "," + r.unit + "\n";
    return out;
}

}  // namespace swarmsched::sim
