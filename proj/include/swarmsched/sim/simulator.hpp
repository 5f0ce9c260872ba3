#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "swarmsched/errors.hpp"
#include "swarmsched/graph.hpp"
#include "swarmsched/rng.hpp"
#include "swarmsched/sim/platform.hpp"
#include "swarmsched/sim/scenario.hpp"
#include "swarmsched/sim/trace.hpp"
#include "swarmsched/sim/workload.hpp"
#include "swarmsched/swarm.hpp"
#include "swarmsched/textio.hpp"
#include "swarmsched/ullmann.hpp"

namespace swarmsched::sim {

// Per-transfer payload model: every tile-graph edge moves one activation
// buffer from producer to consumer; every tile loads its weights once.
constexpr int64_t kActivationBytes = 4096;
constexpr int64_t kWeightBytes = 1024;
// SRAM traffic per MAC: one operand read + one accumulator write, in bytes.
constexpr int64_t kSramBytesPerMac = 2;

// Execution-time slack in seconds: time to the deadline minus the remaining
// runtime at the task's current allocation (PEs run 1 MAC per cycle, so
// remaining cycles = remaining_work / allocated PEs). A task holding no PEs
// but still owing work cannot finish as allocated: slack is -infinity.
inline double slack_seconds(int64_t deadline_cy, int64_t now_cy, int64_t remaining_work, int allocated_pes,
                            double clock_hz) {
    if (remaining_work == 0) return static_cast<double>(deadline_cy - now_cy) / clock_hz;
    if (allocated_pes <= 0) return -std::numeric_limits<double>::infinity();
    const double remaining_cycles = static_cast<double>(remaining_work) / allocated_pes;
    return (static_cast<double>(deadline_cy - now_cy) - remaining_cycles) / clock_hz;
}

// Scheduler view of the machine at one instant, enough to build target
// graphs and score victims without reaching into simulator internals.
struct OccupancyView {
    std::vector<int> holder_task;         // per global PE id; -1 = idle
    std::vector<Priority> task_priority;  // indexed by task id
    std::vector<double> task_slack;       // indexed by task id
};

// The graph the matcher may map onto: every idle PE, plus per engine up to
// ceil(rho * pes_per_engine) PEs held by strictly-lower-priority tasks,
// preferring holders with the largest slack (ties: lower task id, then
// lower PE id). Equal-or-higher-priority holders are untouchable. Edges are
// the mesh links induced on the selected PEs. Returns the graph and the
// vertex -> PE id map; an empty graph is a valid, unmatchable result.
inline std::pair<LabeledDigraph, std::vector<int>> build_target_graph(const Platform& platform,
                                                                      const OccupancyView& occ, double rho,
                                                                      Priority requester) {
    if (!(rho > 0 && rho <= 1)) throw ConfigError("preemption ratio must be in (0, 1]");
    if (static_cast<int>(occ.holder_task.size()) != platform.total_pes())
        throw DimensionError("occupancy view does not match platform PE count");
    const int per = platform.pes_per_engine();
    const int cap = static_cast<int>(std::ceil(rho * per));
    std::vector<int> pes;
    for (int e = 0; e < platform.engines; ++e) {
        std::vector<int> preemptible;
        for (int l = 0; l < per; ++l) {
            const int pe = e * per + l;
            const int holder = occ.holder_task[pe];
            if (holder < 0) {
                pes.push_back(pe);
            } else if (occ.task_priority[holder] < requester) {
                preemptible.push_back(pe);
            }
        }
        std::stable_sort(preemptible.begin(), preemptible.end(), [&](int a, int b) {
            const int ha = occ.holder_task[a], hb = occ.holder_task[b];
            if (occ.task_slack[ha] != occ.task_slack[hb]) return occ.task_slack[ha] > occ.task_slack[hb];
            if (ha != hb) return ha < hb;
            return a < b;
        });
        const int take = std::min<int>(cap, static_cast<int>(preemptible.size()));
        pes.insert(pes.end(), preemptible.begin(), preemptible.begin() + take);
    }
    return mesh_subgraph(platform, pes);
}

// Picks the least-disruptive mapping: score each by the minimum slack among
// the distinct tasks it would displace (+infinity when it displaces none)
// and take the maximum. Ties fall to fewer displaced tasks, then the
// lexicographically smallest sorted displaced-id list, then the
// lexicographically smallest mapping. Returns an index into `mappings`.
inline int choose_victim(const std::vector<DiscreteMapping>& mappings, const std::vector<int>& pe_of_vertex,
                         const OccupancyView& occ) {
    if (mappings.empty()) throw EmptyVectorError("choose_victim: no mappings");
    int best = -1;
    double best_score = 0;
    std::vector<int> best_displaced;
    for (int idx = 0; idx < static_cast<int>(mappings.size()); ++idx) {
        std::vector<int> displaced;
        for (int v = 0; v < mappings[idx].size(); ++v) {
            const int holder = occ.holder_task[pe_of_vertex[mappings[idx][v]]];
            if (holder >= 0) displaced.push_back(holder);
        }
        std::sort(displaced.begin(), displaced.end());
        displaced.erase(std::unique(displaced.begin(), displaced.end()), displaced.end());
        double score = std::numeric_limits<double>::infinity();
        for (int t : displaced) score = std::min(score, occ.task_slack[t]);
        bool better = false;
        if (best < 0 || score > best_score) {
            better = true;
        } else if (score == best_score) {
            if (displaced.size() != best_displaced.size())
                better = displaced.size() < best_displaced.size();
            else if (displaced != best_displaced)
                better = displaced < best_displaced;
            else
                better = mappings[idx].to < mappings[best].to;
        }
        if (better) {
            best = idx;
            best_score = score;
            best_displaced = std::move(displaced);
        }
    }
    return best;
}

// Modeled cycle count of one matcher run on the accelerator: T * K inner
// steps, particles spread across engines, each iteration's MAC cost spread
// across one engine's PE array.
inline int64_t estimate_matcher_cycles(const SwarmParams& params, int n, int m, const Platform& platform) {
    const int64_t cost = cost_per_iteration(n, m);
    const int64_t particle_rounds = (params.particles + platform.engines - 1) / platform.engines;
    const int64_t iter_cycles = (cost + platform.pes_per_engine() - 1) / platform.pes_per_engine();
    return static_cast<int64_t>(params.epochs) * params.inner_steps * particle_rounds * iter_cycles;
}

struct SimOptions {
    // Serial-CPU reference model: the same matcher, but charged as one
    // worker at baseline_cpu_clock_mhz, with the full latency blocking the
    // urgent task's start. Everything else is identical.
    bool serial_baseline = false;
    int matcher_workers = 1;
};

// One concrete arrival of a task template.
struct TaskInstance {
    int spec_index = 0;
    double arrival_s = 0.0;
};

// Expands templates into instances: explicit-arrival tasks give one
// instance; Poisson templates draw exponential gaps at rate lambda from
// their own seed until the horizon. Instance order (= task id order) is
// template order, chronological within a template.
inline std::vector<TaskInstance> expand_arrivals(const Scenario& sc) {
    std::vector<TaskInstance> out;
    for (int i = 0; i < static_cast<int>(sc.tasks.size()); ++i) {
        const TaskSpec& spec = sc.tasks[i];
        if (spec.arrival) {
            out.push_back({i, *spec.arrival});
            continue;
        }
        SplitMix64 rng(spec.poisson->seed);
        double t = 0.0;
        while (true) {
            t += -std::log(rng.uniform_open01()) / spec.poisson->lambda;
            if (t > spec.poisson->horizon) break;
            out.push_back({i, t});
        }
    }
    return out;
}

namespace detail {

enum class TileState : uint8_t { Unplaced, Held, Running, Preempted, Done };

struct SimTile {
    int pe = -1;             // assigned PE; kept across preemption (resume in place)
    TileState state = TileState::Unplaced;
    int64_t remaining = 0;   // cycles of work left
    int64_t started_at = 0;  // cycle of the last Running transition
    int64_t gen = 0;         // bumped on preemption; stale TileDone events are dropped
    bool weights_loaded = false;
};

struct SimTask {
    int id = 0;
    int spec = 0;
    Priority priority = Priority::Normal;
    int64_t arrival_cy = 0;
    int64_t deadline_cy = 0;
    TiledWorkload tiles;
    std::vector<SimTile> tile;
    int tiles_done = 0;
    int held_pes = 0;  // tiles currently holding a PE (Held or Running)
    double rho = 0.0;  // current attempt's preemption ratio (urgent only)
    int attempt_no = 0;
    bool finished = false;
    bool missed = false;
    int64_t completion_cy = -1;
};

// In-flight scheduling attempt: the matcher ran against a snapshot at
// SchedStart; its mappings are validated and applied at SchedDone.
struct Attempt {
    int task = -1;
    double rho = 1.0;
    std::vector<DiscreteMapping> mappings;
    std::vector<int> pe_map;  // snapshot target-graph vertex -> PE id
};

enum class QKind : uint8_t { TileDone = 0, Arrive = 1, SchedDone = 2 };

struct QEvent {
    int64_t time = 0;
    QKind kind = QKind::Arrive;
    int task = -1;
    int tile = -1;
    int64_t gen = 0;
    int attempt = -1;

    std::tuple<int64_t, int, int, int, int64_t, int> key() const {
        return {time, static_cast<int>(kind), task, tile, gen, attempt};
    }
};

struct QEventAfter {
    bool operator()(const QEvent& a, const QEvent& b) const { return a.key() > b.key(); }
};

class Simulator {
  public:
    Simulator(const Scenario& sc, const std::vector<TaskInstance>& instances, const SimOptions& opt)
        : sc_(sc), opt_(opt), clock_hz_(sc.platform.clock_hz()) {
        sc_.validate();
        holder_task_.assign(sc_.platform.total_pes(), -1);
        pe_tile_.assign(sc_.platform.total_pes(), -1);
        tasks_.reserve(instances.size());
        for (int id = 0; id < static_cast<int>(instances.size()); ++id) {
            const TaskSpec& spec = sc_.tasks[instances[id].spec_index];
            SimTask t;
            t.id = id;
            t.spec = instances[id].spec_index;
            t.priority = spec.priority;
            t.arrival_cy = std::llround(instances[id].arrival_s * clock_hz_);
            t.tiles = tile_workload(spec.model, sc_.platform);
            const int64_t ideal = ideal_makespan_cycles(t.tiles);
            t.deadline_cy =
                t.arrival_cy + std::llround(std::ceil(spec.deadline_slack_factor * static_cast<double>(ideal)));
            t.tile.resize(t.tiles.size());
            for (int v = 0; v < t.tiles.size(); ++v) t.tile[v].remaining = t.tiles.tile_work[v];
            tasks_.push_back(std::move(t));
            push({tasks_.back().arrival_cy, QKind::Arrive, id, -1, 0, -1});
        }
    }

    Trace run() {
        while (!queue_.empty()) {
            const QEvent e = queue_.top();
            queue_.pop();
            switch (e.kind) {
                case QKind::Arrive:
                    on_arrive(e.task, e.time);
                    break;
                case QKind::TileDone:
                    on_tile_done(e.task, e.tile, e.gen, e.time);
                    break;
                case QKind::SchedDone:
                    on_sched_done(e.attempt, e.time);
                    break;
            }
        }
        return std::move(trace_);
    }

  private:
    void push(QEvent e) { queue_.push(e); }

    void emit(int64_t cy, EventKind k, int task, std::string detail) {
        trace_.append(static_cast<double>(cy) / clock_hz_, k, task, std::move(detail));
    }

    double live_slack(const SimTask& t, int64_t now) const {
        int64_t remaining = 0;
        for (int v = 0; v < t.tiles.size(); ++v) {
            const SimTile& tl = t.tile[v];
            if (tl.state == TileState::Done) continue;
            remaining += tl.state == TileState::Running ? tl.remaining - (now - tl.started_at) : tl.remaining;
        }
        return slack_seconds(t.deadline_cy, now, remaining, t.held_pes, clock_hz_);
    }

    OccupancyView occupancy(int64_t now) const {
        OccupancyView occ;
        occ.holder_task = holder_task_;
        occ.task_priority.resize(tasks_.size());
        occ.task_slack.resize(tasks_.size());
        for (const SimTask& t : tasks_) {
            occ.task_priority[t.id] = t.priority;
            occ.task_slack[t.id] = live_slack(t, now);
        }
        return occ;
    }

    int64_t cpu_to_acc_cycles(int64_t cpu_cycles) const {
        return static_cast<int64_t>(
            std::ceil(static_cast<double>(cpu_cycles) * sc_.platform.clock_mhz / sc_.baseline_cpu_clock_mhz));
    }

    // --- scheduling ------------------------------------------------------

    void on_arrive(int id, int64_t now) {
        SimTask& t = tasks_[id];
        emit(now, EventKind::Arrive,
             id, "priority=" + std::string(priority_name(t.priority)) + " tiles=" + format_int(t.tiles.size()));
        if (t.priority == Priority::Urgent) {
            t.rho = sc_.rho0;
            start_attempt(id, now);
        } else {
            // Non-urgent tasks take the FIFO path; the head is attempted
            // right away, so on an otherwise quiet machine the verdict
            // (placed or permanently unplaceable) lands immediately instead
            // of waiting for a PE-free event that may never come.
            fifo_.push_back(id);
            try_fifo(now);
        }
    }

    // Urgent path: matcher against a snapshot, applied after the modeled
    // scheduling latency. The matcher itself runs here (its inputs are the
    // snapshot); only its cost is paid in simulated time.
    void start_attempt(int id, int64_t now) {
        SimTask& t = tasks_[id];
        ++t.attempt_no;
        emit(now, EventKind::SchedStart, id,
             "rho=" + format_real(t.rho) + " attempt=" + format_int(t.attempt_no));
        auto [target, pe_map] = build_target_graph(sc_.platform, occupancy(now), t.rho, t.priority);
        Attempt a;
        a.task = id;
        a.rho = t.rho;
        a.pe_map = std::move(pe_map);
        const int n = t.tiles.size();
        const int m = target.size();
        int64_t latency;
        bool trivial = n > m;
        if (!trivial) trivial = build_mask(t.tiles.graph, target).has_empty_row();
        if (trivial) {
            // Infeasibility is visible from the compatibility mask alone;
            // charge only the mask build, spread over one engine's PEs (or
            // run serially on the CPU in the baseline model).
            const int64_t mask_ops = std::max<int64_t>(1, static_cast<int64_t>(n) * m);
            latency = opt_.serial_baseline
                          ? cpu_to_acc_cycles(mask_ops)
                          : (mask_ops + sc_.platform.pes_per_engine() - 1) / sc_.platform.pes_per_engine();
        } else {
            SwarmParams mp = sc_.matcher;
            mp.workers = opt_.serial_baseline ? 1 : opt_.matcher_workers;
            try {
                a.mappings = run_matcher(t.tiles.graph, target, mp).mappings;
            } catch (const InfeasibleError&) {
                // defensive: the trivial checks above should have caught it
            }
            latency = opt_.serial_baseline
                          ? cpu_to_acc_cycles(static_cast<int64_t>(mp.epochs) * mp.inner_steps * mp.particles *
                                              cost_per_iteration(n, m))
                          : estimate_matcher_cycles(mp, n, m, sc_.platform);
        }
        attempts_.push_back(std::move(a));
        push({now + std::max<int64_t>(1, latency), QKind::SchedDone, id, -1, 0,
              static_cast<int>(attempts_.size()) - 1});
    }

    void on_sched_done(int attempt_idx, int64_t now) {
        const Attempt a = attempts_[attempt_idx];  // by value: retries may grow attempts_
        SimTask& t = tasks_[a.task];
        const OccupancyView occ = occupancy(now);
        auto [target, pe_map] = build_target_graph(sc_.platform, occ, a.rho, t.priority);
        std::vector<uint8_t> allowed(sc_.platform.total_pes(), 0);
        for (int pe : pe_map) allowed[pe] = 1;
        std::vector<DiscreteMapping> valid;
        for (const DiscreteMapping& map : a.mappings) {
            bool ok = true;
            for (int v = 0; v < map.size() && ok; ++v) ok = allowed[a.pe_map[map[v]]] != 0;
            if (ok) valid.push_back(map);
        }
        if (!valid.empty()) {
            const int pick = choose_victim(valid, a.pe_map, occ);
            std::vector<int> pes(t.tiles.size());
            for (int v = 0; v < t.tiles.size(); ++v) pes[v] = a.pe_map[valid[pick][v]];
            verify_placement(t, pes, target, pe_map);
            emit(now, EventKind::SchedDone, a.task, "ok map=" + format_assignment(pes));
            place_task(a.task, pes, now);
            return;
        }
        if (a.rho < 1.0) {
            emit(now, EventKind::SchedDone, a.task, "fail");
            t.rho = std::min(1.0, a.rho * 2.0);
            start_attempt(a.task, now);
        } else {
            emit(now, EventKind::SchedDone, a.task, "fail queued");
            fifo_.push_back(a.task);
            try_fifo(now);  // the machine may already be drained
        }
    }

    // The placement must be an embedding of the tile graph into the target
    // graph in force right now; anything else is a scheduler bug.
    void verify_placement(const SimTask& t, const std::vector<int>& pes, const LabeledDigraph& target,
                          const std::vector<int>& pe_map) const {
        std::vector<int> vertex_of_pe(sc_.platform.total_pes(), -1);
        for (int v = 0; v < static_cast<int>(pe_map.size()); ++v) vertex_of_pe[pe_map[v]] = v;
        DiscreteMapping map;
        map.to.resize(pes.size());
        for (size_t v = 0; v < pes.size(); ++v) {
            map.to[v] = vertex_of_pe[pes[v]];
            if (map.to[v] < 0) throw InvariantError("placement uses a PE outside the current target graph");
        }
        if (!is_embedding(map, t.tiles.graph, target))
            throw InvariantError("placement is not an embedding of the tile graph");
    }

    static std::string format_assignment(const std::vector<int>& pes) {
        std::string s;
        for (size_t v = 0; v < pes.size(); ++v) {
            if (v) s += '|';
            s += format_int(static_cast<int64_t>(v)) + ":" + format_int(pes[v]);
        }
        return s;
    }

    // Zero-latency placement on idle PEs only (non-urgent arrivals, FIFO
    // pops). Bounded search normally; exhaustive once the machine is fully
    // idle, because a failure then is a permanent verdict.
    bool greedy_attempt(int id, int64_t now) {
        SimTask& t = tasks_[id];
        emit(now, EventKind::SchedStart, id, "fifo");
        std::vector<int> idle;
        for (int pe = 0; pe < sc_.platform.total_pes(); ++pe)
            if (holder_task_[pe] < 0) idle.push_back(pe);
        auto [target, pe_map] = mesh_subgraph(sc_.platform, idle);
        const int n = t.tiles.size();
        std::optional<DiscreteMapping> found;
        if (n <= target.size()) {
            const bool machine_empty = static_cast<int>(idle.size()) == sc_.platform.total_pes();
            found = find_embedding(t.tiles.graph, target, machine_empty ? 0 : 64LL * n * target.size());
        }
        if (!found) {
            emit(now, EventKind::SchedDone, id, "fail queued");
            return false;
        }
        std::vector<int> pes(n);
        for (int v = 0; v < n; ++v) pes[v] = pe_map[(*found)[v]];
        verify_placement(t, pes, target, pe_map);
        emit(now, EventKind::SchedDone, id, "ok map=" + format_assignment(pes));
        place_task(id, pes, now);
        return true;
    }

    // --- placement and execution -----------------------------------------

    void place_task(int id, const std::vector<int>& pes, int64_t now) {
        SimTask& t = tasks_[id];
        for (int v = 0; v < t.tiles.size(); ++v) {
            const int holder = holder_task_[pes[v]];
            if (holder >= 0) preempt_tile(holder, pe_tile_[pes[v]], id, now);
        }
        for (int v = 0; v < t.tiles.size(); ++v) {
            t.tile[v].pe = pes[v];
            t.tile[v].state = TileState::Held;
            holder_task_[pes[v]] = id;
            pe_tile_[pes[v]] = v;
            ++t.held_pes;
        }
        for (int v = 0; v < t.tiles.size(); ++v)
            if (deps_done(t, v)) start_tile(t, v, now);
    }

    bool deps_done(const SimTask& t, int v) const {
        for (int u = 0; u < t.tiles.size(); ++u)
            if (t.tiles.graph.adj(u, v) && t.tile[u].state != TileState::Done) return false;
        return true;
    }

    void preempt_tile(int victim, int v, int by, int64_t now) {
        SimTask& t = tasks_[victim];
        SimTile& tl = t.tile[v];
        if (tl.state == TileState::Running) {
            tl.remaining -= now - tl.started_at;
            ++tl.gen;  // cancels the scheduled TileDone
        }
        tl.state = TileState::Preempted;
        holder_task_[tl.pe] = -1;
        pe_tile_[tl.pe] = -1;
        --t.held_pes;
        waiting_[tl.pe].push_back({preempt_seq_++, victim, v});
        emit(now, EventKind::Preempt, victim,
             "tile=" + format_int(v) + " pe=" + format_int(tl.pe) + " by=" + format_int(by));
    }

    void start_tile(SimTask& t, int v, int64_t now) {
        SimTile& tl = t.tile[v];
        tl.state = TileState::Running;
        tl.started_at = now;
        if (!tl.weights_loaded) {
            trace_.dram_bytes += kWeightBytes;
            tl.weights_loaded = true;
        }
        emit(now, EventKind::TileStart, t.id, "tile=" + format_int(v) + " pe=" + format_int(tl.pe));
        push({now + tl.remaining, QKind::TileDone, t.id, v, tl.gen, -1});
    }

    void on_tile_done(int id, int v, int64_t gen, int64_t now) {
        SimTask& t = tasks_[id];
        SimTile& tl = t.tile[v];
        if (tl.state != TileState::Running || tl.gen != gen) return;  // stale after a preemption
        tl.state = TileState::Done;
        tl.remaining = 0;
        ++t.tiles_done;
        --t.held_pes;
        trace_.mac_ops += t.tiles.tile_work[v];
        trace_.sram_bytes += kSramBytesPerMac * t.tiles.tile_work[v];
        for (int w = 0; w < t.tiles.size(); ++w) {
            if (!t.tiles.graph.adj(v, w)) continue;
            if (sc_.link_mode == LinkMode::Tss)
                trace_.noc_bit_hops += 8 * kActivationBytes * sc_.platform.manhattan_hops(tl.pe, t.tile[w].pe);
            else
                trace_.dram_bytes += kActivationBytes;
        }
        emit(now, EventKind::TileDone, id, "tile=" + format_int(v) + " pe=" + format_int(tl.pe));
        const int pe = tl.pe;
        holder_task_[pe] = -1;
        pe_tile_[pe] = -1;
        free_pe(pe, now);
        for (int w = 0; w < t.tiles.size(); ++w)
            if (t.tiles.graph.adj(v, w) && t.tile[w].state == TileState::Held && deps_done(t, w))
                start_tile(t, w, now);
        if (t.tiles_done == t.tiles.size()) {
            t.finished = true;
            t.completion_cy = now;
            t.missed = now > t.deadline_cy;
            emit(now, EventKind::TaskDone, id, t.missed ? "missed=1" : "missed=0");
            if (t.missed)
                emit(now, EventKind::DeadlineMiss, id,
                     "by=" + format_real(static_cast<double>(now - t.deadline_cy) / clock_hz_));
        }
    }

    // A freed PE goes first to the tile preempted off it (highest task
    // priority first, then preemption order), otherwise to the FIFO queue.
    void free_pe(int pe, int64_t now) {
        auto it = waiting_.find(pe);
        if (it != waiting_.end() && !it->second.empty()) {
            auto& waiters = it->second;
            int pick = 0;
            for (int i = 1; i < static_cast<int>(waiters.size()); ++i) {
                const auto& [seq_i, task_i, tile_i] = waiters[i];
                const auto& [seq_p, task_p, tile_p] = waiters[pick];
                const Priority pi = tasks_[task_i].priority, pp = tasks_[task_p].priority;
                if (pi > pp || (pi == pp && seq_i < seq_p)) pick = i;
            }
            const auto picked = waiters[pick];
            waiters.erase(waiters.begin() + pick);
            resume_tile(std::get<1>(picked), std::get<2>(picked), now);
            return;
        }
        try_fifo(now);
    }

    void resume_tile(int id, int v, int64_t now) {
        SimTask& t = tasks_[id];
        SimTile& tl = t.tile[v];
        holder_task_[tl.pe] = id;
        pe_tile_[tl.pe] = v;
        ++t.held_pes;
        if (deps_done(t, v)) {
            tl.state = TileState::Running;
            tl.started_at = now;
            if (!tl.weights_loaded) {
                trace_.dram_bytes += kWeightBytes;
                tl.weights_loaded = true;
            }
            emit(now, EventKind::Resume,
                 id, "tile=" + format_int(v) + " pe=" + format_int(tl.pe) + " state=running");
            push({now + tl.remaining, QKind::TileDone, id, v, tl.gen, -1});
        } else {
            tl.state = TileState::Held;
            emit(now, EventKind::Resume,
                 id, "tile=" + format_int(v) + " pe=" + format_int(tl.pe) + " state=held");
        }
    }

    // Strict FIFO: only the head may place; a head that cannot even place
    // on a fully idle machine never will, and is recorded as missed.
    void try_fifo(int64_t now) {
        while (!fifo_.empty()) {
            const int id = fifo_.front();
            if (greedy_attempt(id, now)) {
                fifo_.pop_front();
                continue;
            }
            SimTask& t = tasks_[id];
            bool machine_empty = true;
            for (int holder : holder_task_)
                if (holder >= 0) machine_empty = false;
            if (machine_empty) {
                // the greedy search was exhaustive on the full mesh, so
                // this head can never place; more occupancy never helps
                fifo_.pop_front();
                t.finished = true;
                t.missed = true;
                t.completion_cy = now;
                emit(now, EventKind::TaskDone, id, "missed=1 unplaceable=1");
                emit(now, EventKind::DeadlineMiss, id, "by=unplaceable");
                continue;
            }
            break;
        }
    }

    const Scenario sc_;
    const SimOptions opt_;
    const double clock_hz_;
    std::vector<SimTask> tasks_;
    std::vector<Attempt> attempts_;
    std::vector<int> holder_task_;  // per PE: task id or -1
    std::vector<int> pe_tile_;      // per PE: holder's tile index or -1
    std::map<int, std::vector<std::tuple<int64_t, int, int>>> waiting_;  // pe -> (seq, task, tile)
    int64_t preempt_seq_ = 0;
    std::deque<int> fifo_;
    std::priority_queue<QEvent, std::vector<QEvent>, QEventAfter> queue_;
    Trace trace_;
};

}  // namespace detail

inline Trace run_simulation_with_arrivals(const Scenario& sc, const std::vector<TaskInstance>& instances,
                                          const SimOptions& opt = {}) {
    detail::Simulator sim(sc, instances, opt);
    return sim.run();
}

inline Trace run_simulation(const Scenario& sc, const SimOptions& opt = {}) {
    return run_simulation_with_arrivals(sc, expand_arrivals(sc), opt);
}

}  // namespace swarmsched::sim
