// Acceptance gate for the whole library: one self-contained check per
// shipped guarantee, printed as a PASS/FAIL checklist. Unlike the unit
// suites, every check here goes through public entry points only and pins
// its tolerances and frozen regression counts in this file, so a behaviour
// drift anywhere in the stack surfaces as a one-line diff in the output.
//
// Run it directly or through ctest; the exit code is the number of failed
// criteria clamped to 1.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "swarmsched/fixed_point.hpp"
#include "swarmsched/graph.hpp"
#include "swarmsched/relaxed.hpp"
#include "swarmsched/rng.hpp"
#include "swarmsched/sim/metrics.hpp"
#include "swarmsched/sim/scenario.hpp"
#include "swarmsched/sim/simulator.hpp"
#include "swarmsched/sim/workload.hpp"
#include "swarmsched/swarm.hpp"
#include "swarmsched/textio.hpp"
#include "swarmsched/ullmann.hpp"
#include "test_support.hpp"

namespace fs = std::filesystem;

using namespace swarmsched;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// --- checklist harness ----------------------------------------------------

int g_failures = 0;

void criterion(int id, const std::string& label, const std::function<bool(std::string&)>& body) {
    std::string note;
    bool ok = false;
    try {
        ok = body(note);
    } catch (const std::exception& e) {
        ok = false;
        note = std::string("unexpected exception: ") + e.what();
    }
    std::cout << (ok ? "PASS" : "FAIL") << " criterion " << id << ": " << label
              << (note.empty() ? "" : " [" + note + "]") << "\n";
    if (!ok) ++g_failures;
}

// --- shared random-instance suite for the exactness checks -----------------

struct OraclePair {
    LabeledDigraph q;
    LabeledDigraph g;
    std::vector<DiscreteMapping> truth;  // brute-force ground truth
};

const std::vector<OraclePair>& oracle_suite() {
    static const std::vector<OraclePair> suite = [] {
        std::vector<OraclePair> out;
        out.reserve(200);
        for (int trial = 0; trial < 200; ++trial) {
            SplitMix64 dims(derive_stream(11001, trial, 0));
            const int n = 2 + static_cast<int>(dims.next_below(4));      // 2..5
            const int m = n + static_cast<int>(dims.next_below(8 - n));  // n..7
            auto [q, g] = testsupport::random_instance(trial * 101 + 7, n, m, 40, 45);
            auto truth = testsupport::brute_force_embeddings(q, g);
            out.push_back({std::move(q), std::move(g), std::move(truth)});
        }
        return out;
    }();
    return suite;
}

// Criterion 1: exhaustive enumeration returns exactly the set of injections
// the brute-force oracle accepts, on 200 seeded instances, within a minute.
bool check_oracle_equivalence(std::string& note) {
    const auto t0 = Clock::now();
    size_t embeddings = 0;
    for (const OraclePair& pair : oracle_suite()) {
        const auto found = enumerate_embeddings(pair.q, pair.g);
        const std::set<DiscreteMapping> ours(found.begin(), found.end());
        const std::set<DiscreteMapping> truth(pair.truth.begin(), pair.truth.end());
        if (ours != truth) {
            note = "embedding sets differ";
            return false;
        }
        embeddings += pair.truth.size();
    }
    const double secs = seconds_since(t0);
    note = "200 instances, " + format_int(embeddings) + " embeddings, " + format_real(secs) + "s";
    return secs < 60.0;
}

// Criterion 2: refinement never prunes a cell any true embedding uses, and
// refining an already-refined mask changes nothing.
bool check_refinement_soundness(std::string& note) {
    for (const OraclePair& pair : oracle_suite()) {
        const CompatibilityMask refined = refine(build_mask(pair.q, pair.g), pair.q, pair.g);
        for (const DiscreteMapping& map : pair.truth)
            for (int i = 0; i < pair.q.size(); ++i)
                if (!refined.bits(i, map[i])) {
                    note = "a true embedding was pruned";
                    return false;
                }
        if (!(refine(refined, pair.q, pair.g) == refined)) {
            note = "refinement is not idempotent";
            return false;
        }
    }
    note = "no true embedding pruned, idempotent on all 200 masks";
    return true;
}

// Criterion 3: the matrix form of a planted exact match scores exactly zero,
// and the analytic gradient of the squared-error loss matches central
// finite differences to a 1e-4 relative tolerance.
bool check_fitness_and_gradient(std::string& note) {
    for (int trial = 0; trial < 50; ++trial) {
        SplitMix64 dims(derive_stream(11203, trial, 0));
        const int n = 3 + static_cast<int>(dims.next_below(3));
        const int m = n + 2 + static_cast<int>(dims.next_below(4));
        const auto inst =
            testsupport::planted_instance(trial * 13 + 1, n, m, 40, 20, /*extras_avoid_image=*/true);
        Matrix<double> s(n, m);
        for (int i = 0; i < n; ++i) s(i, inst.image[i]) = 1.0;
        if (fitness(s, inst.q, inst.g) != 0.0) {
            note = "planted exact match scored nonzero at trial " + format_int(trial);
            return false;
        }
    }
    const double h = 1e-5;
    for (uint64_t seed = 0; seed < 50; ++seed) {
        SplitMix64 rng(seed * 7 + 3);
        const int n = 3 + static_cast<int>(rng.next_below(3));
        const int m = n + 1 + static_cast<int>(rng.next_below(3));
        auto [q, g] = testsupport::random_instance(seed, n, m, 40, 40);
        Matrix<double> s(n, m);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < m; ++j) s(i, j) = rng.uniform01();
        const auto grad = fitness_gradient(s, q, g);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < m; ++j) {
                auto probe = s;
                probe(i, j) = s(i, j) + h;
                const double up = -fitness(probe, q, g);
                probe(i, j) = s(i, j) - h;
                const double down = -fitness(probe, q, g);
                const double fd = (up - down) / (2.0 * h);
                const double scale = std::max({std::abs(fd), std::abs(grad(i, j)), 1.0});
                if (std::abs(grad(i, j) - fd) > 1e-4 * scale) {
                    note = "gradient mismatch at seed " + format_int(seed);
                    return false;
                }
            }
        }
    }
    note = "50 planted zeros exact, gradients match on 50 instances";
    return true;
}

// --- planted-recovery sweep shared by the success and parity checks --------

constexpr int kPlantedSeeds = 100;
// Frozen when this gate was first brought up; any drift in matcher behaviour
// on the fixed seeds must be deliberate and re-frozen here.
constexpr int kPlantedFrozenFloatPasses = 100;

struct PlantedSweep {
    int float_ok = 0;
    int quant_ok = 0;
    int quant_on_float_ok = 0;  // quantized successes among float successes
    bool mappings_valid = true;
    double float_seconds = 0;
};

const PlantedSweep& planted_sweep() {
    static const PlantedSweep sweep = [] {
        PlantedSweep out;
        std::vector<bool> float_pass(kPlantedSeeds, false);
        const auto t0 = Clock::now();
        for (int seed = 0; seed < kPlantedSeeds; ++seed) {
            const auto inst = testsupport::planted_instance(seed, 6, 12, 35, 15, false);
            SwarmParams params;
            params.seed = seed;
            const MatchResult res = run_matcher(inst.q, inst.g, params);
            for (const DiscreteMapping& map : res.mappings)
                if (!is_embedding(map, inst.q, inst.g)) out.mappings_valid = false;
            float_pass[seed] = !res.mappings.empty();
            if (float_pass[seed]) ++out.float_ok;
        }
        out.float_seconds = seconds_since(t0);
        for (int seed = 0; seed < kPlantedSeeds; ++seed) {
            const auto inst = testsupport::planted_instance(seed, 6, 12, 35, 15, false);
            SwarmParams params;
            params.seed = seed;
            params.mode = SwarmMode::Quantized;
            const bool ok = !run_matcher(inst.q, inst.g, params).mappings.empty();
            if (ok) ++out.quant_ok;
            if (ok && float_pass[seed]) ++out.quant_on_float_ok;
        }
        return out;
    }();
    return sweep;
}

// Criterion 4: with default parameters the matcher recovers at least 90 of
// 100 planted instances, the exact count is frozen, every returned mapping
// is a real embedding, and the sweep stays under its time budget.
bool check_planted_success(std::string& note) {
    const PlantedSweep& sweep = planted_sweep();
    note = format_int(sweep.float_ok) + "/" + format_int(kPlantedSeeds) + " recovered in " +
           format_real(sweep.float_seconds) + "s";
    if (!sweep.mappings_valid) {
        note += ", an emitted mapping was not an embedding";
        return false;
    }
    if (sweep.float_ok != kPlantedFrozenFloatPasses) {
        note += ", expected frozen count " + format_int(kPlantedFrozenFloatPasses);
        return false;
    }
    return sweep.float_ok >= 90 && sweep.float_seconds < 120.0;
}

// Criterion 5: on a sparse planted suite where search is genuinely hard, the
// relaxed update must solve at least as many instances as the hard-rounding
// ablation, with both sides on identical seeds.
bool check_relaxation_ablation(std::string& note) {
    int relaxed_ok = 0, hard_ok = 0;
    for (int seed = 0; seed < 50; ++seed) {
        const auto inst = testsupport::planted_instance(seed, 12, 30, 15, 12, false);
        SwarmParams relaxed;
        relaxed.seed = seed;
        SwarmParams hard = relaxed;
        hard.hard_round = true;
        if (!run_matcher(inst.q, inst.g, relaxed).mappings.empty()) ++relaxed_ok;
        if (!run_matcher(inst.q, inst.g, hard).mappings.empty()) ++hard_ok;
    }
    note = "relaxed " + format_int(relaxed_ok) + "/50 vs hard rounding " + format_int(hard_ok) + "/50";
    return relaxed_ok >= hard_ok;
}

// Criterion 6: the integer datapath succeeds on at least 90% of the float
// mode's wins, quantization round-trips within 2/256 with rows summing to
// exactly 256, and quantized results are identical across worker counts.
bool check_quantized_parity(std::string& note) {
    const PlantedSweep& sweep = planted_sweep();
    if (10 * sweep.quant_on_float_ok < 9 * sweep.float_ok) {
        note = "parity " + format_int(sweep.quant_on_float_ok) + "/" + format_int(sweep.float_ok);
        return false;
    }
    for (int trial = 0; trial < 50; ++trial) {
        SplitMix64 rng(derive_stream(11406, trial, 0));
        const int n = 2 + static_cast<int>(rng.next_below(7));
        const int m = n + static_cast<int>(rng.next_below(9));
        auto [q, g] = testsupport::random_instance(trial * 3 + 11, n, m, 40, 50);
        const CompatibilityMask mask = build_mask(q, g);
        if (mask.has_empty_row()) continue;
        Matrix<double> s(n, m);
        for (int i = 0; i < n; ++i) {
            double row_sum = 0;
            for (int j = 0; j < m; ++j)
                if (mask.bits(i, j)) row_sum += s(i, j) = 0.05 + rng.uniform01();
            for (int j = 0; j < m; ++j) s(i, j) /= row_sum;
        }
        const QuantizedMapping qm = quantize_mapping(s, mask);
        for (int i = 0; i < n; ++i) {
            int sum = 0;
            for (int j = 0; j < m; ++j) sum += qm.Sq(i, j);
            if (sum != 256) {
                note = "quantized row sums to " + format_int(sum);
                return false;
            }
        }
        const Matrix<double> back = dequantize(qm);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < m; ++j)
                if (std::abs(back(i, j) - s(i, j)) > 2.0 / 256.0 + 1e-12) {
                    note = "round-trip error above 2/256";
                    return false;
                }
    }
    for (int seed = 0; seed < 5; ++seed) {
        const auto inst = testsupport::planted_instance(seed, 6, 12, 35, 15, false);
        SwarmParams one;
        one.seed = seed;
        one.mode = SwarmMode::Quantized;
        SwarmParams three = one;
        three.workers = 3;
        if (!(run_matcher(inst.q, inst.g, one) == run_matcher(inst.q, inst.g, three))) {
            note = "worker count changed a quantized result";
            return false;
        }
    }
    note = "parity " + format_int(sweep.quant_on_float_ok) + "/" + format_int(sweep.float_ok) +
           ", round trips within 2/256, worker-count invariant";
    return true;
}

// --- command-line reproducibility ------------------------------------------

const std::string kCli = CLI_PATH;

const char* kPath3 = R"({"n": 3, "edges": [[0,1],[1,2]], "kinds": ["mac","mac","mac"]})";
const char* kCycle4 = R"({"n": 4, "edges": [[0,1],[1,2],[2,3],[3,0]], "kinds": ["mac","mac","mac","mac"]})";
const char* kOneLayer = R"({"n": 1, "edges": [], "kinds": ["mac"], "work": [1]})";
const char* kTwoLayerChain = R"({"n": 2, "edges": [[0,1]], "kinds": ["mac","mac"], "work": [4, 4]})";

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("swarmsched_acceptance_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

int run_cli(const fs::path& dir, const std::string& args) {
    const std::string cmd =
        "cd " + dir.string() + " && " + kCli + " " + args + " > stdout.txt 2> stderr.txt";
    const int status = std::system(cmd.c_str());
    if (status < 0 || !WIFEXITED(status)) return -1;
    return WEXITSTATUS(status);
}

bool same_bytes(const fs::path& a, const fs::path& b) {
    return read_text_file(a.string()) == read_text_file(b.string());
}

void write_match_inputs(const fs::path& dir) {
    write_text_file((dir / "q.json").string(), kPath3);
    write_text_file((dir / "g.json").string(), kCycle4);
}

void write_sim_inputs(const fs::path& dir) {
    write_text_file((dir / "wl_chain.json").string(), kTwoLayerChain);
    write_text_file((dir / "wl_one.json").string(), kOneLayer);
    write_text_file((dir / "scenario.json").string(), R"({
      "platform": {"engines": 1, "pe_rows": 2, "pe_cols": 2, "clock_mhz": 1.0},
      "matcher": {"particles": 2, "epochs": 1, "inner": 2, "seed": 3},
      "tasks": [
        {"model_file": "wl_chain.json", "arrival": 0.0},
        {"model_file": "wl_one.json", "arrival": 2e-6, "priority": "urgent"},
        {"model_file": "wl_one.json", "poisson": {"lambda": 20000, "horizon": 1e-4, "seed": 5}}
      ]
    })");
}

// Criterion 7: repeating any command-line invocation yields byte-identical
// output files, and the matcher's results do not depend on worker count.
bool check_cli_determinism(std::string& note) {
    const std::string match_args = "match --query q.json --target g.json --seed 5 --trace steps.csv";
    const fs::path ma = fresh_dir("match_a"), mb = fresh_dir("match_b"), mc = fresh_dir("match_c");
    for (const fs::path& dir : {ma, mb, mc}) write_match_inputs(dir);
    if (run_cli(ma, match_args) != 0 || run_cli(mb, match_args) != 0 ||
        run_cli(mc, match_args + " --workers 3") != 0) {
        note = "a match run failed";
        return false;
    }
    for (const char* file : {"mappings.csv", "steps.csv", "stdout.txt"})
        if (!same_bytes(ma / file, mb / file)) {
            note = std::string("match rerun changed ") + file;
            return false;
        }
    for (const char* file : {"mappings.csv", "steps.csv"})
        if (!same_bytes(ma / file, mc / file)) {
            note = std::string("worker count changed ") + file;
            return false;
        }

    const fs::path sa = fresh_dir("sim_a"), sb = fresh_dir("sim_b");
    for (const fs::path& dir : {sa, sb}) write_sim_inputs(dir);
    if (run_cli(sa, "simulate --scenario scenario.json") != 0 ||
        run_cli(sb, "simulate --scenario scenario.json") != 0) {
        note = "a simulate run failed";
        return false;
    }
    for (const char* file : {"trace.csv", "metrics.csv", "stdout.txt"})
        if (!same_bytes(sa / file, sb / file)) {
            note = std::string("simulate rerun changed ") + file;
            return false;
        }

    const fs::path ga = fresh_dir("gen_a"), gb = fresh_dir("gen_b");
    if (run_cli(ga, "gen --class complex --seed 9") != 0 ||
        run_cli(gb, "gen --class complex --seed 9") != 0) {
        note = "a gen run failed";
        return false;
    }
    if (!same_bytes(ga / "workload.json", gb / "workload.json")) {
        note = "gen rerun changed workload.json";
        return false;
    }
    note = "match, simulate, and gen reruns byte-identical; workers 1 == 3";
    return true;
}

// --- scheduler scenario suite ----------------------------------------------

sim::WorkloadModel chain_model(const std::vector<int64_t>& work) {
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i + 1 < static_cast<int>(work.size()); ++i) edges.emplace_back(i, i + 1);
    sim::WorkloadModel model;
    model.graph = LabeledDigraph(static_cast<int>(work.size()), edges,
                                 std::vector<ComputeKind>(work.size(), ComputeKind::Generic));
    model.work = work;
    return model;
}

struct BuiltScenario {
    sim::Scenario sc;
    int urgent_task = -1;
};

// Twenty seeded scenarios in two flavours. Even indices squeeze an urgent
// singleton onto a machine a background chain has fully booked, which forces
// a preemption with a one-cycle scheduling latency we can predict. Odd
// indices are multi-engine duels sized so the parallel matcher's modeled
// latency beats the serial-CPU baseline on the same urgent task.
BuiltScenario acceptance_scenario(int i) {
    SplitMix64 rng(derive_stream(8100, i, 0));
    sim::Scenario sc;
    sc.link_mode = (i % 3 == 0) ? sim::LinkMode::Lts : sim::LinkMode::Tss;
    sc.matcher.seed = derive_stream(8200, i, 0);
    sc.platform.clock_mhz = 700.0;
    const bool duel = (i % 2) != 0;
    if (!duel) {
        sc.platform.engines = 1;
        sc.platform.pe_rows = sc.platform.pe_cols = 2 + static_cast<int>(rng.next_below(2));
        sc.rho0 = 0.25;
        sc.matcher.particles = 1;
        sc.matcher.epochs = 1;
        sc.matcher.inner_steps = 1;
        const int64_t cap = sc.platform.pes_per_engine();
        const int layers = sc.platform.total_pes();

        sim::TaskSpec bg;
        bg.model = chain_model(std::vector<int64_t>(layers, cap));
        bg.priority = rng.next_below(2) ? sim::Priority::Normal : sim::Priority::Low;
        bg.arrival = 0.0;
        bg.deadline_slack_factor = 4.0 + static_cast<double>(rng.next_below(5));
        sc.tasks.push_back(bg);

        sim::TaskSpec urgent;
        urgent.model = chain_model({1 + static_cast<int64_t>(rng.next_below(cap))});
        urgent.priority = sim::Priority::Urgent;
        urgent.arrival = 1.0 / sc.platform.clock_hz();
        urgent.deadline_slack_factor = 3.0;
        sc.tasks.push_back(urgent);

        if (i % 4 == 0) {
            sim::TaskSpec tail;
            tail.model = chain_model({1 + static_cast<int64_t>(rng.next_below(cap))});
            tail.priority = sim::Priority::Normal;
            tail.arrival = static_cast<double>(cap + rng.next_below(2 * cap)) / sc.platform.clock_hz();
            tail.deadline_slack_factor = 6.0;
            sc.tasks.push_back(tail);
        }
        return {std::move(sc), 1};
    }
    sc.platform.engines = 2 + static_cast<int>(rng.next_below(3));
    sc.platform.pe_rows = sc.platform.pe_cols = 2 + static_cast<int>(rng.next_below(3));
    sc.rho0 = 1.0;
    sc.matcher.particles = 2 + static_cast<int>(rng.next_below(15));
    sc.matcher.epochs = 1 + static_cast<int>(rng.next_below(3));
    sc.matcher.inner_steps = 2 + static_cast<int>(rng.next_below(7));
    const int64_t cap = sc.platform.pes_per_engine();

    sim::TaskSpec bg;
    std::vector<int64_t> bg_work;
    const int bg_layers = 2 + static_cast<int>(rng.next_below(3));
    for (int l = 0; l < bg_layers; ++l)
        bg_work.push_back(cap * (1 + static_cast<int64_t>(rng.next_below(2))));
    bg.model = chain_model(bg_work);
    bg.priority = rng.next_below(2) ? sim::Priority::Normal : sim::Priority::Low;
    bg.arrival = 0.0;
    bg.deadline_slack_factor = 4.0 + static_cast<double>(rng.next_below(5));
    sc.tasks.push_back(bg);

    sim::TaskSpec urgent;
    urgent.model = chain_model({1 + static_cast<int64_t>(rng.next_below(cap))});
    urgent.priority = sim::Priority::Urgent;
    urgent.arrival = static_cast<double>(2 + rng.next_below(4 * cap)) / sc.platform.clock_hz();
    urgent.deadline_slack_factor = 3.0;
    sc.tasks.push_back(urgent);

    if (i % 4 == 1) {
        sim::TaskSpec tail;
        std::vector<int64_t> tail_work;
        const int tail_layers = 1 + static_cast<int>(rng.next_below(2));
        for (int l = 0; l < tail_layers; ++l)
            tail_work.push_back(1 + static_cast<int64_t>(rng.next_below(cap)));
        tail.model = chain_model(tail_work);
        tail.priority = rng.next_below(2) ? sim::Priority::Normal : sim::Priority::Low;
        tail.arrival = static_cast<double>(rng.next_below(8 * cap)) / sc.platform.clock_hz();
        tail.deadline_slack_factor = 8.0;
        sc.tasks.push_back(tail);
    }
    return {std::move(sc), 1};
}

struct SuiteRun {
    std::vector<BuiltScenario> scenarios;
    std::vector<sim::Trace> traces;
};

const SuiteRun& scheduler_suite() {
    static const SuiteRun run = [] {
        SuiteRun out;
        for (int i = 0; i < 20; ++i) {
            out.scenarios.push_back(acceptance_scenario(i));
            out.traces.push_back(sim::run_simulation(out.scenarios.back().sc));
        }
        return out;
    }();
    return run;
}

std::string detail_value(const std::string& detail, const std::string& key) {
    const std::string want = key + "=";
    size_t pos = 0;
    while (pos < detail.size()) {
        size_t end = detail.find(' ', pos);
        if (end == std::string::npos) end = detail.size();
        const std::string token = detail.substr(pos, end - pos);
        if (token.rfind(want, 0) == 0) return token.substr(want.size());
        pos = end + 1;
    }
    return "";
}

// Parses "0:3|1:4" into the per-tile PE list {3, 4}.
std::vector<int> parse_mapped_pes(const std::string& text) {
    std::vector<int> pes;
    size_t pos = 0;
    while (pos < text.size()) {
        size_t bar = text.find('|', pos);
        if (bar == std::string::npos) bar = text.size();
        const std::string entry = text.substr(pos, bar - pos);
        pes.push_back(std::stoi(entry.substr(entry.find(':') + 1)));
        pos = bar + 1;
    }
    return pes;
}

// Replays a trace against the scenario and returns the first invariant
// violation, or an empty string. The replay mirrors the scheduler's own
// bookkeeping: a successful placement books every mapped PE at once (tiles
// waiting on dependencies hold their PE without a start event), and any PE
// that was already booked must be handed over by a preemption emitted in the
// same cycle, directly after the placement.
std::string scheduler_violations(const sim::Scenario& sc, const sim::Trace& trace, int& preempts,
                                 int& placements) {
    std::vector<sim::TiledWorkload> tiled;
    tiled.reserve(sc.tasks.size());
    for (const sim::TaskSpec& t : sc.tasks) tiled.push_back(sim::tile_workload(t.model, sc.platform));

    struct Booking {
        int task;
        int tile;
        bool running;
    };
    std::map<int, Booking> booked;                      // pe -> occupant
    std::map<int, std::pair<int, int>> handover;        // pe -> (task, tile) owed a preempt
    std::map<std::pair<int, int>, int> outstanding;     // (task, tile) -> preempts minus resumes
    std::set<int> arrived, completed;

    for (const sim::TraceEvent& e : trace.events) {
        switch (e.kind) {
            case sim::EventKind::Arrive:
                arrived.insert(e.task);
                break;
            case sim::EventKind::SchedDone: {
                if (e.detail.rfind("ok map=", 0) != 0) break;
                if (!handover.empty()) return "a displaced tile was never preempted";
                const std::vector<int> pes = parse_mapped_pes(e.detail.substr(7));
                const sim::TiledWorkload& tw = tiled[e.task];
                if (static_cast<int>(pes.size()) != tw.size()) return "placement size mismatch";
                if (std::set<int>(pes.begin(), pes.end()).size() != pes.size())
                    return "placement assigns two tiles to one pe";
                for (int u = 0; u < tw.size(); ++u)
                    for (int v = 0; v < tw.size(); ++v)
                        if (tw.graph.has_edge(u, v) && !sc.platform.pes_adjacent(pes[u], pes[v]))
                            return "placement is not an embedding into the mesh";
                for (int v = 0; v < tw.size(); ++v) {
                    const auto it = booked.find(pes[v]);
                    if (it != booked.end()) {
                        handover[pes[v]] = {it->second.task, it->second.tile};
                    }
                    booked[pes[v]] = {e.task, v, false};
                }
                ++placements;
                break;
            }
            case sim::EventKind::Preempt: {
                const int pe = std::stoi(detail_value(e.detail, "pe"));
                const int tile = std::stoi(detail_value(e.detail, "tile"));
                const int by = std::stoi(detail_value(e.detail, "by"));
                const auto it = handover.find(pe);
                if (it == handover.end() || it->second != std::make_pair(e.task, tile))
                    return "preempt without a displacing placement";
                handover.erase(it);
                if (static_cast<int>(sc.tasks[by].priority) <= static_cast<int>(sc.tasks[e.task].priority))
                    return "priority inversion: preempted by a non-higher-priority task";
                ++outstanding[{e.task, tile}];
                ++preempts;
                break;
            }
            case sim::EventKind::TileStart: {
                const int pe = std::stoi(detail_value(e.detail, "pe"));
                const int tile = std::stoi(detail_value(e.detail, "tile"));
                const auto it = booked.find(pe);
                if (it == booked.end() || it->second.task != e.task || it->second.tile != tile)
                    return "tile started on a pe it does not hold";
                if (it->second.running) return "tile started twice";
                it->second.running = true;
                break;
            }
            case sim::EventKind::TileDone: {
                const int pe = std::stoi(detail_value(e.detail, "pe"));
                const int tile = std::stoi(detail_value(e.detail, "tile"));
                const auto it = booked.find(pe);
                if (it == booked.end() || it->second.task != e.task || it->second.tile != tile ||
                    !it->second.running)
                    return "tile finished without running on that pe";
                booked.erase(it);
                break;
            }
            case sim::EventKind::Resume: {
                const int pe = std::stoi(detail_value(e.detail, "pe"));
                const int tile = std::stoi(detail_value(e.detail, "tile"));
                if (booked.count(pe)) return "resume onto a booked pe";
                booked[pe] = {e.task, tile, detail_value(e.detail, "state") == "running"};
                if (--outstanding[{e.task, tile}] < 0) return "resume without a preemption";
                break;
            }
            case sim::EventKind::TaskDone:
                completed.insert(e.task);
                break;
            default:
                break;
        }
    }
    if (!handover.empty()) return "a displaced tile was never preempted";
    if (!booked.empty()) return "a pe is still booked after the run";
    for (const auto& [key, net] : outstanding)
        if (net != 0) return "a preempted tile never resumed";
    if (arrived.size() != sc.tasks.size()) return "a task never arrived";
    if (completed != arrived) return "a task never completed";
    return "";
}

// Criterion 8: across the twenty-scenario suite, traces uphold every
// occupancy and priority invariant, each accepted placement is an embedding
// into the PE mesh, and the suite actually exercises preemption.
bool check_scheduler_invariants(std::string& note) {
    const SuiteRun& run = scheduler_suite();
    int preempts = 0, placements = 0;
    for (size_t i = 0; i < run.scenarios.size(); ++i) {
        const std::string violation =
            scheduler_violations(run.scenarios[i].sc, run.traces[i], preempts, placements);
        if (!violation.empty()) {
            note = "scenario " + format_int(i) + ": " + violation;
            return false;
        }
    }
    if (preempts < 1) {
        note = "suite never preempted anything";
        return false;
    }
    note = "20 scenarios clean, " + format_int(placements) + " placements, " +
           format_int(preempts) + " preemptions";
    return true;
}

// Criterion 9: on every multi-engine scenario with a multi-particle matcher,
// the urgent task finishes strictly sooner than under the serial-CPU
// scheduling baseline.
bool check_parallel_beats_serial(std::string& note) {
    const SuiteRun& run = scheduler_suite();
    int compared = 0;
    for (size_t i = 0; i < run.scenarios.size(); ++i) {
        const sim::Scenario& sc = run.scenarios[i].sc;
        if (sc.platform.engines <= 1 || sc.matcher.particles <= 1) continue;
        sim::SimOptions serial;
        serial.serial_baseline = true;
        const sim::Trace baseline = sim::run_simulation(sc, serial);
        const int urgent = run.scenarios[i].urgent_task;
        const double parallel_latency = sim::task_latencies(run.traces[i]).at(urgent);
        const double serial_latency = sim::task_latencies(baseline).at(urgent);
        if (!(parallel_latency < serial_latency)) {
            note = "scenario " + format_int(i) + " parallel " + format_real(parallel_latency) +
                   "s vs serial " + format_real(serial_latency) + "s";
            return false;
        }
        ++compared;
    }
    note = format_int(compared) + " scenarios, parallel strictly faster on all";
    return compared >= 1;
}

// Criterion 10: for every multi-layer workload in the suite, store-and-
// forward links spend less energy than routing activations through DRAM,
// and the per-bit-hop link cost is exactly its datasheet constant.
bool check_link_energy(std::string& note) {
    if (sim::EnergyConstants{}.noc_pj_per_bit_hop != 0.64) {
        note = "default link cost is not 0.64 pJ/bit-hop";
        return false;
    }
    sim::Trace one_hop;
    one_hop.noc_bit_hops = 1;
    if (sim::compute_energy_joules(one_hop, sim::EnergyConstants{}) != 0.64 * 1e-12) {
        note = "single bit-hop energy is not exactly its constant";
        return false;
    }
    const SuiteRun& run = scheduler_suite();
    int compared = 0;
    for (const BuiltScenario& built : run.scenarios) {
        for (const sim::TaskSpec& task : built.sc.tasks) {
            if (task.model.graph.size() < 2) continue;
            sim::Scenario probe;
            probe.platform = built.sc.platform;
            probe.matcher = built.sc.matcher;
            probe.rho0 = built.sc.rho0;
            sim::TaskSpec solo = task;
            solo.priority = sim::Priority::Normal;
            solo.arrival = 0.0;
            solo.poisson.reset();
            solo.deadline_slack_factor = 1e6;
            probe.tasks.push_back(solo);
            probe.link_mode = sim::LinkMode::Tss;
            const double tss =
                sim::compute_energy_joules(sim::run_simulation(probe), probe.platform.energy);
            probe.link_mode = sim::LinkMode::Lts;
            const double lts =
                sim::compute_energy_joules(sim::run_simulation(probe), probe.platform.energy);
            if (!(tss < lts)) {
                note = "a workload spent no less energy on-chip than through DRAM";
                return false;
            }
            ++compared;
        }
    }
    note = format_int(compared) + " workloads, on-chip forwarding cheaper on all";
    return compared >= 1;
}

// --- sustainable-rate search -------------------------------------------------

sim::Scenario lbt_scenario(uint64_t seed, int engines) {
    sim::Scenario sc;
    sc.platform.engines = engines;
    sc.platform.pe_rows = sc.platform.pe_cols = 1;
    sc.platform.clock_mhz = 1.0;
    sim::TaskSpec task;
    task.model = chain_model({1});
    task.deadline_slack_factor = 50.0;
    task.poisson = sim::PoissonArrivals{1.0, 0.001, seed};
    sc.tasks.push_back(task);
    return sc;
}

// Criterion 11: the bisection for the largest sustainable arrival rate is
// bit-reproducible under a fixed seed, and the rate never drops when the
// engine count doubles.
bool check_lbt(std::string& note) {
    const double first = sim::compute_lbt(lbt_scenario(7, 1), 1e4, 4e6, 1e4);
    const double second = sim::compute_lbt(lbt_scenario(7, 1), 1e4, 4e6, 1e4);
    if (first != second) {
        note = "repeated search returned different rates";
        return false;
    }
    for (int seed : {1, 2, 3}) {
        const double e1 = sim::compute_lbt(lbt_scenario(seed, 1), 1e4, 4e6, 1e4);
        const double e2 = sim::compute_lbt(lbt_scenario(seed, 2), 1e4, 4e6, 1e4);
        const double e4 = sim::compute_lbt(lbt_scenario(seed, 4), 1e4, 4e6, 1e4);
        if (!(e1 <= e2 && e2 <= e4)) {
            note = "rate dropped when engines doubled at seed " + format_int(seed);
            return false;
        }
    }
    note = "bit-reproducible; rate monotone over 1, 2, 4 engines on 3 seeds";
    return true;
}

}  // namespace

int main() {
    criterion(1, "exhaustive enumeration matches the brute-force oracle", check_oracle_equivalence);
    criterion(2, "refinement never prunes a true embedding and is idempotent",
              check_refinement_soundness);
    criterion(3, "perfect matches score zero and gradients match finite differences",
              check_fitness_and_gradient);
    criterion(4, "planted instances are recovered with default parameters", check_planted_success);
    criterion(5, "the relaxation solves no fewer instances than hard rounding",
              check_relaxation_ablation);
    criterion(6, "the integer datapath tracks float mode and round-trips within 2/256",
              check_quantized_parity);
    criterion(7, "command-line runs are byte-reproducible and worker-count invariant",
              check_cli_determinism);
    criterion(8, "scheduler traces uphold occupancy, priority, and placement invariants",
              check_scheduler_invariants);
    criterion(9, "parallel matching beats the serial-CPU baseline on urgent latency",
              check_parallel_beats_serial);
    criterion(10, "store-and-forward links spend less energy than DRAM round trips",
              check_link_energy);
    criterion(11, "the sustainable-rate search is reproducible and monotone in engines", check_lbt);
    return g_failures == 0 ? 0 : 1;
}
