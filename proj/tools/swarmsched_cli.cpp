// Command-line front end: subgraph matching runs, scheduling simulations,
// sustainable-rate sweeps, and workload generation, all emitting stable CSV.
// Exit codes: 0 success, 1 usage/config error, 2 no mapping found,
// 3 no feasible arrival rate.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "swarmsched/graph_io.hpp"
#include "swarmsched/relaxed.hpp"
#include "swarmsched/sim/metrics.hpp"
#include "swarmsched/sim/scenario.hpp"
#include "swarmsched/sim/simulator.hpp"
#include "swarmsched/sim/workload.hpp"
#include "swarmsched/swarm.hpp"
#include "swarmsched/textio.hpp"
#include "swarmsched/ullmann.hpp"

namespace {

using namespace swarmsched;

struct CommonFlags {
    std::string out_dir = ".";
    int workers = 0;  // 0 = all available cores; never affects output bytes
};

int resolved_workers(int workers) {
    if (workers > 0) return workers;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

std::string out_path(const CommonFlags& common, const std::string& name) {
    return (std::filesystem::path(common.out_dir) / name).string();
}

void ensure_out_dir(const CommonFlags& common) {
    std::error_code ec;
    std::filesystem::create_directories(common.out_dir, ec);
    if (ec) throw ConfigError("cannot create output directory " + common.out_dir + ": " + ec.message());
}

std::string mappings_csv(const std::vector<DiscreteMapping>& mappings) {
    std::string out = "mapping_id,query_vertex,target_vertex\n";
    for (size_t id = 0; id < mappings.size(); ++id)
        for (int v = 0; v < mappings[id].size(); ++v)
            out += format_int(static_cast<int64_t>(id)) + "," + format_int(v) + "," +
                   format_int(mappings[id][v]) + "\n";
    return out;
}

// One-hot fitness of a discrete mapping, for the exact path's summary.
double mapping_fitness(const DiscreteMapping& map, const LabeledDigraph& q, const LabeledDigraph& g) {
    Matrix<double> s(q.size(), g.size(), 0.0);
    for (int i = 0; i < q.size(); ++i) s(i, map[i]) = 1.0;
    return fitness(s, q, g);
}

struct MatchArgs {
    CommonFlags common;
    std::string query_path, target_path;
    bool exact = false;
    bool quantized = false;
    std::string trace_path;
    SwarmParams params;
};

int run_match(const MatchArgs& args) {
    const LabeledDigraph q = load_graph(args.query_path);
    const LabeledDigraph g = load_graph(args.target_path);
    SwarmParams params = args.params;
    params.mode = args.quantized ? SwarmMode::Quantized : SwarmMode::Float;
    params.workers = resolved_workers(args.common.workers);

    std::cerr << "mode=" << (args.exact ? "exact" : (args.quantized ? "swarm-quantized" : "swarm-float"))
              << " query=" << args.query_path << " target=" << args.target_path
              << " particles=" << params.particles << " epochs=" << params.epochs
              << " inner=" << params.inner_steps << " seed=" << params.seed
              << " workers=" << params.workers << " out_dir=" << args.common.out_dir << "\n";

    std::vector<DiscreteMapping> mappings;
    double best_fitness = 0;
    int64_t evaluations = 0, model_cycles = 0;
    if (args.exact) {
        mappings = enumerate_embeddings(q, g);
        best_fitness = -std::numeric_limits<double>::infinity();
        for (const DiscreteMapping& m : mappings) best_fitness = std::max(best_fitness, mapping_fitness(m, q, g));
        if (mappings.empty()) best_fitness = 0;
    } else {
        std::string step_trace = "epoch,particle,step,fitness,global_best\n";
        StepHook hook;
        if (!args.trace_path.empty()) {
            hook = [&step_trace](int epoch, int particle, int step, double fit, double best) {
                step_trace += format_int(epoch) + "," + format_int(particle) + "," + format_int(step) + "," +
                              format_real(fit) + "," + format_real(best) + "\n";
            };
        }
        MatchResult result;
        try {
            result = run_matcher(q, g, params, hook);
        } catch (const InfeasibleError& e) {
            std::cerr << "infeasible: " << e.what() << "\n";
            ensure_out_dir(args.common);
            write_text_file(out_path(args.common, "mappings.csv"), mappings_csv({}));
            std::cout << "feasible_count=0 best_fitness=0 evaluations=0 model_cycles=0\n";
            return 2;
        }
        mappings = result.mappings;
        best_fitness = result.best_fitness;
        evaluations = result.evaluations;
        model_cycles = result.wall_model_cycles;
        if (!args.trace_path.empty()) write_text_file(args.trace_path, step_trace);
    }
    ensure_out_dir(args.common);
    write_text_file(out_path(args.common, "mappings.csv"), mappings_csv(mappings));
    best_fitness += 0.0;  // a perfect embedding scores -0.0; print it as 0
    std::cout << "feasible_count=" << mappings.size() << " best_fitness=" << format_real(best_fitness)
              << " evaluations=" << evaluations << " model_cycles=" << model_cycles << "\n";
    return mappings.empty() ? 2 : 0;
}

struct SimulateArgs {
    CommonFlags common;
    std::string scenario_path;
    std::string baseline;  // "" or "serial"
};

int run_simulate(const SimulateArgs& args) {
    const sim::Scenario sc = sim::load_scenario(args.scenario_path);
    sim::SimOptions opt;
    opt.matcher_workers = resolved_workers(args.common.workers);

    std::cerr << "scenario=" << args.scenario_path << " tasks=" << sc.tasks.size()
              << " engines=" << sc.platform.engines << " pe_rows=" << sc.platform.pe_rows
              << " pe_cols=" << sc.platform.pe_cols << " clock_mhz=" << format_real(sc.platform.clock_mhz)
              << " rho0=" << format_real(sc.rho0) << " link_mode=" << (sc.link_mode == sim::LinkMode::Tss ? "tss" : "lts")
              << " baseline=" << (args.baseline.empty() ? "none" : args.baseline)
              << " workers=" << opt.matcher_workers << " out_dir=" << args.common.out_dir << "\n";

    const sim::Trace trace = sim::run_simulation(sc, opt);
    ensure_out_dir(args.common);
    write_text_file(out_path(args.common, "trace.csv"), sim::trace_to_csv(trace));

    std::vector<sim::MetricRow> rows;
    if (!args.baseline.empty()) {
        sim::SimOptions base_opt = opt;
        base_opt.serial_baseline = true;
        const sim::Trace base = sim::run_simulation(sc, base_opt);
        write_text_file(out_path(args.common, "trace_baseline.csv"), sim::trace_to_csv(base));
        rows.push_back({"speedup", sim::compute_speedup(base, trace), "ratio"});
    }
    rows.push_back({"energy_joules", sim::compute_energy_joules(trace, sc.platform.energy), "J"});
    rows.push_back({"deadline_misses", static_cast<double>(sim::count_deadline_misses(trace)), "count"});
    for (const auto& [task, latency] : sim::task_latencies(trace))
        rows.push_back({"latency_task_" + format_int(task), latency, "s"});
    write_text_file(out_path(args.common, "metrics.csv"), sim::metrics_to_csv(rows));
    std::cout << "events=" << trace.events.size() << " deadline_misses=" << sim::count_deadline_misses(trace)
              << " energy_joules=" << format_real(sim::compute_energy_joules(trace, sc.platform.energy)) << "\n";
    return 0;
}

struct LbtArgs {
    CommonFlags common;
    std::string scenario_path;
    double lambda_min = 1.0, lambda_max = 1000.0, tol = 1.0;
};

int run_lbt(const LbtArgs& args) {
    const sim::Scenario sc = sim::load_scenario(args.scenario_path);
    sim::SimOptions opt;
    opt.matcher_workers = resolved_workers(args.common.workers);
    std::cerr << "scenario=" << args.scenario_path << " lambda_min=" << format_real(args.lambda_min)
              << " lambda_max=" << format_real(args.lambda_max) << " tol=" << format_real(args.tol)
              << " workers=" << opt.matcher_workers << " out_dir=" << args.common.out_dir << "\n";
    const double lbt = sim::compute_lbt(sc, args.lambda_min, args.lambda_max, args.tol, opt);
    ensure_out_dir(args.common);
    write_text_file(out_path(args.common, "lbt.csv"),
                    sim::metrics_to_csv({{"lambda_max", lbt, "tasks_per_sec"}}));
    std::cout << "lambda_max=" << format_real(lbt) << "\n";
    return 0;
}

struct GenArgs {
    CommonFlags common;
    std::string cls = "simple";
    uint64_t seed = 0;
    std::string out_file;
};

int run_gen(const GenArgs& args) {
    const sim::WorkloadModel model = sim::generate_workload(sim::workload_class_from_name(args.cls), args.seed);
    const std::string path = args.out_file.empty() ? out_path(args.common, "workload.json") : args.out_file;
    std::cerr << "class=" << args.cls << " seed=" << args.seed << " out=" << path << "\n";
    ensure_out_dir(args.common);
    sim::save_workload(model, path);
    std::cout << "layers=" << model.graph.size() << " total_work=" << model.total_work() << "\n";
    return 0;
}

void add_common(CLI::App* cmd, CommonFlags& common) {
    cmd->add_option("--out-dir", common.out_dir, "Directory for output files");
    cmd->add_option("--workers", common.workers, "Matcher worker threads (0 = all cores; never changes results)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Interruptible multi-model scheduling via parallel subgraph matching"};
    app.require_subcommand(1);

    MatchArgs match_args;
    CLI::App* match = app.add_subcommand("match", "Find embeddings of a query graph in a target graph");
    match->add_option("--query", match_args.query_path, "Query graph JSON")->required();
    match->add_option("--target", match_args.target_path, "Target graph JSON")->required();
    match->add_flag("--exact", match_args.exact, "Exhaustive enumeration instead of the swarm matcher");
    match->add_flag("--quantized", match_args.quantized, "8-bit integer datapath mode");
    match->add_option("--particles", match_args.params.particles, "Swarm size");
    match->add_option("--epochs", match_args.params.epochs, "Restart epochs");
    match->add_option("--inner", match_args.params.inner_steps, "Inner steps per epoch");
    match->add_option("--seed", match_args.params.seed, "Random seed");
    match->add_option("--trace", match_args.trace_path, "Write per-step swarm trace CSV to this file");
    add_common(match, match_args.common);

    SimulateArgs sim_args;
    CLI::App* simulate = app.add_subcommand("simulate", "Run a scheduling scenario");
    simulate->add_option("--scenario", sim_args.scenario_path, "Scenario JSON")->required();
    simulate->add_option("--baseline", sim_args.baseline, "Also run a reference model (choices: serial)")
        ->check(CLI::IsMember({"serial"}));
    add_common(simulate, sim_args.common);

    LbtArgs lbt_args;
    CLI::App* lbt = app.add_subcommand("lbt", "Bisect the largest sustainable Poisson arrival rate");
    lbt->add_option("--scenario", lbt_args.scenario_path, "Scenario JSON")->required();
    lbt->add_option("--lambda-min", lbt_args.lambda_min, "Lower probe rate (tasks/sec)");
    lbt->add_option("--lambda-max", lbt_args.lambda_max, "Upper probe rate (tasks/sec)");
    lbt->add_option("--tol", lbt_args.tol, "Bisection tolerance (tasks/sec)");
    add_common(lbt, lbt_args.common);

    GenArgs gen_args;
    CLI::App* gen = app.add_subcommand("gen", "Generate a synthetic workload file");
    gen->add_option("--class", gen_args.cls, "Workload family: simple, middle, complex")
        ->check(CLI::IsMember({"simple", "middle", "complex"}));
    gen->add_option("--seed", gen_args.seed, "Random seed");
    gen->add_option("--out", gen_args.out_file, "Output file (default: <out-dir>/workload.json)");
    add_common(gen, gen_args.common);

    try {
        app.parse(argc, argv);
        if (match->parsed()) return run_match(match_args);
        if (simulate->parsed()) return run_simulate(sim_args);
        if (lbt->parsed()) return run_lbt(lbt_args);
        if (gen->parsed()) return run_gen(gen_args);
        return 1;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const NoFeasibleRateError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
