#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "swarmsched/errors.hpp"
#include "swarmsched/sim/platform.hpp"
#include "swarmsched/sim/workload.hpp"
#include "swarmsched/swarm.hpp"
#include "swarmsched/textio.hpp"

namespace swarmsched::sim {

enum class Priority : uint8_t { Low = 0, Normal = 1, Urgent = 2 };

inline const char* priority_name(Priority p) {
    switch (p) {
        case Priority::Low:
            return "low";
        case Priority::Normal:
            return "normal";
        default:
            return "urgent";
    }
}

inline Priority priority_from_name(const std::string& name) {
    if (name == "low") return Priority::Low;
    if (name == "normal") return Priority::Normal;
    if (name == "urgent") return Priority::Urgent;
    throw ParseError("unknown priority: " + name);
}

// How inter-layer activations travel. Tss keeps them on-chip over the NoC
// (hop-counted); Lts spills every producer/consumer transfer through DRAM.
enum class LinkMode : uint8_t { Tss, Lts };

struct PoissonArrivals {
    double lambda = 1.0;   // tasks per second
    double horizon = 1.0;  // seconds of arrivals
    uint64_t seed = 0;
};

// One task template: a workload (from file or generator) plus arrival and
// deadline policy. Poisson templates expand into one instance per arrival.
struct TaskSpec {
    WorkloadModel model;
    Priority priority = Priority::Normal;
    std::optional<double> arrival;          // explicit arrival, seconds
    std::optional<PoissonArrivals> poisson;  // exactly one of the two is set
    double deadline_slack_factor = 3.0;

    void validate() const {
        model.validate();
        if (arrival.has_value() == poisson.has_value())
            throw ConfigError("task needs exactly one of arrival or poisson");
        if (arrival && *arrival < 0) throw ConfigError("arrival must be non-negative");
        if (poisson && !(poisson->lambda > 0 && poisson->horizon > 0))
            throw ConfigError("poisson lambda and horizon must be positive");
        if (!(deadline_slack_factor > 0)) throw ConfigError("deadline slack factor must be positive");
    }
};

struct Scenario {
    Platform platform;
    double rho0 = 0.25;
    LinkMode link_mode = LinkMode::Tss;
    SwarmParams matcher;
    double baseline_cpu_clock_mhz = 3000.0;
    std::vector<TaskSpec> tasks;

    void validate() const {
        platform.validate();
        if (!(rho0 > 0 && rho0 <= 1)) throw ConfigError("rho0 must be in (0, 1]");
        if (!(baseline_cpu_clock_mhz > 0)) throw ConfigError("baseline cpu clock must be positive");
        for (const TaskSpec& t : tasks) t.validate();
    }
};

namespace detail {

inline double require_number(const nlohmann::json& doc, const char* key, const std::string& origin) {
    if (!doc.contains(key) || !doc[key].is_number())
        throw ConfigError(origin + ": missing or non-numeric \"" + key + "\"");
    return doc[key].get<double>();
}

inline Platform parse_platform(const nlohmann::json& doc, const std::string& origin) {
    if (doc.contains("preset")) {
        PresetInterpretation interp = PresetInterpretation::EnginesOfMacs;
        if (doc.contains("interpretation")) {
            const std::string s = doc["interpretation"].get<std::string>();
            if (s == "engines-of-macs")
                interp = PresetInterpretation::EnginesOfMacs;
            else if (s == "literal")
                interp = PresetInterpretation::Literal;
            else
                throw ConfigError(origin + ": unknown preset interpretation: " + s);
        }
        return platform_preset(doc["preset"].get<std::string>(), interp);
    }
    Platform p;
    p.engines = static_cast<int>(require_number(doc, "engines", origin));
    p.pe_rows = static_cast<int>(require_number(doc, "pe_rows", origin));
    p.pe_cols = static_cast<int>(require_number(doc, "pe_cols", origin));
    p.clock_mhz = require_number(doc, "clock_mhz", origin);
    return p;
}

inline void parse_energy_overrides(const nlohmann::json& doc, EnergyConstants& ec) {
    if (doc.contains("noc_pj_per_bit_hop")) ec.noc_pj_per_bit_hop = doc["noc_pj_per_bit_hop"].get<double>();
    if (doc.contains("mac_pj")) ec.mac_pj = doc["mac_pj"].get<double>();
    if (doc.contains("sram_pj_per_byte")) ec.sram_pj_per_byte = doc["sram_pj_per_byte"].get<double>();
    if (doc.contains("dram_pj_per_byte")) ec.dram_pj_per_byte = doc["dram_pj_per_byte"].get<double>();
}

inline SwarmParams parse_matcher(const nlohmann::json& doc, const std::string& origin) {
    SwarmParams p;
    if (doc.contains("particles")) p.particles = doc["particles"].get<int>();
    if (doc.contains("epochs")) p.epochs = doc["epochs"].get<int>();
    if (doc.contains("inner")) p.inner_steps = doc["inner"].get<int>();
    if (doc.contains("w")) p.inertia = doc["w"].get<double>();
    if (doc.contains("c_local")) p.c_local = doc["c_local"].get<double>();
    if (doc.contains("c_global")) p.c_global = doc["c_global"].get<double>();
    if (doc.contains("c_consensus")) p.c_consensus = doc["c_consensus"].get<double>();
    if (doc.contains("v_max")) p.v_max = doc["v_max"].get<double>();
    if (doc.contains("seed")) p.seed = doc["seed"].get<uint64_t>();
    if (doc.contains("quantized") && doc["quantized"].get<bool>()) p.mode = SwarmMode::Quantized;
    if (p.particles < 1 || p.epochs < 1 || p.inner_steps < 1)
        throw ConfigError(origin + ": matcher sizes must be at least 1");
    return p;
}

}  // namespace detail

// Scenario files are JSON: platform {preset|explicit}, optional energy
// overrides, rho0, link_mode, matcher parameters, baseline cpu clock, and
// the task list. Workload model_file paths are resolved against base_dir.
inline Scenario parse_scenario(const std::string& text, const std::string& origin, const std::string& base_dir) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(origin + ": " + e.what());
    }
    try {
        Scenario sc;
        if (!doc.contains("platform")) throw ConfigError(origin + ": missing \"platform\"");
        sc.platform = detail::parse_platform(doc["platform"], origin);
        if (doc.contains("energy")) detail::parse_energy_overrides(doc["energy"], sc.platform.energy);
        if (doc.contains("rho0")) sc.rho0 = doc["rho0"].get<double>();
        if (doc.contains("link_mode")) {
            const std::string s = doc["link_mode"].get<std::string>();
            if (s == "tss")
                sc.link_mode = LinkMode::Tss;
            else if (s == "lts")
                sc.link_mode = LinkMode::Lts;
            else
                throw ConfigError(origin + ": unknown link_mode: " + s);
        }
        if (doc.contains("matcher")) sc.matcher = detail::parse_matcher(doc["matcher"], origin);
        if (doc.contains("baseline_cpu_clock_mhz")) sc.baseline_cpu_clock_mhz = doc["baseline_cpu_clock_mhz"].get<double>();
        if (doc.contains("tasks")) {
            for (const auto& t : doc["tasks"]) {
                TaskSpec spec;
                if (t.contains("model_file") == t.contains("generator"))
                    throw ConfigError(origin + ": task needs exactly one of model_file or generator");
                if (t.contains("model_file")) {
                    std::filesystem::path p(t["model_file"].get<std::string>());
                    if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
                    spec.model = load_workload(p.string());
                } else {
                    const auto& g = t["generator"];
                    if (!g.contains("class") || !g.contains("seed"))
                        throw ConfigError(origin + ": generator needs class and seed");
                    spec.model = generate_workload(workload_class_from_name(g["class"].get<std::string>()),
                                                   g["seed"].get<uint64_t>());
                }
                if (t.contains("priority")) spec.priority = priority_from_name(t["priority"].get<std::string>());
                if (t.contains("arrival") == t.contains("poisson"))
                    throw ConfigError(origin + ": task needs exactly one of arrival or poisson");
                if (t.contains("arrival")) {
                    spec.arrival = t["arrival"].get<double>();
                } else {
                    const auto& p = t["poisson"];
                    if (!p.contains("seed")) throw ConfigError(origin + ": poisson arrivals need a seed");
                    PoissonArrivals pa;
                    pa.lambda = detail::require_number(p, "lambda", origin);
                    pa.horizon = detail::require_number(p, "horizon", origin);
                    pa.seed = p["seed"].get<uint64_t>();
                    spec.poisson = pa;
                }
                if (t.contains("deadline_slack_factor"))
                    spec.deadline_slack_factor = t["deadline_slack_factor"].get<double>();
                sc.tasks.push_back(std::move(spec));
            }
        }
        sc.validate();
        return sc;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(origin + ": " + e.what());
    }
}

inline Scenario load_scenario(const std::string& path) {
    const std::string dir = std::filesystem::path(path).parent_path().string();
    return parse_scenario(read_text_file(path), path, dir.empty() ? "." : dir);
}

}  // namespace swarmsched::sim
