#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "swarmsched/errors.hpp"
#include "swarmsched/graph.hpp"

namespace swarmsched::sim {

// Energy cost model constants. Only the per-hop NoC figure is a measured
// hardware number; the rest are configuration defaults and documented as
// such in the config reference.
struct EnergyConstants {
    double noc_pj_per_bit_hop = 0.64;
    double mac_pj = 0.9;
    double sram_pj_per_byte = 5.0;
    double dram_pj_per_byte = 640.0;

    void validate() const {
        if (noc_pj_per_bit_hop < 0 || mac_pj < 0 || sram_pj_per_byte < 0 || dram_pj_per_byte < 0)
            throw ConfigError("energy constants must be non-negative");
        if (!(dram_pj_per_byte > sram_pj_per_byte))
            throw ConfigError("dram energy per byte must exceed sram energy per byte");
    }
};

enum class NocTopology : uint8_t { Mesh2D };

// Accelerator model: `engines` systolic arrays, each a pe_rows x pe_cols
// grid of PEs running one MAC per cycle. Engines are tiled row-major into a
// near-square grid, so the whole chip is one global PE mesh and hop counts
// are Manhattan distances on it.
struct Platform {
    int engines = 1;
    int pe_rows = 1;
    int pe_cols = 1;
    double clock_mhz = 700.0;
    NocTopology topology = NocTopology::Mesh2D;
    EnergyConstants energy;

    void validate() const {
        if (engines < 1 || pe_rows < 1 || pe_cols < 1) throw ConfigError("platform counts must be at least 1");
        if (!(clock_mhz > 0)) throw ConfigError("clock must be positive");
        energy.validate();
    }

    int pes_per_engine() const { return pe_rows * pe_cols; }
    int total_pes() const { return engines * pes_per_engine(); }
    double clock_hz() const { return clock_mhz * 1e6; }

    // Engine grid: Ec = ceil(sqrt(engines)) columns, row-major placement.
    int engine_grid_cols() const {
        int c = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(engines))));
        return c < 1 ? 1 : c;
    }

    // Global mesh coordinates of a PE id (engine-major, row-major in-engine).
    std::pair<int, int> pe_coords(int pe) const {
        const int per = pes_per_engine();
        const int engine = pe / per;
        const int local = pe % per;
        const int ec = engine_grid_cols();
        const int row = (engine / ec) * pe_rows + local / pe_cols;
        const int col = (engine % ec) * pe_cols + local % pe_cols;
        return {row, col};
    }

    int manhattan_hops(int pe_a, int pe_b) const {
        const auto [ra, ca] = pe_coords(pe_a);
        const auto [rb, cb] = pe_coords(pe_b);
        return std::abs(ra - rb) + std::abs(ca - cb);
    }

    bool pes_adjacent(int pe_a, int pe_b) const { return manhattan_hops(pe_a, pe_b) == 1; }
};

// Hardware-catalog presets. The catalog prints "MACs 64 / engine array
// 128x128" per platform; that phrasing is ambiguous, so both readings are
// available. EnginesOfMacs (default, the plausible reading): the first
// number counts engines, each engine is the printed array of PEs. Literal:
// the first number is MACs per engine (a square array), and the printed
// array dimensions count engines.
enum class PresetInterpretation : uint8_t { EnginesOfMacs, Literal };

inline Platform platform_preset(const std::string& name,
                                PresetInterpretation interp = PresetInterpretation::EnginesOfMacs) {
    int macs = 0, array_rows = 128, array_cols = 128;
    double clock = 700.0;
    if (name == "edge") {
        macs = 64;
    } else if (name == "cloud") {
        macs = 128;
    } else {
        throw ConfigError("unknown platform preset: " + name);
    }
    Platform p;
    p.clock_mhz = clock;
    if (interp == PresetInterpretation::EnginesOfMacs) {
        p.engines = macs;
        p.pe_rows = array_rows;
        p.pe_cols = array_cols;
    } else {
        const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(macs))));
        if (side * side != macs) throw ConfigError("literal preset interpretation needs a square MAC count");
        p.engines = array_rows * array_cols;
        p.pe_rows = side;
        p.pe_cols = side;
    }
    p.validate();
    return p;
}

// Mesh graph over an arbitrary subset of PEs: vertices in ascending PE id
// order (all Generic, so any tile kind is placeable), one edge pair per
// mesh-adjacent pair of selected PEs, whether they share an engine or sit
// across an engine boundary. Returns the graph and the vertex -> PE map.
inline std::pair<LabeledDigraph, std::vector<int>> mesh_subgraph(const Platform& platform,
                                                                 const std::vector<int>& pes) {
    std::vector<int> sorted = pes;
    std::sort(sorted.begin(), sorted.end());
    const int m = static_cast<int>(sorted.size());
    std::vector<std::pair<int, int>> edges;
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
            if (a != b && platform.pes_adjacent(sorted[a], sorted[b])) edges.emplace_back(a, b);
    LabeledDigraph g(m, edges, std::vector<ComputeKind>(m, ComputeKind::Generic));
    return {std::move(g), std::move(sorted)};
}

}  // namespace swarmsched::sim
