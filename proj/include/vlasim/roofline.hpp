#pragma once

#include <algorithm>
#include <cstdint>
#include <string>

#include "vlasim/common.hpp"
#include "vlasim/hw_model.hpp"
#include "vlasim/op_graph.hpp"

namespace vlasim {

// ---------------------------------------------------------------------------
// Single-operator roofline costing.
//
// Compute time on the SoC models the matrix engine's tiling: work is cut
// into tile_m x tile_n output tiles (the k dimension reduces sequentially
// inside a tile), tiles are spread over the SMs in waves, and a partial last
// wave or partial edge tiles lower the achieved throughput. The PIM
// partition is costed as bandwidth-dominated with a flat compute ceiling.
// Memory time applies the asymmetric derate of the operator's innermost
// contiguous run. An operator runs where place() puts it; the reported
// time is the roofline max of the two resources.
// ---------------------------------------------------------------------------

enum class Bound { ComputeBound, MemoryBound };

struct OpCost {
    std::string name;
    Domain placement = Domain::SoC;
    double compute_time = 0;  // seconds
    double memory_time = 0;   // seconds
    double time = 0;          // max(compute_time, memory_time)
    Bound bound = Bound::MemoryBound;  // ties resolve to MemoryBound
    double achieved_flops_rate = 0;    // FLOP/s at the reported time
    double achieved_bandwidth = 0;     // bytes/s at the reported time
};

inline double compute_time(const Operator& op, const HardwareSpec& hw,
                           Domain placement) {
    if (op.flops == 0) return 0.0;
    if (placement == Domain::PIM) return op.flops / hw.pim->peak_compute;
    if (op.kind != OpKind::MatMul)
        return op.flops / (hw.soc_peak_compute * 0.5);

    const std::uint64_t tiles_m = ceil_div(op.m, hw.tile_m);
    const std::uint64_t tiles_n = ceil_div(op.n, hw.tile_n);
    const std::uint64_t tiles = tiles_m * tiles_n * op.batch;
    const std::uint64_t waves = ceil_div(tiles, hw.sm_count);
    const double wave_util =
        static_cast<double>(tiles) / static_cast<double>(waves * hw.sm_count);
    const double edge_util =
        (static_cast<double>(op.m) * static_cast<double>(op.n)) /
        (static_cast<double>(tiles_m * hw.tile_m) *
         static_cast<double>(tiles_n * hw.tile_n));
    return op.flops / (hw.soc_peak_compute * wave_util * edge_util);
}

inline double memory_time(const Operator& op, const HardwareSpec& hw,
                          Domain placement) {
    const std::uint64_t bytes = op.total_bytes();
    if (bytes == 0) return 0.0;
    const double bw =
        placement == Domain::PIM ? hw.pim->bandwidth : hw.dram_bandwidth;
    const auto& d = hw.bandwidth_derate;
    const double eff = op.innermost_contiguous_bytes >= d.min_contiguous_bytes
                           ? d.contiguous_efficiency
                           : d.strided_efficiency;
    return bytes / (bw * eff);
}

// Deterministic dispatch: low-intensity operators go to the PIM partition
// when one exists, everything else runs on the SoC.
inline Domain place(const Operator& op, const HardwareSpec& hw) {
    if (hw.pim && op.arithmetic_intensity() < hw.pim->placement_threshold)
        return Domain::PIM;
    return Domain::SoC;
}

inline OpCost op_cost(const Operator& op, const HardwareSpec& hw) {
    OpCost c;
    c.name = op.name;
    c.placement = place(op, hw);
    c.compute_time = compute_time(op, hw, c.placement);
    c.memory_time = memory_time(op, hw, c.placement);
    c.time = std::max(c.compute_time, c.memory_time);
    c.bound = c.compute_time > c.memory_time ? Bound::ComputeBound
                                             : Bound::MemoryBound;
    if (c.time > 0) {
        c.achieved_flops_rate = op.flops / c.time;
        c.achieved_bandwidth = op.total_bytes() / c.time;
    }
    return c;
}

}  // namespace vlasim
