#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vlasim/common.hpp"
#include "vlasim/errors.hpp"

namespace vlasim {

// ---------------------------------------------------------------------------
// Accelerator specifications.
//
// A HardwareSpec describes one edge XPU: a SoC with a matrix engine fed from
// DRAM, optionally augmented with a processing-in-memory partition that
// exposes the memory device's internal bandwidth to its own compute units.
// Specs are immutable after construction and safe to share across threads.
// ---------------------------------------------------------------------------

enum class MemoryTechnology { LPDDR5, LPDDR5X, GDDR7, LPDDR6X_PIM, Other };

// Config-surface label ("LPDDR6X-PIM") — see memory_technology_display for
// the human-readable table form.
inline std::string_view memory_technology_label(MemoryTechnology t) {
    switch (t) {
        case MemoryTechnology::LPDDR5: return "LPDDR5";
        case MemoryTechnology::LPDDR5X: return "LPDDR5X";
        case MemoryTechnology::GDDR7: return "GDDR7";
        case MemoryTechnology::LPDDR6X_PIM: return "LPDDR6X-PIM";
        case MemoryTechnology::Other: return "other";
    }
    return "other";
}

inline std::string_view memory_technology_display(MemoryTechnology t) {
    return t == MemoryTechnology::LPDDR6X_PIM ? "LPDDR6X PIM"
                                              : memory_technology_label(t);
}

inline std::optional<MemoryTechnology>
memory_technology_from_label(std::string_view s) {
    if (s == "LPDDR5") return MemoryTechnology::LPDDR5;
    if (s == "LPDDR5X") return MemoryTechnology::LPDDR5X;
    if (s == "GDDR7") return MemoryTechnology::GDDR7;
    if (s == "LPDDR6X-PIM") return MemoryTechnology::LPDDR6X_PIM;
    if (s == "other") return MemoryTechnology::Other;
    return std::nullopt;
}

// Two-level model of the asymmetric bandwidth a DRAM interface delivers
// depending on access pattern: streams whose innermost contiguous run is
// shorter than min_contiguous_bytes pay the strided efficiency.
struct AsymmetricDerate {
    double contiguous_efficiency = 0.85;   // fraction of peak, (0, 1]
    double strided_efficiency = 0.55;      // fraction of peak, (0, 1]
    std::uint64_t min_contiguous_bytes = 256;

    bool operator==(const AsymmetricDerate&) const = default;
};

// Optional processing-in-memory partition. Operators whose arithmetic
// intensity falls below placement_threshold are dispatched here.
struct PimPartition {
    double bandwidth = 0;            // bytes/s (internal, >= host DRAM BW)
    double peak_compute = 0;         // FLOP/s at BF16
    double placement_threshold = 0;  // FLOP/byte dispatch cutoff

    bool operator==(const PimPartition&) const = default;
};

struct HardwareSpec {
    std::string name;
    MemoryTechnology memory_technology = MemoryTechnology::Other;
    double dram_bandwidth = 0;        // bytes/s, SoC-visible DRAM interface
    double soc_peak_compute = 0;      // FLOP/s at BF16, SoC portion only
    std::optional<PimPartition> pim;
    std::uint64_t memory_capacity = 0;  // bytes
    std::uint64_t sm_count = 16;
    std::uint64_t tile_m = 128, tile_n = 128, tile_k = 64;
    std::uint64_t sram_bytes = 32 * kMiB;  // prefetch double-buffer capacity
    AsymmetricDerate bandwidth_derate;

    bool operator==(const HardwareSpec&) const = default;

    double total_peak_compute() const {
        return soc_peak_compute + (pim ? pim->peak_compute : 0.0);
    }
    // The headline bandwidth figure of the system: internal PIM bandwidth
    // when a PIM partition exists, the DRAM interface otherwise.
    double headline_bandwidth() const {
        return pim ? pim->bandwidth : dram_bandwidth;
    }
};

inline void validate(const HardwareSpec& hw) {
    auto fail = [&](const std::string& key, const std::string& msg) {
        throw ValidationError(key, "hardware spec \"" + hw.name + "\": " + msg);
    };
    if (!(hw.dram_bandwidth > 0)) fail("bw_gbps", "bw_gbps must be > 0");
    if (!(hw.soc_peak_compute > 0))
        fail("tflops_bf16_soc", "tflops_bf16_soc must be > 0");
    if (hw.sm_count < 1) fail("sm_count", "sm_count must be >= 1");
    if (hw.tile_m < 1 || hw.tile_n < 1 || hw.tile_k < 1)
        fail("tile", "tile dimensions must be >= 1");
    const auto& d = hw.bandwidth_derate;
    if (!(d.strided_efficiency > 0 &&
          d.strided_efficiency <= d.contiguous_efficiency &&
          d.contiguous_efficiency <= 1.0))
        fail("derate", "require 0 < strided <= contiguous <= 1");
    if (hw.pim) {
        if (!(hw.pim->bandwidth >= hw.dram_bandwidth))
            fail("pim.bw_gbps", "PIM bandwidth must be >= DRAM bandwidth");
        if (!(hw.pim->peak_compute > 0))
            fail("pim.tflops_bf16", "PIM compute must be > 0");
        if (!(hw.pim->placement_threshold > 0))
            fail("pim.threshold_flop_per_byte", "PIM threshold must be > 0");
    }
}

// ---------------------------------------------------------------------------
// Derived micro-architectural quantities.
// ---------------------------------------------------------------------------

enum class Domain { SoC, PIM };

// Arithmetic intensity at which the compute ceiling meets the bandwidth ramp.
inline double ridge_point(const HardwareSpec& hw, Domain domain = Domain::SoC) {
    if (domain == Domain::PIM) {
        if (!hw.pim)
            throw ConfigError("ridge_point: \"" + hw.name + "\" has no PIM partition");
        return hw.pim->peak_compute / hw.pim->bandwidth;
    }
    return hw.soc_peak_compute / hw.dram_bandwidth;
}

enum class CapacityMode { Strict, Warn };

struct CapacityCheck {
    enum class Status { Ok, Warning, Error };
    Status status = Status::Ok;
    std::uint64_t overflow_bytes = 0;

    bool ok() const { return status == Status::Ok; }
};

inline CapacityCheck check_capacity(const HardwareSpec& hw,
                                    std::uint64_t resident_bytes,
                                    CapacityMode mode = CapacityMode::Warn) {
    if (resident_bytes <= hw.memory_capacity) return {};
    CapacityCheck c;
    c.overflow_bytes = resident_bytes - hw.memory_capacity;
    c.status = mode == CapacityMode::Strict ? CapacityCheck::Status::Error
                                            : CapacityCheck::Status::Warning;
    return c;
}

// ---------------------------------------------------------------------------
// Built-in catalog.
//
// Two shipping Jetson platforms plus five what-if variants that keep the SoC
// and swap in faster memory systems. For PIM systems the SoC keeps the base
// platform's compute and the remainder of the combined BF16 figure is the
// in-memory partition; its dispatch threshold defaults to the SoC ridge
// point (operators below it are memory-bound on the SoC and benefit from
// the internal bandwidth).
// ---------------------------------------------------------------------------

inline const std::vector<HardwareSpec>& builtin_catalog() {
    static const std::vector<HardwareSpec> catalog = [] {
        auto base = [](std::string name, MemoryTechnology mem, double bw_gbps,
                       double soc_tflops, double capacity_gb) {
            HardwareSpec hw;
            hw.name = std::move(name);
            hw.memory_technology = mem;
            hw.dram_bandwidth = bw_gbps * kGB;
            hw.soc_peak_compute = soc_tflops * kTFLOPS;
            hw.memory_capacity = static_cast<std::uint64_t>(capacity_gb * kGB);
            return hw;
        };
        auto with_pim = [](HardwareSpec hw, MemoryTechnology mem,
                           double pim_bw_gbps, double combined_tflops) {
            hw.memory_technology = mem;
            PimPartition p;
            p.bandwidth = pim_bw_gbps * kGB;
            p.peak_compute = combined_tflops * kTFLOPS - hw.soc_peak_compute;
            p.placement_threshold = hw.soc_peak_compute / hw.dram_bandwidth;
            hw.pim = p;
            return hw;
        };

        const auto orin = base("Orin", MemoryTechnology::LPDDR5, 203, 100, 64);
        const auto thor = base("Thor", MemoryTechnology::LPDDR5X, 273, 500, 128);

        std::vector<HardwareSpec> v;
        v.push_back(orin);
        v.push_back(thor);
        v.push_back(base("Orin+LPDDR5X", MemoryTechnology::LPDDR5X, 273, 100, 64));
        v.push_back(base("Orin+GDDR7", MemoryTechnology::GDDR7, 1000, 100, 64));
        {
            auto h = with_pim(orin, MemoryTechnology::LPDDR6X_PIM, 2180, 1074);
            h.name = "Orin+PIM";
            v.push_back(std::move(h));
        }
        v.push_back(base("Thor+GDDR7", MemoryTechnology::GDDR7, 1000, 500, 128));
        {
            auto h = with_pim(thor, MemoryTechnology::LPDDR6X_PIM, 2180, 3993);
            h.name = "Thor+PIM";
            v.push_back(std::move(h));
        }
        for (const auto& hw : v) validate(hw);
        return v;
    }();
    return catalog;
}

inline const HardwareSpec* find_catalog(std::string_view name) {
    for (const auto& hw : builtin_catalog())
        if (hw.name == name) return &hw;
    return nullptr;
}

}  // namespace vlasim
