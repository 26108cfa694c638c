#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "vlasim/hw_model.hpp"
#include "vlasim/op_graph.hpp"
#include "vlasim/roofline.hpp"
#include "vlasim/workload_model.hpp"

namespace vlasim {

// ---------------------------------------------------------------------------
// Phase and step latency.
//
// With prefetch disabled each operator pays its own roofline max:
//     latency = sum_i max(c_i, m_i).
// With prefetch enabled operand movement runs ahead of compute through the
// SRAM double buffer, modeled as a two-resource pipeline: the memory engine
// streams operators in order, compute follows but never overtakes its own
// operand stream:
//     F_i = max(F_{i-1} + c_i, M_i),   M_i = sum_{j<=i} m_j,   latency = F_n.
// F_n always lies in [max(sum c, sum m), sum_i max(c_i, m_i)]; the first
// operator's stream is the pipeline's non-overlappable leading edge.
// ---------------------------------------------------------------------------

struct PhaseReport {
    Phase phase = Phase::Prefill;
    double latency = 0;      // seconds
    double compute_sum = 0;  // sum of per-op compute times
    double memory_sum = 0;   // sum of per-op memory times
    // Per-op costs. For multi-step phases (decode, discrete action) entries
    // are aggregated per operator position across steps, with times summed.
    std::vector<OpCost> op_costs;
    std::uint64_t compute_bound_ops = 0;  // per operator instance
    std::uint64_t memory_bound_ops = 0;
    bool prefetch_enabled = false;
};

namespace detail {

// In-order accumulation of one operator sequence; reusable across decode
// steps so multi-step phases aggregate per operator position.
struct PhaseAccumulator {
    bool prefetch = false;
    bool aggregate_by_position = false;
    double latency = 0;
    double compute_sum = 0, memory_sum = 0;
    std::uint64_t compute_bound = 0, memory_bound = 0;
    std::vector<OpCost> rows;

    // state of the current operator sequence
    double fluid_finish = 0, memory_finish = 0, sum_max = 0;
    std::size_t position = 0;

    void begin_sequence() {
        fluid_finish = 0;
        memory_finish = 0;
        sum_max = 0;
        position = 0;
    }
    void add(const Operator& op, const HardwareSpec& hw) {
        OpCost c = op_cost(op, hw);
        compute_sum += c.compute_time;
        memory_sum += c.memory_time;
        (c.bound == Bound::ComputeBound ? compute_bound : memory_bound)++;
        memory_finish += c.memory_time;
        fluid_finish = std::max(fluid_finish + c.compute_time, memory_finish);
        sum_max += c.time;
        if (aggregate_by_position && position < rows.size()) {
            OpCost& r = rows[position];
            r.compute_time += c.compute_time;
            r.memory_time += c.memory_time;
            r.time += c.time;
        } else {
            rows.push_back(std::move(c));
        }
        ++position;
    }
    void end_sequence() { latency += prefetch ? fluid_finish : sum_max; }

    PhaseReport finish(Phase phase) {
        PhaseReport r;
        r.phase = phase;
        r.latency = latency;
        r.compute_sum = compute_sum;
        r.memory_sum = memory_sum;
        r.compute_bound_ops = compute_bound;
        r.memory_bound_ops = memory_bound;
        r.prefetch_enabled = prefetch;
        if (aggregate_by_position) {
            // summed times; bound re-derived, per-instance rates dropped
            for (auto& c : rows) {
                c.bound = c.compute_time > c.memory_time ? Bound::ComputeBound
                                                         : Bound::MemoryBound;
                c.achieved_flops_rate = 0;
                c.achieved_bandwidth = 0;
            }
        }
        r.op_costs = std::move(rows);
        return r;
    }
};

}  // namespace detail

inline PhaseReport phase_latency(const PhaseGraph& g, const HardwareSpec& hw,
                                 bool prefetch = true) {
    detail::PhaseAccumulator acc;
    acc.prefetch = prefetch;
    acc.rows.reserve(g.ops.size());
    acc.begin_sequence();
    for (const auto& op : g.ops) acc.add(op, hw);
    acc.end_sequence();
    return acc.finish(g.phase);
}

inline std::uint64_t decode_start_context(const VlaModelSpec& model,
                                          const RequestProfile& request) {
    const std::uint64_t s0 = prefill_context(model, request);
    return s0 ? s0 : 1;
}

// Autoregressive decode of all generated tokens: step t runs at context
// S0 + t; steps are strictly sequential, KV growth uses the exact
// step-by-step series.
inline PhaseReport decode_phase_latency(const VlaModelSpec& model,
                                        const HardwareSpec& hw,
                                        const RequestProfile& request,
                                        bool prefetch = true) {
    detail::PhaseAccumulator acc;
    acc.prefetch = prefetch;
    acc.aggregate_by_position = true;
    const std::uint64_t s0 = decode_start_context(model, request);
    for (std::uint64_t t = 0; t < request.generated_tokens; ++t) {
        const PhaseGraph g = decode_step_graph(model, s0 + t);
        acc.begin_sequence();
        for (const auto& op : g.ops) acc.add(op, hw);
        acc.end_sequence();
    }
    return acc.finish(Phase::Decode);
}

inline PhaseReport action_phase_latency(const VlaModelSpec& model,
                                        const HardwareSpec& hw,
                                        const RequestProfile& request,
                                        bool prefetch = true) {
    detail::PhaseAccumulator acc;
    acc.prefetch = prefetch;
    acc.aggregate_by_position = true;
    const auto& a = model.action;
    if (request.actions_per_inference == 0) return acc.finish(Phase::Action);

    if (a.kind == ActionHeadKind::DiscreteTokens) {
        const std::uint64_t steps =
            a.action_tokens_per_step * request.actions_per_inference;
        const std::uint64_t base =
            decode_start_context(model, request) + request.generated_tokens;
        for (std::uint64_t t = 0; t < steps; ++t) {
            const PhaseGraph g =
                decode_step_graph(model, base + t, Phase::Action);
            acc.begin_sequence();
            for (const auto& op : g.ops) acc.add(op, hw);
            acc.end_sequence();
        }
        return acc.finish(Phase::Action);
    }

    // DiT: diffusion passes are sequential refinements of the same graph.
    const PhaseGraph g = action_graph(model, request);
    const std::uint64_t ops_per_pass = g.ops.size() / a.diffusion_steps;
    std::size_t i = 0;
    for (std::uint64_t s = 0; s < a.diffusion_steps; ++s) {
        acc.begin_sequence();
        for (std::uint64_t j = 0; j < ops_per_pass; ++j, ++i)
            acc.add(g.ops[i], hw);
        acc.end_sequence();
    }
    return acc.finish(Phase::Action);
}

// ---------------------------------------------------------------------------
// Full control step.
// ---------------------------------------------------------------------------

struct StepReport {
    PhaseReport vision, prefill, decode, action;
    double total_latency = 0;
    double generation_share = 0;          // (prefill + decode) / total
    double control_frequency = 0;         // actions_per_inference / total
    double per_inference_hz = 0;          // 1 / total
    double per_token_decode_latency = 0;  // decode / generated_tokens
    bool degenerate_input = false;
    CapacityCheck capacity;
    std::uint64_t resident_bytes = 0;
};

inline StepReport step_latency(const VlaModelSpec& model,
                               const HardwareSpec& hw,
                               const RequestProfile& request,
                               bool prefetch = true,
                               CapacityMode capacity_mode = CapacityMode::Warn) {
    validate(model);
    validate(request);

    StepReport r;
    const std::uint64_t s0 = prefill_context(model, request);
    r.vision = phase_latency(vision_graph(model, request), hw, prefetch);
    if (s0 > 0) {
        r.prefill = phase_latency(prefill_graph(model, s0), hw, prefetch);
    } else {
        r.prefill.phase = Phase::Prefill;
        r.prefill.prefetch_enabled = prefetch;
    }
    r.decode = decode_phase_latency(model, hw, request, prefetch);
    r.action = action_phase_latency(model, hw, request, prefetch);

    r.total_latency = r.vision.latency + r.prefill.latency +
                      r.decode.latency + r.action.latency;
    if (r.total_latency > 0) {
        r.generation_share =
            (r.prefill.latency + r.decode.latency) / r.total_latency;
        r.control_frequency = request.actions_per_inference / r.total_latency;
        r.per_inference_hz = 1.0 / r.total_latency;
    }
    if (request.generated_tokens > 0)
        r.per_token_decode_latency =
            r.decode.latency / request.generated_tokens;
    r.degenerate_input = r.total_latency == 0 || request.generated_tokens == 0;

    // Peak residency: all weights plus the KV cache at its final length.
    std::uint64_t action_steps = 0;
    if (model.action.kind == ActionHeadKind::DiscreteTokens)
        action_steps = model.action.action_tokens_per_step *
                       request.actions_per_inference;
    std::uint64_t ctx_final = s0;
    if (request.generated_tokens > 0 || action_steps > 0)
        ctx_final = decode_start_context(model, request) +
                    request.generated_tokens + action_steps;
    r.resident_bytes = weight_bytes(model) +
                       ctx_final * kv_bytes_per_token(model.decoder);
    r.capacity = check_capacity(hw, r.resident_bytes, capacity_mode);
    if (r.capacity.status == CapacityCheck::Status::Error)
        throw CapacityError(
            "resident footprint " + std::to_string(r.resident_bytes) +
                " bytes exceeds \"" + hw.name + "\" capacity by " +
                std::to_string(r.capacity.overflow_bytes) + " bytes",
            r.capacity.overflow_bytes);
    return r;
}

// ---------------------------------------------------------------------------
// Design-space sweep.
// ---------------------------------------------------------------------------

enum class FrequencyMode { Amortized, PerInference };

struct SweepRow {
    std::string model_name;
    std::uint64_t params = 0;
    std::string hw_name;
    double bw_gbps = 0;      // headline bandwidth (PIM-internal when present)
    double tflops_total = 0; // SoC + PIM
    StepReport report;
    double control_hz = 0;
    bool meets_target = false;
};

// Cartesian product, model-major / hardware-minor, deterministic order.
inline std::vector<SweepRow> control_frequency_sweep(
    const std::vector<VlaModelSpec>& models,
    const std::vector<HardwareSpec>& hws, const RequestProfile& request,
    bool prefetch = true, CapacityMode capacity_mode = CapacityMode::Warn,
    FrequencyMode frequency_mode = FrequencyMode::Amortized) {
    std::vector<SweepRow> rows;
    rows.reserve(models.size() * hws.size());
    for (const auto& model : models) {
        for (const auto& hw : hws) {
            SweepRow row;
            row.model_name = model.name;
            row.params = param_count(model);
            row.hw_name = hw.name;
            row.bw_gbps = hw.headline_bandwidth() / kGB;
            row.tflops_total = hw.total_peak_compute() / kTFLOPS;
            row.report = step_latency(model, hw, request, prefetch,
                                      capacity_mode);
            row.control_hz = frequency_mode == FrequencyMode::Amortized
                                 ? row.report.control_frequency
                                 : row.report.per_inference_hz;
            row.meets_target = row.control_hz >= request.target_frequency;
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

}  // namespace vlasim
