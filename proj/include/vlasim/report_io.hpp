#pragma once

#include <cstdio>
#include <cstdlib>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "vlasim/common.hpp"
#include "vlasim/scheduler.hpp"

namespace vlasim {

// ---------------------------------------------------------------------------
// Report emission. All numeric text uses fmt_g6 (6 significant digits) so
// repeated runs are byte-identical.
// ---------------------------------------------------------------------------

inline constexpr const char* kSweepCsvHeader =
    "model_name,params,hw_name,bw_gbps,tflops_total,vision_s,prefill_s,"
    "decode_s,action_s,total_s,generation_share,per_token_ms,control_hz,"
    "meets_target";

namespace detail {

// JSON numbers rounded to the same 6 significant digits as the CSV.
inline double num6(double v) { return std::strtod(fmt_g6(v).c_str(), nullptr); }

inline nlohmann::ordered_json phase_json(const PhaseReport& p,
                                         bool per_op_breakdown) {
    nlohmann::ordered_json j;
    j["latency_s"] = num6(p.latency);
    j["compute_sum_s"] = num6(p.compute_sum);
    j["memory_sum_s"] = num6(p.memory_sum);
    j["compute_bound_ops"] = p.compute_bound_ops;
    j["memory_bound_ops"] = p.memory_bound_ops;
    j["prefetch"] = p.prefetch_enabled;
    if (per_op_breakdown) {
        nlohmann::ordered_json ops = nlohmann::ordered_json::array();
        for (const auto& c : p.op_costs) {
            ops.push_back({{"name", c.name},
                           {"placement", c.placement == Domain::PIM ? "PIM" : "SoC"},
                           {"compute_s", num6(c.compute_time)},
                           {"memory_s", num6(c.memory_time)},
                           {"time_s", num6(c.time)},
                           {"bound", c.bound == Bound::ComputeBound
                                         ? "compute"
                                         : "memory"}});
        }
        j["ops"] = std::move(ops);
    }
    return j;
}

}  // namespace detail

inline void write_sweep_row_csv(std::ostream& os, const SweepRow& row) {
    const StepReport& r = row.report;
    os << row.model_name << ',' << row.params << ',' << row.hw_name << ','
       << fmt_g6(row.bw_gbps) << ',' << fmt_g6(row.tflops_total) << ','
       << fmt_g6(r.vision.latency) << ',' << fmt_g6(r.prefill.latency) << ','
       << fmt_g6(r.decode.latency) << ',' << fmt_g6(r.action.latency) << ','
       << fmt_g6(r.total_latency) << ',' << fmt_g6(r.generation_share) << ','
       << fmt_g6(r.per_token_decode_latency * 1e3) << ','
       << fmt_g6(row.control_hz) << ','
       << (row.meets_target ? "true" : "false") << '\n';
}

inline void write_sweep_csv(std::ostream& os,
                            const std::vector<SweepRow>& rows) {
    os << kSweepCsvHeader << '\n';
    for (const auto& row : rows) write_sweep_row_csv(os, row);
}

inline nlohmann::ordered_json sweep_row_json(const SweepRow& row,
                                             bool per_op_breakdown) {
    const StepReport& r = row.report;
    nlohmann::ordered_json j;
    j["model_name"] = row.model_name;
    j["params"] = row.params;
    j["hw_name"] = row.hw_name;
    j["bw_gbps"] = detail::num6(row.bw_gbps);
    j["tflops_total"] = detail::num6(row.tflops_total);
    j["vision_s"] = detail::num6(r.vision.latency);
    j["prefill_s"] = detail::num6(r.prefill.latency);
    j["decode_s"] = detail::num6(r.decode.latency);
    j["action_s"] = detail::num6(r.action.latency);
    j["total_s"] = detail::num6(r.total_latency);
    j["generation_share"] = detail::num6(r.generation_share);
    j["per_token_ms"] = detail::num6(r.per_token_decode_latency * 1e3);
    j["control_hz"] = detail::num6(row.control_hz);
    j["per_inference_hz"] = detail::num6(r.per_inference_hz);
    j["meets_target"] = row.meets_target;
    j["degenerate_input"] = r.degenerate_input;
    j["resident_bytes"] = r.resident_bytes;
    j["capacity_overflow_bytes"] = r.capacity.overflow_bytes;
    j["phases"] = {{"vision", detail::phase_json(r.vision, per_op_breakdown)},
                   {"prefill", detail::phase_json(r.prefill, per_op_breakdown)},
                   {"decode", detail::phase_json(r.decode, per_op_breakdown)},
                   {"action", detail::phase_json(r.action, per_op_breakdown)}};
    return j;
}

inline void write_sweep_json(std::ostream& os, const std::vector<SweepRow>& rows,
                             bool per_op_breakdown = false) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& row : rows) arr.push_back(sweep_row_json(row, per_op_breakdown));
    os << arr.dump(2) << '\n';
}

// Human-readable single-run report.
inline void write_step_table(std::ostream& os, const SweepRow& row,
                             const RequestProfile& request) {
    const StepReport& r = row.report;
    char buf[160];
    auto line = [&](const char* label, const PhaseReport& p) {
        const double share = r.total_latency > 0 ? p.latency / r.total_latency : 0;
        std::snprintf(buf, sizeof(buf),
                      "  %-8s %12s s   %5.1f%%   compute %10s s | memory %10s s\n",
                      label, fmt_g6(p.latency).c_str(), share * 100.0,
                      fmt_g6(p.compute_sum).c_str(),
                      fmt_g6(p.memory_sum).c_str());
        os << buf;
    };
    os << "model: " << row.model_name << "  (" << row.params << " params)\n"
       << "hardware: " << row.hw_name << "  (" << fmt_g6(row.bw_gbps)
       << " GB/s, " << fmt_g6(row.tflops_total) << " BF16 TFLOPS)\n\n";
    line("vision", r.vision);
    line("prefill", r.prefill);
    line("decode", r.decode);
    line("action", r.action);
    os << "\n  total latency      : " << fmt_g6(r.total_latency) << " s\n"
       << "  generation share   : " << fmt_g6(r.generation_share * 100.0)
       << " %\n"
       << "  per-token decode   : "
       << fmt_g6(r.per_token_decode_latency * 1e3) << " ms\n"
       << "  control frequency  : " << fmt_g6(row.control_hz) << " Hz  ("
       << (row.meets_target ? "meets" : "below") << " "
       << fmt_g6(request.target_frequency) << " Hz target)\n"
       << "  resident footprint : " << fmt_g6(r.resident_bytes / kGB)
       << " GB\n";
    if (r.capacity.status == CapacityCheck::Status::Warning)
        os << "  WARNING: device memory exceeded by "
           << fmt_g6(r.capacity.overflow_bytes / kGB) << " GB\n";
    if (r.degenerate_input)
        os << "  note: degenerate input (no tokens generated)\n";
}

}  // namespace vlasim
