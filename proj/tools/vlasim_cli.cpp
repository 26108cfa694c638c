// vlasim — analytical latency / control-frequency estimator for
// vision-language-action models on edge accelerators.
//
// Exit codes: 0 success, 1 usage error, 2 missing file, 3 config
// schema/validation error, 4 strict-mode capacity overflow.

#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "vlasim/vlasim.hpp"

namespace {

using namespace vlasim;

struct CommonOpts {
    std::string hw = "Orin";
    std::string model = "molmoact-7b-class";
    std::string request;
    std::string prefetch = "on";
    std::string capacity = "warn";
    std::string format = "table";
    std::string freq_mode = "amortized";
    std::string out;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool with_model = true) {
    if (with_model) {
        cmd->add_option("--hw", o.hw, "catalog name or hardware config path");
        cmd->add_option("--model", o.model, "bundled name or model config path");
        cmd->add_option("--request", o.request, "request config path");
    }
    cmd->add_option("--prefetch", o.prefetch, "cross-operator prefetch")
        ->check(CLI::IsMember({"on", "off"}));
    cmd->add_option("--capacity", o.capacity, "device memory handling")
        ->check(CLI::IsMember({"strict", "warn"}));
    cmd->add_option("--format", o.format, "output format")
        ->check(CLI::IsMember({"csv", "json", "table"}));
    cmd->add_option("--freq-mode", o.freq_mode,
                    "control frequency definition")
        ->check(CLI::IsMember({"amortized", "per-inference"}));
    cmd->add_option("--out", o.out, "write the report to PATH");
}

// Report sink: --out PATH or stdout.
struct Output {
    std::ofstream file;
    std::ostream* os = &std::cout;

    explicit Output(const std::string& path) {
        if (path.empty()) return;
        file.open(path, std::ios::binary);
        if (!file) throw FileError(path, "cannot write file: " + path);
        os = &file;
    }
    std::ostream& stream() { return *os; }
};

SweepRow make_row(const VlaModelSpec& model, const HardwareSpec& hw,
                  const RequestProfile& request, const CommonOpts& o) {
    const bool prefetch = o.prefetch == "on";
    const CapacityMode mode =
        o.capacity == "strict" ? CapacityMode::Strict : CapacityMode::Warn;
    SweepRow row;
    row.model_name = model.name;
    row.params = param_count(model);
    row.hw_name = hw.name;
    row.bw_gbps = hw.headline_bandwidth() / kGB;
    row.tflops_total = hw.total_peak_compute() / kTFLOPS;
    row.report = step_latency(model, hw, request, prefetch, mode);
    row.control_hz = o.freq_mode == "per-inference"
                         ? row.report.per_inference_hz
                         : row.report.control_frequency;
    row.meets_target = row.control_hz >= request.target_frequency;
    return row;
}

int cmd_catalog() {
    std::cout << "name | memory | bw_gbps | tflops_bf16\n";
    for (const auto& hw : builtin_catalog()) {
        std::cout << hw.name << " | "
                  << memory_technology_display(hw.memory_technology) << " | "
                  << fmt_g6(hw.headline_bandwidth() / kGB) << " | "
                  << fmt_g6(hw.total_peak_compute() / kTFLOPS) << '\n';
    }
    return 0;
}

int cmd_simulate(const CommonOpts& o) {
    const HardwareSpec hw = resolve_hardware(o.hw);
    const VlaModelSpec model = resolve_model(o.model);
    const RequestProfile request = resolve_request(o.request);
    const SweepRow row = make_row(model, hw, request, o);

    Output out(o.out);
    if (o.format == "table") {
        write_step_table(out.stream(), row, request);
    } else if (o.format == "csv") {
        write_sweep_csv(out.stream(), {row});
    } else {
        out.stream() << sweep_row_json(row, /*per_op_breakdown=*/true).dump(2)
                     << '\n';
    }
    if (row.report.capacity.status == CapacityCheck::Status::Warning)
        std::cerr << "warning: resident footprint exceeds device memory by "
                  << fmt_g6(row.report.capacity.overflow_bytes / kGB)
                  << " GB\n";
    return 0;
}

int cmd_sweep(const CommonOpts& o, const std::string& grid_path) {
    const SweepGrid grid = load_grid(grid_path);
    const bool prefetch = o.prefetch == "on";
    const CapacityMode mode =
        o.capacity == "strict" ? CapacityMode::Strict : CapacityMode::Warn;
    const FrequencyMode fmode = o.freq_mode == "per-inference"
                                    ? FrequencyMode::PerInference
                                    : FrequencyMode::Amortized;
    const auto rows = control_frequency_sweep(grid.models, grid.hardware,
                                              grid.request, prefetch, mode,
                                              fmode);
    Output out(o.out);
    if (o.format == "json")
        write_sweep_json(out.stream(), rows, /*per_op_breakdown=*/true);
    else
        write_sweep_csv(out.stream(), rows);

    std::size_t meets = 0;
    for (const auto& row : rows) meets += row.meets_target ? 1 : 0;
    std::cerr << meets << "/" << rows.size() << " cells meet the "
              << fmt_g6(grid.request.target_frequency) << " Hz target\n";
    return 0;
}

int cmd_dump_ops(const CommonOpts& o, const std::string& phase) {
    const VlaModelSpec model = resolve_model(o.model);
    const RequestProfile request = resolve_request(o.request);

    PhaseGraph g;
    if (phase == "vision") {
        g = vision_graph(model, request);
    } else if (phase == "prefill") {
        g = prefill_graph(model, prefill_context(model, request));
    } else if (phase == "decode") {
        // first decode step, at the post-prefill context
        g = decode_step_graph(model, decode_start_context(model, request));
    } else {
        g = action_graph(model, request);
    }
    Output out(o.out);
    write_ops_csv(out.stream(), g);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"analytical roofline estimator for VLA inference on edge XPUs"};
    app.require_subcommand(1);

    CommonOpts opts;
    std::string grid_path;
    std::string dump_phase = "decode";

    app.add_subcommand("catalog", "list the built-in hardware catalog");
    auto* simulate =
        app.add_subcommand("simulate", "cost one inference step");
    add_common(simulate, opts);
    auto* sweep = app.add_subcommand(
        "sweep", "evaluate a model x hardware grid and emit CSV/JSON");
    sweep->add_option("--grid", grid_path, "grid config path")->required();
    add_common(sweep, opts, /*with_model=*/false);
    auto* dump = app.add_subcommand("dump-ops",
                                    "emit one phase's operator table as CSV");
    dump->add_option("--phase", dump_phase, "vision|prefill|decode|action")
        ->check(CLI::IsMember({"vision", "prefill", "decode", "action"}));
    add_common(dump, opts);

    try {
        app.parse(argc, argv);
        if (app.got_subcommand("catalog")) return cmd_catalog();
        if (app.got_subcommand("simulate")) return cmd_simulate(opts);
        if (app.got_subcommand("sweep")) return cmd_sweep(opts, grid_path);
        if (app.got_subcommand("dump-ops")) return cmd_dump_ops(opts, dump_phase);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) ? 1 : 0;
    } catch (const vlasim::FileError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const vlasim::CapacityError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    } catch (const vlasim::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
