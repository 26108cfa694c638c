#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "vlasim/common.hpp"
#include "vlasim/errors.hpp"
#include "vlasim/hw_model.hpp"
#include "vlasim/workload_model.hpp"

namespace vlasim {

// ---------------------------------------------------------------------------
// Config documents (JSON key/value trees).
//
// Hardware:
//   { name, memory_technology, bw_gbps, tflops_bf16_soc, capacity_gb,
//     sm_count, tile {m,n,k}, sram_mib,
//     derate {contiguous, strided, min_contiguous_bytes},
//     pim {bw_gbps, tflops_bf16, threshold_flop_per_byte} }   (pim optional)
// Model:
//   { name, vision {...}, decoder {...}, action {kind, ...} }
// Request:
//   { n_images, prompt_tokens, generated_tokens, actions_per_inference,
//     target_hz }
//
// Unknown keys are rejected; bw_gbps and tflops_bf16_soc are required on
// hardware documents, everything else defaults.
// ---------------------------------------------------------------------------

using json = nlohmann::ordered_json;

namespace detail {

inline json parse_document(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("<document>", std::string("not a valid config document: ") + e.what());
    }
}

inline void require_object(const json& j, const std::string& key) {
    if (!j.is_object())
        throw ParseError(key, "key \"" + key + "\" must be an object");
}

inline void reject_unknown(const json& j, const std::string& scope,
                           std::initializer_list<std::string_view> allowed) {
    for (const auto& [key, _] : j.items()) {
        bool known = false;
        for (auto a : allowed)
            if (key == a) { known = true; break; }
        if (!known) {
            const std::string full = scope.empty() ? key : scope + "." + key;
            throw ParseError(full, "unknown key \"" + full + "\"");
        }
    }
}

inline double get_number(const json& j, const std::string& key, double dflt,
                         bool required = false) {
    if (!j.contains(key)) {
        if (required)
            throw ParseError(key, "\"" + key + "\" is required");
        return dflt;
    }
    const auto& v = j.at(key);
    if (!v.is_number())
        throw ParseError(key, "\"" + key + "\" must be a number");
    return v.get<double>();
}

inline std::uint64_t get_count(const json& j, const std::string& key,
                               std::uint64_t dflt) {
    if (!j.contains(key)) return dflt;
    const auto& v = j.at(key);
    if (!v.is_number_integer())
        throw ParseError(key, "\"" + key + "\" must be an integer");
    const auto raw = v.get<std::int64_t>();
    if (raw < 0)
        throw ValidationError(key, "\"" + key + "\" must be >= 0");
    return static_cast<std::uint64_t>(raw);
}

inline std::string get_string(const json& j, const std::string& key,
                              std::string dflt) {
    if (!j.contains(key)) return dflt;
    const auto& v = j.at(key);
    if (!v.is_string())
        throw ParseError(key, "\"" + key + "\" must be a string");
    return v.get<std::string>();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Hardware
// ---------------------------------------------------------------------------

inline HardwareSpec parse_hardware_spec(const std::string& text) {
    using namespace detail;
    const json j = parse_document(text);
    if (!j.is_object())
        throw ParseError("<document>", "hardware document must be an object");
    reject_unknown(j, "",
                   {"name", "memory_technology", "bw_gbps", "tflops_bf16_soc",
                    "tflops_bf16", "capacity_gb", "sm_count", "tile",
                    "sram_mib", "derate", "pim"});

    HardwareSpec hw;
    hw.name = get_string(j, "name", "custom");
    {
        const std::string label =
            get_string(j, "memory_technology", "other");
        auto tech = memory_technology_from_label(label);
        if (!tech)
            throw ParseError("memory_technology",
                             "unknown memory_technology \"" + label + "\"");
        hw.memory_technology = *tech;
    }
    hw.dram_bandwidth = get_number(j, "bw_gbps", 0, /*required=*/true) * kGB;
    // "tflops_bf16" is accepted as an alias for the SoC figure.
    if (j.contains("tflops_bf16_soc"))
        hw.soc_peak_compute = get_number(j, "tflops_bf16_soc", 0) * kTFLOPS;
    else
        hw.soc_peak_compute =
            get_number(j, "tflops_bf16", 0, /*required=*/true) * kTFLOPS;
    hw.memory_capacity =
        static_cast<std::uint64_t>(get_number(j, "capacity_gb", 64) * kGB);
    hw.sm_count = get_count(j, "sm_count", 16);
    if (j.contains("tile")) {
        require_object(j.at("tile"), "tile");
        reject_unknown(j.at("tile"), "tile", {"m", "n", "k"});
        hw.tile_m = get_count(j.at("tile"), "m", 128);
        hw.tile_n = get_count(j.at("tile"), "n", 128);
        hw.tile_k = get_count(j.at("tile"), "k", 64);
    }
    hw.sram_bytes = static_cast<std::uint64_t>(
        get_number(j, "sram_mib", 32) * static_cast<double>(kMiB));
    if (j.contains("derate")) {
        const auto& d = j.at("derate");
        require_object(d, "derate");
        reject_unknown(d, "derate",
                       {"contiguous", "strided", "min_contiguous_bytes"});
        hw.bandwidth_derate.contiguous_efficiency =
            get_number(d, "contiguous", 0.85);
        hw.bandwidth_derate.strided_efficiency = get_number(d, "strided", 0.55);
        hw.bandwidth_derate.min_contiguous_bytes =
            get_count(d, "min_contiguous_bytes", 256);
    }
    if (j.contains("pim")) {
        const auto& p = j.at("pim");
        require_object(p, "pim");
        reject_unknown(p, "pim",
                       {"bw_gbps", "tflops_bf16", "threshold_flop_per_byte"});
        PimPartition pim;
        pim.bandwidth = get_number(p, "bw_gbps", 0, /*required=*/true) * kGB;
        pim.peak_compute =
            get_number(p, "tflops_bf16", 0, /*required=*/true) * kTFLOPS;
        pim.placement_threshold =
            get_number(p, "threshold_flop_per_byte",
                       hw.soc_peak_compute / hw.dram_bandwidth);
        hw.pim = pim;
    }
    validate(hw);
    return hw;
}

inline json hardware_to_json(const HardwareSpec& hw) {
    json j;
    j["name"] = hw.name;
    j["memory_technology"] = std::string(memory_technology_label(hw.memory_technology));
    j["bw_gbps"] = hw.dram_bandwidth / kGB;
    j["tflops_bf16_soc"] = hw.soc_peak_compute / kTFLOPS;
    j["capacity_gb"] = static_cast<double>(hw.memory_capacity) / kGB;
    j["sm_count"] = hw.sm_count;
    j["tile"] = {{"m", hw.tile_m}, {"n", hw.tile_n}, {"k", hw.tile_k}};
    j["sram_mib"] = static_cast<double>(hw.sram_bytes) / static_cast<double>(kMiB);
    j["derate"] = {
        {"contiguous", hw.bandwidth_derate.contiguous_efficiency},
        {"strided", hw.bandwidth_derate.strided_efficiency},
        {"min_contiguous_bytes", hw.bandwidth_derate.min_contiguous_bytes}};
    if (hw.pim) {
        j["pim"] = {{"bw_gbps", hw.pim->bandwidth / kGB},
                    {"tflops_bf16", hw.pim->peak_compute / kTFLOPS},
                    {"threshold_flop_per_byte", hw.pim->placement_threshold}};
    }
    return j;
}

inline std::string serialize_hardware_spec(const HardwareSpec& hw) {
    return hardware_to_json(hw).dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Model
// ---------------------------------------------------------------------------

inline VlaModelSpec parse_model_spec(const std::string& text) {
    using namespace detail;
    const json j = parse_document(text);
    if (!j.is_object())
        throw ParseError("<document>", "model document must be an object");
    reject_unknown(j, "", {"name", "vision", "decoder", "action"});

    VlaModelSpec m;
    m.name = get_string(j, "name", "custom-model");
    if (j.contains("vision")) {
        const auto& v = j.at("vision");
        require_object(v, "vision");
        reject_unknown(v, "vision",
                       {"backbones", "layers", "d_model", "n_heads", "d_ff",
                        "tokens_per_image", "projector_dims"});
        m.vision.n_backbones = get_count(v, "backbones", m.vision.n_backbones);
        m.vision.layers = get_count(v, "layers", m.vision.layers);
        m.vision.d_model = get_count(v, "d_model", m.vision.d_model);
        m.vision.n_heads = get_count(v, "n_heads", m.vision.n_heads);
        m.vision.d_ff = get_count(v, "d_ff", m.vision.d_ff);
        m.vision.tokens_per_image =
            get_count(v, "tokens_per_image", m.vision.tokens_per_image);
        if (v.contains("projector_dims")) {
            const auto& a = v.at("projector_dims");
            if (!a.is_array())
                throw ParseError("vision.projector_dims",
                                 "\"projector_dims\" must be an array");
            m.vision.projector_dims.clear();
            for (const auto& e : a) {
                if (!e.is_number_integer() || e.get<std::int64_t>() < 1)
                    throw ValidationError("vision.projector_dims",
                                          "projector widths must be >= 1");
                m.vision.projector_dims.push_back(e.get<std::uint64_t>());
            }
        }
    }
    if (j.contains("decoder")) {
        const auto& d = j.at("decoder");
        require_object(d, "decoder");
        reject_unknown(d, "decoder",
                       {"layers", "d_model", "n_heads", "n_kv_heads", "d_head",
                        "d_ff", "vocab", "weight_dtype_bytes", "kv_dtype_bytes"});
        m.decoder.layers = get_count(d, "layers", m.decoder.layers);
        m.decoder.d_model = get_count(d, "d_model", m.decoder.d_model);
        m.decoder.n_heads = get_count(d, "n_heads", m.decoder.n_heads);
        m.decoder.n_kv_heads = get_count(d, "n_kv_heads", m.decoder.n_kv_heads);
        m.decoder.d_head = get_count(d, "d_head", m.decoder.d_head);
        m.decoder.d_ff = get_count(d, "d_ff", m.decoder.d_ff);
        m.decoder.vocab = get_count(d, "vocab", m.decoder.vocab);
        m.decoder.weight_dtype_bytes = static_cast<std::uint32_t>(
            get_count(d, "weight_dtype_bytes", m.decoder.weight_dtype_bytes));
        m.decoder.kv_dtype_bytes = static_cast<std::uint32_t>(
            get_count(d, "kv_dtype_bytes", m.decoder.kv_dtype_bytes));
    }
    if (j.contains("action")) {
        const auto& a = j.at("action");
        require_object(a, "action");
        reject_unknown(a, "action",
                       {"kind", "action_tokens_per_step", "layers", "d_model",
                        "n_heads", "d_ff", "horizon_tokens", "diffusion_steps"});
        const std::string kind = get_string(a, "kind", "discrete_tokens");
        if (kind == "discrete_tokens") {
            m.action.kind = ActionHeadKind::DiscreteTokens;
            m.action.action_tokens_per_step = get_count(
                a, "action_tokens_per_step", m.action.action_tokens_per_step);
        } else if (kind == "diffusion_transformer") {
            m.action.kind = ActionHeadKind::DiffusionTransformer;
            m.action.layers = get_count(a, "layers", 6);
            m.action.d_model = get_count(a, "d_model", 768);
            m.action.n_heads = get_count(a, "n_heads", 12);
            m.action.d_ff = get_count(a, "d_ff", 3072);
            m.action.horizon_tokens = get_count(a, "horizon_tokens", 16);
            m.action.diffusion_steps = get_count(a, "diffusion_steps", 10);
        } else {
            throw ParseError("action.kind",
                             "unknown action kind \"" + kind + "\"");
        }
    }
    validate(m);
    return m;
}

inline json model_to_json(const VlaModelSpec& m) {
    json j;
    j["name"] = m.name;
    j["vision"] = {{"backbones", m.vision.n_backbones},
                   {"layers", m.vision.layers},
                   {"d_model", m.vision.d_model},
                   {"n_heads", m.vision.n_heads},
                   {"d_ff", m.vision.d_ff},
                   {"tokens_per_image", m.vision.tokens_per_image},
                   {"projector_dims", m.vision.projector_dims}};
    j["decoder"] = {{"layers", m.decoder.layers},
                    {"d_model", m.decoder.d_model},
                    {"n_heads", m.decoder.n_heads},
                    {"n_kv_heads", m.decoder.n_kv_heads},
                    {"d_head", m.decoder.d_head},
                    {"d_ff", m.decoder.d_ff},
                    {"vocab", m.decoder.vocab},
                    {"weight_dtype_bytes", m.decoder.weight_dtype_bytes},
                    {"kv_dtype_bytes", m.decoder.kv_dtype_bytes}};
    if (m.action.kind == ActionHeadKind::DiscreteTokens) {
        j["action"] = {{"kind", "discrete_tokens"},
                       {"action_tokens_per_step", m.action.action_tokens_per_step}};
    } else {
        j["action"] = {{"kind", "diffusion_transformer"},
                       {"layers", m.action.layers},
                       {"d_model", m.action.d_model},
                       {"n_heads", m.action.n_heads},
                       {"d_ff", m.action.d_ff},
                       {"horizon_tokens", m.action.horizon_tokens},
                       {"diffusion_steps", m.action.diffusion_steps}};
    }
    return j;
}

inline std::string serialize_model_spec(const VlaModelSpec& m) {
    return model_to_json(m).dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Request
// ---------------------------------------------------------------------------

inline RequestProfile parse_request(const std::string& text) {
    using namespace detail;
    const json j = parse_document(text);
    if (!j.is_object())
        throw ParseError("<document>", "request document must be an object");
    reject_unknown(j, "",
                   {"n_images", "prompt_tokens", "generated_tokens",
                    "actions_per_inference", "target_hz"});
    RequestProfile r;
    r.n_images = get_count(j, "n_images", r.n_images);
    r.prompt_tokens = get_count(j, "prompt_tokens", r.prompt_tokens);
    r.generated_tokens = get_count(j, "generated_tokens", r.generated_tokens);
    r.actions_per_inference =
        get_count(j, "actions_per_inference", r.actions_per_inference);
    r.target_frequency = get_number(j, "target_hz", r.target_frequency);
    validate(r);
    return r;
}

inline json request_to_json(const RequestProfile& r) {
    return {{"n_images", r.n_images},
            {"prompt_tokens", r.prompt_tokens},
            {"generated_tokens", r.generated_tokens},
            {"actions_per_inference", r.actions_per_inference},
            {"target_hz", r.target_frequency}};
}

inline std::string serialize_request(const RequestProfile& r) {
    return request_to_json(r).dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Source resolution: builtin names resolve first, anything else is read as
// a file path.
// ---------------------------------------------------------------------------

inline std::string read_file(const std::string& path) {
    std::error_code ec;
    if (!std::filesystem::is_regular_file(path, ec))
        throw FileError(path, "cannot open file: " + path);
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FileError(path, "cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline HardwareSpec resolve_hardware(const std::string& source) {
    if (const HardwareSpec* hw = find_catalog(source)) return *hw;
    return parse_hardware_spec(read_file(source));
}

inline VlaModelSpec resolve_model(const std::string& source) {
    if (auto m = bundled_model(source)) return *m;
    return parse_model_spec(read_file(source));
}

inline RequestProfile resolve_request(const std::string& source) {
    if (source.empty() || source == "default") return default_request();
    return parse_request(read_file(source));
}

// ---------------------------------------------------------------------------
// Sweep grid: model list x hardware list x one request.
//   { models: [name-or-path...], hardware: [name-or-path...],
//     request: {...} | "path" }   (request optional)
// Relative paths inside a grid file resolve against the grid file's
// directory.
// ---------------------------------------------------------------------------

struct SweepGrid {
    std::vector<VlaModelSpec> models;
    std::vector<HardwareSpec> hardware;
    RequestProfile request;
};

inline SweepGrid parse_grid(const std::string& text,
                            const std::string& base_dir = "") {
    using namespace detail;
    const json j = parse_document(text);
    if (!j.is_object())
        throw ParseError("<document>", "grid document must be an object");
    reject_unknown(j, "", {"models", "hardware", "request"});

    auto with_base = [&](const std::string& source) {
        if (base_dir.empty() || (!source.empty() && source.front() == '/'))
            return source;
        return base_dir + "/" + source;
    };

    SweepGrid grid;
    for (const char* key : {"models", "hardware"}) {
        if (!j.contains(key) || !j.at(key).is_array() || j.at(key).empty())
            throw ParseError(key,
                             std::string("\"") + key +
                                 "\" must be a nonempty array of names or paths");
    }
    for (const auto& e : j.at("models")) {
        if (!e.is_string())
            throw ParseError("models", "\"models\" entries must be strings");
        const std::string s = e.get<std::string>();
        if (auto m = bundled_model(s))
            grid.models.push_back(std::move(*m));
        else
            grid.models.push_back(parse_model_spec(read_file(with_base(s))));
    }
    for (const auto& e : j.at("hardware")) {
        if (!e.is_string())
            throw ParseError("hardware", "\"hardware\" entries must be strings");
        const std::string s = e.get<std::string>();
        if (const HardwareSpec* hw = find_catalog(s))
            grid.hardware.push_back(*hw);
        else
            grid.hardware.push_back(
                parse_hardware_spec(read_file(with_base(s))));
    }
    if (j.contains("request")) {
        const auto& r = j.at("request");
        if (r.is_string()) {
            const std::string s = r.get<std::string>();
            grid.request = (s.empty() || s == "default")
                               ? default_request()
                               : parse_request(read_file(with_base(s)));
        } else {
            grid.request = parse_request(r.dump());
        }
    }
    return grid;
}

inline SweepGrid load_grid(const std::string& path) {
    std::string dir;
    if (auto slash = path.rfind('/'); slash != std::string::npos)
        dir = path.substr(0, slash);
    return parse_grid(read_file(path), dir);
}

}  // namespace vlasim
