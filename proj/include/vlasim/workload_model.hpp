#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vlasim/errors.hpp"

namespace vlasim {

// ---------------------------------------------------------------------------
// VLA model architecture descriptors (vision encoder -> decoder backbone ->
// action head) and a per-inference token budget. All value types, all
// operations pure.
// ---------------------------------------------------------------------------

struct VisionEncoderSpec {
    std::uint64_t n_backbones = 2;  // fused image backbones, channel-concat
    std::uint64_t layers = 24;      // per backbone
    std::uint64_t d_model = 1024;
    std::uint64_t n_heads = 16;
    std::uint64_t d_ff = 4096;
    std::uint64_t tokens_per_image = 1024;
    // MLP widths mapping the concatenated backbone features into the decoder
    // embedding space; the last width must equal the decoder d_model.
    std::vector<std::uint64_t> projector_dims = {4096, 4096};

    bool operator==(const VisionEncoderSpec&) const = default;
};

struct DecoderSpec {
    std::uint64_t layers = 32;
    std::uint64_t d_model = 4096;
    std::uint64_t n_heads = 32;
    std::uint64_t n_kv_heads = 32;
    std::uint64_t d_head = 128;
    std::uint64_t d_ff = 11008;
    std::uint64_t vocab = 32000;
    std::uint32_t weight_dtype_bytes = 2;  // BF16
    std::uint32_t kv_dtype_bytes = 2;

    bool operator==(const DecoderSpec&) const = default;
};

enum class ActionHeadKind { DiscreteTokens, DiffusionTransformer };

struct ActionHeadSpec {
    ActionHeadKind kind = ActionHeadKind::DiscreteTokens;
    // DiscreteTokens: autoregressive action tokens emitted per action step.
    std::uint64_t action_tokens_per_step = 10;
    // DiffusionTransformer dims.
    std::uint64_t layers = 0;
    std::uint64_t d_model = 0;
    std::uint64_t n_heads = 0;
    std::uint64_t d_ff = 0;
    std::uint64_t horizon_tokens = 0;
    std::uint64_t diffusion_steps = 0;

    bool operator==(const ActionHeadSpec&) const = default;
};

struct VlaModelSpec {
    std::string name;
    VisionEncoderSpec vision;
    DecoderSpec decoder;
    ActionHeadSpec action;

    bool operator==(const VlaModelSpec&) const = default;
};

// Per-inference token budget of one control step.
struct RequestProfile {
    std::uint64_t n_images = 1;
    std::uint64_t prompt_tokens = 64;
    // Reasoning / waypoint tokens decoded autoregressively before the action
    // head runs. Calibration default; see the project README.
    std::uint64_t generated_tokens = 230;
    std::uint64_t actions_per_inference = 8;  // action horizon H
    double target_frequency = 10.0;           // Hz

    bool operator==(const RequestProfile&) const = default;
};

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

inline void validate(const VisionEncoderSpec& v) {
    auto fail = [](const std::string& key, const std::string& msg) {
        throw ValidationError(key, "vision spec: " + msg);
    };
    if (v.n_backbones < 1 || v.layers < 1 || v.d_model < 1 || v.n_heads < 1 ||
        v.d_ff < 1 || v.tokens_per_image < 1)
        fail("vision", "all dimensions must be >= 1");
    if (v.d_model % v.n_heads != 0)
        fail("vision.n_heads", "d_model must be divisible by n_heads");
    for (auto w : v.projector_dims)
        if (w < 1) fail("vision.projector_dims", "projector widths must be >= 1");
}

inline void validate(const DecoderSpec& d) {
    auto fail = [](const std::string& key, const std::string& msg) {
        throw ValidationError(key, "decoder spec: " + msg);
    };
    if (d.d_model < 1 || d.n_heads < 1 || d.n_kv_heads < 1 || d.d_head < 1 ||
        d.d_ff < 1 || d.vocab < 1)
        fail("decoder", "all dimensions must be >= 1");
    if (d.n_heads % d.n_kv_heads != 0)
        fail("decoder.n_kv_heads", "n_kv_heads must divide n_heads");
    if (d.d_model != d.n_heads * d.d_head)
        fail("decoder.d_head", "d_model must equal n_heads * d_head");
    auto dtype_ok = [](std::uint32_t b) { return b == 1 || b == 2 || b == 4; };
    if (!dtype_ok(d.weight_dtype_bytes))
        fail("decoder.weight_dtype_bytes", "dtype bytes must be 1, 2 or 4");
    if (!dtype_ok(d.kv_dtype_bytes))
        fail("decoder.kv_dtype_bytes", "dtype bytes must be 1, 2 or 4");
}

inline void validate(const ActionHeadSpec& a) {
    auto fail = [](const std::string& key, const std::string& msg) {
        throw ValidationError(key, "action spec: " + msg);
    };
    if (a.kind == ActionHeadKind::DiscreteTokens) {
        if (a.action_tokens_per_step < 1)
            fail("action.action_tokens_per_step", "must be >= 1");
    } else {
        if (a.layers < 1 || a.d_model < 1 || a.n_heads < 1 || a.d_ff < 1 ||
            a.horizon_tokens < 1 || a.diffusion_steps < 1)
            fail("action", "all DiT dimensions must be >= 1");
        if (a.d_model % a.n_heads != 0)
            fail("action.n_heads", "d_model must be divisible by n_heads");
    }
}

inline void validate(const VlaModelSpec& m) {
    validate(m.vision);
    validate(m.decoder);
    validate(m.action);
    if (m.vision.projector_dims.empty() ||
        m.vision.projector_dims.back() != m.decoder.d_model)
        throw ValidationError("vision.projector_dims",
                              "projector output width must equal decoder d_model");
}

inline void validate(const RequestProfile& r) {
    if (!(r.target_frequency > 0))
        throw ValidationError("target_hz", "target_hz must be > 0");
}

// ---------------------------------------------------------------------------
// Parameter and byte accounting.
//
// Decoder parameter count (tied embedding counted once):
//   layers * (d_model*d_head*(n_heads + 2*n_kv_heads)   // fused QKV
//             + n_heads*d_head*d_model                  // output projection
//             + 3*d_model*d_ff)                         // gated MLP
//   + vocab*d_model
// Vision backbones and the DiT action head are counted with the same layer
// formula (full KV heads, no vocab); the projector is a plain MLP chain.
// ---------------------------------------------------------------------------

inline std::uint64_t param_count(const DecoderSpec& d) {
    const std::uint64_t per_layer =
        d.d_model * d.d_head * (d.n_heads + 2 * d.n_kv_heads) +
        d.n_heads * d.d_head * d.d_model + 3 * d.d_model * d.d_ff;
    return d.layers * per_layer + d.vocab * d.d_model;
}

inline std::uint64_t param_count(const VisionEncoderSpec& v) {
    const std::uint64_t per_layer =
        3 * v.d_model * v.d_model + v.d_model * v.d_model +
        3 * v.d_model * v.d_ff;
    std::uint64_t total = v.n_backbones * v.layers * per_layer;
    std::uint64_t prev = v.n_backbones * v.d_model;  // channel-concat features
    for (auto w : v.projector_dims) {
        total += prev * w;
        prev = w;
    }
    return total;
}

inline std::uint64_t param_count(const ActionHeadSpec& a) {
    if (a.kind == ActionHeadKind::DiscreteTokens) return 0;  // reuses decoder
    const std::uint64_t per_layer =
        4 * a.d_model * a.d_model + 3 * a.d_model * a.d_ff;
    return a.layers * per_layer;
}

inline std::uint64_t param_count(const VlaModelSpec& m) {
    return param_count(m.vision) + param_count(m.decoder) + param_count(m.action);
}

// Weight footprint. Vision, projector and DiT weights are priced at the
// decoder's weight dtype (the config schema carries dtype only there).
inline std::uint64_t weight_bytes(const DecoderSpec& d) {
    return param_count(d) * d.weight_dtype_bytes;
}

inline std::uint64_t weight_bytes(const VlaModelSpec& m) {
    return param_count(m) * m.decoder.weight_dtype_bytes;
}

// KV-cache bytes appended per cached token (K and V, all layers).
inline std::uint64_t kv_bytes_per_token(const DecoderSpec& d) {
    return 2 * d.layers * d.n_kv_heads * d.d_head * d.kv_dtype_bytes;
}

// ---------------------------------------------------------------------------
// Deterministic architecture scaling.
//
// Holds d_head, vocab, the KV-head ratio and the d_ff/d_model ratio fixed
// from the template, picks the layer count from a size bucket, and solves
// d_model (a multiple of d_head) so the total parameter count lands within
// 5% of the target. The vision encoder and action head are carried over
// unchanged except that the projector's output width follows the new
// decoder d_model.
// ---------------------------------------------------------------------------

inline std::uint64_t scale_layer_bucket(std::uint64_t target_params) {
    if (target_params <= 8'000'000'000ull) return 32;
    if (target_params <= 15'000'000'000ull) return 40;
    if (target_params <= 40'000'000'000ull) return 48;
    if (target_params <= 80'000'000'000ull) return 64;
    if (target_params <= 120'000'000'000ull) return 80;
    throw ScalingError("scale_to: target above the 120B layer-bucket table",
                       120'000'000'000ull);
}

inline VlaModelSpec scale_to(std::uint64_t target_params,
                             const VlaModelSpec& tmpl) {
    validate(tmpl);
    const std::uint64_t tmpl_params = param_count(tmpl);
    if (target_params * 4 < tmpl_params)
        throw ScalingError(
            "scale_to: target is below a quarter of the template size",
            tmpl_params / 4);
    if (target_params == tmpl_params) return tmpl;

    const std::uint64_t layers = scale_layer_bucket(target_params);
    const DecoderSpec& td = tmpl.decoder;
    const std::uint64_t dh = td.d_head;

    // Candidate spec for a given d_model; ratios derived from the template
    // with exact integer rounding so re-scaling a scaled spec is stable.
    auto candidate = [&](std::uint64_t d_model) {
        VlaModelSpec m = tmpl;
        m.decoder.layers = layers;
        m.decoder.d_model = d_model;
        m.decoder.d_head = dh;
        m.decoder.n_heads = d_model / dh;
        m.decoder.d_ff =
            (td.d_ff * d_model + td.d_model / 2) / td.d_model;
        if (m.decoder.d_ff < 1) m.decoder.d_ff = 1;
        // n_kv_heads: divisor of n_heads closest to the template's KV ratio
        // (compared in exact integer arithmetic; ties take the larger).
        std::uint64_t best_kv = m.decoder.n_heads;
        std::uint64_t best_dist = ~0ull;
        for (std::uint64_t div = 1; div <= m.decoder.n_heads; ++div) {
            if (m.decoder.n_heads % div != 0) continue;
            const std::int64_t delta =
                static_cast<std::int64_t>(div * td.n_heads) -
                static_cast<std::int64_t>(td.n_kv_heads * m.decoder.n_heads);
            const std::uint64_t dist = delta < 0 ? -delta : delta;
            if (dist < best_dist || (dist == best_dist && div > best_kv)) {
                best_dist = dist;
                best_kv = div;
            }
        }
        m.decoder.n_kv_heads = best_kv;
        m.vision.projector_dims.back() = d_model;
        return m;
    };

    // Continuous estimate of d_model ignoring the linear (vocab/projector)
    // terms, then exact hill descent over multiples of d_head. The KV-head
    // divisor choice can dent strict monotonicity for unusual templates, so
    // the descent is capped and finished with a small window scan.
    const double r_ff = static_cast<double>(td.d_ff) / td.d_model;
    const double r_kv = static_cast<double>(td.n_kv_heads) / td.n_heads;
    const double per_d2 = (2.0 + 2.0 * r_kv + 3.0 * r_ff) * layers;
    const double fixed = static_cast<double>(param_count(tmpl.vision)) +
                         static_cast<double>(param_count(tmpl.action));
    double want = static_cast<double>(target_params) - fixed;
    if (want < 1) want = 1;
    const double d0 = std::max(1.0, std::sqrt(want / per_d2));
    std::uint64_t mult = static_cast<std::uint64_t>(d0 / dh + 0.5);
    if (mult < 1) mult = 1;

    auto dist_at = [&](std::uint64_t mm) {
        const std::uint64_t p = param_count(candidate(mm * dh));
        return p > target_params ? p - target_params : target_params - p;
    };
    std::uint64_t best_dist = dist_at(mult);
    for (int steps = 0; steps < 1 << 20; ++steps) {
        if (mult > 1 && dist_at(mult - 1) <= best_dist) {
            --mult;  // prefer the smaller d_model on ties
            best_dist = dist_at(mult);
        } else if (dist_at(mult + 1) < best_dist) {
            ++mult;
            best_dist = dist_at(mult);
        } else {
            break;
        }
    }
    std::uint64_t best_mult = mult;
    for (std::uint64_t mm = mult > 8 ? mult - 8 : 1; mm <= mult + 8; ++mm) {
        const std::uint64_t dist = dist_at(mm);
        if (dist < best_dist) {
            best_dist = dist;
            best_mult = mm;
        }
    }
    VlaModelSpec best = candidate(best_mult * dh);
    const std::uint64_t best_params = param_count(best);

    if (best_dist * 20 > target_params) {  // outside the 5% band
        throw ScalingError(
            "scale_to: no d_model multiple of d_head lands within 5% of the "
            "target; nearest achievable parameter count is " +
                std::to_string(best_params),
            best_params);
    }
    validate(best);
    return best;
}

// ---------------------------------------------------------------------------
// Bundled models.
// ---------------------------------------------------------------------------

// 7B-class stand-in: two fused ViT-L-ish image backbones with a channel-concat
// MLP projector, a LLaMA-shaped decoder, and a discrete-token action head.
inline VlaModelSpec default_molmoact_7b() {
    VlaModelSpec m;
    m.name = "molmoact-7b-class";
    return m;  // field defaults above are the bundled architecture
}

inline RequestProfile default_request() { return {}; }

inline const std::vector<std::string>& bundled_model_names() {
    static const std::vector<std::string> names = {
        "molmoact-7b-class", "vla-10b", "vla-40b", "vla-100b"};
    return names;
}

inline std::optional<VlaModelSpec> bundled_model(std::string_view name) {
    const auto tmpl = default_molmoact_7b();
    auto scaled = [&](std::uint64_t target, std::string n) {
        VlaModelSpec m = scale_to(target, tmpl);
        m.name = std::move(n);
        return m;
    };
    if (name == "molmoact-7b-class") return tmpl;
    if (name == "vla-10b") return scaled(10'000'000'000ull, "vla-10b");
    if (name == "vla-40b") return scaled(40'000'000'000ull, "vla-40b");
    if (name == "vla-100b") return scaled(100'000'000'000ull, "vla-100b");
    return std::nullopt;
}

}  // namespace vlasim
