#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "vlasim/common.hpp"
#include "vlasim/workload_model.hpp"

namespace vlasim {

// ---------------------------------------------------------------------------
// Operator graphs.
//
// A VlaModelSpec + RequestProfile lowers into four phases (vision encoding,
// prefill, autoregressive decode, action generation), each an ordered
// sequence of einsum-like operators with exact FLOP and byte accounting.
// These operators are the unit of costing for the roofline engine.
//
// Conventions:
//   - matmul operators: output batch x m x n, reduction k,
//     flops = 2*batch*m*n*k
//   - elementwise/normalization work per layer is folded into one overhead
//     operator: flops = 10*elements, bytes = two passes over the activations
//   - activations are 2 bytes/element; weights and KV cache use the dtypes
//     on the DecoderSpec
//   - weights are streamed from DRAM on every use (no cross-step caching)
// ---------------------------------------------------------------------------

enum class Phase { Vision, Prefill, Decode, Action };

inline std::string_view phase_name(Phase p) {
    switch (p) {
        case Phase::Vision: return "vision";
        case Phase::Prefill: return "prefill";
        case Phase::Decode: return "decode";
        case Phase::Action: return "action";
    }
    return "?";
}

enum class OpKind { MatMul, Elementwise };

// Structural role, used for phase accounting identities and reports.
enum class OpRole { Projection, AttentionScore, AttentionValue, Mlp, Logits, Overhead };

inline constexpr std::uint64_t kOverheadFlopsPerElement = 10;
inline constexpr std::uint64_t kActivationBytes = 2;

struct Operator {
    std::string name;
    Phase phase = Phase::Prefill;
    OpKind kind = OpKind::MatMul;
    OpRole role = OpRole::Projection;
    std::uint64_t batch = 1, m = 0, n = 0, k = 0;  // matmul dims
    std::uint64_t elements = 0;                    // elementwise dims
    std::uint64_t weight_bytes = 0;            // streamed from DRAM
    std::uint64_t activation_read_bytes = 0;
    std::uint64_t activation_write_bytes = 0;
    std::uint64_t kv_read_bytes = 0;
    std::uint64_t kv_write_bytes = 0;
    std::uint64_t innermost_contiguous_bytes = 0;
    std::uint64_t flops = 0;

    std::uint64_t total_bytes() const {
        return weight_bytes + activation_read_bytes + activation_write_bytes +
               kv_read_bytes + kv_write_bytes;
    }
    double arithmetic_intensity() const {
        return static_cast<double>(flops) / static_cast<double>(total_bytes());
    }
};

struct PhaseGraph {
    Phase phase = Phase::Prefill;
    std::vector<Operator> ops;
    std::uint64_t resident_weight_bytes = 0;  // weights that must stay resident
    std::uint64_t resident_kv_bytes = 0;      // KV cache at the end of the phase

    std::uint64_t resident_bytes() const {
        return resident_weight_bytes + resident_kv_bytes;
    }
};

struct GraphTotals {
    std::uint64_t flops = 0;
    std::uint64_t bytes = 0;
    std::uint64_t resident_bytes = 0;
};

inline GraphTotals graph_totals(const PhaseGraph& g) {
    GraphTotals t;
    for (const auto& op : g.ops) {
        t.flops += op.flops;
        t.bytes += op.total_bytes();
    }
    t.resident_bytes = g.resident_bytes();
    return t;
}

// ---------------------------------------------------------------------------
// Builders
// ---------------------------------------------------------------------------

namespace detail {

inline Operator matmul(std::string name, Phase phase, OpRole role,
                       std::uint64_t batch, std::uint64_t m, std::uint64_t n,
                       std::uint64_t k) {
    Operator op;
    op.name = std::move(name);
    op.phase = phase;
    op.kind = OpKind::MatMul;
    op.role = role;
    op.batch = batch;
    op.m = m;
    op.n = n;
    op.k = k;
    op.flops = 2 * batch * m * n * k;
    return op;
}

inline Operator overhead(std::string name, Phase phase, std::uint64_t elements,
                         std::uint64_t row_bytes) {
    Operator op;
    op.name = std::move(name);
    op.phase = phase;
    op.kind = OpKind::Elementwise;
    op.role = OpRole::Overhead;
    op.elements = elements;
    op.flops = kOverheadFlopsPerElement * elements;
    op.activation_read_bytes = elements * kActivationBytes;
    op.activation_write_bytes = elements * kActivationBytes;
    op.innermost_contiguous_bytes = row_bytes;
    return op;
}

// One decoder layer at sequence length m_len attending over ctx_kv cached
// tokens. Shared by prefill (m_len = ctx_kv = S), decode (m_len = 1) and the
// discrete action head.
inline void decoder_layer_ops(std::vector<Operator>& ops, const DecoderSpec& d,
                              Phase phase, const std::string& prefix,
                              std::uint64_t m_len, std::uint64_t ctx_kv) {
    const std::uint64_t wdt = d.weight_dtype_bytes;
    const std::uint64_t kvdt = d.kv_dtype_bytes;
    const std::uint64_t act = kActivationBytes;
    const std::uint64_t qkv_n = (d.n_heads + 2 * d.n_kv_heads) * d.d_head;
    const std::uint64_t kv_row = d.n_kv_heads * d.d_head;  // one K or V token

    {
        auto op = matmul(prefix + ".qkv", phase, OpRole::Projection, 1, m_len,
                         qkv_n, d.d_model);
        op.weight_bytes = d.d_model * qkv_n * wdt;
        op.activation_read_bytes = m_len * d.d_model * act;
        op.activation_write_bytes = m_len * d.n_heads * d.d_head * act;
        op.kv_write_bytes = m_len * 2 * kv_row * kvdt;
        op.innermost_contiguous_bytes = d.d_model * wdt;
        ops.push_back(std::move(op));
    }
    {
        auto op = matmul(prefix + ".attn_score", phase, OpRole::AttentionScore,
                         d.n_heads, m_len, ctx_kv, d.d_head);
        op.activation_read_bytes = m_len * d.n_heads * d.d_head * act;  // Q
        op.kv_read_bytes = ctx_kv * kv_row * kvdt;                      // K
        op.activation_write_bytes = d.n_heads * m_len * ctx_kv * act;
        op.innermost_contiguous_bytes = d.d_head * kvdt;
        ops.push_back(std::move(op));
    }
    {
        auto op = matmul(prefix + ".attn_value", phase, OpRole::AttentionValue,
                         d.n_heads, m_len, d.d_head, ctx_kv);
        op.activation_read_bytes = d.n_heads * m_len * ctx_kv * act;  // scores
        op.kv_read_bytes = ctx_kv * kv_row * kvdt;                    // V
        op.activation_write_bytes = m_len * d.n_heads * d.d_head * act;
        op.innermost_contiguous_bytes = d.d_head * kvdt;
        ops.push_back(std::move(op));
    }
    {
        auto op = matmul(prefix + ".out_proj", phase, OpRole::Projection, 1,
                         m_len, d.d_model, d.n_heads * d.d_head);
        op.weight_bytes = d.n_heads * d.d_head * d.d_model * wdt;
        op.activation_read_bytes = m_len * d.n_heads * d.d_head * act;
        op.activation_write_bytes = m_len * d.d_model * act;
        op.innermost_contiguous_bytes = d.n_heads * d.d_head * wdt;
        ops.push_back(std::move(op));
    }
    auto mlp = [&](const char* tag, std::uint64_t n, std::uint64_t k) {
        auto op = matmul(prefix + tag, phase, OpRole::Mlp, 1, m_len, n, k);
        op.weight_bytes = n * k * wdt;
        op.activation_read_bytes = m_len * k * act;
        op.activation_write_bytes = m_len * n * act;
        op.innermost_contiguous_bytes = k * wdt;
        ops.push_back(std::move(op));
    };
    mlp(".mlp_up", d.d_ff, d.d_model);
    mlp(".mlp_gate", d.d_ff, d.d_model);
    mlp(".mlp_down", d.d_model, d.d_ff);
    ops.push_back(overhead(prefix + ".overhead", phase, m_len * d.d_model,
                           d.d_model * act));
}

inline void logits_op(std::vector<Operator>& ops, const DecoderSpec& d,
                      Phase phase) {
    auto op = matmul("logits", phase, OpRole::Logits, 1, 1, d.vocab, d.d_model);
    op.weight_bytes = d.vocab * d.d_model * d.weight_dtype_bytes;
    op.activation_read_bytes = d.d_model * kActivationBytes;
    op.activation_write_bytes = d.vocab * kActivationBytes;
    op.innermost_contiguous_bytes = d.d_model * d.weight_dtype_bytes;
    ops.push_back(std::move(op));
}

// One pre-norm transformer layer over plain activations (no KV cache):
// vision backbones and the DiT action head. Attention is batched per image
// (n_batches images/samples of seq_len tokens each).
inline void encoder_layer_ops(std::vector<Operator>& ops, Phase phase,
                              const std::string& prefix, std::uint64_t d_model,
                              std::uint64_t n_heads, std::uint64_t d_ff,
                              std::uint64_t n_batches, std::uint64_t seq_len,
                              std::uint64_t wdt) {
    const std::uint64_t act = kActivationBytes;
    const std::uint64_t dh = d_model / n_heads;
    const std::uint64_t tokens = n_batches * seq_len;

    {
        auto op = matmul(prefix + ".qkv", phase, OpRole::Projection, 1, tokens,
                         3 * d_model, d_model);
        op.weight_bytes = d_model * 3 * d_model * wdt;
        op.activation_read_bytes = tokens * d_model * act;
        op.activation_write_bytes = tokens * 3 * d_model * act;
        op.innermost_contiguous_bytes = d_model * wdt;
        ops.push_back(std::move(op));
    }
    {
        auto op = matmul(prefix + ".attn_score", phase, OpRole::AttentionScore,
                         n_batches * n_heads, seq_len, seq_len, dh);
        op.activation_read_bytes = 2 * tokens * d_model * act;  // Q and K
        op.activation_write_bytes = n_batches * n_heads * seq_len * seq_len * act;
        op.innermost_contiguous_bytes = dh * act;
        ops.push_back(std::move(op));
    }
    {
        auto op = matmul(prefix + ".attn_value", phase, OpRole::AttentionValue,
                         n_batches * n_heads, seq_len, dh, seq_len);
        op.activation_read_bytes =
            n_batches * n_heads * seq_len * seq_len * act + tokens * d_model * act;
        op.activation_write_bytes = tokens * d_model * act;
        op.innermost_contiguous_bytes = dh * act;
        ops.push_back(std::move(op));
    }
    {
        auto op = matmul(prefix + ".out_proj", phase, OpRole::Projection, 1,
                         tokens, d_model, d_model);
        op.weight_bytes = d_model * d_model * wdt;
        op.activation_read_bytes = tokens * d_model * act;
        op.activation_write_bytes = tokens * d_model * act;
        op.innermost_contiguous_bytes = d_model * wdt;
        ops.push_back(std::move(op));
    }
    auto mlp = [&](const char* tag, std::uint64_t n, std::uint64_t k) {
        auto op = matmul(prefix + tag, phase, OpRole::Mlp, 1, tokens, n, k);
        op.weight_bytes = n * k * wdt;
        op.activation_read_bytes = tokens * k * act;
        op.activation_write_bytes = tokens * n * act;
        op.innermost_contiguous_bytes = k * wdt;
        ops.push_back(std::move(op));
    };
    mlp(".mlp_up", d_ff, d_model);
    mlp(".mlp_gate", d_ff, d_model);
    mlp(".mlp_down", d_model, d_ff);
    ops.push_back(
        overhead(prefix + ".overhead", phase, tokens * d_model, d_model * act));
}

}  // namespace detail

// Vision encoding: every fused backbone runs over all images (per-image
// attention, no cross-image mixing), then the projector MLP maps the
// channel-concatenated features into the decoder embedding space.
inline PhaseGraph vision_graph(const VlaModelSpec& model,
                               const RequestProfile& request) {
    PhaseGraph g;
    g.phase = Phase::Vision;
    if (request.n_images == 0) return g;

    const auto& v = model.vision;
    const std::uint64_t wdt = model.decoder.weight_dtype_bytes;
    for (std::uint64_t b = 0; b < v.n_backbones; ++b) {
        for (std::uint64_t l = 0; l < v.layers; ++l) {
            detail::encoder_layer_ops(
                g.ops, Phase::Vision,
                "B" + std::to_string(b) + ".L" + std::to_string(l), v.d_model,
                v.n_heads, v.d_ff, request.n_images, v.tokens_per_image, wdt);
        }
    }
    // Projector over the concatenated backbone channels.
    const std::uint64_t tokens = request.n_images * v.tokens_per_image;
    std::uint64_t prev = v.n_backbones * v.d_model;
    for (std::size_t i = 0; i < v.projector_dims.size(); ++i) {
        const std::uint64_t w = v.projector_dims[i];
        auto op = detail::matmul("proj." + std::to_string(i), Phase::Vision,
                                 OpRole::Projection, 1, tokens, w, prev);
        op.weight_bytes = prev * w * wdt;
        op.activation_read_bytes = tokens * prev * kActivationBytes;
        op.activation_write_bytes = tokens * w * kActivationBytes;
        op.innermost_contiguous_bytes = prev * wdt;
        g.ops.push_back(std::move(op));
        prev = w;
    }
    g.resident_weight_bytes = param_count(v) * wdt;
    return g;
}

// Prefill: the decoder processes the full context in parallel and populates
// the KV cache; one logits evaluation for the first generated token.
inline PhaseGraph prefill_graph(const VlaModelSpec& model,
                                std::uint64_t context_tokens) {
    PhaseGraph g;
    g.phase = Phase::Prefill;
    const auto& d = model.decoder;
    g.resident_weight_bytes = weight_bytes(d);
    if (context_tokens == 0) return g;
    for (std::uint64_t l = 0; l < d.layers; ++l)
        detail::decoder_layer_ops(g.ops, d, Phase::Prefill,
                                  "L" + std::to_string(l), context_tokens,
                                  context_tokens);
    detail::logits_op(g.ops, d, Phase::Prefill);
    g.resident_kv_bytes = context_tokens * kv_bytes_per_token(d);
    return g;
}

// One autoregressive decode step: single-token GEMV-like layers attending
// over context_len cached tokens, plus the logits evaluation. The step
// re-streams every decoder weight and appends one token to the KV cache.
inline PhaseGraph decode_step_graph(const VlaModelSpec& model,
                                    std::uint64_t context_len,
                                    Phase phase = Phase::Decode) {
    PhaseGraph g;
    g.phase = phase;
    const auto& d = model.decoder;
    g.resident_weight_bytes = weight_bytes(d);
    if (context_len == 0) return g;
    for (std::uint64_t l = 0; l < d.layers; ++l)
        detail::decoder_layer_ops(g.ops, d, phase, "L" + std::to_string(l), 1,
                                  context_len);
    detail::logits_op(g.ops, d, phase);
    g.resident_kv_bytes = (context_len + 1) * kv_bytes_per_token(d);
    return g;
}

// Decoder context length after vision + prompt ingestion.
inline std::uint64_t prefill_context(const VlaModelSpec& model,
                                     const RequestProfile& request) {
    return request.n_images * model.vision.tokens_per_image +
           request.prompt_tokens;
}

// Action generation. Discrete heads decode action_tokens_per_step tokens per
// action through the backbone, continuing at the post-reasoning context;
// DiT heads run diffusion_steps full forward passes over the horizon.
inline PhaseGraph action_graph(const VlaModelSpec& model,
                               const RequestProfile& request) {
    PhaseGraph g;
    g.phase = Phase::Action;
    const auto& a = model.action;
    if (request.actions_per_inference == 0) return g;

    if (a.kind == ActionHeadKind::DiscreteTokens) {
        const auto& d = model.decoder;
        const std::uint64_t steps =
            a.action_tokens_per_step * request.actions_per_inference;
        std::uint64_t base = prefill_context(model, request);
        if (base == 0) base = 1;  // implicit BOS when there is no context
        const std::uint64_t ctx = base + request.generated_tokens;
        g.resident_weight_bytes = weight_bytes(d);
        for (std::uint64_t t = 0; t < steps; ++t) {
            const std::string prefix = "a" + std::to_string(t);
            for (std::uint64_t l = 0; l < d.layers; ++l)
                detail::decoder_layer_ops(g.ops, d, Phase::Action,
                                          prefix + ".L" + std::to_string(l), 1,
                                          ctx + t);
            detail::logits_op(g.ops, d, Phase::Action);
        }
        g.resident_kv_bytes = (ctx + steps) * kv_bytes_per_token(d);
        return g;
    }

    // DiffusionTransformer: iterative denoising over the action horizon.
    const std::uint64_t wdt = model.decoder.weight_dtype_bytes;
    for (std::uint64_t s = 0; s < a.diffusion_steps; ++s) {
        for (std::uint64_t l = 0; l < a.layers; ++l) {
            detail::encoder_layer_ops(
                g.ops, Phase::Action,
                "dit.s" + std::to_string(s) + ".L" + std::to_string(l),
                a.d_model, a.n_heads, a.d_ff, 1, a.horizon_tokens, wdt);
        }
    }
    g.resident_weight_bytes = param_count(a) * wdt;
    return g;
}

// ---------------------------------------------------------------------------
// Debug dump for oracle diffing.
// ---------------------------------------------------------------------------

inline void write_ops_csv(std::ostream& os, const PhaseGraph& g) {
    os << "name,phase,batch,m,n,k,flops,weight_bytes,kv_read_bytes,"
          "activation_bytes,intensity\n";
    for (const auto& op : g.ops) {
        const bool mm = op.kind == OpKind::MatMul;
        os << op.name << ',' << phase_name(op.phase) << ','
           << (mm ? op.batch : 0) << ',' << (mm ? op.m : 0) << ','
           << (mm ? op.n : 0) << ',' << (mm ? op.k : 0) << ',' << op.flops
           << ',' << op.weight_bytes << ',' << op.kv_read_bytes << ','
           << op.activation_read_bytes + op.activation_write_bytes << ','
           << fmt_g6(op.arithmetic_intensity()) << '\n';
    }
}

}  // namespace vlasim
