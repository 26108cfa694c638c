#pragma once

#include <cstdint>
#include <random>

#include "vlasim/hw_model.hpp"
#include "vlasim/op_graph.hpp"
#include "vlasim/workload_model.hpp"

namespace testutil {

using Rng = std::mt19937_64;

inline std::uint64_t pick(Rng& rng, std::uint64_t lo, std::uint64_t hi) {
    return std::uniform_int_distribution<std::uint64_t>(lo, hi)(rng);
}

inline double pick_real(Rng& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Tiny architectures for exhaustive einsum enumeration.
inline vlasim::DecoderSpec tiny_decoder(Rng& rng) {
    vlasim::DecoderSpec d;
    d.layers = pick(rng, 1, 2);
    d.n_heads = 1ull << pick(rng, 0, 2);   // 1, 2, 4
    d.d_head = 1ull << pick(rng, 0, 2);
    d.d_model = d.n_heads * d.d_head;
    // n_kv_heads: random divisor of n_heads
    do {
        d.n_kv_heads = pick(rng, 1, d.n_heads);
    } while (d.n_heads % d.n_kv_heads != 0);
    d.d_ff = pick(rng, 1, 8);
    d.vocab = pick(rng, 1, 12);
    d.weight_dtype_bytes = 1u << pick(rng, 0, 2);  // 1, 2, 4
    d.kv_dtype_bytes = 1u << pick(rng, 0, 2);
    return d;
}

inline vlasim::VlaModelSpec tiny_model(Rng& rng) {
    vlasim::VlaModelSpec m;
    m.name = "tiny";
    m.decoder = tiny_decoder(rng);
    m.vision.n_backbones = pick(rng, 1, 2);
    m.vision.layers = pick(rng, 1, 2);
    m.vision.n_heads = 1ull << pick(rng, 0, 1);
    m.vision.d_model = m.vision.n_heads * (1ull << pick(rng, 0, 2));
    m.vision.d_ff = pick(rng, 1, 8);
    m.vision.tokens_per_image = pick(rng, 1, 6);
    m.vision.projector_dims = {pick(rng, 1, 8), m.decoder.d_model};
    if (pick(rng, 0, 1) == 0) {
        m.action.kind = vlasim::ActionHeadKind::DiscreteTokens;
        m.action.action_tokens_per_step = pick(rng, 1, 3);
    } else {
        m.action.kind = vlasim::ActionHeadKind::DiffusionTransformer;
        m.action.n_heads = 1ull << pick(rng, 0, 1);
        m.action.d_model = m.action.n_heads * (1ull << pick(rng, 0, 2));
        m.action.layers = pick(rng, 1, 2);
        m.action.d_ff = pick(rng, 1, 6);
        m.action.horizon_tokens = pick(rng, 1, 5);
        m.action.diffusion_steps = pick(rng, 1, 3);
    }
    return m;
}

// Random standalone matmul operator with realistic traffic fields.
inline vlasim::Operator random_matmul(Rng& rng, std::uint64_t lo = 64,
                                      std::uint64_t hi = 4096) {
    vlasim::Operator op;
    op.name = "rand";
    op.kind = vlasim::OpKind::MatMul;
    op.batch = pick(rng, 1, 4);
    op.m = pick(rng, lo, hi);
    op.n = pick(rng, lo, hi);
    op.k = pick(rng, lo, hi);
    op.flops = 2 * op.batch * op.m * op.n * op.k;
    op.weight_bytes = op.n * op.k * 2;
    op.activation_read_bytes = op.batch * op.m * op.k * 2;
    op.activation_write_bytes = op.batch * op.m * op.n * 2;
    op.innermost_contiguous_bytes = pick(rng, 0, 1) ? op.k * 2 : 128;
    return op;
}

}  // namespace testutil
