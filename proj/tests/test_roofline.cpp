#include <catch2/catch_amalgamated.hpp>

#include "support/test_util.hpp"
#include "vlasim/roofline.hpp"

using namespace vlasim;
using Catch::Approx;

namespace {

Operator square_matmul(std::uint64_t n) {
    Operator op;
    op.name = "mm";
    op.batch = 1;
    op.m = op.n = op.k = n;
    op.flops = 2 * n * n * n;
    op.weight_bytes = n * n * 2;
    op.activation_read_bytes = n * n * 2;
    op.activation_write_bytes = n * n * 2;
    op.innermost_contiguous_bytes = n * 2;
    return op;
}

Operator byte_stream(std::uint64_t bytes, std::uint64_t innermost = 8192) {
    Operator op;
    op.name = "stream";
    op.kind = OpKind::Elementwise;
    op.weight_bytes = bytes;
    op.innermost_contiguous_bytes = innermost;
    return op;
}

}  // namespace

TEST_CASE("compute time with wave quantization", "[roofline]") {
    const auto& orin = *find_catalog("Orin");

    SECTION("4096^3 fills the machine exactly") {
        // 32x32 tiles over 16 SMs = 64 full waves, no edge waste
        const Operator op = square_matmul(4096);
        CHECK(compute_time(op, orin, Domain::SoC) ==
              Approx(2.0 * 4096 * 4096 * 4096 / 100e12).epsilon(1e-12));
    }
    SECTION("single-row GEMV pays the 1/128 edge-tile penalty") {
        Operator op = square_matmul(4096);
        op.m = 1;
        op.flops = 2ull * 1 * 4096 * 4096;
        const double t = compute_time(op, orin, Domain::SoC);
        CHECK(t == Approx(op.flops / (100e12 / 128.0)).epsilon(1e-12));
    }
    SECTION("zero flops take zero time") {
        Operator op = square_matmul(64);
        op.flops = 0;
        CHECK(compute_time(op, orin, Domain::SoC) == 0.0);
    }
    SECTION("non-matmul ops run at half peak") {
        Operator op;
        op.kind = OpKind::Elementwise;
        op.flops = 1'000'000'000ull;
        op.activation_read_bytes = 1;
        CHECK(compute_time(op, orin, Domain::SoC) ==
              Approx(1e9 / (100e12 * 0.5)));
    }
    SECTION("PIM has a flat compute ceiling") {
        const auto& pim_hw = *find_catalog("Orin+PIM");
        Operator op = square_matmul(1024);
        CHECK(compute_time(op, pim_hw, Domain::PIM) ==
              Approx(op.flops / 974e12));
    }
}

TEST_CASE("memory time with asymmetric derate", "[roofline]") {
    const auto& orin = *find_catalog("Orin");
    const auto& thor = *find_catalog("Thor");

    SECTION("a 14 GB contiguous stream on Orin") {
        const Operator op = byte_stream(14'000'000'000ull);
        CHECK(memory_time(op, orin, Domain::SoC) ==
              Approx(14e9 / (203e9 * 0.85)).epsilon(1e-12));  // ~81.1 ms
        // ideal-bandwidth floor is 14/203 ~ 68.97 ms
        CHECK(memory_time(op, orin, Domain::SoC) > 14e9 / 203e9);
    }
    SECTION("Orin/Thor time ratio is the bandwidth ratio") {
        const Operator op = byte_stream(14'000'000'000ull);
        const double ratio = memory_time(op, orin, Domain::SoC) /
                             memory_time(op, thor, Domain::SoC);
        CHECK(ratio == Approx(273.0 / 203.0).epsilon(1e-12));  // ~1.345
    }
    SECTION("short contiguous runs pay the strided efficiency") {
        const Operator contiguous = byte_stream(1'000'000, 256);
        const Operator strided = byte_stream(1'000'000, 128);
        CHECK(memory_time(contiguous, orin, Domain::SoC) ==
              Approx(1e6 / (203e9 * 0.85)));
        CHECK(memory_time(strided, orin, Domain::SoC) ==
              Approx(1e6 / (203e9 * 0.55)));
    }
    SECTION("zero bytes take zero time") {
        CHECK(memory_time(byte_stream(0), orin, Domain::SoC) == 0.0);
    }
}

TEST_CASE("placement", "[roofline]") {
    const auto& orin = *find_catalog("Orin");
    const auto& orin_pim = *find_catalog("Orin+PIM");
    const auto& thor_pim = *find_catalog("Thor+PIM");

    Operator gemv = square_matmul(4096);
    gemv.m = 1;
    gemv.flops = 2ull * 4096 * 4096;
    gemv.activation_read_bytes = 4096 * 2;
    gemv.activation_write_bytes = 4096 * 2;
    REQUIRE(gemv.arithmetic_intensity() < 2.0);

    const Operator big = square_matmul(4096);  // intensity ~1365 FLOP/B

    CHECK(place(gemv, thor_pim) == Domain::PIM);   // 1 < 1831.5
    CHECK(place(big, orin_pim) == Domain::SoC);    // 1365 > 492.6
    CHECK(place(gemv, orin) == Domain::SoC);       // no PIM at all
    CHECK(place(big, thor_pim) == Domain::PIM);    // 1365 < 1831.5
}

TEST_CASE("op_cost classification", "[roofline]") {
    const auto& orin = *find_catalog("Orin");

    SECTION("decode GEMV is memory bound on Orin") {
        Operator gemv = square_matmul(4096);
        gemv.m = 1;
        gemv.flops = 2ull * 4096 * 4096;
        const OpCost c = op_cost(gemv, orin);
        CHECK(c.bound == Bound::MemoryBound);
        CHECK(c.time == c.memory_time);
    }
    SECTION("4096^3 is compute bound on Orin") {
        const OpCost c = op_cost(square_matmul(4096), orin);
        CHECK(c.bound == Bound::ComputeBound);
        CHECK(c.time == c.compute_time);
    }
    SECTION("pure byte movement is memory bound with zero compute") {
        const OpCost c = op_cost(byte_stream(1'000'000), orin);
        CHECK(c.bound == Bound::MemoryBound);
        CHECK(c.compute_time == 0.0);
        CHECK(c.time == c.memory_time);
    }
    SECTION("exact ties classify as memory bound") {
        HardwareSpec hw = orin;
        hw.soc_peak_compute = 2e12;  // elementwise ceiling 1e12 FLOP/s
        hw.dram_bandwidth = 1e12;
        hw.bandwidth_derate.contiguous_efficiency = 1.0;
        hw.bandwidth_derate.strided_efficiency = 1.0;
        Operator op;
        op.kind = OpKind::Elementwise;
        op.flops = 1'000'000'000ull;
        op.weight_bytes = 1'000'000'000ull;
        op.innermost_contiguous_bytes = 8192;
        const OpCost c = op_cost(op, hw);
        CHECK(c.compute_time == c.memory_time);
        CHECK(c.bound == Bound::MemoryBound);
    }
    SECTION("achieved rates are consistent") {
        const Operator op = square_matmul(2048);
        const OpCost c = op_cost(op, orin);
        CHECK(c.achieved_flops_rate == Approx(op.flops / c.time));
        CHECK(c.achieved_bandwidth == Approx(op.total_bytes() / c.time));
    }
}

TEST_CASE("roofline lower bounds hold for random operators", "[roofline]") {
    testutil::Rng rng(55501);
    const std::vector<const HardwareSpec*> systems = {
        find_catalog("Orin"), find_catalog("Thor"), find_catalog("Orin+PIM"),
        find_catalog("Thor+PIM"), find_catalog("Orin+GDDR7")};
    for (int i = 0; i < 1000; ++i) {
        const Operator op = testutil::random_matmul(rng);
        const HardwareSpec& hw = *systems[i % systems.size()];
        const OpCost c = op_cost(op, hw);
        const double peak = c.placement == Domain::PIM ? hw.pim->peak_compute
                                                       : hw.soc_peak_compute;
        const double bw = c.placement == Domain::PIM ? hw.pim->bandwidth
                                                     : hw.dram_bandwidth;
        CHECK(c.time >= op.flops / peak * (1 - 1e-12));
        CHECK(c.time >= op.total_bytes() / bw * (1 - 1e-12));
        CHECK(c.time == std::max(c.compute_time, c.memory_time));
    }
}

TEST_CASE("more bandwidth or compute never hurts", "[roofline]") {
    testutil::Rng rng(91405);
    for (int i = 0; i < 200; ++i) {
        const Operator op = testutil::random_matmul(rng);
        HardwareSpec hw = *find_catalog("Orin+PIM");
        const double t0 = op_cost(op, hw).time;

        HardwareSpec faster_mem = hw;
        faster_mem.dram_bandwidth *= 2;
        faster_mem.pim->bandwidth *= 2;
        CHECK(op_cost(op, faster_mem).time <= t0 * (1 + 1e-12));

        HardwareSpec faster_soc = hw;
        faster_soc.soc_peak_compute *= 2;
        faster_soc.pim->peak_compute *= 2;
        // placement threshold held fixed; both domains only got faster
        CHECK(op_cost(op, faster_soc).time <= t0 * (1 + 1e-12));
    }
}

TEST_CASE("memory-bound time is exactly linear in bytes", "[roofline]") {
    const auto& orin = *find_catalog("Orin");
    const Operator one = byte_stream(1'000'000'000ull);
    const Operator four = byte_stream(4'000'000'000ull);
    CHECK(op_cost(four, orin).time ==
          Approx(4.0 * op_cost(one, orin).time).epsilon(1e-12));
}

TEST_CASE("PIM placement never loses to the hypothetical SoC run",
          "[roofline]") {
    testutil::Rng rng(31337);
    for (const char* name : {"Orin+PIM", "Thor+PIM"}) {
        const HardwareSpec& hw = *find_catalog(name);
        for (int i = 0; i < 200; ++i) {
            Operator op = testutil::random_matmul(rng);
            if (i % 3 == 0) {  // force GEMV-like shapes into the mix
                op.m = 1;
                op.flops = 2 * op.batch * op.n * op.k;
            }
            if (place(op, hw) != Domain::PIM) continue;
            const double pim_time =
                std::max(compute_time(op, hw, Domain::PIM),
                         memory_time(op, hw, Domain::PIM));
            const double soc_time =
                std::max(compute_time(op, hw, Domain::SoC),
                         memory_time(op, hw, Domain::SoC));
            CHECK(pim_time <= soc_time * (1 + 1e-12));
        }
    }
}

TEST_CASE("every decode matmul is memory bound on Orin and Thor",
          "[roofline]") {
    const VlaModelSpec m = default_molmoact_7b();
    for (const char* name : {"Orin", "Thor"}) {
        const HardwareSpec& hw = *find_catalog(name);
        // intensity sits below the ridge at any context
        for (std::uint64_t ctx : {1ull, 64ull, 512ull, 1088ull, 1500ull}) {
            const PhaseGraph g = decode_step_graph(m, ctx);
            for (const auto& op : g.ops) {
                if (op.kind != OpKind::MatMul) continue;
                INFO(name << " ctx=" << ctx << " op=" << op.name);
                CHECK(op.arithmetic_intensity() < ridge_point(hw));
            }
        }
        // at workload-scale contexts the time classification agrees
        // (degenerate few-token contexts can flip the tiny score/value ops
        //  compute bound through the edge-tile penalty)
        for (std::uint64_t ctx : {64ull, 512ull, 1088ull, 1500ull}) {
            const PhaseGraph g = decode_step_graph(m, ctx);
            for (const auto& op : g.ops) {
                if (op.kind != OpKind::MatMul) continue;
                const OpCost c = op_cost(op, hw);
                INFO(name << " ctx=" << ctx << " op=" << op.name);
                CHECK(c.bound == Bound::MemoryBound);
            }
        }
    }
}
