#pragma once

#include <charconv>
#include <cstdint>
#include <string>

namespace vlasim {

// Unit conventions used throughout:
//   bandwidth, compute   — bytes/s and FLOP/s (decimal: 1 GB/s = 1e9 B/s,
//                          1 TFLOPS = 1e12 FLOP/s)
//   capacities, traffic  — bytes (SRAM sized in MiB = 2^20 on the config
//                          surface, stored as bytes)
//   time                 — seconds
inline constexpr double kGB = 1e9;
inline constexpr double kTFLOPS = 1e12;
inline constexpr std::uint64_t kMiB = 1ull << 20;

constexpr std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b) {
    return (a + b - 1) / b;
}

// Fixed float formatting for all text reports: 6 significant digits,
// locale-independent, byte-stable across runs.
inline std::string fmt_g6(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v,
                             std::chars_format::general, 6);
    return std::string(buf, res.ptr);
}

}  // namespace vlasim
