#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace gridscope {

// Shortest decimal text that parses back to exactly the same double.
std::string format_double(double value);

// Fixed-point rendering used wherever output must stay stable across platforms.
std::string format_fixed(double value, int decimals);

// "prefix" + zero-padded ordinal, e.g. padded_id("lf-", 7, 6) == "lf-000007".
std::string padded_id(std::string_view prefix, std::uint64_t ordinal, int width);

// 64-bit FNV-1a; stable across runs and platforms.
std::uint64_t fnv1a(std::string_view bytes, std::uint64_t basis = 0xcbf29ce484222325ULL);

// splitmix64 finaliser, used to turn hashes into well-mixed random words.
std::uint64_t mix64(std::uint64_t x);

// Uniform double in [0, 1) from a 64-bit word.
inline double unit_interval(std::uint64_t word) {
  return static_cast<double>(word >> 11) * 0x1.0p-53;
}

}  // namespace gridscope
