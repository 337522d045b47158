#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace dcool {

// Counter-based pseudorandom stream (splitmix64-style output function).
//
// Every draw is a pure function of (key, counter), and the key is derived
// from (seed, tag, stream_index). Substreams for different tags or indices
// are therefore independent of consumption order, which is what makes the
// Monte Carlo harness reproducible under parallel trial execution and keeps
// e.g. placement draws unaffected by how much noise another substream used.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::string_view tag, std::uint64_t stream_index = 0)
      : key_(derive_key(seed, tag, stream_index)) {}

  std::uint64_t next_u64() {
    std::uint64_t z = key_ + (++counter_) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform on [0, 1) with 53-bit resolution.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Uniform integer in [0, n).
  int uniform_int(int n) { return static_cast<int>(next_u64() % static_cast<std::uint64_t>(n)); }

  // Standard normal via Box-Muller; the second variate is cached.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform01();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * uniform01();
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  static std::uint64_t derive_key(std::uint64_t seed, std::string_view tag,
                                  std::uint64_t stream_index) {
    // FNV-1a over the tag, then mix in seed and stream index.
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (char c : tag) {
      h ^= static_cast<unsigned char>(c);
      h *= 0x100000001B3ULL;
    }
    std::uint64_t k = mix(seed + 0x9E3779B97F4A7C15ULL);
    k = mix(k ^ h);
    k = mix(k ^ stream_index);
    return k;
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace dcool
