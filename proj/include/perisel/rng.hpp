#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace perisel {

/// Counter-based RNG (Philox4x32-10).
///
/// Streams are keyed by (seed, replicate, stream): each triple owns a
/// disjoint 128-bit counter block, so parallel Monte Carlo replicates are
/// independent, order-insensitive and bit-reproducible regardless of
/// scheduling.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t replicate = 0,
                      std::uint32_t stream = 0)
      : key_{static_cast<std::uint32_t>(seed),
             static_cast<std::uint32_t>(seed >> 32)},
        block_{0, static_cast<std::uint32_t>(replicate),
               static_cast<std::uint32_t>(replicate >> 32), stream} {}

  // One keyed block of the underlying bijection; exposed for known-answer tests.
  static std::array<std::uint32_t, 4> philox4x32_10(
      std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key) {
    for (int r = 0; r < 10; ++r) {
      const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * ctr[2];
      ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
             static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
             static_cast<std::uint32_t>(p0)};
      key[0] += 0x9E3779B9u;
      key[1] += 0xBB67AE85u;
    }
    return ctr;
  }

  std::uint32_t next_u32() {
    if (avail_ == 0) {
      out_ = philox4x32_10(block_, key_);
      ++block_[0];  // 2^32 blocks per stream; no run comes near the wrap
      avail_ = 4;
    }
    return out_[4 - avail_--];
  }

  std::uint64_t next_u64() {
    const std::uint64_t hi = next_u32();
    return (hi << 32) | next_u32();
  }

  /// Uniform on (0,1]: 53-bit resolution, never 0 so log() is safe.
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1p-53;
  }

  /// Standard normal (Box-Muller; two uniforms per pair, second value cached).
  double gaussian() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double rad = std::sqrt(-2.0 * std::log(u1));
    const double ang = 6.283185307179586 * u2;
    cached_ = rad * std::sin(ang);
    have_cached_ = true;
    return rad * std::cos(ang);
  }

 private:
  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> block_;
  std::array<std::uint32_t, 4> out_{};
  int avail_ = 0;
  double cached_ = 0.0;
  bool have_cached_ = false;
};

}  // namespace perisel
