#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace biplanar {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11). Pure
/// function of (key, counter), so any draw can be regenerated in isolation.
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  [[nodiscard]] static Counter generate(Counter ctr, Key key) noexcept {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kW0;
        key[1] += kW1;
      }
      const std::uint64_t p0 = std::uint64_t{kM0} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{kM1} * ctr[2];
      const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const auto lo0 = static_cast<std::uint32_t>(p0);
      const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
      const auto lo1 = static_cast<std::uint32_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kM0 = 0xD2511F53u;
  static constexpr std::uint32_t kM1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kW0 = 0x9E3779B9u;
  static constexpr std::uint32_t kW1 = 0xBB67AE85u;
};

/// Standard-normal draws for one (seed, stream, trial) triple. Draw k is
/// determined by k alone; two streams with the same key produce identical
/// sequences. Values are held by value and never shared between trials.
class NormalStream {
 public:
  NormalStream(std::uint64_t seed, std::uint32_t stream, std::uint64_t trial) noexcept
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        stream_(stream),
        trial_(trial) {}

  /// Box-Muller on two 53-bit uniforms in (0, 1).
  [[nodiscard]] double next() noexcept {
    if (cached_) {
      cached_ = false;
      return spare_;
    }
    const auto out = Philox4x32::generate({block_, stream_, static_cast<std::uint32_t>(trial_),
                                           static_cast<std::uint32_t>(trial_ >> 32)},
                                          key_);
    ++block_;
    const double u1 = to_unit(out[0], out[1]);
    const double u2 = to_unit(out[2], out[3]);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    cached_ = true;
    return r * std::cos(theta);
  }

  [[nodiscard]] std::uint64_t draws() const noexcept { return 2 * std::uint64_t{block_} - (cached_ ? 1 : 0); }

 private:
  static double to_unit(std::uint32_t hi, std::uint32_t lo) noexcept {
    const std::uint64_t bits = ((std::uint64_t{hi} << 32) | lo) >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
  }

  Philox4x32::Key key_;
  std::uint32_t stream_;
  std::uint64_t trial_;
  std::uint32_t block_ = 0;
  bool cached_ = false;
  double spare_ = 0.0;
};

}  // namespace biplanar
