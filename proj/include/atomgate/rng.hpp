#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <span>

namespace atomgate {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11). A pure
/// function of (counter, key): any draw can be reproduced without replaying
/// the stream, which is what makes ensemble results schedule-independent.
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter generate(Counter counter, Key key) noexcept;
};

/// Sequential stream on top of Philox with a fixed counter prefix; the last
/// counter word advances. Satisfies UniformRandomBitGenerator.
class SequentialStream {
 public:
  using result_type = std::uint32_t;

  SequentialStream(Philox4x32::Key key, Philox4x32::Counter prefix) noexcept
      : key_(key), counter_(prefix) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }
  result_type operator()() noexcept;

  /// Uniform on the open interval (0, 1) with 53 random bits.
  double uniform() noexcept;
  double normal() noexcept;
  /// Gamma(shape, scale 1) by Marsaglia-Tsang; shape > 0.
  double gamma(double shape) noexcept;

 private:
  Philox4x32::Key key_;
  Philox4x32::Counter counter_;
  Philox4x32::Counter block_{};
  int used_ = 4;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Random numbers owned by one trajectory, keyed by (seed, trajectory index).
///
/// Step noise is addressed by (base step, mode pair, bridge level, node), so a
/// run at dt/2^r can reproduce exactly the Brownian path of a run at dt and
/// refine it with Brownian-bridge midpoints.
class TrajectoryRng {
 public:
  TrajectoryRng(std::uint64_t seed, std::uint64_t trajectory);

  /// Two independent standard normals for the given address.
  std::array<double, 2> normal_pair(std::uint64_t step, std::uint32_t pair, std::uint32_t level,
                                    std::uint32_t node) const;

  /// Wiener increments for base step `step`, split into 2^refine sub-steps of
  /// length dt_fine each. `n_eq` must be even. Output layout: out[s * n_eq + e]
  /// for sub-step s and equation e.
  void wiener_increments(std::uint64_t step, std::size_t n_eq, int refine, double dt_fine,
                         std::span<double> out) const;

  /// Stream reserved for initial-state sampling.
  SequentialStream initial_stream() const noexcept;

  static constexpr int kMaxRefine = 16;

 private:
  Philox4x32::Key key_;
  std::uint32_t traj_;
};

/// Box-Muller on two open-interval uniforms.
std::array<double, 2> box_muller(double u1, double u2) noexcept;

/// 53-bit uniform on (0, 1) from two 32-bit words.
inline double uniform_from_words(std::uint32_t hi, std::uint32_t lo) noexcept {
  const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 21) ^ (lo >> 11);
  return (static_cast<double>(bits & ((std::uint64_t{1} << 53) - 1)) + 0.5) * 0x1p-53;
}

}  // namespace atomgate
