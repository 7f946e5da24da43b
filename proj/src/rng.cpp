#include "atomgate/rng.hpp"

#include <cmath>
#include <numbers>

#include "atomgate/error.hpp"

namespace atomgate {
namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

constexpr std::uint32_t kDomainStep = 0;
constexpr std::uint32_t kDomainInitial = 1;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) noexcept {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

// c2 packs domain (4 bits), bridge level (6 bits) and mode pair (22 bits).
inline std::uint32_t pack_address(std::uint32_t domain, std::uint32_t level, std::uint32_t pair) {
  return (domain << 28) | ((level & 0x3Fu) << 22) | (pair & 0x3FFFFFu);
}

}  // namespace

Philox4x32::Counter Philox4x32::generate(Counter c, Key k) noexcept {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      k[0] += kWeyl0;
      k[1] += kWeyl1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, c[0], hi0, lo0);
    mulhilo(kMul1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
  }
  return c;
}

std::array<double, 2> box_muller(double u1, double u2) noexcept {
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double phi = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(phi), r * std::sin(phi)};
}

SequentialStream::result_type SequentialStream::operator()() noexcept {
  if (used_ == 4) {
    block_ = Philox4x32::generate(counter_, key_);
    ++counter_[3];
    used_ = 0;
  }
  return block_[used_++];
}

double SequentialStream::uniform() noexcept {
  const std::uint32_t hi = (*this)();
  const std::uint32_t lo = (*this)();
  return uniform_from_words(hi, lo);
}

double SequentialStream::normal() noexcept {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const auto z = box_muller(u1, u2);
  spare_ = z[1];
  has_spare_ = true;
  return z[0];
}

double SequentialStream::gamma(double shape) noexcept {
  if (shape < 1.0) {
    // Boost to shape + 1 and scale back down.
    const double g = gamma(shape + 1.0);
    return g * std::pow(uniform(), 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

TrajectoryRng::TrajectoryRng(std::uint64_t seed, std::uint64_t trajectory)
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
      traj_(static_cast<std::uint32_t>(trajectory)) {
  if (trajectory > std::numeric_limits<std::uint32_t>::max()) {
    throw DomainError("trajectory index exceeds 32-bit counter space");
  }
}

std::array<double, 2> TrajectoryRng::normal_pair(std::uint64_t step, std::uint32_t pair,
                                                 std::uint32_t level, std::uint32_t node) const {
  const Philox4x32::Counter ctr{traj_, static_cast<std::uint32_t>(step),
                                pack_address(kDomainStep, level, pair), node};
  const auto w = Philox4x32::generate(ctr, key_);
  return box_muller(uniform_from_words(w[0], w[1]), uniform_from_words(w[2], w[3]));
}

void TrajectoryRng::wiener_increments(std::uint64_t step, std::size_t n_eq, int refine,
                                      double dt_fine, std::span<double> out) const {
  if (refine < 0 || refine > kMaxRefine) throw DomainError("noise refinement level out of range");
  if (n_eq % 2 != 0) throw DomainError("equation count must be even");
  if (step > std::numeric_limits<std::uint32_t>::max()) {
    throw DomainError("step index exceeds 32-bit counter space");
  }
  const std::size_t n_sub = std::size_t{1} << refine;
  if (out.size() != n_sub * n_eq) throw DomainError("wiener increment buffer has wrong size");

  const double h = dt_fine * static_cast<double>(n_sub);
  const double sqrt_h = std::sqrt(h);
  for (std::size_t p = 0; p < n_eq / 2; ++p) {
    const auto z = normal_pair(step, static_cast<std::uint32_t>(p), 0, 0);
    out[2 * p] = sqrt_h * z[0];
    out[2 * p + 1] = sqrt_h * z[1];
  }

  // Brownian bridge: level l halves each of the 2^(l-1) intervals in place,
  // walking nodes from the back so parents are read before being overwritten.
  for (int level = 1; level <= refine; ++level) {
    const std::size_t parents = std::size_t{1} << (level - 1);
    const double half_sqrt = 0.5 * std::sqrt(h / static_cast<double>(parents));
    for (std::size_t i = parents; i-- > 0;) {
      for (std::size_t p = 0; p < n_eq / 2; ++p) {
        const auto y = normal_pair(step, static_cast<std::uint32_t>(p),
                                   static_cast<std::uint32_t>(level), static_cast<std::uint32_t>(i));
        for (std::size_t e = 0; e < 2; ++e) {
          const std::size_t eq = 2 * p + e;
          const double d = out[i * n_eq + eq];
          out[(2 * i) * n_eq + eq] = 0.5 * d + half_sqrt * y[e];
          out[(2 * i + 1) * n_eq + eq] = 0.5 * d - half_sqrt * y[e];
        }
      }
    }
  }
}

SequentialStream TrajectoryRng::initial_stream() const noexcept {
  return SequentialStream(key_, {traj_, 0, pack_address(kDomainInitial, 0, 0), 0});
}

}  // namespace atomgate
