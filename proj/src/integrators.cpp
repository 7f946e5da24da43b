#include "atomgate/integrators.hpp"

#include <cmath>
#include <cstdint>

#include <fmt/format.h>

#include "atomgate/error.hpp"

namespace atomgate {
namespace {

// Explicit real arithmetic keeps the hot loops off the C99 Annex G complex
// multiply path and makes the alpha / alpha_plus updates exact mirrors of each
// other, so a conjugate pair stays bitwise conjugate under the drift.
inline cplx mul(cplx a, cplx b) noexcept {
  return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

struct Neighbor {
  std::uint32_t k;
  double J;
};

/// Lattice compiled for stepping: doubled state x = [alpha..., alpha_plus...].
class Kernel {
 public:
  explicit Kernel(const LatticeSpec& lattice)
      : n_(lattice.n_modes), energies_(lattice.energies), two_chi_(2.0 * lattice.chi),
        sqrt_chi_(lattice.chi > 0.0 ? std::sqrt(lattice.chi) : 0.0), row_start_(n_ + 1, 0) {
    for (std::size_t j = 0; j < n_; ++j) {
      for (std::size_t k = 0; k < n_; ++k) {
        if (lattice.J(j, k) != 0.0) nbr_.push_back({static_cast<std::uint32_t>(k), lattice.J(j, k)});
      }
      row_start_[j + 1] = nbr_.size();
    }
  }

  std::size_t n() const noexcept { return n_; }

  void drift(const cplx* x, cplx* dx) const noexcept {
    const cplx* a = x;
    const cplx* ap = x + n_;
    for (std::size_t j = 0; j < n_; ++j) {
      const cplx nj = mul(ap[j], a[j]);
      const cplx w{energies_[j] + two_chi_ * nj.real(), two_chi_ * nj.imag()};
      double sr = 0.0, si = 0.0, spr = 0.0, spi = 0.0;
      for (std::size_t e = row_start_[j]; e < row_start_[j + 1]; ++e) {
        const auto& nb = nbr_[e];
        sr += nb.J * a[nb.k].real();
        si += nb.J * a[nb.k].imag();
        spr += nb.J * ap[nb.k].real();
        spi += nb.J * ap[nb.k].imag();
      }
      const cplx wa = mul(w, a[j]);
      const cplx wap = mul(w, ap[j]);
      // dalpha = -i w alpha + i s ; dalpha_plus = +i w alpha_plus - i s_plus
      dx[j] = {wa.imag() - si, -wa.real() + sr};
      dx[n_ + j] = {-wap.imag() + spi, wap.real() - spr};
    }
  }

  /// out = b(x) * dW, dW in interleaved draw order.
  void noise(const cplx* x, const double* dW, cplx* out) const noexcept {
    for (std::size_t j = 0; j < n_; ++j) {
      const cplx a = x[j];
      const cplx ap = x[n_ + j];
      const double c = sqrt_chi_ * dW[2 * j];
      const double cp = sqrt_chi_ * dW[2 * j + 1];
      out[j] = {c * (a.real() + a.imag()), c * (a.imag() - a.real())};
      out[n_ + j] = {cp * (ap.real() - ap.imag()), cp * (ap.real() + ap.imag())};
    }
  }

 private:
  std::size_t n_;
  std::vector<double> energies_;
  double two_chi_;
  double sqrt_chi_;
  std::vector<std::size_t> row_start_;
  std::vector<Neighbor> nbr_;
};

/// Scratch buffers for one trajectory.
class Stepper {
 public:
  explicit Stepper(const LatticeSpec& lattice)
      : kernel_(lattice), k1_(2 * kernel_.n()), k2_(k1_.size()), k3_(k1_.size()), k4_(k1_.size()),
        tmp_(k1_.size()), noise_(k1_.size()) {}

  const Kernel& kernel() const noexcept { return kernel_; }

  void rk4(std::vector<cplx>& x, double h) {
    const std::size_t m = x.size();
    const double h2 = 0.5 * h;
    kernel_.drift(x.data(), k1_.data());
    for (std::size_t i = 0; i < m; ++i) tmp_[i] = axpy(x[i], h2, k1_[i]);
    kernel_.drift(tmp_.data(), k2_.data());
    for (std::size_t i = 0; i < m; ++i) tmp_[i] = axpy(x[i], h2, k2_[i]);
    kernel_.drift(tmp_.data(), k3_.data());
    for (std::size_t i = 0; i < m; ++i) tmp_[i] = axpy(x[i], h, k3_[i]);
    kernel_.drift(tmp_.data(), k4_.data());
    const double h6 = h / 6.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double re = k1_[i].real() + 2.0 * k2_[i].real() + 2.0 * k3_[i].real() + k4_[i].real();
      const double im = k1_[i].imag() + 2.0 * k2_[i].imag() + 2.0 * k3_[i].imag() + k4_[i].imag();
      x[i] = {x[i].real() + h6 * re, x[i].imag() + h6 * im};
    }
  }

  void rk4_maruyama(std::vector<cplx>& x, double h, const double* dW) {
    kernel_.noise(x.data(), dW, noise_.data());
    rk4(x, h);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += noise_[i];
  }

  void euler_maruyama(std::vector<cplx>& x, double h, const double* dW) {
    kernel_.noise(x.data(), dW, noise_.data());
    kernel_.drift(x.data(), k1_.data());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = axpy(x[i], h, k1_[i]) + noise_[i];
  }

 private:
  static cplx axpy(cplx x, double h, cplx k) noexcept {
    return {x.real() + h * k.real(), x.imag() + h * k.imag()};
  }

  Kernel kernel_;
  std::vector<cplx> k1_, k2_, k3_, k4_, tmp_, noise_;
};

std::vector<cplx> pack(const PhasePoint& p) {
  std::vector<cplx> x(p.alpha);
  x.insert(x.end(), p.alpha_plus.begin(), p.alpha_plus.end());
  return x;
}

PhasePoint unpack(const std::vector<cplx>& x) {
  const std::size_t n = x.size() / 2;
  PhasePoint p;
  p.alpha.assign(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(n));
  p.alpha_plus.assign(x.begin() + static_cast<std::ptrdiff_t>(n), x.end());
  return p;
}

void require_shape(const PhasePoint& p, const LatticeSpec& lattice) {
  if (p.alpha.size() != lattice.n_modes || p.alpha_plus.size() != lattice.n_modes) {
    throw DomainError(fmt::format("phase point has {}/{} amplitudes, lattice has {} modes",
                                  p.alpha.size(), p.alpha_plus.size(), lattice.n_modes));
  }
}

void require_finite(const PhasePoint& p) {
  if (!p.finite()) throw DomainError("phase point has non-finite entries");
}

/// True when some mode exceeds the threshold or any entry is non-finite.
bool diverged(const std::vector<cplx>& x, double threshold_sq) noexcept {
  const std::size_t n = x.size() / 2;
  for (std::size_t j = 0; j < n; ++j) {
    const cplx nj = mul(x[n + j], x[j]);
    const double m2 = nj.real() * nj.real() + nj.imag() * nj.imag();
    if (!(m2 <= threshold_sq)) return true;
    if (!std::isfinite(x[j].real()) || !std::isfinite(x[j].imag()) ||
        !std::isfinite(x[n + j].real()) || !std::isfinite(x[n + j].imag())) {
      return true;
    }
  }
  return false;
}

double resolve_threshold(const IntegratorConfig& cfg, const PhasePoint& init) {
  double thr = 0.0;
  if (cfg.divergence_threshold) {
    thr = *cfg.divergence_threshold;
  } else {
    double total = 0.0;
    for (std::size_t j = 0; j < init.size(); ++j) total += (init.alpha_plus[j] * init.alpha[j]).real();
    thr = 1e6 * std::max(total, 1.0);
  }
  return std::min(thr, kDivergenceHardCap);
}

StateView view(const std::vector<cplx>& x) {
  const std::size_t n = x.size() / 2;
  return {std::span<const cplx>(x.data(), n), std::span<const cplx>(x.data() + n, n)};
}

}  // namespace

std::string_view scheme_name(Scheme s) noexcept {
  switch (s) {
    case Scheme::Rk4: return "rk4";
    case Scheme::EulerMaruyama: return "euler-maruyama";
    case Scheme::Rk4Maruyama: return "rk4-maruyama";
  }
  return "rk4";
}

std::optional<Scheme> parse_scheme(std::string_view name) noexcept {
  if (name == "rk4") return Scheme::Rk4;
  if (name == "euler-maruyama") return Scheme::EulerMaruyama;
  if (name == "rk4-maruyama") return Scheme::Rk4Maruyama;
  return std::nullopt;
}

void IntegratorConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError(fmt::format("dt must be > 0, got {}", dt));
  if (!(t_final >= 0.0) || !std::isfinite(t_final)) {
    throw DomainError(fmt::format("t_final must be >= 0, got {}", t_final));
  }
  if (t_final > 0.0 && dt > t_final) throw DomainError("dt must not exceed t_final");
  if (record_stride < 1) throw DomainError("record_stride must be >= 1");
  if (noise_refine < 0 || noise_refine > TrajectoryRng::kMaxRefine) {
    throw DomainError(fmt::format("noise_refine must be in [0, {}]", TrajectoryRng::kMaxRefine));
  }
  if (divergence_threshold && (!(*divergence_threshold >= 0.0) || std::isnan(*divergence_threshold))) {
    throw DomainError("divergence_threshold must be >= 0");
  }
  const double steps = t_final / dt;
  const double rounded = std::round(steps);
  if (std::abs(steps - rounded) > 1e-9 * std::max(1.0, steps)) {
    throw DomainError(fmt::format("t_final = {} is not an integer number of steps of dt = {}", t_final, dt));
  }
  if (rounded > 4.0e9) throw DomainError("too many steps");
  if (is_stochastic(scheme) && noise_refine > 0) {
    const auto n = static_cast<std::uint64_t>(rounded);
    if (n % (std::uint64_t{1} << noise_refine) != 0) {
      throw DomainError("step count must be a multiple of 2^noise_refine");
    }
  }
}

std::size_t IntegratorConfig::n_steps() const {
  return static_cast<std::size_t>(std::llround(t_final / dt));
}

std::size_t IntegratorConfig::n_records() const {
  return n_steps() / static_cast<std::size_t>(record_stride) + 1;
}

std::vector<double> IntegratorConfig::record_times() const {
  std::vector<double> t(n_records());
  for (std::size_t r = 0; r < t.size(); ++r) t[r] = record_time(r);
  return t;
}

std::vector<cplx> gpe_derivative(const PhasePoint& point, const LatticeSpec& lattice) {
  require_shape(point, lattice);
  require_finite(point);
  for (std::size_t j = 0; j < point.size(); ++j) {
    if (point.alpha_plus[j] != std::conj(point.alpha[j])) {
      throw DomainError("mean-field derivative needs alpha_plus == conj(alpha)");
    }
  }
  const Kernel kernel(lattice);
  const auto x = pack(point);
  std::vector<cplx> dx(x.size());
  kernel.drift(x.data(), dx.data());
  dx.resize(lattice.n_modes);
  return dx;
}

std::vector<cplx> pp_drift(const PhasePoint& point, const LatticeSpec& lattice) {
  require_shape(point, lattice);
  require_finite(point);
  const Kernel kernel(lattice);
  const auto x = pack(point);
  std::vector<cplx> dx(x.size());
  kernel.drift(x.data(), dx.data());
  return dx;
}

std::vector<cplx> pp_noise_amplitudes(const PhasePoint& point, const LatticeSpec& lattice) {
  require_shape(point, lattice);
  require_finite(point);
  if (lattice.chi < 0.0) throw DomainError("attractive interactions (chi < 0) are not supported");
  const Kernel kernel(lattice);
  const auto x = pack(point);
  const std::vector<double> ones(x.size(), 1.0);
  std::vector<cplx> b(x.size());
  kernel.noise(x.data(), ones.data(), b.data());
  return b;
}

PhasePoint step_euler_maruyama(const PhasePoint& point, const LatticeSpec& lattice, double dt,
                               std::span<const double> dW) {
  require_shape(point, lattice);
  if (!(dt > 0.0)) throw DomainError("dt must be > 0");
  if (dW.size() != 2 * lattice.n_modes) throw DomainError("expected 2n Wiener increments");
  if (lattice.chi < 0.0) throw DomainError("attractive interactions (chi < 0) are not supported");
  Stepper stepper(lattice);
  auto x = pack(point);
  stepper.euler_maruyama(x, dt, dW.data());
  return unpack(x);
}

PhasePoint step_euler_maruyama(const PhasePoint& point, const LatticeSpec& lattice, double dt,
                               const TrajectoryRng& rng, std::uint64_t step) {
  std::vector<double> dW(2 * lattice.n_modes);
  rng.wiener_increments(step, dW.size(), 0, dt, dW);
  return step_euler_maruyama(point, lattice, dt, dW);
}

PhasePoint step_rk4_maruyama(const PhasePoint& point, const LatticeSpec& lattice, double dt,
                             std::span<const double> dW) {
  require_shape(point, lattice);
  if (!(dt > 0.0)) throw DomainError("dt must be > 0");
  if (dW.size() != 2 * lattice.n_modes) throw DomainError("expected 2n Wiener increments");
  if (lattice.chi < 0.0) throw DomainError("attractive interactions (chi < 0) are not supported");
  Stepper stepper(lattice);
  auto x = pack(point);
  stepper.rk4_maruyama(x, dt, dW.data());
  return unpack(x);
}

TrajectoryRecord integrate_gpe(const LatticeSpec& lattice, const PhasePoint& init,
                               const IntegratorConfig& cfg) {
  require_valid(lattice);
  require_shape(init, lattice);
  cfg.validate();
  if (cfg.scheme != Scheme::Rk4) throw DomainError("integrate_gpe needs the rk4 scheme");
  for (std::size_t j = 0; j < init.size(); ++j) {
    if (init.alpha_plus[j] != std::conj(init.alpha[j])) {
      throw DomainError("mean-field initial state needs alpha_plus == conj(alpha)");
    }
  }

  TrajectoryRecord rec;
  rec.times.reserve(cfg.n_records());
  rec.states.reserve(cfg.n_records());
  if (!init.finite()) {
    rec.diverged_at = 0.0;
    return rec;
  }

  const std::size_t n = lattice.n_modes;
  const std::size_t steps = cfg.n_steps();
  const auto stride = static_cast<std::size_t>(cfg.record_stride);
  Stepper stepper(lattice);
  auto x = pack(init);
  rec.times.push_back(0.0);
  rec.states.push_back(init);
  for (std::size_t k = 0; k < steps; ++k) {
    stepper.rk4(x, cfg.dt);
    for (std::size_t j = 0; j < n; ++j) x[n + j] = std::conj(x[j]);
    if (diverged(x, kDivergenceHardCap * kDivergenceHardCap)) {
      rec.diverged_at = static_cast<double>(k + 1) * cfg.dt;
      break;
    }
    if ((k + 1) % stride == 0) {
      rec.times.push_back(cfg.record_time((k + 1) / stride));
      rec.states.push_back(unpack(x));
    }
  }
  return rec;
}

TrajectoryOutcome integrate_pp_trajectory(const LatticeSpec& lattice, const PhasePoint& init,
                                          const IntegratorConfig& cfg, const TrajectoryRng& rng,
                                          const RecordFn& on_record) {
  require_shape(init, lattice);
  cfg.validate();
  if (!is_stochastic(cfg.scheme)) throw DomainError("integrate_pp_trajectory needs a stochastic scheme");
  if (lattice.chi < 0.0) throw DomainError("attractive interactions (chi < 0) are not supported");

  const double threshold = resolve_threshold(cfg, init);
  const double threshold_sq = threshold * threshold;
  TrajectoryOutcome out;
  if (!init.finite()) throw DomainError("initial phase-space point is not finite");
  auto x = pack(init);

  const std::size_t n_eq = x.size();
  const std::size_t steps = cfg.n_steps();
  const auto stride = static_cast<std::size_t>(cfg.record_stride);
  const std::size_t sub = std::size_t{1} << cfg.noise_refine;
  const std::size_t base_steps = steps / sub;
  std::vector<double> dW(sub * n_eq);
  Stepper stepper(lattice);

  on_record(0, 0.0, view(x));
  ++out.records_written;
  for (std::size_t b = 0; b < base_steps; ++b) {
    rng.wiener_increments(b, n_eq, cfg.noise_refine, cfg.dt, dW);
    for (std::size_t s = 0; s < sub; ++s) {
      const double* inc = dW.data() + s * n_eq;
      if (cfg.scheme == Scheme::EulerMaruyama) {
        stepper.euler_maruyama(x, cfg.dt, inc);
      } else {
        stepper.rk4_maruyama(x, cfg.dt, inc);
      }
      const std::size_t k = b * sub + s + 1;
      if (diverged(x, threshold_sq)) {
        out.diverged_at = static_cast<double>(k) * cfg.dt;
        return out;
      }
      if (k % stride == 0) {
        on_record(k / stride, cfg.record_time(k / stride), view(x));
        ++out.records_written;
      }
    }
  }
  return out;
}

TrajectoryRecord integrate_pp_trajectory(const LatticeSpec& lattice, const PhasePoint& init,
                                         const IntegratorConfig& cfg, const TrajectoryRng& rng) {
  TrajectoryRecord rec;
  const auto outcome = integrate_pp_trajectory(
      lattice, init, cfg, rng, [&rec](std::size_t, double t, StateView s) {
        PhasePoint p;
        p.alpha.assign(s.alpha.begin(), s.alpha.end());
        p.alpha_plus.assign(s.alpha_plus.begin(), s.alpha_plus.end());
        rec.times.push_back(t);
        rec.states.push_back(std::move(p));
      });
  rec.diverged_at = outcome.diverged_at;
  return rec;
}

}  // namespace atomgate
