#include "atomgate/initial_states.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "atomgate/error.hpp"

namespace atomgate {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

double InitialStateSpec::total_atoms() const {
  double total = 0.0;
  for (const auto& m : modes) {
    total += std::visit(overloaded{[](const Vacuum&) { return 0.0; },
                                   [](const Coherent& c) { return c.mean_number; },
                                   [](const Fock& f) { return static_cast<double>(f.number); }},
                        m.state);
  }
  return total;
}

bool InitialStateSpec::deterministic() const {
  for (const auto& m : modes) {
    if (const auto* f = std::get_if<Fock>(&m.state); f && f->number > 0) return false;
  }
  return true;
}

InitialStateSpec gate_coherent_spec(double mean_per_well, double theta3) {
  InitialStateSpec spec;
  spec.modes = {ModeInit{Coherent{mean_per_well, 0.0}, 0.0}, ModeInit{},
                ModeInit{Coherent{mean_per_well, 0.0}, theta3}, ModeInit{}};
  return spec;
}

InitialStateSpec gate_fock_spec(std::int64_t number, double theta3) {
  InitialStateSpec spec;
  spec.modes = {ModeInit{Fock{number}, 0.0}, ModeInit{}, ModeInit{Fock{number}, theta3}, ModeInit{}};
  return spec;
}

std::pair<cplx, cplx> sample_coherent(double mean_number, double phase) {
  if (!(mean_number >= 0.0) || !std::isfinite(mean_number)) {
    throw DomainError(fmt::format("coherent mean number must be finite and >= 0, got {}", mean_number));
  }
  if (!std::isfinite(phase)) throw DomainError("coherent phase must be finite");
  const cplx alpha = std::polar(std::sqrt(mean_number), phase);
  return {alpha, std::conj(alpha)};
}

std::pair<cplx, cplx> sample_fock(std::int64_t number, SequentialStream& rng) {
  if (number < 0) throw DomainError(fmt::format("Fock number must be >= 0, got {}", number));
  if (number == 0) return {cplx{}, cplx{}};

  const double s = rng.gamma(static_cast<double>(number) + 1.0);
  const double phi = 2.0 * std::numbers::pi * rng.uniform();
  const cplx mu = std::polar(std::sqrt(s), phi);
  const double gx = std::numbers::sqrt2 * rng.normal();
  const double gy = std::numbers::sqrt2 * rng.normal();
  const cplx nu{gx, gy};
  return {mu + 0.5 * nu, std::conj(mu) - 0.5 * std::conj(nu)};
}

PhasePoint sample_initial(const InitialStateSpec& spec, const LatticeSpec& lattice,
                          SequentialStream& rng) {
  if (spec.modes.size() != lattice.n_modes) {
    throw DomainError(fmt::format("initial state has {} modes, lattice has {}", spec.modes.size(),
                                  lattice.n_modes));
  }
  PhasePoint point(lattice.n_modes);
  for (std::size_t j = 0; j < spec.modes.size(); ++j) {
    const auto& mode = spec.modes[j];
    auto [a, ap] = std::visit(
        overloaded{[](const Vacuum&) { return std::pair<cplx, cplx>{}; },
                   [](const Coherent& c) { return sample_coherent(c.mean_number, c.phase); },
                   [&rng](const Fock& f) { return sample_fock(f.number, rng); }},
        mode.state);
    if (mode.phase_shift != 0.0) {
      const cplx rot = std::polar(1.0, mode.phase_shift);
      a *= rot;
      ap *= std::conj(rot);
    }
    point.alpha[j] = a;
    point.alpha_plus[j] = ap;
  }
  return point;
}

PhasePoint mean_field_point(const InitialStateSpec& spec) {
  std::vector<cplx> alpha(spec.modes.size());
  for (std::size_t j = 0; j < spec.modes.size(); ++j) {
    const auto& mode = spec.modes[j];
    alpha[j] = std::visit(
        overloaded{[](const Vacuum&) { return cplx{}; },
                   [](const Coherent& c) { return sample_coherent(c.mean_number, c.phase).first; },
                   [](const Fock& f) {
                     if (f.number < 0) throw DomainError("Fock number must be >= 0");
                     return cplx{std::sqrt(static_cast<double>(f.number)), 0.0};
                   }},
        mode.state);
    if (mode.phase_shift != 0.0) alpha[j] *= std::polar(1.0, mode.phase_shift);
  }
  return PhasePoint::classical(std::move(alpha));
}

}  // namespace atomgate
