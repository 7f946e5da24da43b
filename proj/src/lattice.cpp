#include "atomgate/lattice.hpp"

#include <cmath>

#include <fmt/format.h>

#include "atomgate/error.hpp"

namespace atomgate {

bool PhasePoint::finite() const noexcept {
  for (std::size_t j = 0; j < alpha.size(); ++j) {
    if (!std::isfinite(alpha[j].real()) || !std::isfinite(alpha[j].imag())) return false;
  }
  for (std::size_t j = 0; j < alpha_plus.size(); ++j) {
    if (!std::isfinite(alpha_plus[j].real()) || !std::isfinite(alpha_plus[j].imag())) return false;
  }
  return true;
}

PhasePoint PhasePoint::classical(std::vector<cplx> alpha) {
  PhasePoint p;
  p.alpha_plus.reserve(alpha.size());
  for (const auto& a : alpha) p.alpha_plus.push_back(std::conj(a));
  p.alpha = std::move(alpha);
  return p;
}

LatticeSpec make_gate_lattice(const std::array<double, 4>& energies, double J, double chi) {
  LatticeSpec spec;
  spec.n_modes = 4;
  spec.energies.assign(energies.begin(), energies.end());
  spec.chi = chi;
  spec.coupling.assign(16, 0.0);
  for (auto [a, b] : {std::pair{0, 1}, std::pair{1, 2}, std::pair{1, 3}}) {
    spec.J(a, b) = J;
    spec.J(b, a) = J;
  }
  require_valid(spec);
  return spec;
}

LatticeSpec make_chain_lattice(std::size_t n_modes, double J, double chi,
                               std::vector<double> energies) {
  LatticeSpec spec;
  spec.n_modes = n_modes;
  spec.energies = energies.empty() ? std::vector<double>(n_modes, 0.0) : std::move(energies);
  spec.chi = chi;
  spec.coupling.assign(n_modes * n_modes, 0.0);
  for (std::size_t j = 0; j + 1 < n_modes; ++j) {
    spec.J(j, j + 1) = J;
    spec.J(j + 1, j) = J;
  }
  require_valid(spec);
  return spec;
}

std::vector<std::string> validate(const LatticeSpec& spec) {
  std::vector<std::string> out;
  const std::size_t n = spec.n_modes;
  if (n == 0) out.emplace_back("n_modes must be at least 1");
  if (spec.energies.size() != n) {
    out.push_back(fmt::format("dimension mismatch: {} energies for {} modes", spec.energies.size(), n));
  }
  if (spec.coupling.size() != n * n) {
    out.push_back(fmt::format("dimension mismatch: coupling has {} entries, expected {}x{}",
                              spec.coupling.size(), n, n));
  }
  if (!std::isfinite(spec.chi)) out.emplace_back("non-finite chi");
  for (std::size_t j = 0; j < spec.energies.size(); ++j) {
    if (!std::isfinite(spec.energies[j])) out.push_back(fmt::format("non-finite energy E{}", j + 1));
  }
  if (spec.coupling.size() != n * n) return out;

  for (std::size_t j = 0; j < n; ++j) {
    if (spec.J(j, j) != 0.0) out.push_back(fmt::format("nonzero coupling diagonal ({},{})", j + 1, j + 1));
    for (std::size_t k = 0; k < n; ++k) {
      if (!std::isfinite(spec.J(j, k))) {
        out.push_back(fmt::format("non-finite coupling ({},{})", j + 1, k + 1));
      } else if (k > j && spec.J(j, k) != spec.J(k, j)) {
        out.push_back(fmt::format("asymmetric coupling ({},{})", j + 1, k + 1));
      }
    }
  }
  return out;
}

void require_valid(const LatticeSpec& spec) {
  auto violations = validate(spec);
  if (!violations.empty()) throw ValidationError(std::move(violations));
}

}  // namespace atomgate
