#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

namespace atomgate {

using cplx = std::complex<double>;

/// Bose-Hubbard coupling graph with on-site energies and a uniform collisional
/// nonlinearity. Units: hbar = 1, all rates in units of the tunnelling scale.
///
/// The coupling matrix is stored row-major. Mode indices are 0-based here;
/// user-facing I/O uses 1-based well labels.
struct LatticeSpec {
  std::size_t n_modes = 0;
  std::vector<double> energies;
  double chi = 0.0;
  std::vector<double> coupling;

  double J(std::size_t j, std::size_t k) const { return coupling[j * n_modes + k]; }
  double& J(std::size_t j, std::size_t k) { return coupling[j * n_modes + k]; }

  friend bool operator==(const LatticeSpec&, const LatticeSpec&) = default;
};

/// One point of the doubled phase space: (alpha_j, alpha_plus_j) per mode.
/// On the classical (mean-field) manifold alpha_plus = conj(alpha).
struct PhasePoint {
  std::vector<cplx> alpha;
  std::vector<cplx> alpha_plus;

  PhasePoint() = default;
  explicit PhasePoint(std::size_t n) : alpha(n), alpha_plus(n) {}

  std::size_t size() const noexcept { return alpha.size(); }
  bool finite() const noexcept;

  /// Builds a mean-field point with alpha_plus = conj(alpha).
  static PhasePoint classical(std::vector<cplx> alpha);

  friend bool operator==(const PhasePoint&, const PhasePoint&) = default;
};

/// The four-well phase gate: wells 1, 2, 3 form a chain and well 4 hangs off
/// well 2. Edges (1,2), (2,3), (2,4) carry J; everything else is uncoupled.
LatticeSpec make_gate_lattice(const std::array<double, 4>& energies, double J, double chi);

/// Open chain 1-2-...-n with uniform J (used for small oracle problems).
LatticeSpec make_chain_lattice(std::size_t n_modes, double J, double chi,
                               std::vector<double> energies = {});

/// Lists every invariant violation; an empty result means the lattice is usable.
/// Messages use 1-based mode labels.
std::vector<std::string> validate(const LatticeSpec& spec);

/// Throws ValidationError when validate() reports anything.
void require_valid(const LatticeSpec& spec);

}  // namespace atomgate
