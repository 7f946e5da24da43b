#pragma once

#include <cstdint>
#include <utility>
#include <variant>
#include <vector>

#include "atomgate/lattice.hpp"
#include "atomgate/rng.hpp"

namespace atomgate {

struct Vacuum {
  friend bool operator==(const Vacuum&, const Vacuum&) = default;
};

struct Coherent {
  double mean_number = 0.0;
  double phase = 0.0;
  friend bool operator==(const Coherent&, const Coherent&) = default;
};

struct Fock {
  std::int64_t number = 0;
  friend bool operator==(const Fock&, const Fock&) = default;
};

using ModeState = std::variant<Vacuum, Coherent, Fock>;

/// Initial quantum state of one mode plus an extra phase rotation applied at
/// t = 0 (this is how the control phase of the gate enters).
struct ModeInit {
  ModeState state = Vacuum{};
  double phase_shift = 0.0;
  friend bool operator==(const ModeInit&, const ModeInit&) = default;
};

struct InitialStateSpec {
  std::vector<ModeInit> modes;

  /// Expected total atom number of the product state.
  double total_atoms() const;
  /// True when every mode has a point-mass representation (no sampling).
  bool deterministic() const;

  friend bool operator==(const InitialStateSpec&, const InitialStateSpec&) = default;
};

/// Wells 1 and 3 coherent with the given mean number each, wells 2 and 4
/// empty, and `theta3` applied to well 3.
InitialStateSpec gate_coherent_spec(double mean_per_well, double theta3);
/// Same layout with Fock states of `number` atoms in wells 1 and 3.
InitialStateSpec gate_fock_spec(std::int64_t number, double theta3);

/// Point-mass positive-P sample of a coherent state.
std::pair<cplx, cplx> sample_coherent(double mean_number, double phase);

/// One draw of the canonical positive-P representation of |n>:
/// mu = sqrt(s) e^{i phi}, s ~ Gamma(n+1), phi ~ U[0, 2pi); nu a complex
/// Gaussian with variance 2 per quadrature; alpha = mu + nu/2 and
/// alpha_plus = conj(mu) - conj(nu)/2.
std::pair<cplx, cplx> sample_fock(std::int64_t number, SequentialStream& rng);

/// Independent per-mode samples followed by the per-mode phase rotation.
PhasePoint sample_initial(const InitialStateSpec& spec, const LatticeSpec& lattice,
                          SequentialStream& rng);

/// Mean-field amplitudes: sqrt(mean) e^{i(phase + shift)} for coherent modes,
/// sqrt(n) e^{i shift} for Fock modes, zero for vacuum.
PhasePoint mean_field_point(const InitialStateSpec& spec);

}  // namespace atomgate
