#pragma once

#include <cmath>
#include <numbers>

#include "atomgate/initial_states.hpp"
#include "atomgate/integrators.hpp"
#include "atomgate/lattice.hpp"

namespace atomgate::testing {

inline LatticeSpec gate(double chi = 0.0, double J = 1.0) { return make_gate_lattice({0, 0, 0, 0}, J, chi); }

inline PhasePoint gate_point(double theta3, double mean = 50.0) {
  const double a = std::sqrt(mean);
  return PhasePoint::classical({a, 0.0, std::polar(a, theta3), 0.0});
}

inline IntegratorConfig gpe_config(double t_final, int stride = 1, double dt = 1e-3) {
  IntegratorConfig cfg;
  cfg.dt = dt;
  cfg.t_final = t_final;
  cfg.record_stride = stride;
  cfg.scheme = Scheme::Rk4;
  return cfg;
}

/// Closed form at chi = 0 for the coherent 50/50 gate input.
inline double n4_closed_form(double t, double theta) {
  const double s = std::sin(std::numbers::sqrt3 * t / 2.0);
  const double c = std::cos(theta / 2.0);
  return 800.0 / 9.0 * c * c * s * s * s * s;
}

}  // namespace atomgate::testing
