#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "atomgate/lattice.hpp"
#include "atomgate/rng.hpp"

namespace atomgate {

/// Time-stepping scheme.
///  - Rk4: classical fourth-order Runge-Kutta on the mean-field equations.
///  - EulerMaruyama: Ito Euler-Maruyama on the positive-P equations.
///  - Rk4Maruyama: RK4 for the positive-P drift plus the Ito noise increment
///    evaluated at the start of the step. Same Ito weak order as
///    Euler-Maruyama but without its O(dt) drift bias on the oscillatory
///    tunnelling dynamics; reduces to Rk4 exactly when chi = 0.
enum class Scheme { Rk4, EulerMaruyama, Rk4Maruyama };

std::string_view scheme_name(Scheme s) noexcept;
std::optional<Scheme> parse_scheme(std::string_view name) noexcept;
inline bool is_stochastic(Scheme s) noexcept { return s != Scheme::Rk4; }

struct IntegratorConfig {
  double dt = 1e-3;
  double t_final = 20.0;
  int record_stride = 10;
  Scheme scheme = Scheme::Rk4;
  /// Stochastic runs only: Wiener increments are generated on a base grid of
  /// dt * 2^noise_refine and refined by Brownian bridges. Two runs whose
  /// dt * 2^noise_refine agree see the same Brownian path.
  int noise_refine = 0;
  /// Trajectories with |alpha_plus_j alpha_j| above this are flagged as
  /// diverged. When unset, 1e6 x max(total initial atoms, 1).
  std::optional<double> divergence_threshold;

  /// Throws DomainError when any field is out of range or t_final is not an
  /// integer number of steps.
  void validate() const;
  std::size_t n_steps() const;
  std::size_t n_records() const;
  /// Grid time of record r (record 0 is t = 0).
  double record_time(std::size_t r) const { return static_cast<double>(r * record_stride) * dt; }
  std::vector<double> record_times() const;

  friend bool operator==(const IntegratorConfig&, const IntegratorConfig&) = default;
};

/// Magnitude cap applied on top of any divergence threshold; keeps recorded
/// moments inside the exact accumulators' range.
inline constexpr double kDivergenceHardCap = 1e12;

struct TrajectoryRecord {
  std::vector<double> times;
  std::vector<PhasePoint> states;
  std::optional<double> diverged_at;
};

struct StateView {
  std::span<const cplx> alpha;
  std::span<const cplx> alpha_plus;
};

/// Callback invoked at every record point (including t = 0).
using RecordFn = std::function<void(std::size_t record_index, double time, StateView state)>;

/// Mean-field right-hand side dalpha/dt. Requires alpha_plus == conj(alpha).
std::vector<cplx> gpe_derivative(const PhasePoint& point, const LatticeSpec& lattice);

/// Positive-P drift, block layout [dalpha_1..n, dalpha_plus_1..n].
std::vector<cplx> pp_drift(const PhasePoint& point, const LatticeSpec& lattice);

/// Noise amplitudes multiplying independent real Wiener increments, block
/// layout [b_1..n, b_plus_1..n] with b = (1-i) sqrt(chi) alpha and
/// b_plus = (1+i) sqrt(chi) alpha_plus.
std::vector<cplx> pp_noise_amplitudes(const PhasePoint& point, const LatticeSpec& lattice);

/// One Ito Euler-Maruyama step. `dW` holds 2n Wiener increments (already
/// scaled by sqrt(dt)) in draw order alpha_1, alpha_plus_1, alpha_2, ...
PhasePoint step_euler_maruyama(const PhasePoint& point, const LatticeSpec& lattice, double dt,
                               std::span<const double> dW);
/// Same, drawing the increments for `step` from the trajectory's stream.
PhasePoint step_euler_maruyama(const PhasePoint& point, const LatticeSpec& lattice, double dt,
                               const TrajectoryRng& rng, std::uint64_t step);

/// RK4 drift step plus the Ito noise increment at the pre-step state.
PhasePoint step_rk4_maruyama(const PhasePoint& point, const LatticeSpec& lattice, double dt,
                             std::span<const double> dW);

/// Fixed-step RK4 of the mean-field equations; alpha_plus kept as conj(alpha).
TrajectoryRecord integrate_gpe(const LatticeSpec& lattice, const PhasePoint& init,
                               const IntegratorConfig& cfg);

struct TrajectoryOutcome {
  std::optional<double> diverged_at;
  std::size_t records_written = 0;
};

/// Integrates one positive-P trajectory, streaming record points to `on_record`.
/// Stops at the first step whose state is non-finite or exceeds the divergence
/// threshold; no record is emitted for or after that step.
TrajectoryOutcome integrate_pp_trajectory(const LatticeSpec& lattice, const PhasePoint& init,
                                          const IntegratorConfig& cfg, const TrajectoryRng& rng,
                                          const RecordFn& on_record);

/// Convenience overload that keeps every recorded state.
TrajectoryRecord integrate_pp_trajectory(const LatticeSpec& lattice, const PhasePoint& init,
                                         const IntegratorConfig& cfg, const TrajectoryRng& rng);

}  // namespace atomgate
