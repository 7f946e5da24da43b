#pragma once

#include <cstddef>
#include <vector>

#include "atomgate/ensemble.hpp"
#include "atomgate/integrators.hpp"

namespace atomgate {

/// Occupation statistics per mode on the record grid, indexed [mode][time].
/// Mean-field series carry zero variance and standard error.
struct NumberSeries {
  std::vector<double> times;
  std::vector<std::vector<double>> mean;
  std::vector<std::vector<double>> variance;
  std::vector<std::vector<double>> se;
  /// Nominal initial atom number; transfer efficiencies are relative to it.
  double total_atoms = 0.0;

  std::size_t n_modes() const noexcept { return mean.size(); }
};

/// <a_j^dag a_j> = Re m1.
double number_mean(const EnsembleStats& stats, std::size_t j, std::size_t t);

/// Normally ordered variance Re m2 + Re m1 - (Re m1)^2.
double number_variance(const EnsembleStats& stats, std::size_t j, std::size_t t);

/// <a_j^dag a_k>; needs cross-moment accumulation unless j == k.
cplx coherence(const EnsembleStats& stats, std::size_t j, std::size_t k, std::size_t t);

NumberSeries number_series(const EnsembleStats& stats, double total_atoms);
/// From a mean-field trajectory; total atoms is the initial sum of |alpha_j|^2.
NumberSeries number_series(const TrajectoryRecord& record);

struct Transfer {
  double efficiency = 0.0;
  double peak_value = 0.0;
  double peak_time = 0.0;
  std::size_t peak_index = 0;
  /// Standard error of the efficiency at the peak (zero for mean-field).
  double se = 0.0;
};

/// Largest recorded mean occupation of `mode` divided by the total atom
/// number. No interpolation between grid points. The peak time and SE refer
/// to the earliest record within kPeakTieTolerance (relative) of the maximum.
inline constexpr double kPeakTieTolerance = 1e-6;
Transfer transfer_efficiency(const NumberSeries& series, std::size_t mode);

/// Imaginary parts of m1 are pure sampling noise in a healthy run, so about
/// 0.3% of grid points exceed 3 SE by chance; more than 1% flags the run.
struct ImaginaryHealth {
  std::size_t checked = 0;
  std::size_t violations = 0;
  double worst_z = 0.0;
  bool healthy() const noexcept { return violations <= checked / 100; }
};
ImaginaryHealth imaginary_health(const EnsembleStats& stats, double z_limit = 3.0);

}  // namespace atomgate
