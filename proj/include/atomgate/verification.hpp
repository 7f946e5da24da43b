#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "atomgate/initial_states.hpp"
#include "atomgate/lattice.hpp"

namespace atomgate {

/// Exact evolution of the linear (chi = 0) mean-field equations,
/// alpha(t) = exp(i M t) alpha(0) with M = -diag(E) + J real symmetric.
class LinearOracle {
 public:
  explicit LinearOracle(const LatticeSpec& lattice);

  std::vector<cplx> evolve(std::span<const cplx> alpha0, double t) const;

  const Eigen::MatrixXd& generator() const noexcept { return generator_; }
  const Eigen::VectorXd& eigenvalues() const noexcept { return eigenvalues_; }
  const Eigen::MatrixXd& eigenvectors() const noexcept { return eigenvectors_; }

 private:
  Eigen::MatrixXd generator_;
  Eigen::VectorXd eigenvalues_;
  Eigen::MatrixXd eigenvectors_;
};

std::vector<cplx> linear_solution(const LatticeSpec& lattice, std::span<const cplx> alpha0, double t);

/// Brute-force propagation of the Bose-Hubbard Hamiltonian on the product
/// basis truncated at n_max atoms per mode (mode-major indexing: mode 1 is
/// the most significant digit). Only for small systems.
class FockOracle {
 public:
  /// `n_max < 0` picks a default: the total atom number for number-state
  /// inputs, widened to cover the Poisson tail for coherent inputs.
  FockOracle(const LatticeSpec& lattice, const InitialStateSpec& init, int n_max = -1);

  static constexpr std::size_t kMaxDimension = 100000;
  static constexpr std::size_t kDenseLimit = 2000;
  static constexpr double kTruncationTolerance = 1e-8;

  std::size_t n_modes() const noexcept { return n_modes_; }
  int n_max() const noexcept { return n_max_; }
  std::size_t dimension() const noexcept { return dim_; }
  bool dense() const noexcept { return dim_ <= kDenseLimit; }

  /// Occupation digit of `mode` in basis state `index`.
  int occupation(std::size_t index, std::size_t mode) const noexcept;

  Eigen::VectorXcd state(double t) const;

  struct Moments {
    std::vector<double> mean;
    std::vector<double> variance;
    double norm = 0.0;
    /// Largest population found at occupation n_max across modes.
    double edge_population = 0.0;
  };
  /// Throws TruncationError when the basis edge carries more than
  /// kTruncationTolerance and the truncation is not exact.
  Moments moments(double t) const;

  /// max |H - H^T| over the dense Hamiltonian (dense mode only).
  double hermiticity_error() const;
  const Eigen::SparseMatrix<double>& hamiltonian() const noexcept { return hamiltonian_; }

 private:
  Eigen::VectorXcd propagate_taylor(double t) const;

  std::size_t n_modes_;
  int n_max_;
  std::size_t dim_;
  bool exact_sector_ = false;
  std::vector<std::size_t> place_;
  Eigen::SparseMatrix<double> hamiltonian_;
  Eigen::VectorXcd initial_;
  Eigen::VectorXd eigenvalues_;
  Eigen::MatrixXd eigenvectors_;
  Eigen::VectorXcd initial_coeffs_;
  double norm_bound_ = 0.0;
};

/// <N_j(t)> from the truncated-basis oracle.
std::vector<double> exact_quantum_numbers(const FockOracle& oracle, double t);

}  // namespace atomgate
