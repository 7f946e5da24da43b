#include "atomgate/verification.hpp"

#include <cmath>
#include <variant>

#include <fmt/format.h>

#include "atomgate/error.hpp"

namespace atomgate {

LinearOracle::LinearOracle(const LatticeSpec& lattice) {
  require_valid(lattice);
  if (lattice.chi != 0.0) throw DomainError("the linear oracle needs chi = 0");
  const auto n = static_cast<Eigen::Index>(lattice.n_modes);
  generator_.resize(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index k = 0; k < n; ++k) {
      generator_(j, k) = lattice.J(static_cast<std::size_t>(j), static_cast<std::size_t>(k));
    }
    generator_(j, j) = -lattice.energies[static_cast<std::size_t>(j)];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(generator_);
  if (solver.info() != Eigen::Success) throw Error("eigendecomposition of the linear generator failed");
  eigenvalues_ = solver.eigenvalues();
  eigenvectors_ = solver.eigenvectors();
}

std::vector<cplx> LinearOracle::evolve(std::span<const cplx> alpha0, double t) const {
  const auto n = generator_.rows();
  if (static_cast<Eigen::Index>(alpha0.size()) != n) throw DomainError("amplitude count does not match lattice");
  if (t == 0.0) return {alpha0.begin(), alpha0.end()};
  Eigen::VectorXcd a(n);
  for (Eigen::Index j = 0; j < n; ++j) a(j) = alpha0[static_cast<std::size_t>(j)];
  Eigen::VectorXcd c = eigenvectors_.transpose().cast<cplx>() * a;
  for (Eigen::Index j = 0; j < n; ++j) c(j) *= std::polar(1.0, eigenvalues_(j) * t);
  const Eigen::VectorXcd out = eigenvectors_.cast<cplx>() * c;
  return {out.data(), out.data() + n};
}

std::vector<cplx> linear_solution(const LatticeSpec& lattice, std::span<const cplx> alpha0, double t) {
  return LinearOracle(lattice).evolve(alpha0, t);
}

namespace {

int default_n_max(const InitialStateSpec& init) {
  bool coherent = false;
  double total = 0.0;
  double widest = 0.0;
  for (const auto& m : init.modes) {
    if (const auto* c = std::get_if<Coherent>(&m.state)) {
      coherent = true;
      total += c->mean_number;
      widest = std::max(widest, c->mean_number + 8.0 * std::sqrt(c->mean_number) + 8.0);
    } else if (const auto* f = std::get_if<Fock>(&m.state)) {
      total += static_cast<double>(f->number);
    }
  }
  const double n = coherent ? std::max(total, widest) : total;
  return std::max(1, static_cast<int>(std::ceil(n)));
}

Eigen::VectorXcd mode_vector(const ModeInit& m, int n_max) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(n_max + 1);
  if (std::holds_alternative<Vacuum>(m.state)) {
    v(0) = 1.0;
  } else if (const auto* f = std::get_if<Fock>(&m.state)) {
    if (f->number < 0) throw DomainError("Fock number must be >= 0");
    if (f->number > n_max) {
      throw TruncationError(fmt::format("Fock number {} exceeds n_max = {}", f->number, n_max),
                            static_cast<int>(f->number));
    }
    v(f->number) = std::polar(1.0, static_cast<double>(f->number) * m.phase_shift);
  } else {
    const auto& c = std::get<Coherent>(m.state);
    if (!(c.mean_number >= 0.0)) throw DomainError("coherent mean number must be >= 0");
    const cplx alpha = std::polar(std::sqrt(c.mean_number), c.phase + m.phase_shift);
    // c_n = e^{-|a|^2/2} a^n / sqrt(n!), built recursively.
    cplx cn = std::exp(-0.5 * c.mean_number);
    for (int n = 0; n <= n_max; ++n) {
      v(n) = cn;
      cn *= alpha / std::sqrt(static_cast<double>(n + 1));
    }
    v /= v.norm();
  }
  return v;
}

}  // namespace

FockOracle::FockOracle(const LatticeSpec& lattice, const InitialStateSpec& init, int n_max)
    : n_modes_(lattice.n_modes), n_max_(n_max < 0 ? default_n_max(init) : n_max) {
  require_valid(lattice);
  if (init.modes.size() != n_modes_) throw DomainError("initial state does not match lattice");
  if (n_max_ < 1) throw DomainError("n_max must be >= 1");

  const double base = n_max_ + 1.0;
  const double dim = std::pow(base, static_cast<double>(n_modes_));
  if (dim > static_cast<double>(kMaxDimension)) {
    throw DomainError(fmt::format("Hilbert dimension {} exceeds the oracle limit {}", dim, kMaxDimension));
  }
  dim_ = static_cast<std::size_t>(std::llround(dim));
  place_.assign(n_modes_, 1);
  for (std::size_t j = n_modes_; j-- > 1;) place_[j - 1] = place_[j] * static_cast<std::size_t>(n_max_ + 1);

  bool all_number_states = true;
  for (const auto& m : init.modes) {
    if (std::holds_alternative<Coherent>(m.state)) all_number_states = false;
  }
  exact_sector_ = all_number_states && init.total_atoms() <= n_max_;

  std::vector<Eigen::Triplet<double>> entries;
  for (std::size_t i = 0; i < dim_; ++i) {
    double diag = 0.0;
    for (std::size_t j = 0; j < n_modes_; ++j) {
      const double nj = occupation(i, j);
      diag += lattice.energies[j] * nj + lattice.chi * nj * (nj - 1.0);
    }
    if (diag != 0.0) entries.emplace_back(static_cast<int>(i), static_cast<int>(i), diag);
    // -J_jk a_j^dag a_k : |.., n_j, .., n_k, ..> -> |.., n_j+1, .., n_k-1, ..>
    for (std::size_t j = 0; j < n_modes_; ++j) {
      for (std::size_t k = 0; k < n_modes_; ++k) {
        const double Jjk = lattice.J(j, k);
        if (j == k || Jjk == 0.0) continue;
        const int nj = occupation(i, j);
        const int nk = occupation(i, k);
        if (nk == 0 || nj == n_max_) continue;
        const std::size_t target = i + place_[j] - place_[k];
        const double amp = -Jjk * std::sqrt((nj + 1.0) * nk);
        entries.emplace_back(static_cast<int>(target), static_cast<int>(i), amp);
      }
    }
  }
  hamiltonian_.resize(static_cast<Eigen::Index>(dim_), static_cast<Eigen::Index>(dim_));
  hamiltonian_.setFromTriplets(entries.begin(), entries.end());

  initial_ = Eigen::VectorXcd::Ones(1);
  for (const auto& m : init.modes) {
    const Eigen::VectorXcd v = mode_vector(m, n_max_);
    Eigen::VectorXcd next(initial_.size() * v.size());
    for (Eigen::Index a = 0; a < initial_.size(); ++a) next.segment(a * v.size(), v.size()) = initial_(a) * v;
    initial_ = std::move(next);
  }

  if (dense()) {
    const Eigen::MatrixXd H(hamiltonian_);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(H);
    if (solver.info() != Eigen::Success) throw Error("eigendecomposition of the Hamiltonian failed");
    eigenvalues_ = solver.eigenvalues();
    eigenvectors_ = solver.eigenvectors();
    initial_coeffs_ = eigenvectors_.transpose().cast<cplx>() * initial_;
  } else {
    for (int c = 0; c < hamiltonian_.outerSize(); ++c) {
      double col = 0.0;
      for (Eigen::SparseMatrix<double>::InnerIterator it(hamiltonian_, c); it; ++it) col += std::abs(it.value());
      norm_bound_ = std::max(norm_bound_, col);
    }
  }
}

int FockOracle::occupation(std::size_t index, std::size_t mode) const noexcept {
  return static_cast<int>((index / place_[mode]) % static_cast<std::size_t>(n_max_ + 1));
}

Eigen::VectorXcd FockOracle::state(double t) const {
  if (t == 0.0) return initial_;
  if (!dense()) return propagate_taylor(t);
  Eigen::VectorXcd c = initial_coeffs_;
  for (Eigen::Index k = 0; k < c.size(); ++k) c(k) *= std::polar(1.0, -eigenvalues_(k) * t);
  return eigenvectors_.cast<cplx>() * c;
}

Eigen::VectorXcd FockOracle::propagate_taylor(double t) const {
  // exp(-iHt) psi in substeps with |H| h <= 1, each summed as a Taylor series.
  const int substeps = std::max(1, static_cast<int>(std::ceil(norm_bound_ * std::abs(t))));
  const double h = t / substeps;
  const cplx minus_ih{0.0, -h};
  Eigen::VectorXcd psi = initial_;
  for (int s = 0; s < substeps; ++s) {
    Eigen::VectorXcd term = psi;
    Eigen::VectorXcd sum = psi;
    for (int k = 1; k < 60; ++k) {
      term = (minus_ih / static_cast<double>(k)) * (hamiltonian_ * term);
      sum += term;
      if (term.norm() < 1e-17 * sum.norm()) break;
    }
    psi = std::move(sum);
  }
  return psi;
}

FockOracle::Moments FockOracle::moments(double t) const {
  const Eigen::VectorXcd psi = state(t);
  Moments m;
  m.mean.assign(n_modes_, 0.0);
  m.variance.assign(n_modes_, 0.0);
  std::vector<double> second(n_modes_, 0.0);
  std::vector<double> edge(n_modes_, 0.0);
  for (std::size_t i = 0; i < dim_; ++i) {
    const double p = std::norm(psi(static_cast<Eigen::Index>(i)));
    m.norm += p;
    for (std::size_t j = 0; j < n_modes_; ++j) {
      const double nj = occupation(i, j);
      m.mean[j] += p * nj;
      second[j] += p * nj * nj;
      if (occupation(i, j) == n_max_) edge[j] += p;
    }
  }
  for (std::size_t j = 0; j < n_modes_; ++j) {
    m.variance[j] = second[j] - m.mean[j] * m.mean[j];
    m.edge_population = std::max(m.edge_population, edge[j]);
  }
  if (!exact_sector_ && m.edge_population > kTruncationTolerance) {
    throw TruncationError(fmt::format("population {:.3g} at the truncation edge n_max = {} exceeds {:.0e}",
                                      m.edge_population, n_max_, kTruncationTolerance),
                          2 * n_max_);
  }
  return m;
}

double FockOracle::hermiticity_error() const {
  const Eigen::MatrixXd H(hamiltonian_);
  return (H - H.transpose()).cwiseAbs().maxCoeff();
}

std::vector<double> exact_quantum_numbers(const FockOracle& oracle, double t) {
  return oracle.moments(t).mean;
}

}  // namespace atomgate
