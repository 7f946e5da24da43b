#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "atomgate/exact_sum.hpp"
#include "atomgate/initial_states.hpp"
#include "atomgate/integrators.hpp"
#include "atomgate/lattice.hpp"

namespace atomgate {

struct EnsembleOptions;

/// Streaming positive-P moments on the record grid.
///
/// Per record time t and mode j the raw sums of p = alpha_plus_j alpha_j and
/// q = p^2 are kept in exact accumulators, so merging partial statistics is
/// exact and independent of how trajectories were split across workers.
/// Trajectories stop contributing after their divergence time.
class EnsembleStats {
 public:
  EnsembleStats() = default;
  EnsembleStats(std::vector<double> times, std::size_t n_modes, bool coherences,
                std::uint64_t seed, std::uint64_t traj_begin);

  const std::vector<double>& times() const noexcept { return times_; }
  std::size_t n_times() const noexcept { return times_.size(); }
  std::size_t n_modes() const noexcept { return n_modes_; }
  bool has_coherences() const noexcept { return coherences_; }

  std::uint64_t n_traj() const noexcept { return traj_end_ - traj_begin_; }
  std::uint64_t n_diverged() const noexcept { return n_diverged_; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t traj_begin() const noexcept { return traj_begin_; }
  std::uint64_t traj_end() const noexcept { return traj_end_; }

  /// Trajectories still contributing at record t.
  std::uint64_t count(std::size_t t) const { return counts_[t]; }

  /// Mean of alpha_plus_j alpha_j (both parts kept).
  cplx m1(std::size_t j, std::size_t t) const;
  /// Mean of (alpha_plus_j)^2 (alpha_j)^2.
  cplx m2(std::size_t j, std::size_t t) const;
  /// Unbiased cross-trajectory variance of Re(alpha_plus_j alpha_j).
  double s1(std::size_t j, std::size_t t) const;
  /// Same for the imaginary part.
  double s1_imag(std::size_t j, std::size_t t) const;
  /// Standard errors of Re m1 and Im m1.
  double se_real(std::size_t j, std::size_t t) const;
  double se_imag(std::size_t j, std::size_t t) const;
  /// Mean of alpha_plus_j alpha_k; throws UnavailableError unless coherences
  /// were accumulated.
  cplx cross(std::size_t j, std::size_t k, std::size_t t) const;

  /// Diverged fraction above 1e-3 marks the run unreliable.
  bool reliable() const noexcept;
  static constexpr double kMaxDivergedFraction = 1e-3;

  /// Adds the record of trajectory `traj` (must be traj_end()).
  void add_record(std::size_t t, StateView state);
  void finish_trajectory(bool diverged) noexcept;

  /// Exact pooled statistics of adjacent trajectory ranges. An empty side is
  /// the identity. Throws DomainError on mismatched grids or ranges.
  friend EnsembleStats merge_stats(const EnsembleStats& a, const EnsembleStats& b);
  friend EnsembleStats run_ensemble_range(const LatticeSpec&, const InitialStateSpec&,
                                          const IntegratorConfig&, std::uint64_t, std::uint64_t,
                                          std::uint64_t, const EnsembleOptions&);

  friend bool operator==(const EnsembleStats&, const EnsembleStats&) = default;

 private:
  struct Moments {
    ExactSum p_re, p_im, p_re2, p_im2, q_re, q_im;
    Moments& operator+=(const Moments& o) noexcept;
    friend bool operator==(const Moments&, const Moments&) = default;
  };
  struct Cross {
    ExactSum re, im;
    friend bool operator==(const Cross&, const Cross&) = default;
  };

  const Moments& at(std::size_t j, std::size_t t) const { return moments_[t * n_modes_ + j]; }
  std::size_t pair_index(std::size_t j, std::size_t k) const { return j * n_modes_ + k; }

  std::vector<double> times_;
  std::size_t n_modes_ = 0;
  bool coherences_ = false;
  std::uint64_t seed_ = 0;
  std::uint64_t traj_begin_ = 0;
  std::uint64_t traj_end_ = 0;
  std::uint64_t n_diverged_ = 0;
  std::vector<std::uint64_t> counts_;
  std::vector<Moments> moments_;
  std::vector<Cross> cross_;  // [t][j][k], off-diagonal only used
};

EnsembleStats merge_stats(const EnsembleStats& a, const EnsembleStats& b);

struct EnsembleOptions {
  bool accumulate_coherences = false;
  /// 0 selects ATOMGATE_WORKERS from the environment, else the hardware count.
  unsigned workers = 0;
  /// Called from the reducing thread with (completed, diverged) counts.
  std::function<void(std::uint64_t, std::uint64_t)> progress;
};

/// Number of worker threads for `requested` (0 = environment / hardware).
unsigned resolve_workers(unsigned requested);

/// Runs trajectories [traj_begin, traj_end). Trajectory k draws every random
/// number from TrajectoryRng(seed, k); the result does not depend on the
/// number of workers.
EnsembleStats run_ensemble_range(const LatticeSpec& lattice, const InitialStateSpec& init,
                                 const IntegratorConfig& cfg, std::uint64_t traj_begin,
                                 std::uint64_t traj_end, std::uint64_t seed,
                                 const EnsembleOptions& options = {});

EnsembleStats run_ensemble(const LatticeSpec& lattice, const InitialStateSpec& init,
                           const IntegratorConfig& cfg, std::uint64_t n_traj, std::uint64_t seed,
                           const EnsembleOptions& options = {});

/// Divergence threshold used when the config leaves it unset.
double default_divergence_threshold(const InitialStateSpec& init);

}  // namespace atomgate
