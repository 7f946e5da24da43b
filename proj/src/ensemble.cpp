#include "atomgate/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

#include <fmt/format.h>

#include "atomgate/error.hpp"

namespace atomgate {
namespace {

constexpr std::uint64_t kBlockSize = 64;

double variance(const ExactSum& sum, const ExactSum& sum_sq, std::uint64_t n) {
  if (n < 2) return 0.0;
  const long double nn = static_cast<long double>(n);
  const long double mean = sum.value() / nn;
  const long double var = (sum_sq.value() / nn - mean * mean) * (nn / (nn - 1));
  return static_cast<double>(std::max(var, 0.0L));
}

}  // namespace

EnsembleStats::Moments& EnsembleStats::Moments::operator+=(const Moments& o) noexcept {
  p_re += o.p_re;
  p_im += o.p_im;
  p_re2 += o.p_re2;
  p_im2 += o.p_im2;
  q_re += o.q_re;
  q_im += o.q_im;
  return *this;
}

EnsembleStats::EnsembleStats(std::vector<double> times, std::size_t n_modes, bool coherences,
                             std::uint64_t seed, std::uint64_t traj_begin)
    : times_(std::move(times)), n_modes_(n_modes), coherences_(coherences), seed_(seed),
      traj_begin_(traj_begin), traj_end_(traj_begin), counts_(times_.size(), 0),
      moments_(times_.size() * n_modes) {
  if (coherences_) cross_.resize(times_.size() * n_modes * n_modes);
}

cplx EnsembleStats::m1(std::size_t j, std::size_t t) const {
  const auto& m = at(j, t);
  const auto n = static_cast<long double>(counts_[t]);
  if (counts_[t] == 0) return {std::nan(""), std::nan("")};
  return {static_cast<double>(m.p_re.value() / n), static_cast<double>(m.p_im.value() / n)};
}

cplx EnsembleStats::m2(std::size_t j, std::size_t t) const {
  const auto& m = at(j, t);
  const auto n = static_cast<long double>(counts_[t]);
  if (counts_[t] == 0) return {std::nan(""), std::nan("")};
  return {static_cast<double>(m.q_re.value() / n), static_cast<double>(m.q_im.value() / n)};
}

double EnsembleStats::s1(std::size_t j, std::size_t t) const {
  const auto& m = at(j, t);
  return variance(m.p_re, m.p_re2, counts_[t]);
}

double EnsembleStats::s1_imag(std::size_t j, std::size_t t) const {
  const auto& m = at(j, t);
  return variance(m.p_im, m.p_im2, counts_[t]);
}

double EnsembleStats::se_real(std::size_t j, std::size_t t) const {
  if (counts_[t] == 0) return std::nan("");
  return std::sqrt(s1(j, t) / static_cast<double>(counts_[t]));
}

double EnsembleStats::se_imag(std::size_t j, std::size_t t) const {
  if (counts_[t] == 0) return std::nan("");
  return std::sqrt(s1_imag(j, t) / static_cast<double>(counts_[t]));
}

cplx EnsembleStats::cross(std::size_t j, std::size_t k, std::size_t t) const {
  if (j == k) return m1(j, t);
  if (!coherences_) throw UnavailableError("cross-coherences were not accumulated for this run");
  if (counts_[t] == 0) return {std::nan(""), std::nan("")};
  const auto& c = cross_[t * n_modes_ * n_modes_ + pair_index(j, k)];
  const auto n = static_cast<long double>(counts_[t]);
  return {static_cast<double>(c.re.value() / n), static_cast<double>(c.im.value() / n)};
}

bool EnsembleStats::reliable() const noexcept {
  if (n_traj() == 0) return true;
  return static_cast<double>(n_diverged_) / static_cast<double>(n_traj()) <= kMaxDivergedFraction;
}

void EnsembleStats::add_record(std::size_t t, StateView s) {
  ++counts_[t];
  for (std::size_t j = 0; j < n_modes_; ++j) {
    const cplx a = s.alpha[j];
    const cplx ap = s.alpha_plus[j];
    const double pr = ap.real() * a.real() - ap.imag() * a.imag();
    const double pi = ap.real() * a.imag() + ap.imag() * a.real();
    auto& m = moments_[t * n_modes_ + j];
    m.p_re.add(pr);
    m.p_im.add(pi);
    m.p_re2.add(pr * pr);
    m.p_im2.add(pi * pi);
    m.q_re.add(pr * pr - pi * pi);
    m.q_im.add(2.0 * pr * pi);
  }
  if (coherences_) {
    for (std::size_t j = 0; j < n_modes_; ++j) {
      for (std::size_t k = 0; k < n_modes_; ++k) {
        if (j == k) continue;
        const cplx v{s.alpha_plus[j].real() * s.alpha[k].real() - s.alpha_plus[j].imag() * s.alpha[k].imag(),
                     s.alpha_plus[j].real() * s.alpha[k].imag() + s.alpha_plus[j].imag() * s.alpha[k].real()};
        auto& c = cross_[t * n_modes_ * n_modes_ + pair_index(j, k)];
        c.re.add(v.real());
        c.im.add(v.imag());
      }
    }
  }
}

void EnsembleStats::finish_trajectory(bool diverged) noexcept {
  ++traj_end_;
  if (diverged) ++n_diverged_;
}

EnsembleStats merge_stats(const EnsembleStats& a, const EnsembleStats& b) {
  if (b.n_traj() == 0) return a;
  if (a.n_traj() == 0) return b;
  if (a.times_ != b.times_ || a.n_modes_ != b.n_modes_) {
    throw DomainError("cannot merge statistics recorded on different grids");
  }
  if (a.coherences_ != b.coherences_) throw DomainError("cannot merge statistics with different moment sets");
  if (a.seed_ != b.seed_) throw DomainError("cannot merge statistics from different seeds");

  const EnsembleStats* lo = &a;
  const EnsembleStats* hi = &b;
  if (b.traj_end_ == a.traj_begin_) std::swap(lo, hi);
  if (lo->traj_end_ != hi->traj_begin_) {
    throw DomainError(fmt::format("trajectory ranges [{},{}) and [{},{}) are not adjacent", a.traj_begin_,
                                  a.traj_end_, b.traj_begin_, b.traj_end_));
  }
  EnsembleStats out = *lo;
  out.traj_end_ = hi->traj_end_;
  out.n_diverged_ += hi->n_diverged_;
  for (std::size_t t = 0; t < out.counts_.size(); ++t) out.counts_[t] += hi->counts_[t];
  for (std::size_t i = 0; i < out.moments_.size(); ++i) out.moments_[i] += hi->moments_[i];
  for (std::size_t i = 0; i < out.cross_.size(); ++i) {
    out.cross_[i].re += hi->cross_[i].re;
    out.cross_[i].im += hi->cross_[i].im;
  }
  return out;
}

double default_divergence_threshold(const InitialStateSpec& init) {
  return 1e6 * std::max(init.total_atoms(), 1.0);
}

unsigned resolve_workers(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("ATOMGATE_WORKERS"); env && *env) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<unsigned>(std::min<long>(v, 1024));
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

EnsembleStats run_ensemble_range(const LatticeSpec& lattice, const InitialStateSpec& init,
                                 const IntegratorConfig& cfg, std::uint64_t traj_begin,
                                 std::uint64_t traj_end, std::uint64_t seed,
                                 const EnsembleOptions& options) {
  require_valid(lattice);
  cfg.validate();
  if (!is_stochastic(cfg.scheme)) throw DomainError("ensembles need a stochastic scheme");
  if (init.modes.size() != lattice.n_modes) {
    throw DomainError(fmt::format("initial state has {} modes, lattice has {}", init.modes.size(),
                                  lattice.n_modes));
  }
  if (traj_end < traj_begin) throw DomainError("empty or reversed trajectory range");

  IntegratorConfig resolved = cfg;
  if (!resolved.divergence_threshold) resolved.divergence_threshold = default_divergence_threshold(init);

  const auto times = resolved.record_times();
  const std::uint64_t n_traj = traj_end - traj_begin;
  const std::uint64_t n_blocks = (n_traj + kBlockSize - 1) / kBlockSize;
  const unsigned workers =
      static_cast<unsigned>(std::min<std::uint64_t>(resolve_workers(options.workers), std::max<std::uint64_t>(n_blocks, 1)));

  std::vector<EnsembleStats> partials;
  partials.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    partials.emplace_back(times, lattice.n_modes, options.accumulate_coherences, seed, traj_begin);
  }

  std::atomic<std::uint64_t> next_block{0};
  std::atomic<std::uint64_t> done{0};
  std::atomic<std::uint64_t> diverged{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex mu;
  std::condition_variable cv;
  unsigned running = workers;

  auto work = [&](EnsembleStats& partial) {
    try {
      for (;;) {
        if (failed.load(std::memory_order_relaxed)) break;
        const std::uint64_t block = next_block.fetch_add(1);
        if (block >= n_blocks) break;
        const std::uint64_t first = traj_begin + block * kBlockSize;
        const std::uint64_t last = std::min(traj_end, first + kBlockSize);
        for (std::uint64_t k = first; k < last; ++k) {
          const TrajectoryRng rng(seed, k);
          auto stream = rng.initial_stream();
          const PhasePoint start = sample_initial(init, lattice, stream);
          const auto outcome = integrate_pp_trajectory(
              lattice, start, resolved, rng,
              [&partial](std::size_t r, double, StateView s) { partial.add_record(r, s); });
          partial.finish_trajectory(outcome.diverged_at.has_value());
          if (outcome.diverged_at) diverged.fetch_add(1, std::memory_order_relaxed);
        }
        done.fetch_add(last - first, std::memory_order_relaxed);
      }
    } catch (...) {
      std::lock_guard lock(mu);
      if (!error) error = std::current_exception();
      failed = true;
    }
    std::lock_guard lock(mu);
    --running;
    cv.notify_all();
  };

  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, std::ref(partials[w]));
    std::unique_lock lock(mu);
    while (running > 0) {
      cv.wait_for(lock, std::chrono::milliseconds(500));
      if (options.progress) {
        lock.unlock();
        options.progress(done.load(), diverged.load());
        lock.lock();
      }
    }
  }
  if (error) std::rethrow_exception(error);

  // Exact accumulators: folding partials in any order gives the same bits.
  EnsembleStats total(times, lattice.n_modes, options.accumulate_coherences, seed, traj_begin);
  for (auto& p : partials) {
    total.traj_end_ += p.n_traj();
    total.n_diverged_ += p.n_diverged_;
    for (std::size_t t = 0; t < total.counts_.size(); ++t) total.counts_[t] += p.counts_[t];
    for (std::size_t i = 0; i < total.moments_.size(); ++i) total.moments_[i] += p.moments_[i];
    for (std::size_t i = 0; i < total.cross_.size(); ++i) {
      total.cross_[i].re += p.cross_[i].re;
      total.cross_[i].im += p.cross_[i].im;
    }
  }
  return total;
}

EnsembleStats run_ensemble(const LatticeSpec& lattice, const InitialStateSpec& init,
                           const IntegratorConfig& cfg, std::uint64_t n_traj, std::uint64_t seed,
                           const EnsembleOptions& options) {
  if (n_traj < 1) throw DomainError("n_traj must be >= 1");
  return run_ensemble_range(lattice, init, cfg, 0, n_traj, seed, options);
}

}  // namespace atomgate
