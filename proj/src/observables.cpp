#include "atomgate/observables.hpp"

#include <cmath>

#include "atomgate/error.hpp"

namespace atomgate {

double number_mean(const EnsembleStats& stats, std::size_t j, std::size_t t) {
  return stats.m1(j, t).real();
}

double number_variance(const EnsembleStats& stats, std::size_t j, std::size_t t) {
  const double n = stats.m1(j, t).real();
  return stats.m2(j, t).real() + n - n * n;
}

cplx coherence(const EnsembleStats& stats, std::size_t j, std::size_t k, std::size_t t) {
  return stats.cross(j, k, t);
}

NumberSeries number_series(const EnsembleStats& stats, double total_atoms) {
  NumberSeries s;
  s.times = stats.times();
  s.total_atoms = total_atoms;
  const std::size_t n = stats.n_modes();
  const std::size_t nt = stats.n_times();
  s.mean.assign(n, std::vector<double>(nt));
  s.variance.assign(n, std::vector<double>(nt));
  s.se.assign(n, std::vector<double>(nt));
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t t = 0; t < nt; ++t) {
      s.mean[j][t] = number_mean(stats, j, t);
      s.variance[j][t] = number_variance(stats, j, t);
      s.se[j][t] = stats.se_real(j, t);
    }
  }
  return s;
}

NumberSeries number_series(const TrajectoryRecord& record) {
  NumberSeries s;
  s.times = record.times;
  const std::size_t n = record.states.empty() ? 0 : record.states.front().size();
  const std::size_t nt = record.states.size();
  s.mean.assign(n, std::vector<double>(nt));
  s.variance.assign(n, std::vector<double>(nt, 0.0));
  s.se.assign(n, std::vector<double>(nt, 0.0));
  for (std::size_t t = 0; t < nt; ++t) {
    for (std::size_t j = 0; j < n; ++j) s.mean[j][t] = std::norm(record.states[t].alpha[j]);
  }
  for (std::size_t j = 0; j < n && nt > 0; ++j) s.total_atoms += s.mean[j][0];
  return s;
}

Transfer transfer_efficiency(const NumberSeries& series, std::size_t mode) {
  if (mode >= series.n_modes()) throw DomainError("transfer mode out of range");
  const auto& m = series.mean[mode];
  if (m.empty()) throw DomainError("transfer efficiency of an empty series");
  if (!(series.total_atoms > 0.0)) throw DomainError("transfer efficiency needs a positive atom number");
  Transfer tr;
  bool found = false;
  for (std::size_t t = 0; t < m.size(); ++t) {
    if (std::isnan(m[t])) continue;
    if (!found || m[t] > tr.peak_value) {
      tr.peak_value = m[t];
      tr.peak_index = t;
      found = true;
    }
  }
  if (!found) throw DomainError("transfer efficiency: no finite samples");
  // Recurring peaks of equal height differ only by grid sampling; report the first.
  const double tie = tr.peak_value - kPeakTieTolerance * std::abs(tr.peak_value);
  for (std::size_t t = 0; t < tr.peak_index; ++t) {
    if (m[t] >= tie) {
      tr.peak_index = t;
      break;
    }
  }
  tr.peak_time = series.times[tr.peak_index];
  tr.efficiency = tr.peak_value / series.total_atoms;
  tr.se = series.se[mode][tr.peak_index] / series.total_atoms;
  return tr;
}

ImaginaryHealth imaginary_health(const EnsembleStats& stats, double z_limit) {
  ImaginaryHealth h;
  for (std::size_t t = 0; t < stats.n_times(); ++t) {
    if (stats.count(t) == 0) continue;
    for (std::size_t j = 0; j < stats.n_modes(); ++j) {
      const double im = stats.m1(j, t).imag();
      const double se = stats.se_imag(j, t);
      ++h.checked;
      double z = 0.0;
      if (se > 0.0) {
        z = std::abs(im) / se;
      } else if (im != 0.0) {
        z = INFINITY;
      }
      h.worst_z = std::max(h.worst_z, z);
      if (z > z_limit) ++h.violations;
    }
  }
  return h;
}

}  // namespace atomgate
