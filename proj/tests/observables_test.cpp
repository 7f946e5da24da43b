#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "atomgate/error.hpp"
#include "atomgate/observables.hpp"
#include "support.hpp"

using namespace atomgate;
using namespace atomgate::testing;

namespace {

IntegratorConfig pp_config(double t_final, int stride) {
  IntegratorConfig cfg = gpe_config(t_final, stride);
  cfg.scheme = Scheme::Rk4Maruyama;
  return cfg;
}

EnsembleStats run(const InitialStateSpec& init, std::uint64_t n, bool coherences, double t_final = 0.1) {
  EnsembleOptions o;
  o.accumulate_coherences = coherences;
  return run_ensemble(gate(1e-3), init, pp_config(t_final, 100), n, 31, o);
}

}  // namespace

TEST(NumberMean, CoherentAtTimeZero) {
  const EnsembleStats st = run(gate_coherent_spec(50, 0), 64, false);
  EXPECT_NEAR(number_mean(st, 0, 0), 50.0, 1e-12);
  EXPECT_NEAR(number_mean(st, 2, 0), 50.0, 1e-12);
  EXPECT_EQ(number_mean(st, 1, 0), 0.0);
  EXPECT_EQ(number_mean(st, 3, 0), 0.0);
  EXPECT_NEAR(number_variance(st, 0, 0), 50.0, 1e-9);
}

TEST(NumberMean, FockAtTimeZero) {
  const EnsembleStats st = run(gate_fock_spec(50, 0), 5000, false);
  EXPECT_NEAR(number_mean(st, 0, 0), 50.0, 3 * st.se_real(0, 0));
}

TEST(Coherence, Examples) {
  const EnsembleStats coh = run(gate_coherent_spec(50, 0), 64, true);
  EXPECT_EQ(coherence(coh, 1, 1, 0), coh.m1(1, 0));
  EXPECT_NEAR(std::abs(coherence(coh, 0, 2, 0) - cplx(50.0, 0.0)), 0.0, 1e-12);

  const EnsembleStats fock = run(gate_fock_spec(50, 0), 4000, true);
  // Direct resampling of the same initial draws gives the reference spread.
  double s = 0, s2 = 0;
  for (std::uint64_t k = 0; k < 4000; ++k) {
    auto stream = TrajectoryRng(31, k).initial_stream();
    const PhasePoint p = sample_initial(gate_fock_spec(50, 0), gate(1e-3), stream);
    const double c = (p.alpha_plus[0] * p.alpha[2]).real();
    s += c;
    s2 += c * c;
  }
  const double mean = s / 4000, se = std::sqrt((s2 / 4000 - mean * mean) / 3999);
  EXPECT_NEAR(coherence(fock, 0, 2, 0).real(), mean, 1e-9 * (1 + std::abs(mean)));
  EXPECT_NEAR(coherence(fock, 0, 2, 0).real(), 0.0, 3 * se);

  const EnsembleStats plain = run(gate_coherent_spec(50, 0), 64, false);
  EXPECT_THROW(coherence(plain, 0, 2, 0), UnavailableError);
  EXPECT_NO_THROW(coherence(plain, 2, 2, 0));
}

TEST(TransferEfficiency, MeanFieldExamples) {
  const auto cfg = gpe_config(20.0, 1);
  auto eff = [&](double theta) {
    return transfer_efficiency(number_series(integrate_gpe(gate(0.0), gate_point(theta), cfg)), 3);
  };
  EXPECT_NEAR(eff(0.0).efficiency, 8.0 / 9.0, 1e-6);
  EXPECT_NEAR(eff(std::numbers::pi / 2).efficiency, 4.0 / 9.0, 1e-6);
  EXPECT_LT(eff(std::numbers::pi).efficiency, 1e-12);
  EXPECT_NEAR(eff(0.0).peak_time, std::numbers::pi / std::numbers::sqrt3, 1e-3);
  EXPECT_EQ(eff(0.0).se, 0.0);
}

TEST(NumberSeries, MeanFieldHasZeroSpread) {
  const NumberSeries s = number_series(integrate_gpe(gate(1e-3), gate_point(0.0), gpe_config(1.0, 10)));
  EXPECT_NEAR(s.total_atoms, 100.0, 1e-12);
  for (std::size_t j = 0; j < 4; ++j) {
    for (std::size_t t = 0; t < s.times.size(); ++t) {
      EXPECT_EQ(s.variance[j][t], 0.0);
      EXPECT_EQ(s.se[j][t], 0.0);
    }
  }
}

TEST(NumberSeries, TotalConsistentForPositiveP) {
  const EnsembleStats st = run(gate_fock_spec(50, 0), 2000, false, 2.0);
  const NumberSeries s = number_series(st, 100.0);
  for (std::size_t t = 0; t < s.times.size(); ++t) {
    double total = 0;
    for (std::size_t j = 0; j < 4; ++j) {
      total += s.mean[j][t];
    }
    // Sum of per-mode SEs bounds the SE of the total.
    double se_sum = 0;
    for (std::size_t j = 0; j < 4; ++j) se_sum += s.se[j][t];
    EXPECT_NEAR(total, 100.0, 3 * se_sum) << t;
  }
}

TEST(ImaginaryHealth, HealthyRun) {
  const EnsembleStats st = run(gate_fock_spec(50, 0), 2000, false, 2.0);
  const ImaginaryHealth h = imaginary_health(st);
  EXPECT_GT(h.checked, 0u);
  EXPECT_TRUE(h.healthy()) << h.violations << " of " << h.checked;
}
