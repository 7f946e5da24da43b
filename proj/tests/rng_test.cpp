#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "atomgate/rng.hpp"

using namespace atomgate;

TEST(Philox, KnownAnswers) {
  using C = Philox4x32::Counter;
  EXPECT_EQ(Philox4x32::generate(C{0, 0, 0, 0}, {0, 0}), (C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  EXPECT_EQ(Philox4x32::generate(C{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}),
            (C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
  EXPECT_EQ(Philox4x32::generate(C{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}),
            (C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(SequentialStream, UniformInOpenInterval) {
  SequentialStream s({1, 2}, {3, 4, 5, 0});
  double sum = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = s.uniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / 100000, 0.5, 3 * std::sqrt(1.0 / 12 / 100000));
}

TEST(SequentialStream, GammaMoments) {
  SequentialStream s({7, 7}, {0, 0, 0, 0});
  for (double shape : {0.5, 1.0, 51.0}) {
    const int n = 200000;
    double m = 0.0, m2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double g = s.gamma(shape);
      m += g;
      m2 += g * g;
    }
    m /= n;
    const double var = m2 / n - m * m;
    EXPECT_NEAR(m, shape, 4 * std::sqrt(shape / n)) << shape;
    EXPECT_NEAR(var, shape, 0.05 * shape) << shape;
  }
}

TEST(TrajectoryRng, PureFunctionOfAddress) {
  const TrajectoryRng a(42, 7), b(42, 7), c(42, 8), d(43, 7);
  EXPECT_EQ(a.normal_pair(10, 1, 0, 0), b.normal_pair(10, 1, 0, 0));
  EXPECT_NE(a.normal_pair(10, 1, 0, 0), c.normal_pair(10, 1, 0, 0));
  EXPECT_NE(a.normal_pair(10, 1, 0, 0), d.normal_pair(10, 1, 0, 0));
  EXPECT_NE(a.normal_pair(10, 1, 0, 0), a.normal_pair(11, 1, 0, 0));
}

TEST(TrajectoryRng, RefinedIncrementsSumToCoarse) {
  const TrajectoryRng rng(5, 3);
  const std::size_t n_eq = 8;
  const double dt = 1e-3;
  std::vector<double> coarse(n_eq), fine(4 * n_eq);
  for (std::uint64_t step = 0; step < 20; ++step) {
    rng.wiener_increments(step, n_eq, 0, dt, coarse);
    rng.wiener_increments(step, n_eq, 2, dt / 4, fine);
    for (std::size_t e = 0; e < n_eq; ++e) {
      const double s = fine[e] + fine[n_eq + e] + fine[2 * n_eq + e] + fine[3 * n_eq + e];
      EXPECT_NEAR(s, coarse[e], 1e-15);
    }
  }
}

TEST(TrajectoryRng, IncrementVariance) {
  const std::size_t n_eq = 4;
  const double dt = 0.01;
  double sum2 = 0.0, sum2_fine = 0.0;
  std::size_t count = 0;
  std::vector<double> coarse(n_eq), fine(2 * n_eq);
  for (std::uint64_t traj = 0; traj < 200; ++traj) {
    const TrajectoryRng rng(9, traj);
    for (std::uint64_t step = 0; step < 100; ++step) {
      rng.wiener_increments(step, n_eq, 0, dt, coarse);
      rng.wiener_increments(step, n_eq, 1, dt / 2, fine);
      for (std::size_t e = 0; e < n_eq; ++e) {
        sum2 += coarse[e] * coarse[e];
        sum2_fine += fine[e] * fine[e];
        ++count;
      }
    }
  }
  const double rel = std::sqrt(2.0 / count);
  EXPECT_NEAR(sum2 / count / dt, 1.0, 4 * rel);
  EXPECT_NEAR(sum2_fine / count / (dt / 2), 1.0, 4 * rel);
}
