#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "atomgate/error.hpp"
#include "atomgate/verification.hpp"
#include "support.hpp"

using namespace atomgate;
using namespace atomgate::testing;

namespace {

InitialStateSpec fock_modes(std::initializer_list<std::int64_t> ns) {
  InitialStateSpec s;
  for (auto n : ns) s.modes.push_back(ModeInit{Fock{n}, 0.0});
  return s;
}

}  // namespace

TEST(LinearOracle, GatePeak) {
  const auto a = linear_solution(gate(), gate_point(0.0).alpha, std::numbers::pi / std::numbers::sqrt3);
  EXPECT_NEAR(std::norm(a[3]), 800.0 / 9.0, 1e-9);
}

TEST(LinearOracle, IdentityAtZero) {
  const PhasePoint p = gate_point(0.3);
  EXPECT_EQ(linear_solution(gate(), p.alpha, 0.0), p.alpha);
}

TEST(LinearOracle, DarkStateStatic) {
  const PhasePoint p = PhasePoint::classical({std::sqrt(50.0), 0.0, -std::sqrt(50.0), 0.0});
  for (double t : {0.5, 3.0, 17.0}) {
    const auto a = linear_solution(gate(), p.alpha, t);
    for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(std::abs(a[j] - p.alpha[j]), 0.0, 1e-12);
  }
}

TEST(LinearOracle, OrthogonalAndUnitary) {
  const LinearOracle o(make_gate_lattice({0.1, -0.2, 0.3, 0.0}, 1.0, 0.0));
  const Eigen::MatrixXd v = o.eigenvectors();
  EXPECT_LT((v.transpose() * v - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((o.generator() - o.generator().transpose()).cwiseAbs().maxCoeff(), 1e-15);
  const auto a = o.evolve(gate_point(1.0).alpha, 7.3);
  double n = 0;
  for (const auto& x : a) n += std::norm(x);
  EXPECT_NEAR(n, 100.0, 1e-10);
}

TEST(LinearOracle, RejectsInteraction) { EXPECT_THROW(LinearOracle(gate(1e-3)), DomainError); }

TEST(LinearOracle, AgreesWithGpe) {
  const LatticeSpec l = make_gate_lattice({0.2, 0.0, -0.1, 0.05}, 1.0, 0.0);
  const PhasePoint p0 = gate_point(0.8);
  const TrajectoryRecord r = integrate_gpe(l, p0, gpe_config(20.0, 100));
  const LinearOracle o(l);
  double worst = 0;
  for (std::size_t t = 0; t < r.times.size(); ++t) {
    const auto a = o.evolve(p0.alpha, r.times[t]);
    for (std::size_t j = 0; j < 4; ++j) worst = std::max(worst, std::abs(a[j] - r.states[t].alpha[j]));
  }
  EXPECT_LT(worst, 1e-8);
}

TEST(FockOracle, SingleParticleRabi) {
  const FockOracle o(make_chain_lattice(2, 1.0, 0.0), fock_modes({1, 0}));
  for (double t : {0.0, 0.4, 1.5708, 2.9}) {
    const auto n = exact_quantum_numbers(o, t);
    EXPECT_NEAR(n[1], std::pow(std::sin(t), 2), 1e-12) << t;
    EXPECT_NEAR(n[0] + n[1], 1.0, 1e-12);
  }
}

TEST(FockOracle, NumberStatesStationaryWithoutTunnelling) {
  const FockOracle o(make_chain_lattice(2, 0.0, 0.1), fock_modes({2, 0}));
  for (double t : {0.0, 1.0, 10.0}) {
    const auto n = exact_quantum_numbers(o, t);
    EXPECT_NEAR(n[0], 2.0, 1e-12);
    EXPECT_NEAR(n[1], 0.0, 1e-12);
  }
}

TEST(FockOracle, FrozenTwoModeValues) {
  // Independent dense matrix-exponential reference values.
  const LatticeSpec l = make_chain_lattice(2, 1.0, 0.1);
  const FockOracle two(l, fock_modes({2, 0}));
  EXPECT_NEAR(exact_quantum_numbers(two, 0.5)[0], 1.540678639845514, 1e-10);
  EXPECT_NEAR(exact_quantum_numbers(two, 1.0)[0], 0.5882010368845529, 1e-10);
  EXPECT_NEAR(exact_quantum_numbers(two, 2.0)[0], 0.3555593819266621, 1e-10);
  const FockOracle three(l, fock_modes({2, 1}));
  EXPECT_NEAR(exact_quantum_numbers(three, 1.0)[0], 1.2928067738596933, 1e-10);
  EXPECT_NEAR(exact_quantum_numbers(three, 2.0)[0], 1.2147940113743716, 1e-10);
  const FockOracle pair(l, fock_modes({1, 1}));
  EXPECT_NEAR(exact_quantum_numbers(pair, 2.0)[0], 1.0, 1e-10);
}

TEST(FockOracle, HermitianAndNormPreserving) {
  const FockOracle o(make_chain_lattice(3, 1.0, 0.2), fock_modes({3, 0, 2}));
  EXPECT_LT(o.hermiticity_error(), 1e-12);
  for (double t : {0.5, 2.0, 5.0}) EXPECT_NEAR(o.moments(t).norm, 1.0, 1e-10);
}

TEST(FockOracle, TaylorPropagator) {
  // 4 modes, 6 atoms: 7^4 = 2401 states is past the dense limit.
  InitialStateSpec init = fock_modes({3, 0, 3, 0});
  const FockOracle interacting(gate(0.1), init);
  ASSERT_FALSE(interacting.dense());
  const auto m = interacting.moments(1.3);
  EXPECT_NEAR(m.norm, 1.0, 1e-10);
  double total = 0;
  for (double x : m.mean) total += x;
  EXPECT_NEAR(total, 6.0, 1e-9);
  EXPECT_NEAR(m.mean[0], m.mean[2], 1e-9);

  const FockOracle free(gate(0.0), init);
  const LinearOracle lin(gate(0.0));
  const double t = 1.3;
  std::vector<double> expected(4, 0.0);
  for (std::size_t k : {0u, 2u}) {
    std::vector<cplx> e(4, 0.0);
    e[k] = 1.0;
    const auto u = lin.evolve(e, t);
    for (std::size_t j = 0; j < 4; ++j) expected[j] += 3.0 * std::norm(u[j]);
  }
  const auto n = exact_quantum_numbers(free, t);
  for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(n[j], expected[j], 1e-9) << j;
}

TEST(FockOracle, ChiZeroMatchesSingleParticlePicture) {
  // Product Fock input at chi = 0: <N_j> = sum_k |U_jk|^2 n_k.
  const LatticeSpec l = make_chain_lattice(3, 1.0, 0.0);
  const FockOracle o(l, fock_modes({2, 0, 1}));
  const LinearOracle lin(l);
  const double t = 0.9;
  std::vector<double> expected(3, 0.0);
  const double ns[] = {2, 0, 1};
  for (std::size_t k = 0; k < 3; ++k) {
    std::vector<cplx> e(3, 0.0);
    e[k] = 1.0;
    const auto u = lin.evolve(e, t);
    for (std::size_t j = 0; j < 3; ++j) expected[j] += std::norm(u[j]) * ns[k];
  }
  const auto n = exact_quantum_numbers(o, t);
  for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(n[j], expected[j], 1e-10);
}

TEST(FockOracle, CoherentInputCloseToMeanField) {
  InitialStateSpec init;
  init.modes = {ModeInit{Coherent{4.0, 0.0}, 0.0}, ModeInit{Coherent{4.0, 0.0}, 1.0}};
  const LatticeSpec l = make_chain_lattice(2, 1.0, 0.01);
  const FockOracle o(l, init);
  const TrajectoryRecord r = integrate_gpe(l, mean_field_point(init), gpe_config(3.0, 100));
  for (std::size_t t = 0; t < r.times.size(); ++t) {
    const auto n = exact_quantum_numbers(o, r.times[t]);
    EXPECT_NEAR(n[0], std::norm(r.states[t].alpha[0]), 0.05 * 8.0) << r.times[t];
  }
}

TEST(FockOracle, TruncationDetected) {
  InitialStateSpec init;
  init.modes = {ModeInit{Coherent{4.0, 0.0}, 0.0}, ModeInit{}};
  const FockOracle o(make_chain_lattice(2, 1.0, 0.0), init, 4);
  try {
    o.moments(0.0);
    FAIL() << "expected TruncationError";
  } catch (const TruncationError& e) {
    EXPECT_EQ(e.suggested_n_max(), 8);
  }
}

TEST(FockOracle, DimensionLimit) {
  EXPECT_THROW(FockOracle(gate(1e-3), gate_fock_spec(50, 0)), DomainError);
}
