#include <gtest/gtest.h>

#include <cmath>

#include "repsim/experiments.hpp"

using namespace repsim;

TEST(Linalg, JacobiDiagonalizesHermitian) {
  // spot-check on a known 2x2: H = [[1, i],[-i, 1]] has eigenvalues 0, 2
  Matrix m(2);
  m.at(0, 0) = 1;
  m.at(0, 1) = cplx{0, 1};
  m.at(1, 0) = cplx{0, -1};
  m.at(1, 1) = 1;
  auto es = eigh(m);
  EXPECT_NEAR(es.values[0], 0.0, 1e-12);
  EXPECT_NEAR(es.values[1], 2.0, 1e-12);
  // eigen equation residual
  for (int k = 0; k < 2; ++k) {
    std::vector<cplx> v = {es.vectors.at(0, k), es.vectors.at(1, k)};
    auto mv = m.apply(v);
    for (int i = 0; i < 2; ++i) EXPECT_NEAR(std::abs(mv[i] - es.values[k] * v[i]), 0, 1e-12);
  }
}

TEST(Linalg, PropagatorIsUnitaryAndCorrect) {
  Matrix z = pauli_matrix(PauliString::z(0), 1);
  Matrix u = hermitian_propagator(z, 0.7);
  // exp(-i Z t) = diag(e^{-it}, e^{it})
  EXPECT_NEAR(std::abs(u.at(0, 0) - std::exp(cplx{0, -0.7})), 0, 1e-12);
  EXPECT_NEAR(std::abs(u.at(1, 1) - std::exp(cplx{0, 0.7})), 0, 1e-12);
  Matrix uu = u * u.adjoint();
  EXPECT_NEAR(std::abs(uu.at(0, 0) - 1.0), 0, 1e-12);
  EXPECT_NEAR(std::abs(uu.at(0, 1)), 0, 1e-12);
}

TEST(Observables, CaffeineGroundEnergyMatchesReference) {
  auto ham = caffeine_hamiltonian();
  EXPECT_NEAR(ham.ground_energy(), -667.7400, 5e-5);
}

TEST(Observables, GroupsAreQubitWiseCompatible) {
  auto ham = caffeine_hamiltonian();
  EXPECT_NO_THROW(ham.validate());
  EXPECT_EQ(ham.groups.size(), 4u);
  size_t covered = 0;
  for (const auto& g : ham.groups) covered += g.term_indices.size();
  EXPECT_EQ(covered, ham.terms.size());
}

TEST(Experiments, BenchmarkNoiselessIsPerfect) {
  for (Variant v : {Variant::Bare, Variant::Encoded, Variant::EncodedEc}) {
    for (int d : {1, 3, 8}) {
      BenchmarkConfig cfg;
      cfg.variant = v;
      cfg.depth = d;
      cfg.p = 0;
      cfg.shots = 10;
      auto res = run_benchmark(cfg, 7);
      EXPECT_NEAR(res.fidelity, 1.0, 1e-10) << variant_name(v) << " d=" << d;
    }
  }
}

TEST(Experiments, BenchmarkReproducible) {
  BenchmarkConfig cfg;
  cfg.variant = Variant::Encoded;
  cfg.depth = 4;
  cfg.p = 0.01;
  cfg.shots = 200;
  auto a = run_benchmark(cfg, 42);
  auto b = run_benchmark(cfg, 42);
  EXPECT_EQ(a.fidelity, b.fidelity);
  auto c = run_benchmark(cfg, 43);
  EXPECT_NE(a.fidelity, c.fidelity);
}

TEST(Experiments, TrotterCircuitMatchesDenseOracle) {
  // noiseless bare circuit against the dense 4x4 product at every step, t <= 5
  IsingConfig cfg;
  cfg.variant = Variant::Bare;
  cfg.p = 0;
  cfg.n_steps = 50;
  auto sim = run_ising(cfg, 5);
  auto oracle = trotter_oracle_magnetization(cfg.h, cfg.delta, cfg.n_steps);
  ASSERT_EQ(sim.points.size(), oracle.size());
  for (size_t i = 0; i < oracle.size(); ++i)
    EXPECT_NEAR(sim.points[i].m, oracle[i], 1e-9) << "step " << i;
}

TEST(Experiments, EncodedTrotterNoiselessMatchesOracle) {
  IsingConfig cfg;
  cfg.variant = Variant::Encoded;
  cfg.p = 0;
  cfg.n_steps = 5;
  auto sim = run_ising(cfg, 5);
  auto oracle = trotter_oracle_magnetization(cfg.h, cfg.delta, cfg.n_steps);
  for (size_t i = 0; i < oracle.size(); ++i)
    EXPECT_NEAR(sim.points[i].m, oracle[i], 1e-9) << "step " << i;
}

TEST(Experiments, MagnetizationAtTimeZeroIsTwo) {
  auto oracle = trotter_oracle_magnetization(1.0, 0.1, 1);
  // M(0) = 2 exactly; after one small step it stays close
  StateVector s(2);
  EXPECT_NEAR(s.expectation_pauli(PauliString::z(0)) + s.expectation_pauli(PauliString::z(1)), 2.0,
              1e-12);
  EXPECT_NEAR(oracle[0], 2.0, 0.05);
}

TEST(Experiments, TrotterErrorIsFirstOrder) {
  // deviation from the exact propagator shrinks with the step size
  int steps_coarse = 10;
  auto tr1 = trotter_oracle_magnetization(1.0, 0.1, steps_coarse);       // t = 1
  auto tr2 = trotter_oracle_magnetization(1.0, 0.05, 2 * steps_coarse);  // t = 1
  auto exact = exact_evolution_magnetization(1.0, 1.0, 1);               // M(t=1)
  double err1 = std::abs(tr1.back() - exact[0]);
  double err2 = std::abs(tr2.back() - exact[0]);
  EXPECT_LT(err1, 0.2);
  EXPECT_LT(err2, err1);
}

TEST(Experiments, IntegratedErrorArithmetic) {
  std::vector<double> a = {1, 1, 1, 1};
  EXPECT_NEAR(integrated_error(a, a, 4), 0.0, 1e-15);
  std::vector<double> b = {1.1, 1.1, 1.1, 1.1};
  EXPECT_NEAR(integrated_error(a, b, 4), 0.1, 1e-12);
  EXPECT_THROW(integrated_error(a, b, 5), std::invalid_argument);
}

TEST(Experiments, DiscardRateFitRecoversGenerator) {
  std::vector<std::pair<double, double>> series;
  double a_true = 0.5;
  for (int i = 1; i <= 40; ++i) {
    double t = 0.1 * i;
    series.push_back({t, 1.0 - std::exp(-a_true * t)});
  }
  auto fit = discard_rate_fit(series);
  EXPECT_NEAR(fit.a, a_true, 1e-6);
  EXPECT_LT(fit.residual, 1e-12);

  std::vector<std::pair<double, double>> zeros = {{0.1, 0.0}, {0.2, 0.0}};
  EXPECT_THROW(discard_rate_fit(zeros), std::invalid_argument);
}

TEST(Experiments, OptimizerReachesExactGroundEnergy) {
  auto ham = caffeine_hamiltonian();
  double exact = ham.ground_energy();
  auto best = optimize_ansatz_multistart(ham, 5, 99);
  EXPECT_NEAR(best.energy, exact, 5e-5);

  // multi-start consistency: all restarts land on the same minimum
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-M_PI, M_PI);
  for (int s = 0; s < 5; ++s) {
    std::array<double, 4> init;
    for (auto& v : init) v = u(rng);
    auto r = optimize_ansatz(ham, init);
    EXPECT_NEAR(r.energy, best.energy, 1e-6);
  }

  // stationarity: finite-difference gradient vanishes at the optimum
  double eps = 1e-5;
  double gnorm = 0;
  for (int k = 0; k < 4; ++k) {
    auto tp = best.theta, tm = best.theta;
    tp[k] += eps;
    tm[k] -= eps;
    double g = (vqe_exact_energy(ham, tp) - vqe_exact_energy(ham, tm)) / (2 * eps);
    gnorm += g * g;
  }
  EXPECT_LT(std::sqrt(gnorm), 1e-4);
}

TEST(Experiments, VqeIdentityOnlyCheckAtThetaZero) {
  // theta = 0, p = 0: the Z-group reads |00> deterministically; the energy
  // equals the diagonal part of <00|H|00> up to X/Y-group shot noise
  auto ham = caffeine_hamiltonian();
  VqeConfig cfg;
  cfg.variant = Variant::Bare;
  cfg.p = 0;
  cfg.shots_per_group = 200000;
  cfg.theta = {0, 0, 0, 0};
  auto res = vqe_energy(ham, cfg, 31);
  double diag = ham.identity_coeff - 0.1532273887412754 * 2 + 0.025969183085931477;
  EXPECT_NEAR(res.energy, diag, 6 * res.stderr_ + 1e-6);
}

TEST(Experiments, VqeEstimatorUnbiasedAtPZero) {
  auto ham = caffeine_hamiltonian();
  auto best = optimize_ansatz_multistart(ham, 3, 5);
  VqeConfig cfg;
  cfg.variant = Variant::Bare;
  cfg.p = 0;
  cfg.shots_per_group = 400000;
  cfg.theta = best.theta;
  auto res = vqe_energy(ham, cfg, 17);
  EXPECT_NEAR(res.energy, best.energy, 5 * res.stderr_ + 1e-9);
  EXPECT_GT(res.stderr_, 0);
}

TEST(Experiments, VqeEncodedNoiselessMatchesExact) {
  auto ham = caffeine_hamiltonian();
  auto best = optimize_ansatz_multistart(ham, 3, 5);
  VqeConfig cfg;
  cfg.variant = Variant::Encoded;
  cfg.p = 0;
  cfg.shots_per_group = 200000;
  cfg.theta = best.theta;
  auto res = vqe_energy(ham, cfg, 23);
  EXPECT_NEAR(res.energy, best.energy, 5 * res.stderr_ + 1e-9);
}

TEST(Experiments, ResultsIndependentOfThreadCount) {
  BenchmarkConfig cfg;
  cfg.variant = Variant::Encoded;
  cfg.depth = 3;
  cfg.p = 0.01;
  cfg.shots = 300;
  cfg.threads = 1;
  auto a = run_benchmark(cfg, 5);
  cfg.threads = 4;
  auto b = run_benchmark(cfg, 5);
  EXPECT_EQ(a.fidelity, b.fidelity);
  EXPECT_EQ(a.stderr_, b.stderr_);
}

TEST(Experiments, DiscardFractionGrowsWithDepth) {
  IsingConfig cfg;
  cfg.variant = Variant::Encoded;
  cfg.p = 2e-3;
  cfg.n_steps = 12;
  cfg.shots = 400;
  auto res = run_ising(cfg, 3);
  for (size_t i = 1; i < res.points.size(); ++i)
    EXPECT_GE(res.points[i].discard_rate, res.points[i - 1].discard_rate);
  EXPECT_GT(res.points.back().discard_rate, 0.0);
}
