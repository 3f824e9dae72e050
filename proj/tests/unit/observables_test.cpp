#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "dtqw/error.hpp"
#include "dtqw/observables.hpp"

namespace dtqw {
namespace {

constexpr double kTol = 1e-10;

TEST(PositionDistribution, BallisticExamples) {
  auto d = position_distribution(evolve({0.0, 0.0, 0.0, 16}));
  EXPECT_NEAR(d.total_at(16), 1.0, kTol);
  for (int x = -16; x < 16; ++x) EXPECT_NEAR(d.total_at(x), 0.0, kTol);

  d = position_distribution(evolve({0.0, std::numbers::pi / 4, 0.0, 16}));
  EXPECT_NEAR(d.total_at(16), 0.5, kTol);
  EXPECT_NEAR(d.total_at(-16), 0.5, kTol);
  EXPECT_NEAR(d.h_at(16), 0.5, kTol);
  EXPECT_NEAR(d.v_at(-16), 0.5, kTol);
}

TEST(PositionDistribution, NormalizesLossyState) {
  const auto d = position_distribution(evolve({45.0, 0.0, 0.2, 1}));
  const double p_right = 1.0 / (1.0 + std::exp(-0.4));
  EXPECT_NEAR(d.total_at(1), p_right, kTol);
  EXPECT_NEAR(d.total_at(-1), 1.0 - p_right, kTol);
  EXPECT_NEAR(d.total_at(1), 0.5987, 5e-5);
  EXPECT_NEAR(d.total_at(-1), 0.4013, 5e-5);

  double sum = 0.0;
  for (std::size_t i = 0; i < d.sites(); ++i) {
    EXPECT_DOUBLE_EQ(d.p_total[i], d.p_h[i] + d.p_v[i]);
    sum += d.p_total[i];
  }
  EXPECT_NEAR(sum, 1.0, kTol);
}

TEST(PositionDistribution, DegenerateStateRejected) {
  const auto empty = WalkerState(2);
  EXPECT_THROW(position_distribution(empty), DegenerateStateError);
  EXPECT_THROW(reduced_density_matrix(empty), DegenerateStateError);
  const auto tiny = WalkerState::from_amplitudes(0, {1e-160}, {0.0});
  EXPECT_THROW(position_distribution(tiny), DegenerateStateError);
}

TEST(Ipr, Examples) {
  PositionDistribution point{0, 0, {1.0}, {0.0}, {1.0}};
  EXPECT_DOUBLE_EQ(ipr(point), 1.0);

  PositionDistribution two{1, -1, {0.5, 0.0, 0.0}, {0.0, 0.0, 0.5}, {0.5, 0.0, 0.5}};
  EXPECT_DOUBLE_EQ(ipr(two), 0.5);

  const double p = 1.0 / (1.0 + std::exp(-0.4));
  const double lossy = ipr(position_distribution(evolve({45.0, 0.0, 0.2, 1})));
  EXPECT_NEAR(lossy, p * p + (1 - p) * (1 - p), kTol);
  EXPECT_NEAR(lossy, 0.5195, 5e-5);
}

TEST(ReducedDensityMatrix, Examples) {
  auto rho = reduced_density_matrix(initial_state(0.0, 0));
  EXPECT_DOUBLE_EQ(rho.alpha, 1.0);
  EXPECT_DOUBLE_EQ(rho.beta, 0.0);
  EXPECT_EQ(rho.chi, std::complex<double>{});

  rho = reduced_density_matrix(evolve({0.0, std::numbers::pi / 4, 0.0, 16}));
  EXPECT_NEAR(rho.alpha, 0.5, kTol);
  EXPECT_NEAR(rho.beta, 0.5, kTol);
  EXPECT_NEAR(std::abs(rho.chi), 0.0, kTol);

  rho = reduced_density_matrix(evolve({45.0, 0.0, 0.0, 1}));
  EXPECT_NEAR(rho.alpha, 0.5, kTol);
  EXPECT_NEAR(rho.beta, 0.5, kTol);
  EXPECT_NEAR(std::abs(rho.chi), 0.0, kTol);
}

TEST(ReducedDensityMatrix, KeepsComplexCoherence) {
  // Before any shift, H and V share the origin; chi = cos(phi) * conj(i sin(phi)).
  const auto rho = reduced_density_matrix(initial_state(0.4, 0));
  EXPECT_NEAR(rho.chi.real(), 0.0, kTol);
  EXPECT_NEAR(rho.chi.imag(), -std::cos(0.4) * std::sin(0.4), kTol);
}

TEST(EntanglementEntropy, Examples) {
  auto e = entanglement_entropy({1.0, 0.0, {}});
  EXPECT_DOUBLE_EQ(e.s_e, 0.0);
  EXPECT_DOUBLE_EQ(e.lambda1, 1.0);
  EXPECT_DOUBLE_EQ(e.lambda2, 0.0);

  e = entanglement_entropy({0.5, 0.5, {}});
  EXPECT_NEAR(e.s_e, 1.0, 1e-15);

  const double p = 1.0 / (1.0 + std::exp(-0.4));
  e = entanglement_entropy({p, 1.0 - p, {}});
  const double binary = -(p * std::log(p) + (1 - p) * std::log(1 - p)) / std::log(2.0);
  EXPECT_NEAR(e.s_e, binary, 1e-12);
  EXPECT_NEAR(e.s_e, 0.9718, 1e-4);
  EXPECT_NEAR(e.lambda1, p, kTol);
}

TEST(EntanglementEntropy, PureSuperpositionHasZeroEntropy) {
  // |+> coin: alpha = beta = |chi| = 1/2, determinant zero.
  const auto e = entanglement_entropy({0.5, 0.5, {0.5, 0.0}});
  EXPECT_NEAR(e.s_e, 0.0, 1e-9);
}

TEST(EntanglementEntropy, RejectsUnphysicalMatrix) {
  EXPECT_THROW(entanglement_entropy({0.5, 0.5, {0.6, 0.0}}), NumericalError);
  EXPECT_THROW(entanglement_entropy({0.7, 0.5, {}}), NumericalError);
  EXPECT_THROW(entanglement_entropy({1.2, -0.2, {}}), NumericalError);
}

TEST(EntanglementEntropy, ClosedFormMatchesEigenSolver) {
  std::mt19937_64 rng(20261018);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    const double alpha = u(rng);
    const double beta = 1.0 - alpha;
    const double r = std::sqrt(alpha * beta) * u(rng);
    const double arg = 2.0 * std::numbers::pi * u(rng);
    const std::complex<double> chi = std::polar(r, arg);

    Eigen::Matrix2cd m;
    m << alpha, chi, std::conj(chi), beta;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> solver(m);
    const auto ev = solver.eigenvalues();

    const auto e = entanglement_entropy({alpha, beta, chi});
    EXPECT_NEAR(e.lambda1, ev(1), kTol);
    EXPECT_NEAR(e.lambda2, std::max(ev(0), 0.0), kTol);
    EXPECT_NEAR(e.lambda1 + e.lambda2, 1.0, kTol);
    double reference = 0.0;
    for (double l : {ev(0), ev(1)}) {
      if (l > 0) reference -= l * std::log(l) / std::log(2.0);
    }
    EXPECT_NEAR(e.s_e, reference, 1e-9);
  }
}

TEST(Measure, BundlesEverything) {
  const auto obs = measure(evolve({45.0, 0.0, 0.2, 1}));
  EXPECT_NEAR(obs.survival, 0.5 + 0.5 * std::exp(-0.4), 1e-12);
  EXPECT_NEAR(obs.ipr, ipr(obs.distribution), 0.0);
  EXPECT_EQ(obs.distribution.argmax(), 1);
}

}  // namespace
}  // namespace dtqw
