// Copyright 2026 The relaxq Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <random>

#include "relaxq/json_io.hpp"
#include "relaxq/relaxation.hpp"

namespace relaxq {
namespace {

Eigen::VectorXd V(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

double max_abs(const Eigen::MatrixXd& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

void expect_pde_near(const ParabolicPDE& a, const ParabolicPDE& b, double tol) {
  ASSERT_EQ(a.d, b.d);
  EXPECT_LE(max_abs(a.D - b.D), tol);
  EXPECT_LE(max_abs(a.gamma - b.gamma), tol);
  EXPECT_NEAR(a.r, b.r, tol);
}

void expect_same_couplings(const RelaxationSystem& a, const RelaxationSystem& b) {
  ASSERT_EQ(a.d, b.d);
  EXPECT_EQ(a.epsilons, b.epsilons);
  EXPECT_EQ(a.alpha, b.alpha);
  EXPECT_EQ(a.lambda, b.lambda);
  EXPECT_EQ(a.delta, b.delta);
  EXPECT_EQ(a.convection, b.convection);
  EXPECT_EQ(a.r, b.r);
}

TEST(Heat1D, EffectivePdeIsHeatEquation) {
  const auto sys = build_heat_1d(1.0, 0.1);
  const auto pde = effective_pde(sys);
  EXPECT_NEAR(pde.D(0, 0), 1.0, 1e-12);
  EXPECT_EQ(pde.gamma(0), 0.0);
  EXPECT_EQ(pde.r, 0.0);
  EXPECT_EQ(sys.qudit_levels(), 2);
}

TEST(Heat1D, RelaxationRate) {
  EXPECT_NEAR(build_heat_1d(2.0, 0.05).lambda(0), 200.0, 1e-10);
}

TEST(Heat1D, RejectsBadParameters) {
  EXPECT_THROW(build_heat_1d(0.0, 0.1), std::invalid_argument);
  EXPECT_THROW(build_heat_1d(-1.0, 0.1), std::invalid_argument);
  EXPECT_THROW(build_heat_1d(1.0, 0.0), std::invalid_argument);
  EXPECT_THROW(build_heat_1d(1.0, 1.0), std::invalid_argument);
}

TEST(Heat1D, WarnsForLargeEpsilon) {
  EXPECT_TRUE(build_heat_1d(1.0, 0.1).warnings.empty());
  EXPECT_FALSE(build_heat_1d(1.0, 0.6).warnings.empty());
}

TEST(HeatDD, QutritForTwoDimensions) {
  EXPECT_EQ(build_heat_dd(V({1, 1}), V({0.1, 0.1})).qudit_levels(), 3);
}

TEST(HeatDD, OneDimensionMatchesHeat1D) {
  expect_same_couplings(build_heat_dd(V({1}), V({0.1})), build_heat_1d(1.0, 0.1));
}

TEST(HeatDD, DiagonalConstraintResidualIsZero) {
  const auto sys = build_heat_dd(V({1, 2, 3}), V({0.1, 0.2, 0.1}));
  EXPECT_LE(sys.constraint_residual(), 1e-14);
  const auto pde = effective_pde(sys);
  EXPECT_LE(max_abs(pde.D - Eigen::MatrixXd(V({1, 2, 3}).asDiagonal())), 1e-14);
}

TEST(HeatDD, DimensionMismatch) {
  EXPECT_THROW(build_heat_dd(V({1, 1}), V({0.1})), std::invalid_argument);
}

TEST(BlackScholes, LogTransformArithmetic) {
  const auto pde = black_scholes_log_transform(0.05, 0.2);
  EXPECT_NEAR(pde.D(0, 0), 0.02, 1e-15);
  EXPECT_NEAR(pde.gamma(0), 0.03, 1e-15);
  EXPECT_EQ(pde.r, 0.05);
  ASSERT_TRUE(pde.transform.has_value());
  EXPECT_EQ(pde.transform->rate, 0.05);
  EXPECT_GT(pde.transform->maturity, 0.0);
}

TEST(BlackScholes, DriftCancels) {
  EXPECT_NEAR(black_scholes_log_transform(0.02, 0.2).gamma(0), 0.0, 1e-16);
}

TEST(BlackScholes, RejectsNonPositiveSigma) {
  EXPECT_THROW(black_scholes_log_transform(0.05, 0.0), std::invalid_argument);
  EXPECT_THROW(build_black_scholes_1d(0.05, -0.1, 0.1), std::invalid_argument);
}

TEST(BlackScholes, EffectivePdeRoundTrip) {
  const auto sys = build_black_scholes_1d(0.05, 0.2, 0.1);
  expect_pde_near(effective_pde(sys), black_scholes_log_transform(0.05, 0.2), 1e-12);
}

TEST(BlackScholes, JacobianEigenvalues) {
  // 1/2 [-(r - s^2/2) +- sqrt((r - s^2/2)^2 + 4/eps^2)], r=0.05, s=0.2, eps=0.1.
  const auto ev = jacobian_eigenvalues(build_black_scholes_1d(0.05, 0.2, 0.1), 0);
  ASSERT_EQ(ev.size(), 2u);
  EXPECT_NEAR(ev[0].real(), -10.0150112499936718821, 1e-12);
  EXPECT_NEAR(ev[1].real(), 9.98501124999367188212, 1e-12);
  EXPECT_EQ(ev[0].imag(), 0.0);
  EXPECT_EQ(ev[1].imag(), 0.0);
}

TEST(BlackScholes, DegenerateDriftGivesSymmetricSpeeds) {
  const auto ev = jacobian_eigenvalues(build_black_scholes_1d(0.02, 0.2, 0.1), 0);
  EXPECT_NEAR(ev[0].real(), -10.0, 1e-12);
  EXPECT_NEAR(ev[1].real(), 10.0, 1e-12);
}

TEST(FokkerPlanck, ZeroDriftEqualsHeat) {
  const auto fp = build_fokker_planck(V({0}), V({1.5}), V({0.1}));
  expect_same_couplings(fp, build_heat_1d(1.5, 0.1));
}

TEST(FokkerPlanck, EffectiveDrift) {
  const auto pde = effective_pde(build_fokker_planck(V({0.5, -0.2}), V({1, 1}), V({0.1, 0.1})));
  EXPECT_NEAR(pde.gamma(0), -0.5, 1e-15);
  EXPECT_NEAR(pde.gamma(1), 0.2, 1e-15);
  EXPECT_LE(max_abs(pde.D - Eigen::MatrixXd::Identity(2, 2)), 1e-12);
}

TEST(FokkerPlanck, Errors) {
  EXPECT_THROW(build_fokker_planck(V({0, 0}), V({1}), V({0.1, 0.1})), std::invalid_argument);
  EXPECT_THROW(build_fokker_planck(V({0}), V({0}), V({0.1})), std::invalid_argument);
}

TEST(SolveAlpha, ScaledIdentity) {
  const Eigen::MatrixXd alpha = solve_alpha(2.0 * Eigen::MatrixXd::Identity(3, 3), V({0.1, 0.1, 0.1}));
  EXPECT_LE(max_abs(alpha - std::sqrt(2.0) * Eigen::MatrixXd::Identity(3, 3)), 1e-15);
}

TEST(SolveAlpha, TwoAssetBlackScholesMatrix) {
  Eigen::MatrixXd D(2, 2);
  D << 0.5, 0.3, 0.3, 0.5;
  const Eigen::MatrixXd alpha = solve_alpha(D, V({0.1, 0.1}));
  // Upper-triangular transposed Cholesky factor (equal eps: alpha = beta).
  EXPECT_NEAR(alpha(0, 0), 0.707106781186547524, 1e-15);
  EXPECT_NEAR(alpha(0, 1), 0.424264068711928515, 1e-15);
  EXPECT_NEAR(alpha(1, 0), 0.0, 1e-15);
  EXPECT_NEAR(alpha(1, 1), 0.565685424949238020, 1e-15);
  const Eigen::MatrixXd beta = alpha;  // eps equal
  EXPECT_LT(max_abs(beta.transpose() * beta - D), 1e-12);
}

TEST(SolveAlpha, RejectsIndefinite) {
  Eigen::MatrixXd D(2, 2);
  D << 1, 2, 2, 1;
  EXPECT_THROW(solve_alpha(D, V({0.1, 0.1})), std::invalid_argument);
}

TEST(SolveAlpha, RejectsNonSymmetric) {
  Eigen::MatrixXd D(2, 2);
  D << 1, 0.1, 0, 1;
  EXPECT_THROW(solve_alpha(D, V({0.1, 0.1})), std::invalid_argument);
}

TEST(SolveAlpha, SingularFallsBackToSquareRoot) {
  Eigen::MatrixXd D(2, 2);
  D << 1, 1, 1, 1;
  const Eigen::VectorXd eps = V({0.1, 0.2});
  const Eigen::MatrixXd alpha = solve_alpha(D, eps);
  Eigen::MatrixXd beta(2, 2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) beta(i, j) = alpha(i, j) * eps(i) / eps(j);
  EXPECT_LT(max_abs(beta.transpose() * beta - D), 1e-12);
  EXPECT_LT(max_abs(beta - beta.transpose()), 1e-14);  // symmetric square root
}

TEST(SolveAlpha, RandomPsdResidual) {
  std::mt19937 rng(2024);
  std::normal_distribution<double> n01;
  std::uniform_real_distribution<double> ueps(0.01, 0.3);
  for (int trial = 0; trial < 100; ++trial) {
    const int d = 1 + trial % 4;
    Eigen::MatrixXd G(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) G(i, j) = n01(rng);
    const Eigen::MatrixXd D = G.transpose() * G;
    Eigen::VectorXd eps(d);
    for (int j = 0; j < d; ++j) eps(j) = ueps(rng);
    const Eigen::MatrixXd alpha = solve_alpha(D, eps);
    double resid = 0.0;
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k) {
        double s = 0.0;
        for (int i = 0; i < d; ++i) s += alpha(i, j) * alpha(i, k) * eps(i) * eps(i) / (eps(j) * eps(k));
        resid = std::max(resid, std::abs(D(j, k) - s));
      }
    EXPECT_LE(resid, 1e-10) << "trial " << trial;
  }
}

TEST(General, PureHeatReducesToHeatDD) {
  const Eigen::VectorXd ks = V({1.0, 2.5, 0.7});
  const Eigen::VectorXd eps = V({0.1, 0.05, 0.2});
  const auto pde = make_parabolic(ks.asDiagonal().toDenseMatrix(), Eigen::VectorXd::Zero(3), 0.0);
  expect_same_couplings(build_general_parabolic(pde, eps), build_heat_dd(ks, eps));
}

TEST(General, TwoAssetBlackScholesRoundTrip) {
  const auto sys = build_black_scholes_dd(0.03, V({0.05, 0.04}), V({0.2, 0.3}), V({0.3}),
                                          V({0.1, 0.1}));
  const auto target = black_scholes_dd_log_transform(0.03, V({0.05, 0.04}), V({0.2, 0.3}), V({0.3}));
  EXPECT_NEAR(target.D(0, 1), 0.15, 1e-16);
  EXPECT_NEAR(target.gamma(0), 0.05 / 0.2 - 0.1, 1e-15);
  expect_pde_near(effective_pde(sys), target, 1e-10);
  EXPECT_LE(sys.constraint_residual(), 1e-10);
  EXPECT_EQ(sys.flavor, Flavor::black_scholes_dd);
}

TEST(General, ZeroDiffusionCannotCarryDrift) {
  const auto pde = make_parabolic(Eigen::MatrixXd::Zero(2, 2), V({0.0, 0.4}), 0.0);
  try {
    build_general_parabolic(pde, V({0.1, 0.1}));
    FAIL() << "expected an error";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("direction 1"), std::string::npos) << e.what();
  }
}

TEST(General, SingularDiffusionWithDriftInRange) {
  Eigen::MatrixXd D(2, 2);
  D << 1, 1, 1, 1;
  const auto pde = make_parabolic(D, V({0.3, 0.3}), 0.1);
  const auto sys = build_general_parabolic(pde, V({0.1, 0.1}));
  expect_pde_near(effective_pde(sys), pde, 1e-10);
}

TEST(General, RandomRoundTrip) {
  std::mt19937 rng(77);
  std::normal_distribution<double> n01;
  std::uniform_real_distribution<double> ueps(0.01, 0.3);
  for (int trial = 0; trial < 40; ++trial) {
    const int d = 1 + trial % 4;
    Eigen::MatrixXd G(d, d);
    Eigen::VectorXd gamma(d), eps(d);
    for (int i = 0; i < d; ++i) {
      gamma(i) = n01(rng);
      eps(i) = ueps(rng);
      for (int j = 0; j < d; ++j) G(i, j) = n01(rng);
    }
    const auto pde = make_parabolic(G.transpose() * G + 0.1 * Eigen::MatrixXd::Identity(d, d),
                                    gamma, std::abs(n01(rng)));
    const auto sys = build_general_parabolic(pde, eps);
    expect_pde_near(effective_pde(sys), pde, 1e-10);
    // Idempotence: rebuilding from the effective PDE changes nothing.
    expect_pde_near(effective_pde(build_general_parabolic(effective_pde(sys), eps)),
                    effective_pde(sys), 1e-10);
  }
}

TEST(Hyperbolicity, JacobiansSymmetricForAllBuilders) {
  const std::vector<RelaxationSystem> systems = {
      build_heat_1d(1.0, 0.1),
      build_heat_dd(V({1, 2}), V({0.1, 0.2})),
      build_black_scholes_1d(0.05, 0.2, 0.1),
      build_black_scholes_dd(0.03, V({0.05, 0.04, 0.0}), V({0.2, 0.3, 0.25}), V({0.3, -0.2}),
                             V({0.1, 0.1, 0.1})),
      build_fokker_planck(V({0.5, -0.2}), V({1, 1}), V({0.1, 0.1})),
  };
  for (const auto& sys : systems) {
    for (int j = 0; j < sys.d; ++j) {
      const Eigen::MatrixXd J = sys.flux_jacobian(j);
      EXPECT_EQ(max_abs(J - J.transpose()), 0.0);
      for (const cplx& ev : jacobian_eigenvalues(sys, j)) EXPECT_EQ(ev.imag(), 0.0);
    }
  }
}

TEST(Json, SystemRoundTrip) {
  const auto sys = build_black_scholes_dd(0.03, V({0.05, 0.04}), V({0.2, 0.3}), V({0.3}),
                                          V({0.1, 0.05}));
  const auto back = system_from_json(nlohmann::json::parse(to_json(sys).dump()));
  expect_same_couplings(sys, back);
  EXPECT_EQ(back.flavor, sys.flavor);
  expect_pde_near(back.target, sys.target, 0.0);
  ASSERT_TRUE(back.target.transform.has_value());
  EXPECT_EQ(back.target.transform->kappa, sys.target.transform->kappa);
}

TEST(Json, GoldenHeat1D) {
  std::ifstream in(std::string(RELAXQ_GOLDEN_DIR) + "/heat1d_system.json");
  ASSERT_TRUE(in.good());
  const auto j = nlohmann::json::parse(in);
  const auto golden = system_from_json(j);
  const auto built = build_heat_1d(1.0, 0.1);
  EXPECT_EQ(golden.flavor, built.flavor);
  EXPECT_EQ(golden.alpha, built.alpha);
  EXPECT_NEAR(golden.lambda(0), built.lambda(0), 1e-12);
  EXPECT_EQ(to_json(built)["alpha"], j["alpha"]);
  EXPECT_EQ(to_json(built)["target"], j["target"]);
}

TEST(Json, RejectsInconsistentDimensions) {
  auto j = to_json(build_heat_1d(1.0, 0.1));
  j["lambda"] = {1.0, 2.0};
  EXPECT_THROW(system_from_json(j), std::invalid_argument);
}

}  // namespace
}  // namespace relaxq
