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
#include <numbers>
#include <random>

#include "relaxq/grid.hpp"
#include "relaxq/hybrid_state.hpp"
#include "relaxq/operator_terms.hpp"

namespace relaxq {
namespace {

constexpr double kPi = std::numbers::pi;

HybridState random_state(const RegisterLayout& layout, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> n01(0.0, 1.0);
  std::vector<cplx> a(layout.amplitude_count());
  for (auto& z : a) z = cplx(n01(rng), n01(rng));
  return HybridState(layout, std::move(a));
}

double max_abs_diff(const HybridState& a, const HybridState& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    m = std::max(m, std::abs(a.amplitudes()[i] - b.amplitudes()[i]));
  }
  return m;
}

TEST(Grid, SpacingExamples) {
  EXPECT_DOUBLE_EQ(make_grid(8, -4.0, 4.0).spacing(), 1.0);
  EXPECT_DOUBLE_EQ(make_grid(2, 0.0, 1.0).spacing(), 0.5);
}

TEST(Grid, RejectsBadInput) {
  EXPECT_THROW(make_grid(1, 0.0, 1.0), std::invalid_argument);
  EXPECT_THROW(make_grid(4, 1.0, 1.0), std::invalid_argument);
  EXPECT_THROW(make_grid(4, 2.0, 1.0), std::invalid_argument);
}

TEST(Grid, MomentumValuesSymmetricRange) {
  const Grid1D g = make_grid(8, -2.0, 2.0);
  const auto p = momentum_values(g);
  ASSERT_EQ(p.size(), 8u);
  const double dp = 2.0 * kPi / 4.0;
  const int expected[] = {0, 1, 2, 3, -4, -3, -2, -1};
  for (int m = 0; m < 8; ++m) EXPECT_NEAR(p[m], expected[m] * dp, 1e-15);
}

TEST(Grid, StaggeredGridHasNoZeroAndIsSymmetric) {
  const Grid1D g = make_staggered_grid(16, 8.0);
  for (int j = 0; j < 16; ++j) {
    EXPECT_GT(std::abs(g.point(j)), 0.1);
    EXPECT_NEAR(g.point(j), -g.point(15 - j), 1e-14);
  }
}

TEST(Transform, RoundTripIsIdentity) {
  const auto layout = make_layout(3, {make_grid(16, -3.0, 5.0), make_grid(8, -1.0, 1.0)},
                                  make_staggered_grid(12, 10.0));
  const HybridState psi = random_state(layout, 7);
  HybridState phi = psi;
  for (int a = 0; a < layout.axis_count(); ++a) phi = to_momentum(phi, a);
  for (int a = layout.axis_count() - 1; a >= 0; --a) phi = to_position(phi, a);
  double scale = 0.0;
  for (auto z : psi.amplitudes()) scale = std::max(scale, std::abs(z));
  EXPECT_LT(max_abs_diff(psi, phi) / scale, 1e-12);
}

TEST(Transform, PreservesNorm) {
  const auto layout = make_layout(2, {make_grid(32, -4.0, 4.0)}, make_centered_grid(16, 12.0));
  const HybridState psi = random_state(layout, 11);
  for (int a = 0; a < layout.axis_count(); ++a) {
    const HybridState phi = to_momentum(psi, a);
    EXPECT_NEAR(phi.norm() / psi.norm(), 1.0, 1e-10);
  }
}

TEST(Transform, ConstantMapsToZeroMomentum) {
  const Grid1D g = make_grid(16, -2.0, 6.0);
  const auto layout = make_layout(1, {g});
  HybridState psi(layout, std::vector<cplx>(16, cplx(1.0, 0.0)));
  const HybridState phi = to_momentum(psi, 0);
  // h/sqrt(2 pi) * n * e^{-i 0 x_min} = L/sqrt(2 pi).
  EXPECT_NEAR(std::abs(phi.amplitudes()[0] - g.length() / std::sqrt(2.0 * kPi)), 0.0, 1e-13);
  for (int m = 1; m < 16; ++m) EXPECT_LT(std::abs(phi.amplitudes()[m]), 1e-13);
}

TEST(Transform, PlaneWaveIsSingleMomentum) {
  const Grid1D g = make_grid(32, -5.0, 3.0);
  const int m0 = 29;  // negative momentum index -3
  const double p0 = g.momentum(m0);
  std::vector<cplx> a(32);
  for (int j = 0; j < 32; ++j) a[j] = std::exp(cplx(0.0, p0 * g.point(j)));
  const HybridState phi = to_momentum(HybridState(make_layout(1, {g}), a), 0);
  for (int m = 0; m < 32; ++m) {
    const double expect = m == m0 ? g.length() / std::sqrt(2.0 * kPi) : 0.0;
    EXPECT_NEAR(std::abs(phi.amplitudes()[m] - expect), 0.0, 1e-12) << m;
  }
}

TEST(Transform, GaussianMatchesContinuumFourierTransform) {
  // Under <x|p> = e^{ixp}/sqrt(2pi), e^{-x^2/2} maps to e^{-p^2/2}.
  const Grid1D g = make_grid(128, -15.0, 17.0);
  std::vector<cplx> a(128);
  for (int j = 0; j < 128; ++j) a[j] = std::exp(-0.5 * g.point(j) * g.point(j));
  const HybridState phi = to_momentum(HybridState(make_layout(1, {g}), a), 0);
  for (int m = 0; m < 128; ++m) {
    const double p = g.momentum(m);
    EXPECT_NEAR(std::abs(phi.amplitudes()[m] - std::exp(-0.5 * p * p)), 0.0, 1e-12);
  }
}

TEST(Transform, RejectsWrongBasis) {
  const auto layout = make_layout(1, {make_grid(8, 0.0, 1.0)});
  HybridState psi(layout);
  EXPECT_THROW(to_position(psi, 0), std::invalid_argument);
  const HybridState phi = to_momentum(psi, 0);
  EXPECT_THROW(to_momentum(phi, 0), std::invalid_argument);
  EXPECT_THROW(to_momentum(psi, 1), std::out_of_range);
}

TEST(Layout, AmplitudeCount) {
  const auto layout = make_layout(3, {make_grid(8, 0, 1), make_grid(4, 0, 1)},
                                  make_grid(6, 0, 1));
  EXPECT_EQ(layout.amplitude_count(), 3u * 8u * 4u * 6u);
  EXPECT_THROW(HybridState(layout, std::vector<cplx>(5)), std::invalid_argument);
}

TEST(ApplyTerms, IdentityLeavesStateUnchanged) {
  const auto layout = make_layout(2, {make_grid(8, -1, 1)});
  OperatorTermList ops(2, 1);
  ops.add(1.0, QuditMatrix::identity(2));
  const HybridState psi = random_state(layout, 3);
  EXPECT_LT(max_abs_diff(apply_terms(ops, psi), psi), 1e-15);
}

TEST(ApplyTerms, PauliXSwapsLevels) {
  const auto layout = make_layout(2, {make_grid(8, -1, 1)});
  OperatorTermList ops(2, 1);
  ops.add(1.0, QuditMatrix::pauli_x());
  const HybridState psi = random_state(layout, 4);
  const HybridState out = apply_terms(ops, psi);
  for (std::size_t i = 0; i < 8; ++i) {
    EXPECT_EQ(out.level(0)[i], psi.level(1)[i]);
    EXPECT_EQ(out.level(1)[i], psi.level(0)[i]);
  }
}

TEST(ApplyTerms, MomentumOnPlaneWaveScales) {
  const Grid1D g = make_grid(64, -kPi, kPi);
  const double p0 = g.momentum(5);
  std::vector<cplx> a(64);
  for (int j = 0; j < 64; ++j) a[j] = std::exp(cplx(0.0, p0 * g.point(j)));
  const HybridState psi(make_layout(1, {g}), a);
  OperatorTermList ops(1, 1);
  ops.add(1.0, QuditMatrix::identity(1), 0, ModeFactor::momentum);
  const HybridState out = apply_terms(ops, psi);
  for (int j = 0; j < 64; ++j) {
    EXPECT_NEAR(std::abs(out.amplitudes()[j] - p0 * a[j]), 0.0, 1e-12);
  }
}

TEST(ApplyTerms, PositionMultipliesPointwise) {
  const Grid1D g = make_grid(16, -2.0, 2.0);
  const auto layout = make_layout(1, {g});
  const HybridState psi = random_state(layout, 9);
  OperatorTermList ops(1, 1);
  ops.add(2.0, QuditMatrix::identity(1), 0, ModeFactor::position);
  const HybridState out = apply_terms(ops, psi);
  for (int j = 0; j < 16; ++j) {
    EXPECT_NEAR(std::abs(out.amplitudes()[j] - 2.0 * g.point(j) * psi.amplitudes()[j]), 0.0, 1e-13);
  }
}

OperatorTermList sample_hermitian_ops() {
  OperatorTermList ops(3, 2);
  ops.add(0.7, QuditMatrix::flip(3, 0, 1), 0, ModeFactor::momentum);
  ops.add(-1.3, QuditMatrix::flip(3, 0, 2), 1, ModeFactor::momentum);
  ops.add(0.4, QuditMatrix::projector(3, 0), 1, ModeFactor::position);
  ops.add(2.0, QuditMatrix::projector(3, 1), -1, ModeFactor::identity, AncillaFactor::eta);
  ops.add(0.5, QuditMatrix::antisymmetric_flip(3, 0, 2), -1, ModeFactor::identity,
          AncillaFactor::eta);
  ops.mark_hermitian();
  return ops;
}

RegisterLayout sample_layout() {
  return make_layout(3, {make_grid(8, -2.0, 2.0), make_grid(6, -1.5, 1.5)},
                     make_staggered_grid(4, 4.0));
}

TEST(ApplyTerms, IsLinear) {
  const auto ops = sample_hermitian_ops();
  const auto layout = sample_layout();
  const HybridState psi = random_state(layout, 21);
  const HybridState phi = random_state(layout, 22);
  const cplx a(0.3, -1.1), b(-0.7, 0.2);
  HybridState combo = psi;
  combo.scale(a);
  combo.add_scaled(b, phi);
  HybridState expect = apply_terms(ops, psi);
  expect.scale(a);
  expect.add_scaled(b, apply_terms(ops, phi));
  double scale = 0.0;
  for (auto z : expect.amplitudes()) scale = std::max(scale, std::abs(z));
  EXPECT_LT(max_abs_diff(apply_terms(ops, combo), expect) / scale, 1e-12);
}

TEST(ApplyTerms, HermiticityWitness) {
  const auto ops = sample_hermitian_ops();
  const auto layout = sample_layout();
  for (unsigned seed = 0; seed < 5; ++seed) {
    const HybridState psi = random_state(layout, 100 + seed);
    const HybridState phi = random_state(layout, 200 + seed);
    const cplx lhs = inner_product(phi, apply_terms(ops, psi));
    const cplx rhs = std::conj(inner_product(psi, apply_terms(ops, phi)));
    EXPECT_LT(std::abs(lhs - rhs) / std::abs(lhs), 1e-10);
  }
}

TEST(ApplyTerms, WorksInMomentumBasisInput) {
  const auto ops = sample_hermitian_ops();
  const auto layout = sample_layout();
  const HybridState psi = random_state(layout, 5);
  const HybridState direct = to_basis_all(apply_terms(ops, psi), Basis::momentum);
  const HybridState via = apply_terms(ops, to_basis_all(psi, Basis::momentum));
  double scale = 0.0;
  for (auto z : direct.amplitudes()) scale = std::max(scale, std::abs(z));
  EXPECT_LT(max_abs_diff(direct, via) / scale, 1e-12);
}

TEST(AssembleDense, MatchesApplyTermsAndIsHermitian) {
  const auto ops = sample_hermitian_ops();
  const auto layout = sample_layout();
  const Eigen::MatrixXcd h = assemble_dense(ops, layout);
  EXPECT_LT((h - h.adjoint()).cwiseAbs().maxCoeff(), 1e-12);
  const HybridState psi = random_state(layout, 31);
  Eigen::VectorXcd v(psi.size());
  for (std::size_t i = 0; i < psi.size(); ++i) v(i) = psi.amplitudes()[i];
  const Eigen::VectorXcd hv = h * v;
  const HybridState out = apply_terms(ops, psi);
  for (std::size_t i = 0; i < psi.size(); ++i) {
    EXPECT_NEAR(std::abs(hv(i) - out.amplitudes()[i]), 0.0, 1e-11);
  }
}

TEST(AssembleDense, RefusesLargeLayouts) {
  OperatorTermList ops(2, 1);
  ops.add(1.0, QuditMatrix::identity(2));
  EXPECT_THROW(assemble_dense(ops, make_layout(2, {make_grid(4096, 0, 1)})),
               std::invalid_argument);
}

TEST(OperatorTermList, RejectsTwoModeTerm) {
  OperatorTermList ops(2, 2);
  OperatorTerm t{1.0, QuditMatrix::identity(2),
                 {ModeFactor::momentum, ModeFactor::position}, AncillaFactor::identity, ""};
  EXPECT_THROW(ops.add(t), std::invalid_argument);
}

TEST(OperatorTermList, RejectsWrongQuditSize) {
  OperatorTermList ops(3, 1);
  EXPECT_THROW(ops.add(1.0, QuditMatrix::pauli_x()), std::invalid_argument);
}

TEST(OperatorTermList, MarkHermitianDetectsNonHermitianSum) {
  OperatorTermList ops(2, 1);
  Eigen::MatrixXcd up = Eigen::MatrixXcd::Zero(2, 2);
  up(0, 1) = 1.0;
  ops.add(1.0, QuditMatrix(up), 0, ModeFactor::momentum);
  EXPECT_THROW(ops.mark_hermitian(), std::invalid_argument);
  // Completing the pair makes the grouped sum Hermitian.
  ops.add(1.0, QuditMatrix(Eigen::MatrixXcd(up.transpose())), 0, ModeFactor::momentum);
  EXPECT_NO_THROW(ops.mark_hermitian());
}

TEST(OperatorTermList, LayoutMismatchRejected) {
  OperatorTermList ops(2, 1);
  ops.add(1.0, QuditMatrix::identity(2));
  const HybridState psi(make_layout(3, {make_grid(8, 0, 1)}));
  EXPECT_THROW(apply_terms(ops, psi), std::invalid_argument);
  OperatorTermList with_eta(2, 1);
  with_eta.add(1.0, QuditMatrix::identity(2), -1, ModeFactor::identity, AncillaFactor::eta);
  EXPECT_THROW(apply_terms(with_eta, HybridState(make_layout(2, {make_grid(8, 0, 1)}))),
               std::invalid_argument);
}

TEST(QuditMatrix, PaulisAreHermitian) {
  EXPECT_TRUE(QuditMatrix::pauli_x().is_hermitian());
  EXPECT_TRUE(QuditMatrix::pauli_y().is_hermitian());
  EXPECT_TRUE(QuditMatrix::pauli_z().is_hermitian());
  EXPECT_TRUE(QuditMatrix::antisymmetric_flip(4, 0, 3).is_hermitian());
}

}  // namespace
}  // namespace relaxq
