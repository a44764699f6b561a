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
#include <random>

#include "relaxq/evolve.hpp"
#include "relaxq/measure.hpp"

namespace relaxq {
namespace {

HybridState gaussian(const Grid1D& g, double sigma0) {
  std::vector<cplx> a(g.n);
  for (int j = 0; j < g.n; ++j) a[j] = std::exp(-g.point(j) * g.point(j) / (2.0 * sigma0 * sigma0));
  return HybridState(make_layout(1, {g}), std::move(a));
}

HybridState random_state(const RegisterLayout& layout, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> n01;
  std::vector<cplx> a(layout.amplitude_count());
  for (auto& z : a) z = cplx(n01(rng), n01(rng));
  return HybridState(layout, std::move(a));
}

HybridState level_of(const HybridState& w, int k) {
  RegisterLayout l = w.layout();
  l.qudit_levels = 1;
  return HybridState(l, std::vector<cplx>(w.level(k).begin(), w.level(k).end()), w.bases());
}

double max_diff(const HybridState& a, const HybridState& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.amplitudes()[i] - b.amplitudes()[i]));
  return m;
}

TEST(ProjectQudit, SingleLevelStateHasProbabilityOne) {
  const auto w = lift_scalar(gaussian(make_grid(16, -8, 8), 0.5), 3);
  EXPECT_NEAR(project_qudit(w, 0).probability, 1.0, 1e-15);
}

TEST(ProjectQudit, ProbabilitiesSumToOne) {
  const auto psi = random_state(make_layout(4, {make_grid(8, 0, 1), make_grid(4, 0, 1)},
                                            make_staggered_grid(6, 6.0)), 5);
  double total = 0.0;
  for (int k = 0; k < 4; ++k) total += project_qudit(psi, k).probability;
  EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(ProjectQudit, FluxLevelAndRenormalisation) {
  const auto psi = random_state(make_layout(3, {make_grid(8, 0, 1)}), 6);
  const auto out = project_qudit(psi, 2, true);
  EXPECT_TRUE(out.renormalized);
  EXPECT_NEAR(out.state.norm(), 1.0, 1e-12);
  EXPECT_EQ(out.state.layout().qudit_levels, 1);
  EXPECT_NEAR(normalized_distance(out.state, level_of(psi, 2)), 0.0, 1e-14);
  EXPECT_THROW(project_qudit(psi, 3), std::out_of_range);
  EXPECT_THROW(project_qudit(psi, -1), std::out_of_range);
}

TEST(HalfLine, ProjectorIsIdempotent) {
  const auto psi = random_state(make_layout(2, {make_grid(8, 0, 1)}, make_staggered_grid(16, 8.0)), 8);
  const auto once = project_ancilla_half_line(psi);
  const auto twice = project_ancilla_half_line(once.state);
  EXPECT_NEAR(twice.probability, 1.0, 1e-12);
  EXPECT_LE(max_diff(once.state, twice.state), 1e-12);
  EXPECT_GT(once.probability, 0.0);
  EXPECT_LT(once.probability, 1.0);
}

TEST(HalfLine, KeepsInputBasis) {
  auto psi = random_state(make_layout(2, {make_grid(8, 0, 1)}, make_staggered_grid(16, 8.0)), 9);
  psi = to_momentum(psi, 1);
  const auto out = project_ancilla_half_line(psi);
  EXPECT_EQ(out.state.basis(1), Basis::momentum);
  EXPECT_NEAR(out.probability, project_ancilla_half_line(to_position(psi, 1)).probability, 1e-12);
}

TEST(Postselect, HermitianOnlyDynamicsGivesOneHalf) {
  GeneratorSplit gs = assemble_generators(build_heat_1d(1.0, 0.1));
  GeneratorSplit transport{gs.A1, OperatorTermList(2, 1)};
  transport.A2.mark_hermitian();
  const auto H = schrodingerise(transport);
  const auto psi0 = embed(lift_scalar(gaussian(make_grid(32, -8, 8), 0.5), 2),
                          ancilla_xi(make_staggered_grid(64, 32.0)));
  const auto psi = propagate_unitary(H, psi0, {1e-2, 0.5, Scheme::strang});
  EXPECT_NEAR(postselect_eta_positive(psi).probability, 0.5, 1e-10);
}

TEST(Postselect, IdentityDynamicsRecoversInitialState) {
  const auto u0 = gaussian(make_grid(32, -8, 8), 0.5);
  const auto psi = embed(lift_scalar(u0, 2), ancilla_xi(make_staggered_grid(64, 32.0)));
  const auto rec = recover_u(psi);
  EXPECT_LE(normalized_distance(rec.u, u0), 1e-12);
  EXPECT_NEAR(rec.postselect_probability, 0.5, 1e-12);
  EXPECT_NEAR(rec.qudit_probability, 1.0, 1e-12);
  EXPECT_NEAR(rec.total_probability, 0.5, 1e-12);
  // Exact slices c e^{-|xi|} w with c = 1/||e^{-|xi|}||; on a staggered grid
  // of spacing h the midpoint sum gives ||e^{-|xi|}||^2 = h / sinh(h).
  const double h = 0.5;
  EXPECT_NEAR(rec.u.norm() / u0.norm(), std::sqrt(std::sinh(h) / h), 1e-12);
}

TEST(Postselect, WeightFunctionScalesProbabilityButNotEstimate) {
  const auto u0 = gaussian(make_grid(16, -8, 8), 0.5);
  const auto psi = embed(lift_scalar(u0, 2), ancilla_xi(make_staggered_grid(64, 32.0)));
  const auto plain = postselect_eta_positive(psi);
  const auto doubled = postselect_eta_positive(psi, [](double) { return 2.0; });
  EXPECT_NEAR(doubled.probability, 4.0 * plain.probability, 1e-12);
  EXPECT_LE(max_diff(doubled.state, plain.state), 1e-12);
}

TEST(Postselect, Errors) {
  const auto no_anc = lift_scalar(gaussian(make_grid(16, -8, 8), 0.5), 2);
  EXPECT_THROW(postselect_eta_positive(no_anc), std::invalid_argument);
  // Support only on the rejected half-line.
  const Grid1D ag = make_staggered_grid(8, 8.0);
  AncillaState right = ancilla_xi(ag);
  for (int j = 0; j < ag.n; ++j) if (ag.point(j) < 0.0) right.amplitudes[j] = 0.0;
  const auto psi = embed(no_anc, right);
  EXPECT_THROW(postselect_eta_positive(psi), std::invalid_argument);
  EXPECT_THROW(project_ancilla_half_line(psi), std::invalid_argument);
}

struct HeatRun {
  HybridState psi;
  HybridState w;
  HybridState u0;
};

HeatRun heat_run(int n_eta, bool gaussian_ancilla = false) {
  const auto u0 = gaussian(make_grid(64, -8, 8), 0.5);
  const auto sys = build_heat_1d(1.0, 0.1);
  const auto gs = assemble_generators(sys);
  const Grid1D ag = make_staggered_grid(n_eta, 48.0);
  const auto anc = gaussian_ancilla ? ancilla_gaussian(ag, 0.925) : ancilla_xi(ag);
  auto psi = propagate_unitary(schrodingerise(gs), embed(lift_scalar(u0, 2), anc),
                               {1e-3, 0.1, Scheme::strang});
  return {std::move(psi), propagate_nonunitary(gs, lift_scalar(u0, 2), 0.1), u0};
}

TEST(Recovery, ErrorDecreasesWithAncillaResolution) {
  double prev = 1.0;
  for (int n : {64, 128, 256}) {
    const auto run = heat_run(n);
    const double err = normalized_distance(recover_u(run.psi).u, level_of(run.w, 0));
    EXPECT_LT(err, prev) << n;
    prev = err;
  }
  EXPECT_LT(prev, 1e-3);
}

TEST(Recovery, ProbabilityTracksSolutionNorm) {
  const auto run = heat_run(256);
  const auto rec = recover_u(run.psi);
  // Half of the ancilla weight lies on the accepted half-line.
  const double expected = 0.5 * run.w.norm_squared() / run.u0.norm_squared();
  EXPECT_NEAR(rec.postselect_probability / expected, 1.0, 0.01);
  const double expected_u = 0.5 * level_of(run.w, 0).norm_squared() / run.u0.norm_squared();
  EXPECT_NEAR(rec.total_probability / expected_u, 1.0, 0.01);
}

TEST(Recovery, GaussianAncillaCostsAccuracy) {
  const auto exact = heat_run(128);
  const auto approx = heat_run(128, true);
  const double e_exact = normalized_distance(recover_u(exact.psi).u, level_of(exact.w, 0));
  const double e_gauss = normalized_distance(recover_u(approx.psi).u, level_of(approx.w, 0));
  EXPECT_GT(e_gauss, e_exact);
  EXPECT_LT(e_gauss, 0.1);
}

TEST(Recovery, SlicesAreProportional) {
  const auto run = heat_run(256);
  const auto check = slice_proportionality(run.psi, 1.0, 2.0);
  EXPECT_GT(check.eta1, 0.0);
  EXPECT_GT(check.eta2, check.eta1);
  EXPECT_NEAR(check.ratio / check.expected, 1.0, 1e-3);
  EXPECT_LT(check.parallel_residual, 1e-3);
}

TEST(Recovery, BlackScholesNormTracksDecay) {
  const double r = 0.5, sigma = 1.0, eps = 0.1, t = 0.1;
  const auto sys = build_black_scholes_1d(r, sigma, eps);
  const auto gs = assemble_generators(sys);
  const auto u0 = gaussian(make_grid(64, -8, 8), 0.5);
  const auto psi = propagate_unitary(schrodingerise(gs),
                                     embed(lift_scalar(u0, 2), ancilla_xi(make_staggered_grid(256, 64.0))),
                                     {default_time_step(sys), t, Scheme::strang});
  const auto rec = recover_u(psi);
  const auto oracle = solve_parabolic_spectral(sys.target, u0, t);
  EXPECT_NEAR((rec.u.norm() / u0.norm()) / (oracle.norm() / u0.norm()), 1.0, 0.02);
  EXPECT_LT(normalized_distance(rec.u, oracle), 0.02);
}

}  // namespace
}  // namespace relaxq
