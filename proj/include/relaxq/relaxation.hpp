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

#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

#include "relaxq/hybrid_state.hpp"

namespace relaxq {

// Records the log-price change of variables S_j = S_j(0) e^{x_j} together
// with the time reversal t -> T - t, which turns the terminal payoff into
// the initial datum of a forward parabolic problem.
struct BlackScholesLog {
  double rate = 0.0;
  Eigen::VectorXd sigma;
  Eigen::VectorXd mu;
  // Adjacent correlations kappa_{j,j+1} (length d-1).
  Eigen::VectorXd kappa;
  double maturity = 1.0;
  // Coordinates rescaled by x_j -> x_j / sigma_j (multi-asset form).
  bool rescaled = false;
};

// u_t = sum_{jk} D_jk d_j d_k u + sum_k gamma_k d_k u - r u.
struct ParabolicPDE {
  int d = 0;
  Eigen::MatrixXd D;
  Eigen::VectorXd gamma;
  double r = 0.0;
  std::optional<BlackScholesLog> transform;
};

// Validates symmetry and positive semidefiniteness (eigenvalues >= -1e-10).
ParabolicPDE make_parabolic(Eigen::MatrixXd D, Eigen::VectorXd gamma, double r);

enum class Flavor {
  heat1d,
  heat_dd,
  black_scholes_1d,
  black_scholes_dd,
  fokker_planck,
  general
};

const char* to_string(Flavor f);
Flavor flavor_from_string(const std::string& s);

// First-order hyperbolic system for w = (u, v_1, ..., v_d):
//
//   u_t   = -sum_{ij} (alpha_ij/eps_j) d_j v_i - sum_j c_j d_j u
//           + sum_i (delta_i/eps_i) v_i - r u
//   v_i,t = -sum_k (alpha_ik/eps_k) d_k u - lambda_i v_i
//
// Heat-type systems carry lambda_i = 1/(k_i eps_i^2); the generic
// constraint-solver form uses lambda_i = 1/eps_i^2.
struct RelaxationSystem {
  Flavor flavor = Flavor::general;
  int d = 0;
  Eigen::VectorXd epsilons;
  Eigen::MatrixXd alpha;
  Eigen::VectorXd lambda;
  Eigen::VectorXd delta;
  // Direct convection c_j of u (Black-Scholes and Fokker-Planck drift).
  Eigen::VectorXd convection;
  double r = 0.0;
  ParabolicPDE target;
  std::vector<std::string> warnings;

  int qudit_levels() const { return d + 1; }
  // Flux Jacobian J_j of w_t + sum_j J_j d_j w = S w; real symmetric.
  Eigen::MatrixXd flux_jacobian(int j) const;
  // max_jk |target.D_jk - sum_i alpha_ij alpha_ik / (lambda_i eps_j eps_k)|.
  double constraint_residual() const;
};

RelaxationSystem build_heat_1d(double k, double eps);
RelaxationSystem build_heat_dd(const Eigen::VectorXd& ks, const Eigen::VectorXd& eps);

ParabolicPDE black_scholes_log_transform(double r, double sigma, double maturity = 1.0);
RelaxationSystem build_black_scholes_1d(double r, double sigma, double eps);

// Rescaled multi-asset form: D_jj = 1/2, D_{j,j+1} = D_{j+1,j} = kappa_j/2
// (the symmetric double sum carries the mixed term twice), gamma_j =
// mu_j/sigma_j - sigma_j/2, decay r.
ParabolicPDE black_scholes_dd_log_transform(double r, const Eigen::VectorXd& mu,
                                            const Eigen::VectorXd& sigma,
                                            const Eigen::VectorXd& kappa,
                                            double maturity = 1.0);
RelaxationSystem build_black_scholes_dd(double r, const Eigen::VectorXd& mu,
                                        const Eigen::VectorXd& sigma,
                                        const Eigen::VectorXd& kappa,
                                        const Eigen::VectorXd& eps);

// u_t + sum mu_j d_j u - sum D_j d_j^2 u = 0.
RelaxationSystem build_fokker_planck(const Eigen::VectorXd& mu, const Eigen::VectorXd& Ds,
                                     const Eigen::VectorXd& eps);

// beta^T beta = D with beta_ij = alpha_ij eps_i / eps_j; beta is the
// transposed Cholesky factor, or the symmetric square root when D is
// singular. Returns alpha.
Eigen::MatrixXd solve_alpha(const Eigen::MatrixXd& D, const Eigen::VectorXd& eps);

// Relaxes an arbitrary constant-coefficient parabolic PDE. Diffusion is
// carried by an LDL^T factorisation (unit-diagonal alpha, lambda_i =
// 1/(d_i eps_i^2)); singular D falls back to solve_alpha with lambda =
// 1/eps^2. Drift is carried by delta, solved from the effective limit.
RelaxationSystem build_general_parabolic(const ParabolicPDE& pde, const Eigen::VectorXd& eps,
                                         Flavor flavor = Flavor::general);

// Formal eps -> 0 limit: substitutes the flux closure
// v_i -> -(1/lambda_i) sum_k (alpha_ik/eps_k) d_k u into the u-equation.
ParabolicPDE effective_pde(const RelaxationSystem& sys);

// Eigenvalues of the flux Jacobian in direction j from a general (non-
// symmetric) dense eigensolve, sorted by real part.
std::vector<cplx> jacobian_eigenvalues(const RelaxationSystem& sys, int j);

// Right-hand side of the system evaluated spectrally on a (K = d+1) state
// without ancilla. Independent of the operator-term path.
HybridState system_rhs(const RelaxationSystem& sys, const HybridState& w);

// || v_i + (1/lambda_i) sum_k (alpha_ik/eps_k) d_k u || over all fluxes;
// reduces to ||v + k eps u_x|| for the 1D heat system.
double flux_closure_residual(const RelaxationSystem& sys, const HybridState& w);

// Flux data in local equilibrium with u: v_i = -(1/lambda_i) sum_k
// (alpha_ik/eps_k) d_k u. Level 0 of `w` is kept, flux levels overwritten.
HybridState equilibrium_flux(const RelaxationSystem& sys, HybridState w);

}  // namespace relaxq
