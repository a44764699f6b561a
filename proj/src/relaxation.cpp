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

#include "relaxq/relaxation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace relaxq {

namespace {

constexpr double kPsdTol = 1e-10;

std::string fmt(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

void check_epsilons(const Eigen::VectorXd& eps, std::vector<std::string>& warnings) {
  for (Eigen::Index j = 0; j < eps.size(); ++j) {
    if (!(eps(j) > 0.0 && eps(j) < 1.0)) {
      throw std::invalid_argument("epsilon[" + std::to_string(j) + "] = " + fmt(eps(j)) +
                                  " must lie in (0, 1)");
    }
    if (eps(j) >= 0.5) {
      warnings.push_back("epsilon[" + std::to_string(j) + "] = " + fmt(eps(j)) +
                         " is not small; the relaxation limit is inaccurate");
    }
  }
}

void check_dim(Eigen::Index got, int d, const char* what) {
  if (got != d) {
    throw std::invalid_argument(std::string(what) + " has length " + std::to_string(got) +
                                ", expected " + std::to_string(d));
  }
}

RelaxationSystem blank_system(Flavor flavor, const Eigen::VectorXd& eps) {
  RelaxationSystem sys;
  sys.flavor = flavor;
  sys.d = static_cast<int>(eps.size());
  if (sys.d < 1) throw std::invalid_argument("relaxation system needs d >= 1");
  check_epsilons(eps, sys.warnings);
  sys.epsilons = eps;
  sys.alpha = Eigen::MatrixXd::Zero(sys.d, sys.d);
  sys.lambda = Eigen::VectorXd::Zero(sys.d);
  sys.delta = Eigen::VectorXd::Zero(sys.d);
  sys.convection = Eigen::VectorXd::Zero(sys.d);
  return sys;
}

double min_eigenvalue(const Eigen::MatrixXd& D) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(D, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

void check_symmetric_psd(const Eigen::MatrixXd& D, const char* what) {
  if (D.rows() != D.cols() || D.rows() < 1) {
    throw std::invalid_argument(std::string(what) + ": D must be square, d >= 1");
  }
  if (!D.allFinite()) throw std::invalid_argument(std::string(what) + ": non-finite D");
  const double asym = (D - D.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * std::max(1.0, D.cwiseAbs().maxCoeff())) {
    throw std::invalid_argument(std::string(what) + ": D is not symmetric");
  }
  const double lmin = min_eigenvalue(D);
  if (lmin < -kPsdTol) {
    throw std::invalid_argument(std::string(what) + ": D has negative eigenvalue " +
                                fmt(lmin));
  }
}

// D = L diag(p) L^T without pivoting; returns false when a pivot is not
// strictly positive (singular or indefinite input).
bool ldlt_unpivoted(const Eigen::MatrixXd& D, Eigen::MatrixXd& L, Eigen::VectorXd& p) {
  const Eigen::Index n = D.rows();
  L = Eigen::MatrixXd::Identity(n, n);
  p = Eigen::VectorXd::Zero(n);
  const double scale = D.cwiseAbs().maxCoeff();
  for (Eigen::Index j = 0; j < n; ++j) {
    double pj = D(j, j);
    for (Eigen::Index m = 0; m < j; ++m) pj -= L(j, m) * L(j, m) * p(m);
    if (!(pj > 1e-12 * scale)) return false;
    p(j) = pj;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      double s = D(i, j);
      for (Eigen::Index m = 0; m < j; ++m) s -= L(i, m) * L(j, m) * p(m);
      L(i, j) = s / pj;
    }
  }
  return true;
}

// Chooses delta so that the effective drift equals target.gamma.
void solve_drift(RelaxationSystem& sys) {
  const int d = sys.d;
  const Eigen::VectorXd& gamma = sys.target.gamma;
  // gamma_k + c_k = -sum_i y_i alpha_ik / eps_k with y_i = delta_i/(eps_i lambda_i).
  Eigen::VectorXd rhs(d);
  for (int k = 0; k < d; ++k) rhs(k) = -(gamma(k) + sys.convection(k)) * sys.epsilons(k);
  if (rhs.cwiseAbs().maxCoeff() == 0.0) return;
  const Eigen::MatrixXd at = sys.alpha.transpose();
  const Eigen::VectorXd y = at.completeOrthogonalDecomposition().solve(rhs);
  const Eigen::VectorXd resid = at * y - rhs;
  const double scale = std::max(1.0, rhs.cwiseAbs().maxCoeff());
  for (int k = 0; k < d; ++k) {
    if (std::abs(resid(k)) > 1e-10 * scale) {
      throw std::invalid_argument(
          "build_general_parabolic: drift gamma[" + std::to_string(k) + "] = " +
          fmt(gamma(k)) + " cannot be carried: direction " + std::to_string(k) +
          " has no flux coupling (zero diffusion)");
    }
  }
  for (int i = 0; i < d; ++i) sys.delta(i) = y(i) * sys.epsilons(i) * sys.lambda(i);
}

void require_no_ancilla(const HybridState& w, int d, const char* what) {
  const RegisterLayout& layout = w.layout();
  if (layout.has_ancilla() || layout.dims() != d || layout.qudit_levels != d + 1) {
    throw std::invalid_argument(std::string(what) +
                                ": state must have K=d+1 levels, d spatial axes, no ancilla");
  }
}

// Single-level state holding qudit level `k` of `w`.
HybridState extract_level(const HybridState& w, int k) {
  RegisterLayout l = w.layout();
  l.qudit_levels = 1;
  auto src = w.level(k);
  return HybridState(l, std::vector<cplx>(src.begin(), src.end()), w.bases());
}

}  // namespace

ParabolicPDE make_parabolic(Eigen::MatrixXd D, Eigen::VectorXd gamma, double r) {
  check_symmetric_psd(D, "make_parabolic");
  check_dim(gamma.size(), static_cast<int>(D.rows()), "gamma");
  if (!gamma.allFinite() || !std::isfinite(r)) {
    throw std::invalid_argument("make_parabolic: non-finite coefficient");
  }
  ParabolicPDE pde;
  pde.d = static_cast<int>(D.rows());
  pde.D = std::move(D);
  pde.gamma = std::move(gamma);
  pde.r = r;
  return pde;
}

const char* to_string(Flavor f) {
  switch (f) {
    case Flavor::heat1d: return "heat1d";
    case Flavor::heat_dd: return "heat_dd";
    case Flavor::black_scholes_1d: return "black_scholes_1d";
    case Flavor::black_scholes_dd: return "black_scholes_dd";
    case Flavor::fokker_planck: return "fokker_planck";
    case Flavor::general: return "general";
  }
  return "?";
}

Flavor flavor_from_string(const std::string& s) {
  for (Flavor f : {Flavor::heat1d, Flavor::heat_dd, Flavor::black_scholes_1d,
                   Flavor::black_scholes_dd, Flavor::fokker_planck, Flavor::general}) {
    if (s == to_string(f)) return f;
  }
  throw std::invalid_argument("unknown flavor '" + s + "'");
}

Eigen::MatrixXd RelaxationSystem::flux_jacobian(int j) const {
  if (j < 0 || j >= d) throw std::out_of_range("flux_jacobian: direction out of range");
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(d + 1, d + 1);
  for (int i = 0; i < d; ++i) {
    J(0, i + 1) = alpha(i, j) / epsilons(j);
    J(i + 1, 0) = alpha(i, j) / epsilons(j);
  }
  J(0, 0) = convection(j);
  return J;
}

double RelaxationSystem::constraint_residual() const {
  return (target.D - effective_pde(*this).D).cwiseAbs().maxCoeff();
}

RelaxationSystem build_heat_1d(double k, double eps) {
  if (!(k > 0.0)) throw std::invalid_argument("build_heat_1d: k must be > 0");
  RelaxationSystem sys = blank_system(Flavor::heat1d, Eigen::VectorXd::Constant(1, eps));
  sys.alpha(0, 0) = 1.0;
  sys.lambda(0) = 1.0 / (k * eps * eps);
  sys.target = make_parabolic(Eigen::MatrixXd::Constant(1, 1, k), Eigen::VectorXd::Zero(1), 0.0);
  return sys;
}

RelaxationSystem build_heat_dd(const Eigen::VectorXd& ks, const Eigen::VectorXd& eps) {
  check_dim(ks.size(), static_cast<int>(eps.size()), "ks");
  RelaxationSystem sys = blank_system(Flavor::heat_dd, eps);
  for (int j = 0; j < sys.d; ++j) {
    if (!(ks(j) > 0.0)) {
      throw std::invalid_argument("build_heat_dd: k[" + std::to_string(j) + "] must be > 0");
    }
    sys.alpha(j, j) = 1.0;
    sys.lambda(j) = 1.0 / (ks(j) * eps(j) * eps(j));
  }
  sys.target = make_parabolic(ks.asDiagonal().toDenseMatrix(), Eigen::VectorXd::Zero(sys.d), 0.0);
  return sys;
}

ParabolicPDE black_scholes_log_transform(double r, double sigma, double maturity) {
  if (!(sigma > 0.0)) throw std::invalid_argument("black_scholes: sigma must be > 0");
  if (!(maturity > 0.0)) throw std::invalid_argument("black_scholes: maturity must be > 0");
  ParabolicPDE pde = make_parabolic(Eigen::MatrixXd::Constant(1, 1, 0.5 * sigma * sigma),
                                    Eigen::VectorXd::Constant(1, r - 0.5 * sigma * sigma), r);
  BlackScholesLog meta;
  meta.rate = r;
  meta.sigma = Eigen::VectorXd::Constant(1, sigma);
  meta.mu = Eigen::VectorXd::Constant(1, r);
  meta.kappa = Eigen::VectorXd(0);
  meta.maturity = maturity;
  pde.transform = meta;
  return pde;
}

RelaxationSystem build_black_scholes_1d(double r, double sigma, double eps) {
  ParabolicPDE target = black_scholes_log_transform(r, sigma);
  RelaxationSystem sys = blank_system(Flavor::black_scholes_1d, Eigen::VectorXd::Constant(1, eps));
  sys.alpha(0, 0) = 1.0;
  sys.lambda(0) = 2.0 / (sigma * sigma * eps * eps);
  sys.convection(0) = 0.5 * sigma * sigma - r;
  sys.r = r;
  sys.target = std::move(target);
  return sys;
}

ParabolicPDE black_scholes_dd_log_transform(double r, const Eigen::VectorXd& mu,
                                            const Eigen::VectorXd& sigma,
                                            const Eigen::VectorXd& kappa, double maturity) {
  const int d = static_cast<int>(sigma.size());
  if (d < 1) throw std::invalid_argument("black_scholes_dd: need d >= 1");
  check_dim(mu.size(), d, "mu");
  check_dim(kappa.size(), d - 1, "kappa");
  if (!(maturity > 0.0)) throw std::invalid_argument("black_scholes_dd: maturity must be > 0");
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(d, d);
  Eigen::VectorXd gamma(d);
  for (int j = 0; j < d; ++j) {
    if (!(sigma(j) > 0.0)) {
      throw std::invalid_argument("black_scholes_dd: sigma[" + std::to_string(j) + "] must be > 0");
    }
    D(j, j) = 0.5;
    gamma(j) = mu(j) / sigma(j) - 0.5 * sigma(j);
  }
  for (int j = 0; j + 1 < d; ++j) {
    D(j, j + 1) = 0.5 * kappa(j);
    D(j + 1, j) = 0.5 * kappa(j);
  }
  ParabolicPDE pde = make_parabolic(std::move(D), std::move(gamma), r);
  pde.transform = BlackScholesLog{r, sigma, mu, kappa, maturity, true};
  return pde;
}

RelaxationSystem build_black_scholes_dd(double r, const Eigen::VectorXd& mu,
                                        const Eigen::VectorXd& sigma,
                                        const Eigen::VectorXd& kappa,
                                        const Eigen::VectorXd& eps) {
  const ParabolicPDE pde = black_scholes_dd_log_transform(r, mu, sigma, kappa);
  check_dim(eps.size(), pde.d, "eps");
  return build_general_parabolic(pde, eps, Flavor::black_scholes_dd);
}

RelaxationSystem build_fokker_planck(const Eigen::VectorXd& mu, const Eigen::VectorXd& Ds,
                                     const Eigen::VectorXd& eps) {
  check_dim(mu.size(), static_cast<int>(eps.size()), "mu");
  check_dim(Ds.size(), static_cast<int>(eps.size()), "Ds");
  RelaxationSystem sys = blank_system(Flavor::fokker_planck, eps);
  for (int j = 0; j < sys.d; ++j) {
    if (!(Ds(j) > 0.0)) {
      throw std::invalid_argument("build_fokker_planck: D[" + std::to_string(j) + "] must be > 0");
    }
    sys.alpha(j, j) = 1.0;
    sys.lambda(j) = 1.0 / (Ds(j) * eps(j) * eps(j));
    sys.convection(j) = mu(j);
  }
  sys.target = make_parabolic(Ds.asDiagonal().toDenseMatrix(), -mu, 0.0);
  return sys;
}

Eigen::MatrixXd solve_alpha(const Eigen::MatrixXd& D, const Eigen::VectorXd& eps) {
  check_symmetric_psd(D, "solve_alpha");
  const int d = static_cast<int>(D.rows());
  check_dim(eps.size(), d, "eps");
  for (int j = 0; j < d; ++j) {
    if (!(eps(j) > 0.0)) throw std::invalid_argument("solve_alpha: eps must be > 0");
  }
  Eigen::MatrixXd beta;
  Eigen::LLT<Eigen::MatrixXd> llt(D);
  const double scale = std::max(D.cwiseAbs().maxCoeff(), 1e-300);
  bool ok = llt.info() == Eigen::Success;
  if (ok) {
    const Eigen::MatrixXd L = llt.matrixL();
    ok = L.diagonal().cwiseAbs2().minCoeff() > 1e-12 * scale;
    if (ok) beta = L.transpose();
  }
  if (!ok) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(D);
    const Eigen::VectorXd s = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    beta = es.eigenvectors() * s.asDiagonal() * es.eigenvectors().transpose();
  }
  Eigen::MatrixXd alpha(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) alpha(i, j) = beta(i, j) * eps(j) / eps(i);
  }
  return alpha;
}

RelaxationSystem build_general_parabolic(const ParabolicPDE& pde, const Eigen::VectorXd& eps,
                                         Flavor flavor) {
  check_symmetric_psd(pde.D, "build_general_parabolic");
  check_dim(eps.size(), pde.d, "eps");
  check_dim(pde.gamma.size(), pde.d, "gamma");
  RelaxationSystem sys = blank_system(flavor, eps);
  sys.target = pde;
  sys.r = pde.r;
  Eigen::MatrixXd L;
  Eigen::VectorXd piv;
  if (ldlt_unpivoted(pde.D, L, piv)) {
    for (int i = 0; i < sys.d; ++i) {
      sys.lambda(i) = 1.0 / (piv(i) * eps(i) * eps(i));
      for (int j = 0; j < sys.d; ++j) sys.alpha(i, j) = L(j, i) * eps(j) / eps(i);
    }
  } else {
    sys.alpha = solve_alpha(pde.D, eps);
    for (int i = 0; i < sys.d; ++i) sys.lambda(i) = 1.0 / (eps(i) * eps(i));
    sys.warnings.push_back("diffusion matrix is singular; using the symmetric square root");
  }
  solve_drift(sys);
  return sys;
}

ParabolicPDE effective_pde(const RelaxationSystem& sys) {
  const int d = sys.d;
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(d, d);
  Eigen::VectorXd gamma = -sys.convection;
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      for (int k = 0; k < d; ++k) {
        D(j, k) += sys.alpha(i, j) * sys.alpha(i, k) /
                   (sys.lambda(i) * sys.epsilons(j) * sys.epsilons(k));
      }
    }
    for (int k = 0; k < d; ++k) {
      gamma(k) -= sys.delta(i) * sys.alpha(i, k) /
                  (sys.epsilons(i) * sys.lambda(i) * sys.epsilons(k));
    }
  }
  ParabolicPDE pde;
  pde.d = d;
  pde.D = std::move(D);
  pde.gamma = std::move(gamma);
  pde.r = sys.r;
  pde.transform = sys.target.transform;
  return pde;
}

std::vector<cplx> jacobian_eigenvalues(const RelaxationSystem& sys, int j) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(sys.flux_jacobian(j), false);
  std::vector<cplx> ev(es.eigenvalues().begin(), es.eigenvalues().end());
  std::sort(ev.begin(), ev.end(),
            [](const cplx& a, const cplx& b) { return a.real() < b.real(); });
  return ev;
}

HybridState system_rhs(const RelaxationSystem& sys, const HybridState& w) {
  require_no_ancilla(w, sys.d, "system_rhs");
  const int d = sys.d;
  const HybridState u = extract_level(w, 0);
  std::vector<HybridState> v;
  for (int i = 0; i < d; ++i) v.push_back(extract_level(w, i + 1));

  HybridState out(w.layout(), std::vector<cplx>(w.size()), w.bases());
  auto out_u = out.level(0);
  auto add = [](std::span<cplx> dst, cplx a, const HybridState& src) {
    auto s = src.amplitudes();
    for (std::size_t n = 0; n < dst.size(); ++n) dst[n] += a * s[n];
  };
  for (int j = 0; j < d; ++j) {
    const HybridState du = spectral_derivative(u, j);
    add(out_u, -sys.convection(j), du);
    for (int i = 0; i < d; ++i) {
      const double a = sys.alpha(i, j) / sys.epsilons(j);
      if (a == 0.0) continue;
      add(out_u, -a, spectral_derivative(v[i], j));
      add(out.level(i + 1), -a, du);
    }
  }
  for (int i = 0; i < d; ++i) {
    add(out_u, sys.delta(i) / sys.epsilons(i), v[i]);
    add(out.level(i + 1), -sys.lambda(i), v[i]);
  }
  add(out_u, -sys.r, u);
  return out;
}

HybridState equilibrium_flux(const RelaxationSystem& sys, HybridState w) {
  require_no_ancilla(w, sys.d, "equilibrium_flux");
  const HybridState u = extract_level(w, 0);
  for (int i = 1; i <= sys.d; ++i) {
    for (auto& z : w.level(i)) z = 0.0;
  }
  for (int k = 0; k < sys.d; ++k) {
    const HybridState du = spectral_derivative(u, k);
    for (int i = 0; i < sys.d; ++i) {
      const double c = -sys.alpha(i, k) / (sys.lambda(i) * sys.epsilons(k));
      if (c == 0.0) continue;
      auto dst = w.level(i + 1);
      auto src = du.amplitudes();
      for (std::size_t n = 0; n < dst.size(); ++n) dst[n] += c * src[n];
    }
  }
  return w;
}

double flux_closure_residual(const RelaxationSystem& sys, const HybridState& w) {
  const HybridState eq = equilibrium_flux(sys, w);
  double s = 0.0;
  for (int i = 1; i <= sys.d; ++i) {
    auto a = w.level(i);
    auto b = eq.level(i);
    for (std::size_t n = 0; n < a.size(); ++n) s += std::norm(a[n] - b[n]);
  }
  return std::sqrt(s * w.cell_weight());
}

}  // namespace relaxq
