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

#include "relaxq/evolve.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "relaxq/stats.hpp"

namespace relaxq {

namespace {

// Maps a flattened spatial multi-index to per-axis momentum values.
class SpatialMomenta {
 public:
  explicit SpatialMomenta(const RegisterLayout& layout) {
    const int d = layout.dims();
    stride_.assign(d, 1);
    for (int a = d - 2; a >= 0; --a) stride_[a] = stride_[a + 1] * layout.spatial_grids[a + 1].n;
    count_ = 1;
    for (const auto& g : layout.spatial_grids) {
      count_ *= static_cast<std::size_t>(g.n);
      values_.push_back(momentum_values(g));
    }
  }
  std::size_t count() const { return count_; }
  double p(int axis, std::size_t s) const {
    const std::size_t idx = (s / stride_[axis]) % values_[axis].size();
    return values_[axis][idx];
  }

 private:
  std::vector<std::size_t> stride_;
  std::vector<std::vector<double>> values_;
  std::size_t count_ = 1;
};

Eigen::MatrixXcd block_at(const std::vector<TermGroup>& groups, const SpatialMomenta& pm,
                          std::size_t s, int k) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(k, k);
  for (const auto& g : groups) m += g.mode < 0 ? g.qudit : Eigen::MatrixXcd(g.qudit * pm.p(g.mode, s));
  return m;
}

bool depends_on_momentum(const std::vector<TermGroup>& groups) {
  return std::any_of(groups.begin(), groups.end(), [](const TermGroup& g) { return g.mode >= 0; });
}

void require_momentum_factors(const std::vector<TermGroup>& groups, const char* what) {
  for (const auto& g : groups) {
    if (g.factor == ModeFactor::position) {
      throw std::invalid_argument(std::string(what) +
                                  ": position factors are not diagonal in momentum space");
    }
  }
}

// exp(-i M tau) for Hermitian M, row-major into `dst`.
void hermitian_exp(const Eigen::MatrixXcd& m, double tau, cplx* dst) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
  const Eigen::Index k = m.rows();
  Eigen::VectorXcd ph(k);
  for (Eigen::Index i = 0; i < k; ++i) ph(i) = std::exp(cplx(0.0, -es.eigenvalues()(i) * tau));
  const Eigen::MatrixXcd u = es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
  for (Eigen::Index r = 0; r < k; ++r)
    for (Eigen::Index c = 0; c < k; ++c) dst[r * k + c] = u(r, c);
}

// v <- M v with M row-major K x K.
inline void matvec(const cplx* m, cplx* v, cplx* tmp, int k) {
  for (int r = 0; r < k; ++r) {
    cplx s(0.0, 0.0);
    for (int c = 0; c < k; ++c) s += m[r * k + c] * v[c];
    tmp[r] = s;
  }
  std::copy(tmp, tmp + k, v);
}

HybridState restore_bases(HybridState s, const std::vector<Basis>& bases) {
  for (int a = 0; a < static_cast<int>(bases.size()); ++a) transform_axis_inplace(s, a, bases[a]);
  return s;
}

}  // namespace

void EvolutionConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("EvolutionConfig: dt must be > 0");
  if (!(t_final >= 0.0) || !std::isfinite(t_final)) {
    throw std::invalid_argument("EvolutionConfig: t_final must be >= 0");
  }
  if (t_final > 0.0 && dt > t_final) {
    throw std::invalid_argument("EvolutionConfig: dt exceeds t_final");
  }
}

int EvolutionConfig::steps() const {
  validate();
  if (t_final == 0.0) return 0;
  // The small shave keeps t/dt that is integral up to rounding from
  // gaining an extra step.
  return std::max(1, static_cast<int>(std::ceil(t_final / dt * (1.0 - 1e-12))));
}

double EvolutionConfig::step() const {
  const int n = steps();
  return n == 0 ? 0.0 : t_final / n;
}

double default_time_step(const RelaxationSystem& sys) {
  const double e = sys.epsilons.minCoeff();
  return std::min(0.1 * e * e, 1e-3);
}

HybridState propagate_unitary(const OperatorTermList& H, const HybridState& psi0,
                              const EvolutionConfig& cfg, const StepObserver& observer) {
  cfg.validate();
  if (!H.hermitian()) throw std::invalid_argument("propagate_unitary: H is not tagged Hermitian");
  const RegisterLayout& layout = psi0.layout();
  if (!layout.has_ancilla()) throw std::invalid_argument("propagate_unitary: layout has no ancilla");
  if (layout.qudit_levels != H.qudit_levels() || layout.dims() != H.dims()) {
    throw std::invalid_argument("propagate_unitary: layout does not match H");
  }
  const int steps = cfg.steps();
  if (steps == 0) return psi0;
  const double dt = cfg.step();

  std::vector<TermGroup> ga, gb;
  for (auto& g : group_terms(H)) (g.ancilla == AncillaFactor::eta ? gb : ga).push_back(std::move(g));
  require_momentum_factors(ga, "propagate_unitary");
  require_momentum_factors(gb, "propagate_unitary");

  const int k = layout.qudit_levels;
  const std::size_t kk = static_cast<std::size_t>(k) * k;
  const SpatialMomenta pm(layout);
  const std::size_t ns = pm.count();
  const Grid1D& anc = *layout.ancilla_grid;
  const std::size_t ne = anc.n;
  const std::vector<double> eta = momentum_values(anc);
  const double tau_a = cfg.scheme == Scheme::strang ? 0.5 * dt : dt;

  std::vector<cplx> ua(ns * kk);
  for (std::size_t s = 0; s < ns; ++s) hermitian_exp(block_at(ga, pm, s, k), tau_a, &ua[s * kk]);

  // U_B(eta) = V exp(-i eta Lambda dt) V^dagger from one eigensolve of B.
  const bool b_varies = depends_on_momentum(gb);
  const std::size_t nb = b_varies ? ns : 1;
  std::vector<cplx> ub(nb * ne * kk);
  for (std::size_t s = 0; s < nb; ++s) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(block_at(gb, pm, s, k));
    const Eigen::MatrixXcd& v = es.eigenvectors();
    for (std::size_t e = 0; e < ne; ++e) {
      Eigen::VectorXcd ph(k);
      for (int i = 0; i < k; ++i) ph(i) = std::exp(cplx(0.0, -eta[e] * es.eigenvalues()(i) * dt));
      const Eigen::MatrixXcd u = v * ph.asDiagonal() * v.adjoint();
      cplx* dst = &ub[(s * ne + e) * kk];
      for (int r = 0; r < k; ++r)
        for (int c = 0; c < k; ++c) dst[r * k + c] = u(r, c);
    }
  }

  HybridState psi = to_basis_all(psi0, Basis::momentum);
  auto amp = psi.amplitudes();
  const std::size_t per_level = ns * ne;
  std::vector<cplx> c(k), tmp(k);

  auto advance = [&](std::size_t s, std::size_t e, int count) {
    const std::size_t base = s * ne + e;
    for (int q = 0; q < k; ++q) c[q] = amp[q * per_level + base];
    const cplx* a = &ua[s * kk];
    const cplx* b = &ub[((b_varies ? s : 0) * ne + e) * kk];
    for (int n = 0; n < count; ++n) {
      matvec(a, c.data(), tmp.data(), k);
      matvec(b, c.data(), tmp.data(), k);
      if (cfg.scheme == Scheme::strang) matvec(a, c.data(), tmp.data(), k);
    }
    for (int q = 0; q < k; ++q) amp[q * per_level + base] = c[q];
  };

  if (observer) {
    for (int n = 1; n <= steps; ++n) {
      for (std::size_t s = 0; s < ns; ++s)
        for (std::size_t e = 0; e < ne; ++e) advance(s, e, 1);
      observer(n * dt, psi.norm());
    }
  } else {
    // Grid points evolve independently; same arithmetic per point as above.
    for (std::size_t s = 0; s < ns; ++s)
      for (std::size_t e = 0; e < ne; ++e) advance(s, e, steps);
  }
  return restore_bases(std::move(psi), psi0.bases());
}

HybridState propagate_nonunitary(const GeneratorSplit& gs, const HybridState& w0, double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw std::invalid_argument("propagate_nonunitary: t must be >= 0");
  const RegisterLayout& layout = w0.layout();
  if (layout.has_ancilla()) throw std::invalid_argument("propagate_nonunitary: layout has an ancilla");
  if (layout.qudit_levels != gs.A1.qudit_levels() || layout.dims() != gs.A1.dims()) {
    throw std::invalid_argument("propagate_nonunitary: layout does not match the generator");
  }
  if (gs.A1.uses_ancilla() || gs.A2.uses_ancilla()) {
    throw std::invalid_argument("propagate_nonunitary: generator acts on an ancilla");
  }
  if (t == 0.0) return w0;
  const std::vector<TermGroup> g1 = group_terms(gs.A1);
  const std::vector<TermGroup> g2 = group_terms(gs.A2);
  require_momentum_factors(g1, "propagate_nonunitary");
  require_momentum_factors(g2, "propagate_nonunitary");

  const int k = layout.qudit_levels;
  const SpatialMomenta pm(layout);
  HybridState w = to_basis_all(w0, Basis::momentum);
  auto amp = w.amplitudes();
  const std::size_t ns = pm.count();
  Eigen::VectorXcd c(k);
  for (std::size_t s = 0; s < ns; ++s) {
    const Eigen::MatrixXcd a = block_at(g1, pm, s, k) - cplx(0.0, 1.0) * block_at(g2, pm, s, k);
    const Eigen::MatrixXcd e = (cplx(0.0, -t) * a).exp();
    for (int q = 0; q < k; ++q) c(q) = amp[q * ns + s];
    const Eigen::VectorXcd out = e * c;
    for (int q = 0; q < k; ++q) amp[q * ns + s] = out(q);
  }
  return restore_bases(std::move(w), w0.bases());
}

HybridState propagate_nonunitary(const GeneratorSplit& gs, const HybridState& w0,
                                 const EvolutionConfig& cfg) {
  cfg.validate();
  return propagate_nonunitary(gs, w0, cfg.t_final);
}

HybridState solve_parabolic_spectral(const ParabolicPDE& pde, const HybridState& u0, double t) {
  const RegisterLayout& layout = u0.layout();
  if (layout.qudit_levels != 1 || layout.has_ancilla() || layout.dims() != pde.d) {
    throw std::invalid_argument("solve_parabolic_spectral: need K=1, d spatial axes, no ancilla");
  }
  if (!(t >= 0.0)) throw std::invalid_argument("solve_parabolic_spectral: t must be >= 0");
  const SpatialMomenta pm(layout);
  HybridState u = to_basis_all(u0, Basis::momentum);
  auto amp = u.amplitudes();
  const int d = pde.d;
  Eigen::VectorXd p(d);
  for (std::size_t s = 0; s < pm.count(); ++s) {
    for (int j = 0; j < d; ++j) p(j) = pm.p(j, s);
    const double re = -p.dot(pde.D * p) - pde.r;
    const double im = pde.gamma.dot(p);
    amp[s] *= std::exp(cplx(re * t, im * t));
  }
  return restore_bases(std::move(u), u0.bases());
}

HybridState lift_scalar(const HybridState& u0, int qudit_levels) {
  const RegisterLayout& in = u0.layout();
  if (in.qudit_levels != 1) throw std::invalid_argument("lift_scalar: input must have K=1");
  RegisterLayout out = in;
  out.qudit_levels = qudit_levels;
  std::vector<cplx> a(out.amplitude_count(), cplx(0.0, 0.0));
  std::copy(u0.amplitudes().begin(), u0.amplitudes().end(), a.begin());
  return HybridState(std::move(out), std::move(a), u0.bases());
}

std::vector<LayerSample> initial_layer_profile(const RelaxationSystem& sys, const HybridState& u0,
                                               const std::vector<double>& times,
                                               bool equilibrium_start) {
  if (sys.flavor != Flavor::heat1d) {
    throw std::invalid_argument(std::string("initial_layer_profile: requires the heat1d flavor, got ") +
                                to_string(sys.flavor));
  }
  const GeneratorSplit gs = assemble_generators(sys);
  HybridState w0 = lift_scalar(u0, sys.qudit_levels());
  if (equilibrium_start) w0 = equilibrium_flux(sys, std::move(w0));
  std::vector<LayerSample> out;
  for (double t : times) {
    const HybridState w = propagate_nonunitary(gs, w0, t);
    out.push_back(LayerSample{t, flux_closure_residual(sys, w)});
  }
  return out;
}

double fit_decay_rate(const std::vector<LayerSample>& samples, double floor_factor) {
  if (samples.size() < 2) throw std::invalid_argument("fit_decay_rate: need >= 2 samples");
  const double floor = floor_factor * samples.back().residual;
  std::vector<double> t, y;
  for (const auto& s : samples) {
    if (s.residual > 0.0 && s.residual >= floor) {
      t.push_back(s.t);
      y.push_back(std::log(s.residual));
    }
  }
  if (t.size() < 2) throw std::invalid_argument("fit_decay_rate: fewer than two samples above the floor");
  return ols_fit(t, y).slope;
}

}  // namespace relaxq
