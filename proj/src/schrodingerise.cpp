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

#include "relaxq/schrodingerise.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace relaxq {

namespace {

constexpr double kPi = std::numbers::pi;

// Smooth, non-symmetric test state with every level populated.
HybridState probe_state(const RelaxationSystem& sys) {
  const int n = sys.d <= 3 ? 8 : 4;
  std::vector<Grid1D> grids;
  for (int j = 0; j < sys.d; ++j) grids.push_back(make_grid(n, -3.0 - 0.25 * j, 3.5 + 0.5 * j));
  const RegisterLayout layout = make_layout(sys.d + 1, grids);
  std::vector<cplx> a(layout.amplitude_count());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double x = static_cast<double>(i);
    a[i] = cplx(std::sin(0.7 * x + 0.3) + 0.1 * std::cos(1.9 * x), std::cos(0.37 * x) - 0.2);
  }
  return HybridState(layout, std::move(a));
}

void normalise(std::vector<cplx>& a, double h) {
  double s = 0.0;
  for (const cplx& z : a) s += std::norm(z);
  const double nrm = std::sqrt(s * h);
  if (!(nrm > 0.0)) throw std::invalid_argument("ancilla: zero state");
  for (cplx& z : a) z /= nrm;
}

void warn_tail(AncillaState& st) {
  const double xmax = std::max(std::abs(st.grid.x_min), std::abs(st.grid.point(st.grid.n - 1)));
  double tail = 0.0;
  if (st.kind == AncillaState::Kind::xi_exact) {
    tail = std::exp(-xmax);
  } else {
    tail = std::exp(-xmax * xmax / (2.0 * st.s * st.s));
  }
  if (tail > 1e-8) {
    st.warnings.push_back("ancilla domain too small: boundary amplitude " + std::to_string(tail));
  }
}

}  // namespace

GeneratorSplit assemble_generators(const RelaxationSystem& sys) {
  const int d = sys.d;
  const int k = d + 1;
  GeneratorSplit gs{OperatorTermList(k, d), OperatorTermList(k, d)};
  for (int j = 0; j < d; ++j) {
    Eigen::MatrixXcd q = Eigen::MatrixXcd::Zero(k, k);
    for (int i = 0; i < d; ++i) q += sys.alpha(i, j) * QuditMatrix::flip(k, 0, i + 1).matrix();
    if (q.cwiseAbs().maxCoeff() > 0.0) {
      gs.A1.add(1.0 / sys.epsilons(j), QuditMatrix(q), j, ModeFactor::momentum,
                AncillaFactor::identity, "A1");
    }
    if (sys.convection(j) != 0.0) {
      gs.A1.add(sys.convection(j), QuditMatrix::projector(k, 0), j, ModeFactor::momentum,
                AncillaFactor::identity, "A1");
    }
  }
  for (int i = 0; i < d; ++i) {
    if (sys.delta(i) != 0.0) {
      const double c = sys.delta(i) / (2.0 * sys.epsilons(i));
      gs.A1.add(c, QuditMatrix::antisymmetric_flip(k, 0, i + 1), -1, ModeFactor::identity,
                AncillaFactor::identity, "A1");
      gs.A2.add(-c, QuditMatrix::flip(k, 0, i + 1), -1, ModeFactor::identity,
                AncillaFactor::identity, "A2");
    }
  }
  if (sys.r != 0.0) {
    gs.A2.add(sys.r, QuditMatrix::projector(k, 0), -1, ModeFactor::identity,
              AncillaFactor::identity, "A2");
  }
  for (int i = 0; i < d; ++i) {
    if (sys.lambda(i) != 0.0) {
      gs.A2.add(sys.lambda(i), QuditMatrix::projector(k, i + 1), -1, ModeFactor::identity,
                AncillaFactor::identity, "A2");
    }
  }
  try {
    gs.A1.mark_hermitian();
    gs.A2.mark_hermitian();
  } catch (const std::invalid_argument& e) {
    throw std::logic_error(std::string("assemble_generators: split is not Hermitian: ") +
                           e.what());
  }
  const double err = generator_reconstruction_error(gs, sys, probe_state(sys));
  if (!(err <= 1e-10)) {
    throw std::logic_error("assemble_generators: generator does not reproduce the system "
                           "(relative mismatch " + std::to_string(err) + ")");
  }
  return gs;
}

double generator_reconstruction_error(const GeneratorSplit& gs, const RelaxationSystem& sys,
                                      const HybridState& w) {
  const HybridState rhs = system_rhs(sys, w);
  HybridState aw = apply_terms(gs.A1, w);
  aw.add_scaled(cplx(0.0, -1.0), apply_terms(gs.A2, w));
  double num = 0.0;
  double den = 0.0;
  for (std::size_t n = 0; n < rhs.size(); ++n) {
    const cplx target = cplx(0.0, 1.0) * rhs.amplitudes()[n];
    num = std::max(num, std::abs(aw.amplitudes()[n] - target));
    den = std::max(den, std::abs(target));
  }
  return den > 0.0 ? num / den : num;
}

OperatorTermList schrodingerise(const GeneratorSplit& gs, double rescale) {
  if (!(rescale > 0.0)) throw std::invalid_argument("schrodingerise: rescale must be > 0");
  if (gs.A1.qudit_levels() != gs.A2.qudit_levels() || gs.A1.dims() != gs.A2.dims()) {
    throw std::invalid_argument("schrodingerise: A1 and A2 shapes differ");
  }
  OperatorTermList h(gs.A1.qudit_levels(), gs.A1.dims());
  for (OperatorTerm t : gs.A2.terms()) {
    t.coefficient /= rescale;
    t.ancilla = AncillaFactor::eta;
    t.origin = "A2";
    h.add(std::move(t));
  }
  for (OperatorTerm t : gs.A1.terms()) {
    t.coefficient /= rescale;
    t.ancilla = AncillaFactor::identity;
    t.origin = "A1";
    h.add(std::move(t));
  }
  h.mark_hermitian();
  return h;
}

double AncillaState::norm() const {
  double s = 0.0;
  for (const cplx& z : amplitudes) s += std::norm(z);
  return std::sqrt(s * grid.spacing());
}

AncillaState ancilla_xi(const Grid1D& grid) {
  AncillaState st;
  st.grid = grid;
  st.kind = AncillaState::Kind::xi_exact;
  st.amplitudes.resize(grid.n);
  for (int j = 0; j < grid.n; ++j) st.amplitudes[j] = std::exp(-std::abs(grid.point(j)));
  normalise(st.amplitudes, grid.spacing());
  warn_tail(st);
  return st;
}

AncillaState ancilla_gaussian(const Grid1D& grid, double s) {
  if (!(s > 0.0)) throw std::invalid_argument("ancilla_gaussian: s must be > 0");
  AncillaState st;
  st.grid = grid;
  st.kind = AncillaState::Kind::gaussian;
  st.s = s;
  st.amplitudes.resize(grid.n);
  for (int j = 0; j < grid.n; ++j) {
    const double x = grid.point(j);
    st.amplitudes[j] = std::exp(-x * x / (2.0 * s * s));
  }
  normalise(st.amplitudes, grid.spacing());
  warn_tail(st);
  return st;
}

Grid1D default_ancilla_grid(int n, double length) { return make_staggered_grid(n, length); }

double ancilla_overlap(const AncillaState& a, const AncillaState& b) {
  if (!(a.grid == b.grid)) throw std::invalid_argument("ancilla_overlap: grids differ");
  cplx s(0.0, 0.0);
  for (int j = 0; j < a.grid.n; ++j) s += std::conj(a.amplitudes[j]) * b.amplitudes[j];
  return std::abs(s) * a.grid.spacing();
}

double scaled_erfc(double z) {
  if (z < 0.0) throw std::invalid_argument("scaled_erfc: z must be >= 0");
  if (z < 8.0) return std::exp(z * z) * std::erfc(z);
  // Asymptotic series; for z >= 8 twenty terms truncate below 1e-18.
  const double inv = 1.0 / (2.0 * z * z);
  double term = 1.0;
  double sum = 1.0;
  for (int n = 1; n <= 20; ++n) {
    term *= -(2.0 * n - 1.0) * inv;
    sum += term;
  }
  return sum / (z * std::sqrt(kPi));
}

double gaussian_fidelity(double s) {
  if (!(s > 0.0)) throw std::invalid_argument("gaussian_fidelity: s must be > 0");
  return std::sqrt(2.0 * s) * std::pow(kPi, 0.25) * scaled_erfc(s / std::sqrt(2.0));
}

double gaussian_fidelity_quadrature(double s, int n, double x_min, double x_max) {
  const Grid1D g = make_grid(n, x_min, x_max);
  return ancilla_overlap(ancilla_xi(g), ancilla_gaussian(g, s));
}

HybridState embed(const HybridState& w, const AncillaState& ancilla) {
  const RegisterLayout& in = w.layout();
  if (in.has_ancilla()) throw std::invalid_argument("embed: state already has an ancilla");
  RegisterLayout out = make_layout(in.qudit_levels, in.spatial_grids, ancilla.grid);
  const std::size_t n_anc = ancilla.amplitudes.size();
  std::vector<cplx> a(out.amplitude_count());
  auto src = w.amplitudes();
  for (std::size_t i = 0; i < src.size(); ++i) {
    for (std::size_t m = 0; m < n_anc; ++m) a[i * n_anc + m] = src[i] * ancilla.amplitudes[m];
  }
  std::vector<Basis> bases = w.bases();
  bases.push_back(Basis::position);
  return HybridState(std::move(out), std::move(a), std::move(bases));
}

std::vector<PauliTerm> pauli_decompose(const OperatorTermList& ops, double tol) {
  if (ops.qudit_levels() != 2) {
    throw std::invalid_argument("pauli_decompose: requires a two-level qudit");
  }
  const std::pair<char, QuditMatrix> basis[] = {{'I', QuditMatrix::identity(2)},
                                               {'X', QuditMatrix::pauli_x()},
                                               {'Y', QuditMatrix::pauli_y()},
                                               {'Z', QuditMatrix::pauli_z()}};
  std::vector<PauliTerm> out;
  for (const auto& g : group_terms(ops)) {
    for (const auto& [label, sigma] : basis) {
      const cplx c = 0.5 * (sigma.matrix() * g.qudit).trace();
      if (std::abs(c) <= tol) continue;
      if (std::abs(c.imag()) > tol) {
        throw std::invalid_argument("pauli_decompose: operator is not Hermitian");
      }
      out.push_back(PauliTerm{c.real(), label, g.mode, g.factor, g.ancilla});
    }
  }
  return out;
}

}  // namespace relaxq
