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

#include "relaxq/measure.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace relaxq {

namespace {

void require_ancilla(const HybridState& psi, const char* what) {
  if (!psi.layout().has_ancilla()) {
    throw std::invalid_argument(std::string(what) + ": state has no ancilla axis");
  }
}

HybridState ancilla_in_position(const HybridState& psi) {
  HybridState s = psi;
  transform_axis_inplace(s, s.layout().ancilla_axis(), Basis::position);
  return s;
}

// Measured quadrature value of ancilla grid point j (accepted when > 0).
double measured_eta(const Grid1D& g, int j) { return -g.point(j); }

void renormalise(HybridState& s) {
  const double n = s.norm();
  if (!(n > 0.0)) throw std::invalid_argument("renormalise: zero state");
  s.scale(1.0 / n);
}

// Copies slice j (all levels and spatial points) into `out`.
std::vector<cplx> slice(const HybridState& s, int j) {
  const std::size_t ne = s.layout().ancilla_grid->n;
  const std::size_t rows = s.size() / ne;
  std::vector<cplx> out(rows);
  for (std::size_t r = 0; r < rows; ++r) out[r] = s.amplitudes()[r * ne + j];
  return out;
}

int nearest_accepted(const Grid1D& g, double eta) {
  int best = -1;
  for (int j = 0; j < g.n; ++j) {
    if (measured_eta(g, j) <= 0.0) continue;
    if (best < 0 || std::abs(measured_eta(g, j) - eta) < std::abs(measured_eta(g, best) - eta)) best = j;
  }
  if (best < 0) throw std::invalid_argument("slice_proportionality: no accepted slices");
  return best;
}

}  // namespace

MeasurementOutcome project_ancilla_half_line(const HybridState& psi, const EtaWeight& g,
                                             bool renormalize) {
  require_ancilla(psi, "project_ancilla_half_line");
  const double n0 = psi.norm_squared();
  if (!(n0 > 0.0)) throw std::invalid_argument("project_ancilla_half_line: zero input");
  HybridState s = ancilla_in_position(psi);
  const Grid1D& grid = *s.layout().ancilla_grid;
  const std::size_t ne = grid.n;
  std::vector<double> weight(ne);
  for (std::size_t j = 0; j < ne; ++j) {
    const double eta = measured_eta(grid, static_cast<int>(j));
    weight[j] = eta > 0.0 ? (g ? g(eta) : 1.0) : 0.0;
  }
  auto a = s.amplitudes();
  for (std::size_t i = 0; i < a.size(); ++i) a[i] *= weight[i % ne];
  const double p = s.norm_squared() / n0;
  if (!(p > 0.0)) throw std::invalid_argument("project_ancilla_half_line: all accepted amplitudes are zero");
  transform_axis_inplace(s, s.layout().ancilla_axis(), psi.basis(psi.layout().ancilla_axis()));
  if (renormalize) renormalise(s);
  return MeasurementOutcome{std::move(s), p, renormalize};
}

MeasurementOutcome postselect_eta_positive(const HybridState& psi, const EtaWeight& g,
                                           bool renormalize) {
  require_ancilla(psi, "postselect_eta_positive");
  const double n0 = psi.norm_squared();
  if (!(n0 > 0.0)) throw std::invalid_argument("postselect_eta_positive: zero input");
  const HybridState s = ancilla_in_position(psi);
  const RegisterLayout& in = s.layout();
  const Grid1D& grid = *in.ancilla_grid;
  const std::size_t ne = grid.n;
  const std::size_t rows = s.size() / ne;

  RegisterLayout out_layout = in;
  out_layout.ancilla_grid.reset();
  std::vector<Basis> bases = s.bases();
  bases.pop_back();
  std::vector<cplx> w(rows, cplx(0.0, 0.0));
  double accepted = 0.0;
  double denom = 0.0;
  for (std::size_t j = 0; j < ne; ++j) {
    const double eta = measured_eta(grid, static_cast<int>(j));
    if (eta <= 0.0) continue;
    const double gj = g ? g(eta) : 1.0;
    const double e = std::exp(-eta);
    denom += gj * e * e;
    for (std::size_t r = 0; r < rows; ++r) {
      const cplx z = s.amplitudes()[r * ne + j];
      accepted += std::norm(gj * z);
      w[r] += gj * e * z;
    }
  }
  accepted *= s.cell_weight();
  if (!(accepted > 0.0) || !(denom > 0.0)) {
    throw std::invalid_argument("postselect_eta_positive: all accepted amplitudes are zero");
  }
  for (auto& z : w) z /= denom;
  HybridState out(std::move(out_layout), std::move(w), std::move(bases));
  if (renormalize) renormalise(out);
  return MeasurementOutcome{std::move(out), accepted / n0, renormalize};
}

MeasurementOutcome project_qudit(const HybridState& psi, int level, bool renormalize) {
  const RegisterLayout& in = psi.layout();
  if (level < 0 || level >= in.qudit_levels) {
    throw std::out_of_range("project_qudit: level " + std::to_string(level) + " outside [0, " +
                            std::to_string(in.qudit_levels) + ")");
  }
  const double n0 = psi.norm_squared();
  if (!(n0 > 0.0)) throw std::invalid_argument("project_qudit: zero input");
  RegisterLayout l = in;
  l.qudit_levels = 1;
  auto src = psi.level(level);
  HybridState out(std::move(l), std::vector<cplx>(src.begin(), src.end()), psi.bases());
  const double p = out.norm_squared() / n0;
  if (renormalize) renormalise(out);
  return MeasurementOutcome{std::move(out), p, renormalize};
}

Recovery recover_u(const HybridState& psi, const EtaWeight& g) {
  MeasurementOutcome w = postselect_eta_positive(psi, g);
  MeasurementOutcome u = project_qudit(w.state, 0);
  return Recovery{std::move(u.state), w.probability, u.probability, w.probability * u.probability};
}

SliceCheck slice_proportionality(const HybridState& psi, double eta1, double eta2) {
  require_ancilla(psi, "slice_proportionality");
  const HybridState s = ancilla_in_position(psi);
  const Grid1D& grid = *s.layout().ancilla_grid;
  const int j1 = nearest_accepted(grid, eta1);
  const int j2 = nearest_accepted(grid, eta2);
  const std::vector<cplx> a = slice(s, j1);
  const std::vector<cplx> b = slice(s, j2);
  cplx ab(0.0, 0.0);
  double aa = 0.0, bb = 0.0;
  for (std::size_t r = 0; r < a.size(); ++r) {
    ab += std::conj(b[r]) * a[r];
    aa += std::norm(a[r]);
    bb += std::norm(b[r]);
  }
  if (!(aa > 0.0) || !(bb > 0.0)) throw std::invalid_argument("slice_proportionality: empty slice");
  double perp = 0.0;
  const cplx c = ab / bb;
  for (std::size_t r = 0; r < a.size(); ++r) perp += std::norm(a[r] - c * b[r]);
  SliceCheck out;
  out.eta1 = measured_eta(grid, j1);
  out.eta2 = measured_eta(grid, j2);
  out.ratio = std::sqrt(aa / bb);
  out.expected = std::exp(-(out.eta1 - out.eta2));
  out.parallel_residual = std::sqrt(perp / aa);
  return out;
}

}  // namespace relaxq
