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

#include "relaxq/operator_terms.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace relaxq {

namespace {

void check_level(int k, int j, const char* what) {
  if (j < 0 || j >= k) {
    throw std::out_of_range(std::string(what) + ": level " + std::to_string(j) +
                            " outside [0, " + std::to_string(k) + ")");
  }
}

// Multiplies every amplitude along `axis` by values[index along axis].
void multiply_along_axis(HybridState& s, int axis,
                         const std::vector<double>& values) {
  const RegisterLayout& layout = s.layout();
  const int n = layout.axis_grid(axis).n;
  const std::size_t inner = layout.inner_extent(axis);
  const std::size_t outer = layout.amplitude_count() / (inner * n);
  auto a = s.amplitudes();
  for (std::size_t o = 0; o < outer; ++o) {
    for (int m = 0; m < n; ++m) {
      cplx* line = a.data() + (o * n + m) * inner;
      for (std::size_t i = 0; i < inner; ++i) line[i] *= values[m];
    }
  }
}

// Applies a quadrature operator along one axis, leaving the basis tag as
// it was on entry.
void apply_quadrature(HybridState& s, int axis, ModeFactor f) {
  if (f == ModeFactor::identity) return;
  const Grid1D& g = s.layout().axis_grid(axis);
  const Basis entry = s.basis(axis);
  const Basis diag = f == ModeFactor::momentum ? Basis::momentum : Basis::position;
  transform_axis_inplace(s, axis, diag);
  multiply_along_axis(s, axis,
                      f == ModeFactor::momentum ? momentum_values(g) : g.points());
  transform_axis_inplace(s, axis, entry);
}

// out += Q acting on the level axis of `in`.
void accumulate_qudit(HybridState& out, const Eigen::MatrixXcd& q,
                      const HybridState& in) {
  const int k = out.layout().qudit_levels;
  for (int r = 0; r < k; ++r) {
    auto dst = out.level(r);
    for (int c = 0; c < k; ++c) {
      const cplx qc = q(r, c);
      if (qc == cplx(0.0, 0.0)) continue;
      auto src = in.level(c);
      for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += qc * src[i];
    }
  }
}

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Eigen::MatrixXcd dense_factor(const Grid1D& g, ModeFactor f) {
  switch (f) {
    case ModeFactor::identity:
      return Eigen::MatrixXcd::Identity(g.n, g.n);
    case ModeFactor::position: {
      Eigen::MatrixXcd x = Eigen::MatrixXcd::Zero(g.n, g.n);
      for (int j = 0; j < g.n; ++j) x(j, j) = g.point(j);
      return x;
    }
    case ModeFactor::momentum:
      return dense_momentum_operator(g);
  }
  throw std::logic_error("dense_factor: unknown factor");
}

}  // namespace

QuditMatrix::QuditMatrix(Eigen::MatrixXcd m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols() || m_.rows() < 1) {
    throw std::invalid_argument("QuditMatrix: must be square with K >= 1");
  }
}

QuditMatrix QuditMatrix::zero(int k) {
  return QuditMatrix(Eigen::MatrixXcd::Zero(k, k));
}

QuditMatrix QuditMatrix::identity(int k) {
  return QuditMatrix(Eigen::MatrixXcd::Identity(k, k));
}

QuditMatrix QuditMatrix::projector(int k, int j) {
  check_level(k, j, "projector");
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(k, k);
  m(j, j) = 1.0;
  return QuditMatrix(std::move(m));
}

QuditMatrix QuditMatrix::flip(int k, int i, int j) {
  check_level(k, i, "flip");
  check_level(k, j, "flip");
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(k, k);
  m(i, j) += 1.0;
  m(j, i) += 1.0;
  return QuditMatrix(std::move(m));
}

QuditMatrix QuditMatrix::antisymmetric_flip(int k, int i, int j) {
  check_level(k, i, "antisymmetric_flip");
  check_level(k, j, "antisymmetric_flip");
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(k, k);
  m(i, j) += cplx(0.0, 1.0);
  m(j, i) -= cplx(0.0, 1.0);
  return QuditMatrix(std::move(m));
}

QuditMatrix QuditMatrix::pauli_x() { return flip(2, 0, 1); }

QuditMatrix QuditMatrix::pauli_y() {
  Eigen::MatrixXcd m(2, 2);
  m << 0.0, cplx(0.0, -1.0), cplx(0.0, 1.0), 0.0;
  return QuditMatrix(std::move(m));
}

QuditMatrix QuditMatrix::pauli_z() {
  Eigen::MatrixXcd m(2, 2);
  m << 1.0, 0.0, 0.0, -1.0;
  return QuditMatrix(std::move(m));
}

double QuditMatrix::hermiticity_defect() const {
  return (m_ - m_.adjoint()).cwiseAbs().maxCoeff();
}

const char* to_string(ModeFactor f) {
  switch (f) {
    case ModeFactor::identity: return "identity";
    case ModeFactor::momentum: return "momentum";
    case ModeFactor::position: return "position";
  }
  return "?";
}

const char* to_string(AncillaFactor f) {
  return f == AncillaFactor::eta ? "eta" : "identity";
}

int OperatorTerm::active_mode() const {
  for (std::size_t j = 0; j < modes.size(); ++j) {
    if (modes[j] != ModeFactor::identity) return static_cast<int>(j);
  }
  return -1;
}

ModeFactor OperatorTerm::active_factor() const {
  const int j = active_mode();
  return j < 0 ? ModeFactor::identity : modes[j];
}

OperatorTermList::OperatorTermList(int qudit_levels, int dims)
    : levels_(qudit_levels), dims_(dims) {
  if (qudit_levels < 1 || dims < 0) {
    throw std::invalid_argument("OperatorTermList: need K >= 1 and d >= 0");
  }
}

bool OperatorTermList::uses_ancilla() const {
  for (const auto& t : terms_) {
    if (t.ancilla == AncillaFactor::eta) return true;
  }
  return false;
}

bool OperatorTermList::uses_position() const {
  for (const auto& t : terms_) {
    if (t.active_factor() == ModeFactor::position) return true;
  }
  return false;
}

void OperatorTermList::add(OperatorTerm term) {
  if (term.qudit.dim() != levels_) {
    throw std::invalid_argument("OperatorTermList: qudit factor is " +
                                std::to_string(term.qudit.dim()) + "x" +
                                std::to_string(term.qudit.dim()) +
                                ", expected K=" + std::to_string(levels_));
  }
  if (term.modes.empty()) term.modes.assign(dims_, ModeFactor::identity);
  if (static_cast<int>(term.modes.size()) != dims_) {
    throw std::invalid_argument("OperatorTermList: term has " +
                                std::to_string(term.modes.size()) +
                                " mode factors, expected " +
                                std::to_string(dims_));
  }
  int active = 0;
  for (ModeFactor f : term.modes) active += f != ModeFactor::identity ? 1 : 0;
  if (active > 1) {
    throw std::invalid_argument(
        "OperatorTermList: a term may act non-trivially on at most one "
        "spatial mode");
  }
  if (!std::isfinite(term.coefficient)) {
    throw std::invalid_argument("OperatorTermList: non-finite coefficient");
  }
  hermitian_ = false;
  terms_.push_back(std::move(term));
}

void OperatorTermList::add(double coefficient, QuditMatrix qudit, int mode,
                           ModeFactor factor, AncillaFactor ancilla,
                           std::string origin) {
  OperatorTerm t{coefficient, std::move(qudit),
                 std::vector<ModeFactor>(dims_, ModeFactor::identity), ancilla,
                 std::move(origin)};
  if (mode >= 0) {
    if (mode >= dims_) {
      throw std::out_of_range("OperatorTermList: mode " + std::to_string(mode) +
                              " out of range");
    }
    t.modes[mode] = factor;
  } else if (factor != ModeFactor::identity) {
    throw std::invalid_argument("OperatorTermList: factor without a mode");
  }
  add(std::move(t));
}

double OperatorTermList::hermiticity_defect() const {
  double worst = 0.0;
  for (const auto& g : group_terms(*this)) {
    worst = std::max(worst, (g.qudit - g.qudit.adjoint()).cwiseAbs().maxCoeff());
  }
  return worst;
}

void OperatorTermList::mark_hermitian(double tol) {
  const double defect = hermiticity_defect();
  if (defect > tol) {
    throw std::invalid_argument(
        "OperatorTermList: not Hermitian (grouped defect " +
        std::to_string(defect) + ")");
  }
  hermitian_ = true;
}

std::vector<TermGroup> group_terms(const OperatorTermList& ops) {
  std::vector<TermGroup> groups;
  for (const auto& t : ops.terms()) {
    const int mode = t.active_mode();
    const ModeFactor f = t.active_factor();
    TermGroup* hit = nullptr;
    for (auto& g : groups) {
      if (g.mode == mode && g.factor == f && g.ancilla == t.ancilla) {
        hit = &g;
        break;
      }
    }
    if (hit == nullptr) {
      groups.push_back(TermGroup{mode, f, t.ancilla,
                                 Eigen::MatrixXcd::Zero(ops.qudit_levels(),
                                                        ops.qudit_levels())});
      hit = &groups.back();
    }
    hit->qudit += t.coefficient * t.qudit.matrix();
  }
  return groups;
}

HybridState apply_terms(const OperatorTermList& ops, const HybridState& state) {
  const RegisterLayout& layout = state.layout();
  if (layout.qudit_levels != ops.qudit_levels() || layout.dims() != ops.dims()) {
    throw std::invalid_argument(
        "apply_terms: operator is K=" + std::to_string(ops.qudit_levels()) +
        ", d=" + std::to_string(ops.dims()) + " but state is K=" +
        std::to_string(layout.qudit_levels) + ", d=" +
        std::to_string(layout.dims()));
  }
  if (ops.uses_ancilla() && !layout.has_ancilla()) {
    throw std::invalid_argument("apply_terms: operator acts on an ancilla the "
                                "state does not have");
  }
  HybridState out(layout, std::vector<cplx>(layout.amplitude_count()),
                  state.bases());
  for (const auto& g : group_terms(ops)) {
    HybridState work = state;
    if (g.mode >= 0) apply_quadrature(work, g.mode, g.factor);
    if (g.ancilla == AncillaFactor::eta) {
      apply_quadrature(work, layout.ancilla_axis(), ModeFactor::momentum);
    }
    accumulate_qudit(out, g.qudit, work);
  }
  return out;
}

Eigen::MatrixXcd dense_momentum_operator(const Grid1D& g) {
  // T^{-1} diag(p) T with T the forward transform; entrywise
  // P_jl = (1/n) sum_m p_m e^{i p_m (x_j - x_l)}. The upper triangle is
  // mirrored so the matrix is Hermitian to the last bit.
  const int n = g.n;
  Eigen::MatrixXcd p(n, n);
  for (int j = 0; j < n; ++j) {
    for (int l = 0; l <= j; ++l) {
      cplx s(0.0, 0.0);
      for (int m = 0; m < n; ++m) {
        const double pm = g.momentum(m);
        const double arg = pm * (j - l) * g.spacing();
        s += pm * cplx(std::cos(arg), std::sin(arg));
      }
      p(j, l) = s / static_cast<double>(n);
      p(l, j) = std::conj(p(j, l));
    }
  }
  return p;
}

Eigen::MatrixXcd assemble_dense(const OperatorTermList& ops,
                                const RegisterLayout& layout, int max_dim) {
  if (layout.qudit_levels != ops.qudit_levels() || layout.dims() != ops.dims()) {
    throw std::invalid_argument("assemble_dense: layout mismatch");
  }
  if (ops.uses_ancilla() && !layout.has_ancilla()) {
    throw std::invalid_argument("assemble_dense: layout lacks the ancilla");
  }
  if (layout.amplitude_count() > static_cast<std::size_t>(max_dim)) {
    throw std::invalid_argument("assemble_dense: " +
                                std::to_string(layout.amplitude_count()) +
                                " rows exceeds limit " + std::to_string(max_dim));
  }
  const auto dim = static_cast<Eigen::Index>(layout.amplitude_count());
  Eigen::MatrixXcd total = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& t : ops.terms()) {
    Eigen::MatrixXcd m = t.coefficient * t.qudit.matrix();
    for (int j = 0; j < layout.dims(); ++j) {
      m = kron(m, dense_factor(layout.spatial_grids[j], t.modes[j]));
    }
    if (layout.has_ancilla()) {
      m = kron(m, dense_factor(*layout.ancilla_grid,
                               t.ancilla == AncillaFactor::eta
                                   ? ModeFactor::momentum
                                   : ModeFactor::identity));
    }
    total += m;
  }
  return total;
}

}  // namespace relaxq
