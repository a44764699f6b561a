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

#include "relaxq/hybrid_state.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace relaxq {

namespace {

// The FFTW planner is not reentrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

class GuruPlan {
 public:
  GuruPlan(cplx* data, int n, std::size_t outer, std::size_t inner, int sign) {
    fftw_iodim dims[1] = {{n, static_cast<int>(inner), static_cast<int>(inner)}};
    fftw_iodim loops[2] = {
        {static_cast<int>(outer), static_cast<int>(n * inner),
         static_cast<int>(n * inner)},
        {static_cast<int>(inner), 1, 1}};
    auto* p = reinterpret_cast<fftw_complex*>(data);
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan_ = fftw_plan_guru_dft(1, dims, 2, loops, p, p, sign, FFTW_ESTIMATE);
    if (plan_ == nullptr) throw std::runtime_error("FFTW planning failed");
  }
  ~GuruPlan() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(plan_);
  }
  GuruPlan(const GuruPlan&) = delete;
  GuruPlan& operator=(const GuruPlan&) = delete;

  void execute() const { fftw_execute(plan_); }

 private:
  fftw_plan plan_ = nullptr;
};

void require_same_shape(const HybridState& a, const HybridState& b,
                        const char* what) {
  if (!(a.layout() == b.layout())) {
    throw std::invalid_argument(std::string(what) + ": layout mismatch");
  }
  if (a.bases() != b.bases()) {
    throw std::invalid_argument(std::string(what) + ": basis mismatch");
  }
}

}  // namespace

const Grid1D& RegisterLayout::axis_grid(int axis) const {
  if (axis >= 0 && axis < dims()) return spatial_grids[axis];
  if (axis == dims() && has_ancilla()) return *ancilla_grid;
  throw std::out_of_range("RegisterLayout: axis " + std::to_string(axis) +
                          " out of range");
}

std::size_t RegisterLayout::points_per_level() const {
  std::size_t n = 1;
  for (const auto& g : spatial_grids) n *= static_cast<std::size_t>(g.n);
  if (has_ancilla()) n *= static_cast<std::size_t>(ancilla_grid->n);
  return n;
}

std::size_t RegisterLayout::inner_extent(int axis) const {
  std::size_t n = 1;
  for (int a = axis + 1; a < axis_count(); ++a) {
    n *= static_cast<std::size_t>(axis_grid(a).n);
  }
  return n;
}

RegisterLayout make_layout(int qudit_levels, std::vector<Grid1D> spatial_grids,
                           std::optional<Grid1D> ancilla_grid) {
  if (qudit_levels < 1) {
    throw std::invalid_argument("make_layout: qudit_levels must be >= 1");
  }
  for (const auto& g : spatial_grids) make_grid(g.n, g.x_min, g.x_max);
  if (ancilla_grid) {
    make_grid(ancilla_grid->n, ancilla_grid->x_min, ancilla_grid->x_max);
  }
  return RegisterLayout{qudit_levels, std::move(spatial_grids),
                        std::move(ancilla_grid)};
}

HybridState::HybridState(RegisterLayout layout)
    : layout_(std::move(layout)),
      amplitudes_(layout_.amplitude_count(), cplx(0.0, 0.0)),
      bases_(layout_.axis_count(), Basis::position) {}

HybridState::HybridState(RegisterLayout layout, std::vector<cplx> amplitudes,
                         std::vector<Basis> bases)
    : layout_(std::move(layout)),
      amplitudes_(std::move(amplitudes)),
      bases_(std::move(bases)) {
  if (amplitudes_.size() != layout_.amplitude_count()) {
    throw std::invalid_argument("HybridState: expected " +
                                std::to_string(layout_.amplitude_count()) +
                                " amplitudes, got " +
                                std::to_string(amplitudes_.size()));
  }
  if (bases_.empty()) bases_.assign(layout_.axis_count(), Basis::position);
  if (static_cast<int>(bases_.size()) != layout_.axis_count()) {
    throw std::invalid_argument("HybridState: one basis tag per axis required");
  }
}

std::span<const cplx> HybridState::level(int k) const {
  const std::size_t n = layout_.points_per_level();
  return std::span<const cplx>(amplitudes_).subspan(k * n, n);
}

std::span<cplx> HybridState::level(int k) {
  const std::size_t n = layout_.points_per_level();
  return std::span<cplx>(amplitudes_).subspan(k * n, n);
}

double HybridState::cell_weight() const {
  double w = 1.0;
  for (int a = 0; a < layout_.axis_count(); ++a) {
    const Grid1D& g = layout_.axis_grid(a);
    w *= bases_[a] == Basis::position ? g.spacing() : g.momentum_spacing();
  }
  return w;
}

double HybridState::norm_squared() const {
  double s = 0.0;
  for (const cplx& z : amplitudes_) s += std::norm(z);
  return s * cell_weight();
}

double HybridState::norm() const { return std::sqrt(norm_squared()); }

void HybridState::scale(cplx factor) {
  for (cplx& z : amplitudes_) z *= factor;
}

void HybridState::add_scaled(cplx a, const HybridState& other) {
  require_same_shape(*this, other, "add_scaled");
  for (std::size_t i = 0; i < amplitudes_.size(); ++i) {
    amplitudes_[i] += a * other.amplitudes_[i];
  }
}

cplx inner_product(const HybridState& a, const HybridState& b) {
  require_same_shape(a, b, "inner_product");
  cplx s(0.0, 0.0);
  auto x = a.amplitudes();
  auto y = b.amplitudes();
  for (std::size_t i = 0; i < x.size(); ++i) s += std::conj(x[i]) * y[i];
  return s * a.cell_weight();
}

double normalized_distance(const HybridState& a, const HybridState& b) {
  require_same_shape(a, b, "normalized_distance");
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) {
    throw std::invalid_argument("normalized_distance: zero state");
  }
  double s = 0.0;
  auto x = a.amplitudes();
  auto y = b.amplitudes();
  for (std::size_t i = 0; i < x.size(); ++i) s += std::norm(x[i] / na - y[i] / nb);
  return std::sqrt(s * a.cell_weight());
}

void transform_axis_inplace(HybridState& state, int axis, Basis target) {
  const RegisterLayout& layout = state.layout();
  if (axis < 0 || axis >= layout.axis_count()) {
    throw std::out_of_range("transform: axis " + std::to_string(axis) +
                            " out of range");
  }
  if (state.basis(axis) == target) return;

  const Grid1D& g = layout.axis_grid(axis);
  const int n = g.n;
  const std::size_t inner = layout.inner_extent(axis);
  const std::size_t outer = layout.amplitude_count() / (inner * n);
  auto data = state.amplitudes();

  const double root_two_pi = std::sqrt(2.0 * std::numbers::pi);
  std::vector<cplx> phase(n);
  for (int m = 0; m < n; ++m) {
    // e^{-i p_m x_min}: the kernel's offset relative to a plain DFT.
    const double arg = -g.momentum(m) * g.x_min;
    phase[m] = cplx(std::cos(arg), std::sin(arg));
  }

  const bool forward = target == Basis::momentum;
  if (!forward) {
    for (std::size_t o = 0; o < outer; ++o) {
      for (int m = 0; m < n; ++m) {
        const cplx f = std::conj(phase[m]) * (g.momentum_spacing() / root_two_pi);
        cplx* line = data.data() + (o * n + m) * inner;
        for (std::size_t i = 0; i < inner; ++i) line[i] *= f;
      }
    }
  }

  GuruPlan plan(data.data(), n, outer, inner,
                forward ? FFTW_FORWARD : FFTW_BACKWARD);
  plan.execute();

  if (forward) {
    for (std::size_t o = 0; o < outer; ++o) {
      for (int m = 0; m < n; ++m) {
        const cplx f = phase[m] * (g.spacing() / root_two_pi);
        cplx* line = data.data() + (o * n + m) * inner;
        for (std::size_t i = 0; i < inner; ++i) line[i] *= f;
      }
    }
  }
  state.set_basis_tag(axis, target);
}

HybridState to_momentum(HybridState state, int axis) {
  if (state.basis(axis) != Basis::position) {
    throw std::invalid_argument("to_momentum: axis " + std::to_string(axis) +
                                " is already in the momentum basis");
  }
  transform_axis_inplace(state, axis, Basis::momentum);
  return state;
}

HybridState to_position(HybridState state, int axis) {
  if (state.basis(axis) != Basis::momentum) {
    throw std::invalid_argument("to_position: axis " + std::to_string(axis) +
                                " is already in the position basis");
  }
  transform_axis_inplace(state, axis, Basis::position);
  return state;
}

HybridState to_basis(HybridState state, int axis, Basis target) {
  transform_axis_inplace(state, axis, target);
  return state;
}

HybridState spectral_derivative(HybridState state, int axis) {
  const Basis entry = state.basis(axis);
  transform_axis_inplace(state, axis, Basis::momentum);
  const RegisterLayout& layout = state.layout();
  const Grid1D& g = layout.axis_grid(axis);
  const int n = g.n;
  const std::size_t inner = layout.inner_extent(axis);
  const std::size_t outer = layout.amplitude_count() / (inner * n);
  auto data = state.amplitudes();
  for (std::size_t o = 0; o < outer; ++o) {
    for (int m = 0; m < n; ++m) {
      const double p = g.momentum(m);
      cplx* line = data.data() + (o * n + m) * inner;
      for (std::size_t i = 0; i < inner; ++i) line[i] *= cplx(0.0, p);
    }
  }
  transform_axis_inplace(state, axis, entry);
  return state;
}

HybridState to_basis_all(HybridState state, Basis target) {
  for (int a = 0; a < state.layout().axis_count(); ++a) {
    transform_axis_inplace(state, a, target);
  }
  return state;
}

}  // namespace relaxq
