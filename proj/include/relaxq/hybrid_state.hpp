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

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "relaxq/grid.hpp"

namespace relaxq {

enum class Basis { position, momentum };

// Qudit (K levels) x d spatial qumodes x optional ancilla qumode.
//
// Axis numbering: spatial axes are 0..d-1; the ancilla, when present, is
// axis d. Amplitudes are stored row-major with the qudit level outermost:
// (k, x_0, ..., x_{d-1}[, xi]).
struct RegisterLayout {
  int qudit_levels = 1;
  std::vector<Grid1D> spatial_grids;
  std::optional<Grid1D> ancilla_grid;

  int dims() const { return static_cast<int>(spatial_grids.size()); }
  bool has_ancilla() const { return ancilla_grid.has_value(); }
  int axis_count() const { return dims() + (has_ancilla() ? 1 : 0); }
  int ancilla_axis() const { return dims(); }
  const Grid1D& axis_grid(int axis) const;
  std::size_t points_per_level() const;
  std::size_t amplitude_count() const {
    return static_cast<std::size_t>(qudit_levels) * points_per_level();
  }
  // Product of the extents of axes strictly after `axis`.
  std::size_t inner_extent(int axis) const;

  bool operator==(const RegisterLayout& other) const = default;
};

RegisterLayout make_layout(int qudit_levels, std::vector<Grid1D> spatial_grids,
                           std::optional<Grid1D> ancilla_grid = std::nullopt);

class HybridState {
 public:
  // Zero state with every axis in the position basis.
  explicit HybridState(RegisterLayout layout);
  HybridState(RegisterLayout layout, std::vector<cplx> amplitudes,
              std::vector<Basis> bases = {});

  const RegisterLayout& layout() const { return layout_; }
  std::span<const cplx> amplitudes() const { return amplitudes_; }
  std::span<cplx> amplitudes() { return amplitudes_; }
  std::size_t size() const { return amplitudes_.size(); }

  // Amplitudes of one qudit level, all remaining axes flattened.
  std::span<const cplx> level(int k) const;
  std::span<cplx> level(int k);

  Basis basis(int axis) const { return bases_.at(axis); }
  const std::vector<Basis>& bases() const { return bases_; }
  void set_basis_tag(int axis, Basis b) { bases_.at(axis) = b; }

  // Quadrature weight of a single amplitude: product over axes of the grid
  // spacing (position) or 2*pi/L (momentum). Discrete norms approximate L2.
  double cell_weight() const;
  double norm_squared() const;
  double norm() const;

  void scale(cplx factor);
  // this += a * other; layouts and bases must agree.
  void add_scaled(cplx a, const HybridState& other);

 private:
  RegisterLayout layout_;
  std::vector<cplx> amplitudes_;
  std::vector<Basis> bases_;
};

// Weighted inner product <a, b>; both states must share layout and bases.
cplx inner_product(const HybridState& a, const HybridState& b);

// Normalised L2 distance || a/|a| - b/|b| || between two states.
double normalized_distance(const HybridState& a, const HybridState& b);

// Discrete Fourier transform along one axis using <x|p> = e^{ixp}/sqrt(2 pi):
//   psi_hat(p_m) = h/sqrt(2 pi) * sum_j psi(x_j) e^{-i p_m x_j}.
// Preserves the weighted norm.
HybridState to_momentum(HybridState state, int axis);
HybridState to_position(HybridState state, int axis);
HybridState to_basis(HybridState state, int axis, Basis target);
// Every axis to `target`.
HybridState to_basis_all(HybridState state, Basis target);

// In-place variants used by the propagators.
void transform_axis_inplace(HybridState& state, int axis, Basis target);

// Spectral derivative along `axis` (multiplication by i p in momentum
// space). Basis tags of the result match the input.
HybridState spectral_derivative(HybridState state, int axis);

}  // namespace relaxq
