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

#include <complex>
#include <vector>

namespace relaxq {

using cplx = std::complex<double>;

// Uniform periodic grid on [x_min, x_max) with n points x_j = x_min + j*h.
//
// Momentum values follow DFT storage order: index m < n/2 holds 2*pi*m/L,
// index m >= n/2 holds 2*pi*(m-n)/L, so the spectrum covers the symmetric
// range {-n/2, ..., n/2-1}.
struct Grid1D {
  int n = 0;
  double x_min = 0.0;
  double x_max = 0.0;

  double length() const { return x_max - x_min; }
  double spacing() const { return length() / n; }
  // Momentum-space spacing 2*pi/L; the weight of one momentum sample.
  double momentum_spacing() const;
  double point(int j) const { return x_min + j * spacing(); }
  std::vector<double> points() const;
  int momentum_index(int j) const { return j < n / 2 ? j : j - n; }
  double momentum(int j) const;

  bool operator==(const Grid1D& other) const = default;
};

Grid1D make_grid(int n, double x_min, double x_max);

// [-L/2, L/2).
Grid1D make_centered_grid(int n, double length);

// Symmetric grid with points at +-(j + 1/2) h; contains no point at zero.
// Used for the Schrodingerisation ancilla so that the two half-lines carry
// identical weight for even states.
Grid1D make_staggered_grid(int n, double length);

std::vector<double> momentum_values(const Grid1D& grid);

}  // namespace relaxq
