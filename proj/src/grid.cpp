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

#include "relaxq/grid.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace relaxq {

double Grid1D::momentum_spacing() const {
  return 2.0 * std::numbers::pi / length();
}

std::vector<double> Grid1D::points() const {
  std::vector<double> out(n);
  for (int j = 0; j < n; ++j) out[j] = point(j);
  return out;
}

double Grid1D::momentum(int j) const {
  return momentum_index(j) * momentum_spacing();
}

Grid1D make_grid(int n, double x_min, double x_max) {
  if (n < 2) {
    throw std::invalid_argument("make_grid: need at least 2 points, got " +
                                std::to_string(n));
  }
  if (!(x_max > x_min) || !std::isfinite(x_min) || !std::isfinite(x_max)) {
    throw std::invalid_argument("make_grid: empty or non-finite domain");
  }
  return Grid1D{n, x_min, x_max};
}

Grid1D make_centered_grid(int n, double length) {
  return make_grid(n, -0.5 * length, 0.5 * length);
}

Grid1D make_staggered_grid(int n, double length) {
  if (n < 2 || n % 2 != 0) {
    throw std::invalid_argument(
        "make_staggered_grid: need an even point count >= 2");
  }
  const double h = length / n;
  return make_grid(n, -0.5 * length + 0.5 * h, 0.5 * length + 0.5 * h);
}

std::vector<double> momentum_values(const Grid1D& grid) {
  std::vector<double> out(grid.n);
  for (int j = 0; j < grid.n; ++j) out[j] = grid.momentum(j);
  return out;
}

}  // namespace relaxq
