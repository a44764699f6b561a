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

#include <functional>

#include "relaxq/hybrid_state.hpp"

namespace relaxq {

// Post-selection convention. The ancilla is stored on its warped xi grid,
// where the embedded solution occupies the half-line xi < 0 as slices
// e^{-|xi|} w(t). The measured quadrature value is eta_m = -xi, so the
// accepted set eta_m > 0 is the grid half xi < 0 (the staggered ancilla
// grid contains no xi = 0 point).

struct MeasurementOutcome {
  HybridState state;
  // ||projected amplitudes||^2 / ||input||^2.
  double probability = 0.0;
  bool renormalized = false;
};

// Optional acceptance weight g(eta_m) applied to accepted amplitudes.
using EtaWeight = std::function<double(double)>;

// Projects the ancilla onto the accepted half-line and keeps the ancilla
// axis (the result is returned in the input's basis tags).
MeasurementOutcome project_ancilla_half_line(const HybridState& psi, const EtaWeight& g = {},
                                             bool renormalize = false);

// Projects onto the accepted half-line and collapses the accepted slices
// to the remaining registers with the weighted least-squares rule
//   w = sum_j g_j e^{-eta_j} s_j / sum_j g_j e^{-2 eta_j}.
// Without renormalisation the result estimates w(t) itself.
MeasurementOutcome postselect_eta_positive(const HybridState& psi, const EtaWeight& g = {},
                                           bool renormalize = false);

// Keeps qudit level `level`; the result has K = 1.
MeasurementOutcome project_qudit(const HybridState& psi, int level, bool renormalize = false);

struct Recovery {
  HybridState u;
  double postselect_probability = 0.0;
  double qudit_probability = 0.0;
  double total_probability = 0.0;
};

// postselect_eta_positive followed by project_qudit(0), unnormalised.
Recovery recover_u(const HybridState& psi, const EtaWeight& g = {});

struct SliceCheck {
  double eta1 = 0.0;
  double eta2 = 0.0;
  // ||s(eta1)|| / ||s(eta2)|| versus e^{-(eta1 - eta2)}.
  double ratio = 0.0;
  double expected = 0.0;
  // ||s1 - proj_{s2} s1|| / ||s1||: zero when the slices are parallel.
  double parallel_residual = 0.0;
};

// Compares the accepted slices nearest to eta1 and eta2.
SliceCheck slice_proportionality(const HybridState& psi, double eta1, double eta2);

}  // namespace relaxq
