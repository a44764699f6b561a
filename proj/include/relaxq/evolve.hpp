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
#include <vector>

#include "relaxq/operator_terms.hpp"
#include "relaxq/relaxation.hpp"
#include "relaxq/schrodingerise.hpp"

namespace relaxq {

enum class Scheme { strang, lie };

struct EvolutionConfig {
  double dt = 1e-3;
  double t_final = 0.0;
  Scheme scheme = Scheme::strang;

  // Throws std::invalid_argument on dt <= 0, t_final < 0 or dt > t_final > 0.
  void validate() const;
  // ceil(t_final / dt): the realised step t_final / steps never exceeds dt.
  int steps() const;
  double step() const;
};

// min(0.1 * min_j eps_j^2, 1e-3): resolves the stiff relaxation rate.
double default_time_step(const RelaxationSystem& sys);

// Called after every step with (t, ||psi||).
using StepObserver = std::function<void(double, double)>;

// exp(-i H t) psi0 by splitting H = (terms with 1_eta) + (terms with eta).
// In the joint spatial-momentum / ancilla-momentum basis both parts are
// K x K blocks per grid point and are exponentiated exactly through
// Hermitian eigendecompositions. Requires a Hermitian-tagged H with
// momentum-only mode factors and an ancilla axis.
HybridState propagate_unitary(const OperatorTermList& H, const HybridState& psi0,
                              const EvolutionConfig& cfg, const StepObserver& observer = {});

// exp(-i (A1 - i A2) t) w0 exactly per spatial momentum point (Pade
// scaling-and-squaring of each dense K x K block); no ancilla.
HybridState propagate_nonunitary(const GeneratorSplit& gs, const HybridState& w0, double t);
HybridState propagate_nonunitary(const GeneratorSplit& gs, const HybridState& w0,
                                 const EvolutionConfig& cfg);

// Exact semi-discrete solution of u_t = D:grad grad u + gamma.grad u - r u
// via the Fourier symbol exp(t(-p^T D p + i gamma.p - r)). K = 1, no ancilla.
HybridState solve_parabolic_spectral(const ParabolicPDE& pde, const HybridState& u0, double t);

struct LayerSample {
  double t = 0.0;
  double residual = 0.0;
};

// ||v(t) + k eps u_x(t)|| for the 1D heat system started from (u0, v0) with
// v0 = 0, or v0 in local equilibrium when `equilibrium_start` is set.
std::vector<LayerSample> initial_layer_profile(const RelaxationSystem& sys,
                                               const HybridState& u0,
                                               const std::vector<double>& times,
                                               bool equilibrium_start = false);

// Slope of ln(residual) against t over samples whose residual is at least
// `floor_factor` times the final sample (excludes the closure floor).
double fit_decay_rate(const std::vector<LayerSample>& samples, double floor_factor = 10.0);

// (u0, 0, ..., 0) with K = d + 1 levels.
HybridState lift_scalar(const HybridState& u0, int qudit_levels);

}  // namespace relaxq
