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

#include <string>
#include <vector>

#include "relaxq/operator_terms.hpp"
#include "relaxq/relaxation.hpp"

namespace relaxq {

// A = A1 - i A2 with A1, A2 Hermitian; dw/dt = -i A w.
struct GeneratorSplit {
  OperatorTermList A1;
  OperatorTermList A2;
};

// Builds the split from a relaxation system and verifies that -i(A1 - iA2)
// reproduces system_rhs on a deterministic test state to 1e-10 relative.
GeneratorSplit assemble_generators(const RelaxationSystem& sys);

// Relative mismatch max|(A1 - iA2) w - i rhs(w)| / max|rhs(w)|.
double generator_reconstruction_error(const GeneratorSplit& gs, const RelaxationSystem& sys,
                                      const HybridState& w);

// H = A2 ⊗ eta + A1 ⊗ 1. A `rescale` factor divides every coefficient; the
// caller must then evolve for rescale * t.
OperatorTermList schrodingerise(const GeneratorSplit& gs, double rescale = 1.0);

struct AncillaState {
  enum class Kind { xi_exact, gaussian };
  Grid1D grid;
  std::vector<cplx> amplitudes;
  Kind kind = Kind::xi_exact;
  double s = 0.0;
  std::vector<std::string> warnings;

  double norm() const;
};

// Amplitudes proportional to e^{-|xi|}, unit norm.
AncillaState ancilla_xi(const Grid1D& grid);
// Amplitudes proportional to exp(-xi^2/(2 s^2)), unit norm.
AncillaState ancilla_gaussian(const Grid1D& grid, double s);
// Default ancilla grid: staggered, symmetric, no point at xi = 0.
Grid1D default_ancilla_grid(int n = 256, double length = 32.0);

// |<a|b>| with grid weights; grids must agree.
double ancilla_overlap(const AncillaState& a, const AncillaState& b);

// sqrt(2s) e^{s^2/2} pi^{1/4} erfc(s/sqrt 2), evaluated through a scaled
// complementary error function so it stays finite for large s.
double gaussian_fidelity(double s);
// Same overlap by grid quadrature on [x_min, x_max) with n points.
double gaussian_fidelity_quadrature(double s, int n = 4096, double x_min = -20.0,
                                    double x_max = 20.0);
// e^{z^2} erfc(z) for z >= 0.
double scaled_erfc(double z);

// w ⊗ ancilla; the ancilla becomes the last axis (position basis).
HybridState embed(const HybridState& w, const AncillaState& ancilla);

// Expansion of a K = 2 term list over {1, X, Y, Z} ⊗ factors.
struct PauliTerm {
  double coefficient = 0.0;
  char pauli = 'I';
  int mode = -1;
  ModeFactor factor = ModeFactor::identity;
  AncillaFactor ancilla = AncillaFactor::identity;
};
std::vector<PauliTerm> pauli_decompose(const OperatorTermList& ops, double tol = 1e-14);

}  // namespace relaxq
