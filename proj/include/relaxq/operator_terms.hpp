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

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "relaxq/hybrid_state.hpp"

namespace relaxq {

// Dense K x K complex matrix acting on the qudit register.
class QuditMatrix {
 public:
  explicit QuditMatrix(Eigen::MatrixXcd m);

  static QuditMatrix zero(int k);
  static QuditMatrix identity(int k);
  // |j><j|
  static QuditMatrix projector(int k, int j);
  // |i><j| + |j><i|
  static QuditMatrix flip(int k, int i, int j);
  // i(|i><j| - |j><i|); Hermitian.
  static QuditMatrix antisymmetric_flip(int k, int i, int j);
  static QuditMatrix pauli_x();
  static QuditMatrix pauli_y();
  static QuditMatrix pauli_z();

  int dim() const { return static_cast<int>(m_.rows()); }
  const Eigen::MatrixXcd& matrix() const { return m_; }
  // max |M - M^dagger|
  double hermiticity_defect() const;
  bool is_hermitian(double tol = 1e-14) const {
    return hermiticity_defect() <= tol;
  }

 private:
  Eigen::MatrixXcd m_;
};

enum class ModeFactor { identity, momentum, position };
enum class AncillaFactor { identity, eta };

const char* to_string(ModeFactor f);
const char* to_string(AncillaFactor f);

// coefficient * qudit ⊗ (per-mode factors) ⊗ ancilla factor.
struct OperatorTerm {
  double coefficient = 0.0;
  QuditMatrix qudit = QuditMatrix::zero(1);
  std::vector<ModeFactor> modes;
  AncillaFactor ancilla = AncillaFactor::identity;
  // Free-form provenance label (e.g. "A1", "A2").
  std::string origin;

  // Index of the single non-identity spatial mode, or -1.
  int active_mode() const;
  ModeFactor active_factor() const;
};

// Structured operator sum. Each term couples the qudit to at most one
// spatial mode (plus optionally the ancilla).
class OperatorTermList {
 public:
  OperatorTermList(int qudit_levels, int dims);

  int qudit_levels() const { return levels_; }
  int dims() const { return dims_; }
  const std::vector<OperatorTerm>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }
  bool uses_ancilla() const;
  bool uses_position() const;

  // Validates shape and the one-mode rule; throws std::invalid_argument.
  void add(OperatorTerm term);
  // Convenience: `mode` = -1 for a purely qudit/ancilla term.
  void add(double coefficient, QuditMatrix qudit, int mode = -1,
           ModeFactor factor = ModeFactor::identity,
           AncillaFactor ancilla = AncillaFactor::identity,
           std::string origin = {});

  bool hermitian() const { return hermitian_; }
  // Verifies that, grouped by operator factors, the summed qudit matrices
  // are Hermitian (the factors are independent Hermitian operators, so this
  // is equivalent to Hermiticity of the full sum); throws otherwise.
  void mark_hermitian(double tol = 1e-14);
  double hermiticity_defect() const;

 private:
  int levels_;
  int dims_;
  bool hermitian_ = false;
  std::vector<OperatorTerm> terms_;
};

// Terms grouped by identical (mode, factor, ancilla) with summed qudit
// matrices; the canonical form used by the propagators.
struct TermGroup {
  int mode = -1;
  ModeFactor factor = ModeFactor::identity;
  AncillaFactor ancilla = AncillaFactor::identity;
  Eigen::MatrixXcd qudit;
};
std::vector<TermGroup> group_terms(const OperatorTermList& ops);

// ops * state. The result has the same basis tags as the input.
HybridState apply_terms(const OperatorTermList& ops, const HybridState& state);

// Dense matrix of `ops` on `layout` in the all-position basis (raw amplitude
// coordinates). Intended for small layouts; refuses more than `max_dim` rows.
Eigen::MatrixXcd assemble_dense(const OperatorTermList& ops,
                                const RegisterLayout& layout,
                                int max_dim = 4096);

// Dense representation of p (momentum) on one grid, position basis.
Eigen::MatrixXcd dense_momentum_operator(const Grid1D& grid);

}  // namespace relaxq
