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
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "relaxq/relaxation.hpp"

namespace relaxq {

// Malformed or unknown configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Layout exceeds the amplitude budget (CLI exit code 3).
class ResourceGuardError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numeric table with a fixed column order; rows sorted by the first column.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::string to_csv() const;
  std::vector<double> column(const std::string& name) const;
};

struct GridSpec {
  int n = 256;
  double x_min = -8.0;
  double x_max = 8.0;
};

constexpr std::size_t kDefaultAmplitudeBudget = std::size_t{1} << 24;

// ---- fidelity-scan ---------------------------------------------------------

struct FidelityScanConfig {
  double s_min = 0.1;
  double s_max = 3.0;
  double s_step = 0.005;
  // Explicit values override the range when non-empty.
  std::vector<double> s_values;
  int quadrature_points = 4096;
  double quadrature_half_width = 20.0;
};

struct FidelityScanResult {
  Table table;  // s, closed_form, quadrature
  double argmax = 0.0;
  double max = 0.0;
  double max_disagreement = 0.0;
};

FidelityScanResult run_fidelity_scan(const FidelityScanConfig& cfg);

// ---- eps-convergence -------------------------------------------------------

struct EpsConvergenceConfig {
  Flavor flavor = Flavor::heat1d;
  double k = 1.0;
  // Black-Scholes parameters (flavor black_scholes_1d).
  double rate = 0.05;
  double sigma = 1.0;
  std::vector<double> epsilons = {0.2, 0.1, 0.05, 0.025};
  double t = 0.5;
  GridSpec grid;
  double sigma0 = 0.5;
  double floor_factor = 10.0;
};

struct EpsConvergenceResult {
  Table table;  // eps, state_error, fitted_slope
  double slope = 0.0;
  int fitted_points = 0;
  // Oracle change between the n-point and 2n-point grids.
  double spatial_floor = 0.0;
  // Relative change of the smallest-eps error when the grid is doubled.
  double refinement_change = 0.0;
  std::vector<std::string> warnings;
};

EpsConvergenceResult run_epsilon_convergence(const EpsConvergenceConfig& cfg);

// ---- dim-scaling -----------------------------------------------------------

struct DimScalingConfig {
  std::vector<int> dims = {1, 2, 3};
  // Points per axis for each entry of `dims`; empty means grid.n for all.
  std::vector<int> points = {64, 64, 32};
  double eps = 0.1;
  double k = 1.0;
  double t = 0.5;
  GridSpec grid{64, -8.0, 8.0};
  double sigma0 = 0.5;
  std::size_t amplitude_budget = kDefaultAmplitudeBudget;
};

struct DimScalingResult {
  Table table;  // d, error, ratio (error / error at the smallest d)
};

DimScalingResult run_dimension_scaling(const DimScalingConfig& cfg);

// ---- initial-layer ---------------------------------------------------------

struct InitialLayerConfig {
  double eps = 0.05;
  double k = 1.0;
  int samples = 41;
  // Samples span [0, window * eps^2 * k].
  double window = 5.0;
  GridSpec grid;
  double sigma0 = 0.5;
  double floor_factor = 10.0;
};

struct InitialLayerResult {
  Table table;  // t, residual_zero_flux, residual_equilibrium
  double fitted_rate = 0.0;
  double expected_rate = 0.0;
  // max_t residual_equilibrium(t) / residual_equilibrium(t_final).
  double equilibrium_excursion = 0.0;
};

InitialLayerResult run_initial_layer(const InitialLayerConfig& cfg);

// ---- recovery --------------------------------------------------------------

struct RecoveryConfig {
  Flavor flavor = Flavor::heat1d;
  double k = 1.0;
  double rate = 0.05;
  double sigma = 1.0;
  double eps = 0.1;
  double t = 0.1;
  // 0 selects min(0.1 eps^2, 1e-3).
  double dt = 0.0;
  std::vector<int> ancilla_points = {64, 128, 256, 512};
  double ancilla_length = 48.0;
  GridSpec grid{64, -8.0, 8.0};
  double sigma0 = 0.5;
  double gaussian_s = 0.925;
  std::size_t amplitude_budget = kDefaultAmplitudeBudget;
};

struct RecoveryResult {
  // n_eta, recovery_error, probability, expected_probability,
  // total_probability, gaussian_error
  Table table;
  std::vector<std::string> warnings;
};

RecoveryResult run_recovery(const RecoveryConfig& cfg);

// ---- ham-report ------------------------------------------------------------

// Builds a relaxation system from a flavor-tagged parameter object, e.g.
// {"flavor": "heat_dd", "k": [1, 1], "eps": [0.1, 0.1]}.
RelaxationSystem system_from_config(const nlohmann::json& j);

// Qudit/qumode size line, e.g. "1 qudit (3 levels, qutrit) and 3 qumodes".
std::string system_size_line(int qudit_levels, int qumodes);

nlohmann::json run_hamiltonian_report(const RelaxationSystem& sys);

// ---- configuration parsing (strict: unknown keys are errors) ----------------

// Canonical experiment kinds: fidelity_scan, epsilon_convergence,
// dimension_scaling, initial_layer, recovery, hamiltonian_report.
struct ConfigEnvelope {
  std::string experiment;
  // Empty when the config does not name one.
  std::string output_dir;
  // Experiment parameters with the envelope keys removed.
  nlohmann::json params = nlohmann::json::object();
};

// Splits the optional "experiment" and "output_dir" keys off a config
// document; a named experiment must equal `expected_kind`.
ConfigEnvelope split_envelope(const nlohmann::json& doc, const std::string& expected_kind);

FidelityScanConfig parse_fidelity_scan(const nlohmann::json& j);
EpsConvergenceConfig parse_eps_convergence(const nlohmann::json& j);
DimScalingConfig parse_dim_scaling(const nlohmann::json& j);
InitialLayerConfig parse_initial_layer(const nlohmann::json& j);
RecoveryConfig parse_recovery(const nlohmann::json& j);

// Gaussian exp(-|x|^2 / (2 sigma0^2)) on a d-dimensional product grid.
HybridState gaussian_datum(int d, const GridSpec& grid, double sigma0);

}  // namespace relaxq
