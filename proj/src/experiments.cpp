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

#include "relaxq/experiments.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <sstream>
#include <utility>

#include "relaxq/evolve.hpp"
#include "relaxq/json_io.hpp"
#include "relaxq/measure.hpp"
#include "relaxq/schrodingerise.hpp"
#include "relaxq/stats.hpp"

namespace relaxq {

using nlohmann::json;

namespace {

// Reads typed fields from a JSON object and rejects keys nobody asked for.
class StrictObject {
 public:
  StrictObject(const json& j, std::string context) : j_(j), context_(std::move(context)) {
    if (!j_.is_object()) throw ConfigError(context_ + ": expected a JSON object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  double number(const std::string& key, double fallback) {
    if (!take(key)) return fallback;
    return as_number(j_.at(key), key);
  }

  double required_number(const std::string& key) {
    require(key);
    return number(key, 0.0);
  }

  int integer(const std::string& key, int fallback) {
    if (!take(key)) return fallback;
    return as_integer(j_.at(key), key);
  }

  std::string string(const std::string& key, const std::string& fallback) {
    if (!take(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_string()) throw ConfigError(where(key) + ": expected a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const std::string& key, std::vector<double> fallback) {
    if (!take(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_array()) throw ConfigError(where(key) + ": expected an array of numbers");
    std::vector<double> out;
    for (const json& e : v) out.push_back(as_number(e, key));
    return out;
  }

  std::vector<int> integers(const std::string& key, std::vector<int> fallback) {
    if (!take(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_array()) throw ConfigError(where(key) + ": expected an array of integers");
    std::vector<int> out;
    for (const json& e : v) out.push_back(as_integer(e, key));
    return out;
  }

  Eigen::VectorXd vector(const std::string& key) {
    require(key);
    const std::vector<double> v = numbers(key, {});
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
  }

  Eigen::MatrixXd matrix(const std::string& key) {
    require(key);
    take(key);
    const json& v = j_.at(key);
    if (!v.is_array() || v.empty()) throw ConfigError(where(key) + ": expected a square matrix");
    const auto n = static_cast<Eigen::Index>(v.size());
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const json& row = v[static_cast<std::size_t>(i)];
      if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) {
        throw ConfigError(where(key) + ": expected a square matrix");
      }
      for (Eigen::Index k = 0; k < n; ++k) m(i, k) = as_number(row[static_cast<std::size_t>(k)], key);
    }
    return m;
  }

  const json& object(const std::string& key) {
    take(key);
    return j_.at(key);
  }

  // Throws on any key that was never read.
  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError(context_ + ": unknown field '" + it.key() + "'");
    }
  }

 private:
  std::string where(const std::string& key) const { return context_ + "." + key; }

  void require(const std::string& key) const {
    if (!j_.contains(key)) throw ConfigError(where(key) + ": required field missing");
  }

  bool take(const std::string& key) {
    if (!j_.contains(key)) return false;
    seen_.insert(key);
    return true;
  }

  double as_number(const json& v, const std::string& key) const {
    if (!v.is_number()) throw ConfigError(where(key) + ": expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(where(key) + ": not finite");
    return x;
  }

  int as_integer(const json& v, const std::string& key) const {
    if (!v.is_number_integer()) throw ConfigError(where(key) + ": expected an integer");
    const auto x = v.get<long long>();
    if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) {
      throw ConfigError(where(key) + ": integer out of range");
    }
    return static_cast<int>(x);
  }

  const json& j_;
  std::string context_;
  std::set<std::string> seen_;
};

void check(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

void check_eps(double eps, const std::string& context) {
  check(eps > 0.0 && eps < 1.0, context + ": eps must lie in (0, 1)");
}

GridSpec parse_grid(StrictObject& o, const GridSpec& fallback, const std::string& context) {
  if (!o.has("grid")) return fallback;
  StrictObject g(o.object("grid"), context + ".grid");
  GridSpec spec;
  spec.n = g.integer("n", fallback.n);
  spec.x_min = g.number("x_min", fallback.x_min);
  spec.x_max = g.number("x_max", fallback.x_max);
  g.finish();
  check(spec.n >= 4 && spec.n % 2 == 0, context + ".grid.n must be an even integer >= 4");
  check(spec.x_max > spec.x_min, context + ".grid: x_max must exceed x_min");
  return spec;
}

Flavor parse_flavor(const std::string& name, const std::string& context) {
  try {
    return flavor_from_string(name);
  } catch (const std::invalid_argument&) {
    throw ConfigError(context + ": unknown flavor '" + name + "'");
  }
}

std::size_t checked_count(const std::vector<std::size_t>& factors) {
  std::size_t total = 1;
  for (std::size_t f : factors) {
    if (f != 0 && total > std::numeric_limits<std::size_t>::max() / f) {
      return std::numeric_limits<std::size_t>::max();
    }
    total *= f;
  }
  return total;
}

void guard(std::size_t amplitudes, std::size_t budget, const std::string& what) {
  if (amplitudes > budget) {
    throw ResourceGuardError(what + ": layout needs " + std::to_string(amplitudes) +
                             " amplitudes, above the budget of " + std::to_string(budget));
  }
}

void sort_rows(Table& t) {
  std::stable_sort(t.rows.begin(), t.rows.end(),
                   [](const std::vector<double>& a, const std::vector<double>& b) {
                     return a.front() < b.front();
                   });
}

HybridState level_zero(const HybridState& w, const RegisterLayout& scalar_layout) {
  const auto lvl = w.level(0);
  return HybridState(scalar_layout, std::vector<cplx>(lvl.begin(), lvl.end()));
}

// Relative normalized-state error of the relaxed u against the parabolic oracle.
double relaxation_error(const RelaxationSystem& sys, const HybridState& u0, double t) {
  const GeneratorSplit gs = assemble_generators(sys);
  const HybridState w = propagate_nonunitary(gs, lift_scalar(u0, sys.qudit_levels()), t);
  const HybridState ref = solve_parabolic_spectral(sys.target, u0, t);
  return normalized_distance(level_zero(w, u0.layout()), ref);
}

RelaxationSystem one_d_system(Flavor flavor, double k, double rate, double sigma, double eps) {
  switch (flavor) {
    case Flavor::heat1d:
      return build_heat_1d(k, eps);
    case Flavor::black_scholes_1d:
      return build_black_scholes_1d(rate, sigma, eps);
    default:
      throw ConfigError(std::string("flavor ") + to_string(flavor) +
                        " is not supported here (use heat1d or black_scholes_1d)");
  }
}

// Slowest relaxation time 1 / min(lambda) times ln(1/eps).
double initial_layer_time(const RelaxationSystem& sys) {
  const double eps = sys.epsilons.maxCoeff();
  return std::log(1.0 / eps) / sys.lambda.minCoeff();
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

const char* level_name(int levels) {
  switch (levels) {
    case 2:
      return "qubit";
    case 3:
      return "qutrit";
    case 4:
      return "ququart";
    default:
      return nullptr;
  }
}

// Family label for a Hamiltonian term, read off its structure.
std::string term_family(const OperatorTerm& t) {
  const Eigen::MatrixXcd& q = t.qudit.matrix();
  const bool diagonal = q.isDiagonal(0.0);
  if (t.ancilla == AncillaFactor::eta) {
    if (!diagonal) return "source";
    return std::abs(q(0, 0)) > 0.0 ? "decay" : "relaxation";
  }
  if (t.active_mode() < 0) return "source";
  return diagonal ? "convection" : "transport";
}

}  // namespace

// ---- Table -----------------------------------------------------------------

std::string Table::to_csv() const {
  std::string out;
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (c) out += ',';
    out += columns[c];
  }
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += format_double(row[c]);
    }
    out += '\n';
  }
  return out;
}

std::vector<double> Table::column(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw std::out_of_range("Table::column: no column '" + name + "'");
  const auto c = static_cast<std::size_t>(it - columns.begin());
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& row : rows) out.push_back(row.at(c));
  return out;
}

HybridState gaussian_datum(int d, const GridSpec& grid, double sigma0) {
  if (d < 1) throw std::invalid_argument("gaussian_datum: d must be >= 1");
  if (!(sigma0 > 0.0)) throw std::invalid_argument("gaussian_datum: sigma0 must be > 0");
  const Grid1D g = make_grid(grid.n, grid.x_min, grid.x_max);
  const RegisterLayout layout = make_layout(1, std::vector<Grid1D>(static_cast<std::size_t>(d), g));
  std::vector<double> f(static_cast<std::size_t>(g.n));
  for (int j = 0; j < g.n; ++j) {
    const double x = g.point(j);
    f[static_cast<std::size_t>(j)] = std::exp(-x * x / (2.0 * sigma0 * sigma0));
  }
  std::vector<cplx> a(layout.amplitude_count());
  const auto n = static_cast<std::size_t>(g.n);
  for (std::size_t i = 0; i < a.size(); ++i) {
    std::size_t rest = i;
    double v = 1.0;
    for (int j = 0; j < d; ++j) {
      v *= f[rest % n];
      rest /= n;
    }
    a[i] = v;
  }
  return HybridState(layout, std::move(a));
}

// ---- fidelity-scan ---------------------------------------------------------

FidelityScanResult run_fidelity_scan(const FidelityScanConfig& cfg) {
  std::vector<double> s = cfg.s_values;
  if (s.empty()) {
    const auto count = static_cast<int>(std::floor((cfg.s_max - cfg.s_min) / cfg.s_step + 1e-9)) + 1;
    for (int i = 0; i < count; ++i) s.push_back(cfg.s_min + i * cfg.s_step);
  }
  if (s.empty()) throw ConfigError("fidelity_scan: empty s list");
  std::sort(s.begin(), s.end());

  FidelityScanResult res;
  res.table.columns = {"s", "closed_form", "quadrature"};
  res.max = -1.0;
  for (double v : s) {
    const double closed = gaussian_fidelity(v);
    const double quad = gaussian_fidelity_quadrature(v, cfg.quadrature_points,
                                                     -cfg.quadrature_half_width,
                                                     cfg.quadrature_half_width);
    res.table.rows.push_back({v, closed, quad});
    res.max_disagreement = std::max(res.max_disagreement, std::abs(closed - quad));
    if (closed > res.max) {
      res.max = closed;
      res.argmax = v;
    }
  }
  return res;
}

// ---- eps-convergence -------------------------------------------------------

EpsConvergenceResult run_epsilon_convergence(const EpsConvergenceConfig& cfg) {
  if (cfg.epsilons.size() < 2) throw ConfigError("epsilon_convergence: need at least two eps values");
  std::vector<double> eps = cfg.epsilons;
  std::sort(eps.begin(), eps.end());

  EpsConvergenceResult res;
  std::vector<RelaxationSystem> systems;
  for (double e : eps) systems.push_back(one_d_system(cfg.flavor, cfg.k, cfg.rate, cfg.sigma, e));
  double layer = 0.0;
  for (const auto& sys : systems) layer = std::max(layer, initial_layer_time(sys));
  if (cfg.t <= layer) {
    throw ConfigError("epsilon_convergence: t = " + format_double(cfg.t) +
                      " lies inside the initial layer (t <= " + format_double(layer) +
                      "); the relaxed solution has not reached the diffusive regime");
  }
  if (cfg.t < 5.0 * layer) {
    res.warnings.push_back("t = " + format_double(cfg.t) + " is within 5x the initial-layer time " +
                           format_double(layer) + "; errors may carry layer transients");
  }

  const HybridState u0 = gaussian_datum(1, cfg.grid, cfg.sigma0);
  GridSpec fine = cfg.grid;
  fine.n *= 2;
  const HybridState u0_fine = gaussian_datum(1, fine, cfg.sigma0);

  // Spatial floor: the oracle on n points against the 2n-point oracle at the shared nodes.
  {
    const HybridState ref = solve_parabolic_spectral(systems.front().target, u0, cfg.t);
    const HybridState ref_fine = solve_parabolic_spectral(systems.front().target, u0_fine, cfg.t);
    std::vector<cplx> sub(static_cast<std::size_t>(cfg.grid.n));
    for (std::size_t j = 0; j < sub.size(); ++j) sub[j] = ref_fine.amplitudes()[2 * j];
    res.spatial_floor = normalized_distance(ref, HybridState(u0.layout(), std::move(sub)));
  }

  std::vector<double> errors;
  for (const auto& sys : systems) errors.push_back(relaxation_error(sys, u0, cfg.t));

  const double fine_error = relaxation_error(systems.front(), u0_fine, cfg.t);
  res.refinement_change = std::abs(fine_error - errors.front()) / errors.front();

  std::vector<double> fx;
  std::vector<double> fy;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (errors[i] > cfg.floor_factor * res.spatial_floor) {
      fx.push_back(eps[i]);
      fy.push_back(errors[i]);
    } else {
      res.warnings.push_back("eps = " + format_double(eps[i]) +
                             " excluded from the fit: error within the spatial floor");
    }
  }
  if (fx.size() >= 2) {
    const LinearFit fit = loglog_fit(fx, fy);
    res.slope = fit.slope;
    res.fitted_points = fit.points;
  } else {
    res.slope = std::numeric_limits<double>::quiet_NaN();
    res.warnings.push_back("fewer than two eps values above the floor; slope undefined");
  }

  res.table.columns = {"eps", "state_error", "fitted_slope"};
  for (std::size_t i = 0; i < eps.size(); ++i) res.table.rows.push_back({eps[i], errors[i], res.slope});
  sort_rows(res.table);
  return res;
}

// ---- dim-scaling -----------------------------------------------------------

DimScalingResult run_dimension_scaling(const DimScalingConfig& cfg) {
  if (cfg.dims.empty()) throw ConfigError("dimension_scaling: empty d list");
  if (!cfg.points.empty() && cfg.points.size() != cfg.dims.size()) {
    throw ConfigError("dimension_scaling: points must match dims in length");
  }
  std::vector<std::pair<int, int>> runs;
  for (std::size_t i = 0; i < cfg.dims.size(); ++i) {
    runs.emplace_back(cfg.dims[i], cfg.points.empty() ? cfg.grid.n : cfg.points[i]);
  }
  std::sort(runs.begin(), runs.end());
  // Refuse before any computation starts.
  for (const auto& [d, n] : runs) {
    std::vector<std::size_t> f(static_cast<std::size_t>(d), static_cast<std::size_t>(n));
    f.push_back(static_cast<std::size_t>(d + 1));
    guard(checked_count(f), cfg.amplitude_budget, "dimension_scaling d=" + std::to_string(d));
  }

  DimScalingResult res;
  res.table.columns = {"d", "error", "ratio"};
  double base = 0.0;
  for (const auto& [d, n] : runs) {
    GridSpec grid = cfg.grid;
    grid.n = n;
    const RelaxationSystem sys = build_heat_dd(Eigen::VectorXd::Constant(d, cfg.k),
                                               Eigen::VectorXd::Constant(d, cfg.eps));
    const double err = relaxation_error(sys, gaussian_datum(d, grid, cfg.sigma0), cfg.t);
    if (base == 0.0) base = err;
    res.table.rows.push_back({static_cast<double>(d), err, err / base});
  }
  return res;
}

// ---- initial-layer ---------------------------------------------------------

InitialLayerResult run_initial_layer(const InitialLayerConfig& cfg) {
  const RelaxationSystem sys = build_heat_1d(cfg.k, cfg.eps);
  const HybridState u0 = gaussian_datum(1, cfg.grid, cfg.sigma0);
  const double t_end = cfg.window * cfg.eps * cfg.eps * cfg.k;
  std::vector<double> times;
  for (int i = 0; i < cfg.samples; ++i) times.push_back(t_end * i / (cfg.samples - 1));

  const auto zero_flux = initial_layer_profile(sys, u0, times, false);
  const auto equilibrium = initial_layer_profile(sys, u0, times, true);

  InitialLayerResult res;
  res.table.columns = {"t", "residual_zero_flux", "residual_equilibrium"};
  double peak = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    res.table.rows.push_back({times[i], zero_flux[i].residual, equilibrium[i].residual});
    peak = std::max(peak, equilibrium[i].residual);
  }
  res.fitted_rate = fit_decay_rate(zero_flux, cfg.floor_factor);
  res.expected_rate = -1.0 / (cfg.eps * cfg.eps * cfg.k);
  res.equilibrium_excursion = peak / equilibrium.back().residual;
  return res;
}

// ---- recovery --------------------------------------------------------------

RecoveryResult run_recovery(const RecoveryConfig& cfg) {
  if (cfg.ancilla_points.empty()) throw ConfigError("recovery: empty ancilla resolution list");
  std::vector<int> resolutions = cfg.ancilla_points;
  std::sort(resolutions.begin(), resolutions.end());
  const RelaxationSystem sys = one_d_system(cfg.flavor, cfg.k, cfg.rate, cfg.sigma, cfg.eps);
  for (int ne : resolutions) {
    guard(checked_count({static_cast<std::size_t>(sys.qudit_levels()),
                         static_cast<std::size_t>(cfg.grid.n), static_cast<std::size_t>(ne)}),
          cfg.amplitude_budget, "recovery n_eta=" + std::to_string(ne));
  }

  RecoveryResult res;
  const GeneratorSplit gs = assemble_generators(sys);
  const OperatorTermList H = schrodingerise(gs);
  const HybridState u0 = gaussian_datum(1, cfg.grid, cfg.sigma0);
  const HybridState w0 = lift_scalar(u0, sys.qudit_levels());
  const HybridState truth = propagate_nonunitary(gs, w0, cfg.t);
  const HybridState u_truth = level_zero(truth, u0.layout());
  const double expected = 0.5 * truth.norm_squared() / w0.norm_squared();

  // Slices drift along the ancilla axis at the A2 eigenvalues; warn when the
  // fastest one carries visible amplitude across the periodic boundary.
  Eigen::MatrixXcd a2 = Eigen::MatrixXcd::Zero(sys.qudit_levels(), sys.qudit_levels());
  for (const auto& term : gs.A2.terms()) a2 += term.coefficient * term.qudit.matrix();
  const double drift = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(a2).eigenvalues().cwiseAbs().maxCoeff();
  const double margin = 0.5 * cfg.ancilla_length - drift * cfg.t;
  if (std::exp(-margin) > 1e-6) {
    res.warnings.push_back("ancilla length " + format_double(cfg.ancilla_length) +
                           " leaves boundary amplitude " + format_double(std::exp(-margin)) +
                           " after drift; increase ancilla_length");
  }

  EvolutionConfig evo;
  evo.dt = cfg.dt > 0.0 ? cfg.dt : default_time_step(sys);
  evo.t_final = cfg.t;

  res.table.columns = {"n_eta", "recovery_error", "probability", "expected_probability",
                       "total_probability", "gaussian_error"};
  for (int ne : resolutions) {
    const Grid1D ag = make_staggered_grid(ne, cfg.ancilla_length);
    const AncillaState exact = ancilla_xi(ag);
    const AncillaState gauss = ancilla_gaussian(ag, cfg.gaussian_s);
    for (const auto& w : exact.warnings) res.warnings.push_back("n_eta=" + std::to_string(ne) + ": " + w);
    const Recovery rec = recover_u(propagate_unitary(H, embed(w0, exact), evo));
    const Recovery rec_g = recover_u(propagate_unitary(H, embed(w0, gauss), evo));
    res.table.rows.push_back({static_cast<double>(ne), normalized_distance(rec.u, u_truth),
                              rec.postselect_probability, expected, rec.total_probability,
                              normalized_distance(rec_g.u, u_truth)});
  }
  return res;
}

// ---- ham-report ------------------------------------------------------------

RelaxationSystem system_from_config(const json& j) {
  StrictObject o(j, "system");
  const Flavor flavor = parse_flavor(o.string("flavor", ""), "system.flavor");
  RelaxationSystem sys;
  try {
    switch (flavor) {
      case Flavor::heat1d: {
        const double k = o.number("k", 1.0);
        const double eps = o.required_number("eps");
        o.finish();
        sys = build_heat_1d(k, eps);
        break;
      }
      case Flavor::heat_dd: {
        const Eigen::VectorXd k = o.vector("k");
        const Eigen::VectorXd eps = o.vector("eps");
        o.finish();
        sys = build_heat_dd(k, eps);
        break;
      }
      case Flavor::black_scholes_1d: {
        const double r = o.required_number("r");
        const double sigma = o.required_number("sigma");
        const double eps = o.required_number("eps");
        o.finish();
        sys = build_black_scholes_1d(r, sigma, eps);
        break;
      }
      case Flavor::black_scholes_dd: {
        const double r = o.required_number("r");
        const Eigen::VectorXd mu = o.vector("mu");
        const Eigen::VectorXd sigma = o.vector("sigma");
        const Eigen::VectorXd kappa = o.vector("kappa");
        const Eigen::VectorXd eps = o.vector("eps");
        o.finish();
        sys = build_black_scholes_dd(r, mu, sigma, kappa, eps);
        break;
      }
      case Flavor::fokker_planck: {
        const Eigen::VectorXd mu = o.vector("mu");
        const Eigen::VectorXd D = o.vector("D");
        const Eigen::VectorXd eps = o.vector("eps");
        o.finish();
        sys = build_fokker_planck(mu, D, eps);
        break;
      }
      case Flavor::general: {
        const Eigen::MatrixXd D = o.matrix("D");
        const Eigen::VectorXd gamma = o.vector("gamma");
        const double r = o.number("r", 0.0);
        const Eigen::VectorXd eps = o.vector("eps");
        o.finish();
        sys = build_general_parabolic(make_parabolic(D, gamma, r), eps);
        break;
      }
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("system: ") + e.what());
  }
  return sys;
}

std::string system_size_line(int qudit_levels, int qumodes) {
  std::string line = "1 qudit (" + std::to_string(qudit_levels) + " levels";
  if (const char* name = level_name(qudit_levels)) line += std::string(", ") + name;
  line += ") and " + std::to_string(qumodes) + (qumodes == 1 ? " qumode" : " qumodes");
  return line;
}

json run_hamiltonian_report(const RelaxationSystem& sys) {
  const OperatorTermList H = schrodingerise(assemble_generators(sys));
  json report;
  report["flavor"] = to_string(sys.flavor);
  report["qudit_levels"] = sys.qudit_levels();
  report["qumodes"] = sys.d + 1;
  report["system_size"] = system_size_line(sys.qudit_levels(), sys.d + 1);
  json terms = json::array();
  for (const OperatorTerm& t : H.terms()) {
    json entries = json::array();
    const Eigen::MatrixXcd& q = t.qudit.matrix();
    for (Eigen::Index r = 0; r < q.rows(); ++r) {
      for (Eigen::Index c = 0; c < q.cols(); ++c) {
        if (q(r, c) != cplx(0.0, 0.0)) {
          entries.push_back({{"row", r}, {"col", c}, {"re", q(r, c).real()}, {"im", q(r, c).imag()}});
        }
      }
    }
    json term;
    term["coefficient"] = t.coefficient;
    term["qudit"] = std::move(entries);
    term["mode"] = t.active_mode();
    term["factor"] = to_string(t.active_factor());
    term["ancilla"] = to_string(t.ancilla);
    term["source"] = t.origin;
    term["family"] = term_family(t);
    terms.push_back(std::move(term));
  }
  report["terms"] = std::move(terms);
  if (sys.qudit_levels() == 2) {
    json pauli = json::array();
    for (const PauliTerm& p : pauli_decompose(H)) {
      pauli.push_back({{"coefficient", p.coefficient},
                       {"pauli", std::string(1, p.pauli)},
                       {"mode", p.mode},
                       {"factor", to_string(p.factor)},
                       {"ancilla", to_string(p.ancilla)}});
    }
    report["pauli_terms"] = std::move(pauli);
  }
  report["system"] = to_json(sys);
  return report;
}

// ---- configuration parsing -------------------------------------------------

ConfigEnvelope split_envelope(const json& doc, const std::string& expected_kind) {
  if (!doc.is_object()) throw ConfigError("config: expected a JSON object at the top level");
  ConfigEnvelope env;
  env.params = doc;
  env.experiment = expected_kind;
  if (doc.contains("experiment")) {
    const json& v = doc.at("experiment");
    if (!v.is_string()) throw ConfigError("config.experiment: expected a string");
    if (v.get<std::string>() != expected_kind) {
      throw ConfigError("config.experiment: '" + v.get<std::string>() + "' does not match '" +
                        expected_kind + "'");
    }
    env.params.erase("experiment");
  }
  if (doc.contains("output_dir")) {
    const json& v = doc.at("output_dir");
    if (!v.is_string()) throw ConfigError("config.output_dir: expected a string");
    env.output_dir = v.get<std::string>();
    env.params.erase("output_dir");
  }
  return env;
}

FidelityScanConfig parse_fidelity_scan(const json& j) {
  StrictObject o(j, "fidelity_scan");
  FidelityScanConfig c;
  c.s_min = o.number("s_min", c.s_min);
  c.s_max = o.number("s_max", c.s_max);
  c.s_step = o.number("s_step", c.s_step);
  c.s_values = o.numbers("s_values", c.s_values);
  c.quadrature_points = o.integer("quadrature_points", c.quadrature_points);
  c.quadrature_half_width = o.number("quadrature_half_width", c.quadrature_half_width);
  o.finish();
  if (c.s_values.empty()) {
    check(c.s_step > 0.0, "fidelity_scan.s_step must be > 0");
    check(c.s_min > 0.0 && c.s_max >= c.s_min, "fidelity_scan: need 0 < s_min <= s_max");
  }
  for (double s : c.s_values) check(s > 0.0, "fidelity_scan.s_values must be > 0");
  check(c.quadrature_points >= 16, "fidelity_scan.quadrature_points must be >= 16");
  check(c.quadrature_half_width > 0.0, "fidelity_scan.quadrature_half_width must be > 0");
  return c;
}

EpsConvergenceConfig parse_eps_convergence(const json& j) {
  StrictObject o(j, "epsilon_convergence");
  EpsConvergenceConfig c;
  c.flavor = parse_flavor(o.string("flavor", to_string(c.flavor)), "epsilon_convergence.flavor");
  c.k = o.number("k", c.k);
  c.rate = o.number("r", c.rate);
  c.sigma = o.number("sigma", c.sigma);
  c.epsilons = o.numbers("eps", c.epsilons);
  c.t = o.number("t", c.t);
  c.grid = parse_grid(o, c.grid, "epsilon_convergence");
  c.sigma0 = o.number("sigma0", c.sigma0);
  c.floor_factor = o.number("floor_factor", c.floor_factor);
  o.finish();
  check(c.flavor == Flavor::heat1d || c.flavor == Flavor::black_scholes_1d,
        "epsilon_convergence.flavor must be heat1d or black_scholes_1d");
  check(c.k > 0.0, "epsilon_convergence.k must be > 0");
  check(c.sigma > 0.0, "epsilon_convergence.sigma must be > 0");
  check(c.epsilons.size() >= 2, "epsilon_convergence.eps needs at least two values");
  for (double e : c.epsilons) check_eps(e, "epsilon_convergence.eps");
  check(c.t > 0.0, "epsilon_convergence.t must be > 0");
  check(c.sigma0 > 0.0, "epsilon_convergence.sigma0 must be > 0");
  check(c.floor_factor >= 1.0, "epsilon_convergence.floor_factor must be >= 1");
  // The initial-layer refusal happens here, before any evolution runs.
  double layer = 0.0;
  for (double e : c.epsilons) {
    layer = std::max(layer, initial_layer_time(one_d_system(c.flavor, c.k, c.rate, c.sigma, e)));
  }
  check(c.t > layer, "epsilon_convergence: t = " + format_double(c.t) +
                         " lies inside the initial layer (t <= " + format_double(layer) + ")");
  return c;
}

DimScalingConfig parse_dim_scaling(const json& j) {
  StrictObject o(j, "dimension_scaling");
  DimScalingConfig c;
  c.dims = o.integers("dims", c.dims);
  const bool explicit_grid = o.has("grid");
  c.grid = parse_grid(o, c.grid, "dimension_scaling");
  // An explicit grid without explicit points applies to every d.
  c.points = o.integers("points", explicit_grid ? std::vector<int>{} : c.points);
  c.eps = o.number("eps", c.eps);
  c.k = o.number("k", c.k);
  c.t = o.number("t", c.t);
  c.sigma0 = o.number("sigma0", c.sigma0);
  const double budget = o.number("amplitude_budget", static_cast<double>(c.amplitude_budget));
  o.finish();
  check(!c.dims.empty(), "dimension_scaling.dims must not be empty");
  for (int d : c.dims) check(d >= 1 && d <= 3, "dimension_scaling.dims entries must lie in {1, 2, 3}");
  check(c.points.empty() || c.points.size() == c.dims.size(),
        "dimension_scaling.points must match dims in length");
  for (int n : c.points) check(n >= 4 && n % 2 == 0, "dimension_scaling.points must be even and >= 4");
  check_eps(c.eps, "dimension_scaling.eps");
  check(c.k > 0.0 && c.t > 0.0 && c.sigma0 > 0.0, "dimension_scaling: k, t, sigma0 must be > 0");
  check(budget >= 1.0, "dimension_scaling.amplitude_budget must be >= 1");
  c.amplitude_budget = static_cast<std::size_t>(budget);
  return c;
}

InitialLayerConfig parse_initial_layer(const json& j) {
  StrictObject o(j, "initial_layer");
  InitialLayerConfig c;
  c.eps = o.number("eps", c.eps);
  c.k = o.number("k", c.k);
  c.samples = o.integer("samples", c.samples);
  c.window = o.number("window", c.window);
  c.grid = parse_grid(o, c.grid, "initial_layer");
  c.sigma0 = o.number("sigma0", c.sigma0);
  c.floor_factor = o.number("floor_factor", c.floor_factor);
  o.finish();
  check_eps(c.eps, "initial_layer.eps");
  check(c.k > 0.0 && c.window > 0.0 && c.sigma0 > 0.0,
        "initial_layer: k, window, sigma0 must be > 0");
  check(c.samples >= 3, "initial_layer.samples must be >= 3");
  check(c.floor_factor >= 1.0, "initial_layer.floor_factor must be >= 1");
  return c;
}

RecoveryConfig parse_recovery(const json& j) {
  StrictObject o(j, "recovery");
  RecoveryConfig c;
  c.flavor = parse_flavor(o.string("flavor", to_string(c.flavor)), "recovery.flavor");
  c.k = o.number("k", c.k);
  c.rate = o.number("r", c.rate);
  c.sigma = o.number("sigma", c.sigma);
  c.eps = o.number("eps", c.eps);
  c.t = o.number("t", c.t);
  c.dt = o.number("dt", c.dt);
  c.ancilla_points = o.integers("ancilla_points", c.ancilla_points);
  c.ancilla_length = o.number("ancilla_length", c.ancilla_length);
  c.grid = parse_grid(o, c.grid, "recovery");
  c.sigma0 = o.number("sigma0", c.sigma0);
  c.gaussian_s = o.number("gaussian_s", c.gaussian_s);
  const double budget = o.number("amplitude_budget", static_cast<double>(c.amplitude_budget));
  o.finish();
  check(c.flavor == Flavor::heat1d || c.flavor == Flavor::black_scholes_1d,
        "recovery.flavor must be heat1d or black_scholes_1d");
  check(c.k > 0.0 && c.sigma > 0.0, "recovery: k and sigma must be > 0");
  check_eps(c.eps, "recovery.eps");
  check(c.t > 0.0, "recovery.t must be > 0");
  check(c.dt >= 0.0 && c.dt <= c.t, "recovery.dt must lie in [0, t] (0 selects the default)");
  check(!c.ancilla_points.empty(), "recovery.ancilla_points must not be empty");
  for (int n : c.ancilla_points) check(n >= 4 && n % 2 == 0, "recovery.ancilla_points must be even and >= 4");
  check(c.ancilla_length > 0.0 && c.sigma0 > 0.0 && c.gaussian_s > 0.0,
        "recovery: ancilla_length, sigma0, gaussian_s must be > 0");
  check(budget >= 1.0, "recovery.amplitude_budget must be >= 1");
  c.amplitude_budget = static_cast<std::size_t>(budget);
  return c;
}

}  // namespace relaxq
