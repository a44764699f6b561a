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

// relaxq command-line runner: one subcommand per canned study. Tables are
// written as CSV, fit summaries and Hamiltonian reports as JSON.
//
// Exit codes: 0 success, 1 internal failure, 2 configuration error,
// 3 resource-guard refusal.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "relaxq/experiments.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitInternal = 1;
constexpr int kExitConfig = 2;
constexpr int kExitResource = 3;

struct Invocation {
  std::string config_path;
  std::string out_dir;
};

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw relaxq::ConfigError("cannot open config file '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw relaxq::ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
}

// Non-finite values (an undefined slope) are written as null.
json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

void emit_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

using Runner = std::function<void(const json& params, const fs::path& out)>;

void write_table(const fs::path& out, const std::string& kind, const relaxq::Table& table,
                 const json& summary) {
  write_file(out / (kind + ".csv"), table.to_csv());
  write_file(out / (kind + "_summary.json"), summary.dump(2) + "\n");
  std::cout << kind << ": " << table.rows.size() << " rows -> " << (out / (kind + ".csv")).string()
            << '\n'
            << summary.dump() << '\n';
}

void fidelity_scan(const json& params, const fs::path& out) {
  const auto cfg = relaxq::parse_fidelity_scan(params);
  const auto res = relaxq::run_fidelity_scan(cfg);
  write_table(out, "fidelity_scan", res.table,
              {{"argmax", res.argmax}, {"max", res.max}, {"max_disagreement", res.max_disagreement}});
}

void eps_convergence(const json& params, const fs::path& out) {
  const auto cfg = relaxq::parse_eps_convergence(params);
  const auto res = relaxq::run_epsilon_convergence(cfg);
  emit_warnings(res.warnings);
  write_table(out, "epsilon_convergence", res.table,
              {{"flavor", relaxq::to_string(cfg.flavor)},
               {"fitted_slope", number_or_null(res.slope)},
               {"fitted_points", res.fitted_points},
               {"spatial_floor", res.spatial_floor},
               {"refinement_change", res.refinement_change},
               {"warnings", res.warnings}});
}

void dim_scaling(const json& params, const fs::path& out) {
  const auto cfg = relaxq::parse_dim_scaling(params);
  const auto res = relaxq::run_dimension_scaling(cfg);
  write_table(out, "dimension_scaling", res.table, {{"eps", cfg.eps}, {"t", cfg.t}});
}

void initial_layer(const json& params, const fs::path& out) {
  const auto cfg = relaxq::parse_initial_layer(params);
  const auto res = relaxq::run_initial_layer(cfg);
  write_table(out, "initial_layer", res.table,
              {{"fitted_rate", res.fitted_rate},
               {"expected_rate", res.expected_rate},
               {"relative_rate_error", std::abs(res.fitted_rate / res.expected_rate - 1.0)},
               {"equilibrium_excursion", res.equilibrium_excursion}});
}

void recovery(const json& params, const fs::path& out) {
  const auto cfg = relaxq::parse_recovery(params);
  const auto res = relaxq::run_recovery(cfg);
  emit_warnings(res.warnings);
  write_table(out, "recovery", res.table,
              {{"flavor", relaxq::to_string(cfg.flavor)},
               {"eps", cfg.eps},
               {"t", cfg.t},
               {"warnings", res.warnings}});
}

void ham_report(const json& params, const fs::path& out) {
  const json system = params.empty() ? json{{"flavor", "heat1d"}, {"eps", 0.1}} : params;
  const auto sys = relaxq::system_from_config(system);
  emit_warnings(sys.warnings);
  const json report = relaxq::run_hamiltonian_report(sys);
  const fs::path path = out / "hamiltonian_report.json";
  write_file(path, report.dump(2) + "\n");
  std::cout << "hamiltonian_report: " << report.at("terms").size() << " terms, "
            << report.at("system_size").get<std::string>() << " -> " << path.string() << '\n';
}

int run(const std::string& kind, const Runner& runner, const Invocation& inv) {
  try {
    const auto env = relaxq::split_envelope(load_config(inv.config_path), kind);
    const fs::path out = !inv.out_dir.empty()      ? fs::path(inv.out_dir)
                         : !env.output_dir.empty() ? fs::path(env.output_dir)
                                                   : fs::path(".");
    fs::create_directories(out);
    runner(env.params, out);
    return 0;
  } catch (const relaxq::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const relaxq::ResourceGuardError& e) {
    std::cerr << "refused: " << e.what() << '\n';
    return kExitResource;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInternal;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"relaxq: relaxation-system Schrodingerisation experiments"};
  app.require_subcommand(1);

  struct Command {
    const char* name;
    const char* kind;
    const char* help;
    Runner runner;
  };
  const Command commands[] = {
      {"fidelity-scan", "fidelity_scan", "Gaussian-ancilla fidelity versus width s", fidelity_scan},
      {"eps-convergence", "epsilon_convergence", "Relaxation error versus eps with slope fit",
       eps_convergence},
      {"dim-scaling", "dimension_scaling", "Relaxation error versus dimension d", dim_scaling},
      {"initial-layer", "initial_layer", "Flux-closure residual through the initial layer",
       initial_layer},
      {"recovery", "recovery", "End-to-end unitary pipeline versus the direct oracle", recovery},
      {"ham-report", "hamiltonian_report", "Hamiltonian term list as JSON", ham_report},
  };

  Invocation inv;
  int status = 0;
  for (const Command& cmd : commands) {
    CLI::App* sub = app.add_subcommand(cmd.name, cmd.help);
    sub->add_option("--config", inv.config_path, "JSON config file")->check(CLI::ExistingFile);
    sub->add_option("--out", inv.out_dir, "Output directory (created if missing)");
    sub->callback([&status, &inv, cmd] { status = run(cmd.kind, cmd.runner, inv); });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }
  return status;
}
