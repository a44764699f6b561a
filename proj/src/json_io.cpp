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

#include "relaxq/json_io.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace relaxq {

namespace {

using nlohmann::json;

json vec(const Eigen::VectorXd& v) { return std::vector<double>(v.begin(), v.end()); }

json mat(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    std::vector<double> row(m.cols());
    for (Eigen::Index j = 0; j < m.cols(); ++j) row[j] = m(i, j);
    rows.push_back(row);
  }
  return rows;
}

Eigen::VectorXd read_vec(const json& j, const char* key) {
  const auto v = j.at(key).get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Eigen::MatrixXd read_mat(const json& j, const char* key) {
  const auto rows = j.at(key).get<std::vector<std::vector<double>>>();
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto m = n == 0 ? 0 : static_cast<Eigen::Index>(rows[0].size());
  Eigen::MatrixXd out(n, m);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (static_cast<Eigen::Index>(rows[i].size()) != m) {
      throw std::invalid_argument(std::string("ragged matrix '") + key + "'");
    }
    for (Eigen::Index k = 0; k < m; ++k) out(i, k) = rows[i][k];
  }
  return out;
}

}  // namespace

json to_json(const ParabolicPDE& pde) {
  json j = {{"d", pde.d}, {"D", mat(pde.D)}, {"gamma", vec(pde.gamma)}, {"r", pde.r}};
  if (pde.transform) {
    const auto& t = *pde.transform;
    j["transform"] = {{"black_scholes_log",
                       {{"rate", t.rate},
                        {"sigma", vec(t.sigma)},
                        {"mu", vec(t.mu)},
                        {"kappa", vec(t.kappa)},
                        {"maturity", t.maturity},
                        {"rescaled", t.rescaled}}}};
  }
  return j;
}

ParabolicPDE parabolic_from_json(const json& j) {
  ParabolicPDE pde = make_parabolic(read_mat(j, "D"), read_vec(j, "gamma"), j.at("r").get<double>());
  if (j.at("d").get<int>() != pde.d) throw std::invalid_argument("pde: d disagrees with D");
  if (j.contains("transform")) {
    const json& t = j.at("transform").at("black_scholes_log");
    pde.transform = BlackScholesLog{t.at("rate").get<double>(), read_vec(t, "sigma"),
                                    read_vec(t, "mu"),          read_vec(t, "kappa"),
                                    t.at("maturity").get<double>(),
                                    t.at("rescaled").get<bool>()};
  }
  return pde;
}

json to_json(const RelaxationSystem& sys) {
  return {{"flavor", to_string(sys.flavor)},
          {"d", sys.d},
          {"epsilons", vec(sys.epsilons)},
          {"alpha", mat(sys.alpha)},
          {"lambda", vec(sys.lambda)},
          {"delta", vec(sys.delta)},
          {"convection", vec(sys.convection)},
          {"r", sys.r},
          {"target", to_json(sys.target)}};
}

RelaxationSystem system_from_json(const json& j) {
  RelaxationSystem sys;
  sys.flavor = flavor_from_string(j.at("flavor").get<std::string>());
  sys.d = j.at("d").get<int>();
  sys.epsilons = read_vec(j, "epsilons");
  sys.alpha = read_mat(j, "alpha");
  sys.lambda = read_vec(j, "lambda");
  sys.delta = read_vec(j, "delta");
  sys.convection = read_vec(j, "convection");
  sys.r = j.at("r").get<double>();
  sys.target = parabolic_from_json(j.at("target"));
  const auto d = static_cast<Eigen::Index>(sys.d);
  if (sys.d < 1 || sys.epsilons.size() != d || sys.alpha.rows() != d || sys.alpha.cols() != d ||
      sys.lambda.size() != d || sys.delta.size() != d || sys.convection.size() != d ||
      sys.target.d != sys.d) {
    throw std::invalid_argument("system JSON: inconsistent dimensions");
  }
  return sys;
}

}  // namespace relaxq
