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

#include "json.hpp"

#include "relaxq/relaxation.hpp"

namespace relaxq {

nlohmann::json to_json(const ParabolicPDE& pde);
ParabolicPDE parabolic_from_json(const nlohmann::json& j);

// Fields: flavor, d, epsilons, alpha (row-major nested arrays), lambda,
// delta, convection, r, target.
nlohmann::json to_json(const RelaxationSystem& sys);
RelaxationSystem system_from_json(const nlohmann::json& j);

}  // namespace relaxq
