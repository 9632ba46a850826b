// src/harness/grad_problems.hpp

// Copyright 2026  The translab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "core/autodiff.hpp"
#include "core/params.hpp"

namespace translab::harness {

// A deterministic scalar function of named leaves, rebuilt from a name and a
// seed. Random draws are made in double and converted, so a build with a
// wider `real` constructs bit-identical inputs.
struct GradProblem {
  std::string name;
  std::function<Var()> build;
  std::vector<NamedParam> wrt;
  std::size_t coords_per_tensor = 0;  // 0: every element
  std::shared_ptr<void> owner;        // keeps modules alive
};

// loss, joint, encoder, predictor, model
const std::vector<std::string> &grad_problem_names();

GradProblem make_grad_problem(const std::string &name, std::uint64_t seed);

}  // namespace translab::harness
