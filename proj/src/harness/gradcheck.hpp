// src/harness/gradcheck.hpp

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
#include <random>
#include <string>
#include <vector>

#include "core/autodiff.hpp"
#include "core/params.hpp"

namespace translab::harness {

struct GradcheckResult {
  std::string name;
  double max_rel_error = 0.0;
  std::size_t coordinates = 0;
  std::string worst;  // "<tensor>[i,j,...]" of the largest error
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  bool passed = false;
};

struct GradcheckOptions {
  double eps = 1e-5;
  double tol = 1e-4;
  // Coordinates probed per tensor; 0 checks every element.
  std::size_t max_coords_per_tensor = 0;
  std::uint64_t seed = 1;
};

// Per tensor: every element when it has at most \`per_tensor\` of them
// (or per_tensor == 0), else the largest and smallest |g| plus random ones.
std::vector<std::size_t> select_coordinates(const Array &grad, std::size_t per_tensor,
                                            std::mt19937_64 &rng);

// |a - n| / max(|a|, |n|, 1e-8)
double relative_error(double analytic, double numeric);

// Compares backward() of the scalar built by `build` against central
// differences for the given leaves. `build` is re-run for every perturbation
// and must be deterministic.
GradcheckResult check_gradients(const std::string &name, const std::function<Var()> &build,
                                const std::vector<NamedParam> &wrt,
                                const GradcheckOptions &options);

struct GradcheckReport {
  std::vector<GradcheckResult> checks;
  bool passed = true;
};

// Scopes: loss, joint, encoder, predictor, model, all. The analytic side is
// this build's backward(); the numeric side is central differences with
// eps = 1e-5 evaluated in long double, which keeps rounding noise of the
// difference quotient far below the 1e-8 denominator floor.
GradcheckReport run_gradcheck(const std::string &scope, std::uint64_t seed, double tol,
                              const std::function<void(const GradcheckResult &)> &on_result = {});

std::string format_result(const GradcheckResult &r);

}  // namespace translab::harness
