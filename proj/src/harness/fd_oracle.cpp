// src/harness/fd_oracle.cpp

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

// Compiled only into the long double build.

#include "harness/fd_oracle.hpp"

#include <type_traits>

#include "core/errors.hpp"
#include "harness/grad_problems.hpp"

static_assert(std::is_same_v<translab::real, long double>,
              "fd_oracle.cpp belongs to the extended-precision build");

namespace translab_fd {

std::vector<std::string> tensor_names(const std::string &problem, std::uint64_t seed) {
  const auto p = translab::harness::make_grad_problem(problem, seed);
  std::vector<std::string> names;
  for (const auto &w : p.wrt) names.push_back(w.name);
  return names;
}

std::vector<long double> central_differences(const std::string &problem, std::uint64_t seed,
                                             const std::vector<Coordinate> &coords,
                                             long double eps) {
  auto p = translab::harness::make_grad_problem(problem, seed);
  translab::NoGradGuard no_grad;
  std::vector<long double> out;
  out.reserve(coords.size());
  for (const Coordinate &c : coords) {
    if (c.tensor >= p.wrt.size() || c.index >= p.wrt[c.tensor].var->value.size())
      throw translab::InternalError("central_differences: coordinate out of range");
    long double &x = p.wrt[c.tensor].var->value[c.index];
    const long double orig = x;
    x = orig + eps;
    const long double plus = p.build()->value[0];
    x = orig - eps;
    const long double minus = p.build()->value[0];
    x = orig;
    out.push_back((plus - minus) / (2 * eps));
  }
  return out;
}

}  // namespace translab_fd
