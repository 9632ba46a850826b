// src/harness/fd_oracle.hpp

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

// Central differences evaluated by the long double build of the library.
// Only plain types cross this boundary, so the declarations are the same in
// both builds.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace translab_fd {

struct Coordinate {
  std::size_t tensor = 0;  // position in GradProblem::wrt
  std::size_t index = 0;   // flat element index
};

// Leaf names of the problem, in wrt order.
std::vector<std::string> tensor_names(const std::string &problem, std::uint64_t seed);

// (f(x + eps e_i) - f(x - eps e_i)) / 2 eps for every coordinate.
std::vector<long double> central_differences(const std::string &problem, std::uint64_t seed,
                                             const std::vector<Coordinate> &coords,
                                             long double eps);

}  // namespace translab_fd
