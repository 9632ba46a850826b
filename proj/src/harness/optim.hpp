// src/harness/optim.hpp

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

#include <cstddef>
#include <vector>

#include "core/array.hpp"
#include "core/params.hpp"
#include "harness/config.hpp"

namespace translab::harness {

// Linear warmup from init_lr (step 1) to peak_lr (step warmup), then
// peak_lr * decay^((step - warmup) / warmup), never below floor_lr.
double lr_schedule(std::size_t step, const TrainConfig &cfg);

struct AdamState {
  std::vector<Array> m;
  std::vector<Array> v;
  std::size_t step = 0;

  static AdamState zeros_like(const ParamSet &params);
};

// One bias-corrected Adam update of every parameter from its .grad. A
// non-finite gradient aborts before anything is modified (NumericError naming
// the parameter).
void adam_step(const ParamSet &params, AdamState &state, double lr, const TrainConfig &cfg);

}  // namespace translab::harness
