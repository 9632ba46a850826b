// src/harness/train.hpp

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

#include <functional>
#include <string>

#include "harness/config.hpp"
#include "harness/decode.hpp"
#include "harness/metrics.hpp"
#include "harness/model.hpp"

namespace translab::harness {

struct TrainCallbacks {
  std::function<void(const StepRecord &)> on_step;
  std::function<void(const EvalRecord &)> on_eval;
};

struct TrainResult {
  std::string metrics_path;
  std::string checkpoint_path;       // written after the last step
  std::string best_checkpoint_path;  // lowest token error rate (ties: lower eval loss)
  EvalRecord final_eval;
  EvalRecord best_eval;
  std::size_t steps = 0;
  double final_loss = 0.0;
};

// Runs the full loop: sample batch, encode, predict, joint, loss, backward
// (normalization sits in the graph), Adam with the warmup schedule. Writes
// <out_dir>/<run_id>.metrics.jsonl, <run_id>.ckpt and <run_id>.best.ckpt.
// A non-finite loss or gradient stops the run after saving the current
// (pre-update) parameters to <run_id>.last_good.ckpt.
TrainResult train(const Config &config, const std::string &out_dir,
                  const TrainCallbacks &callbacks = {});

// Rebuilds the model recorded in a checkpoint.
std::unique_ptr<TransducerModel> load_model(const std::string &checkpoint_path,
                                            Config *config_out = nullptr);

}  // namespace translab::harness
