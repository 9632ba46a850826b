// src/harness/model.hpp

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
#include <memory>
#include <vector>

#include "core/params.hpp"
#include "encoder/conformer.hpp"
#include "harness/config.hpp"
#include "harness/task.hpp"
#include "joint/jointer.hpp"
#include "predictor/predictor.hpp"

namespace translab::harness {

// Encoder + predictor + jointer sharing one parameter registry. Parameters
// are initialized from `seed` in a fixed order.
class TransducerModel {
 public:
  TransducerModel(const ModelConfig &config, std::uint64_t seed);
  TransducerModel(const TransducerModel &) = delete;
  TransducerModel &operator=(const TransducerModel &) = delete;

  struct UtteranceGraph {
    Var loss;  // -ln P(y|x)
    Var h_enc;
    Var h_pre;
    joint::Jointer::Output joint;
    std::size_t frames = 0;
    std::size_t label_len = 0;
  };

  struct BatchGraph {
    Var loss;  // mean of the per-utterance losses
    std::vector<UtteranceGraph> items;
  };

  UtteranceGraph forward(const Utterance &utt) const;
  BatchGraph forward(const Batch &batch) const;

  // Gradient statistics at the two inputs of the joint sum, read after
  // backward(): "before" is the aggregated sum, "after" what the encoder and
  // predictor receive.
  std::vector<joint::GradStats> grad_stats(const BatchGraph &graph, std::size_t step) const;

  const ModelConfig &config() const { return config_; }
  ParamSet &params() { return params_; }
  const ParamSet &params() const { return params_; }
  const encoder::Encoder &encoder() const { return *encoder_; }
  encoder::Encoder &encoder() { return *encoder_; }
  const predictor::Predictor &predictor() const { return *predictor_; }
  const joint::Jointer &jointer() const { return *jointer_; }
  // Normalization switch; the forward pass does not depend on it.
  void set_normalize(bool on);

 private:
  ModelConfig config_;
  ParamSet params_;
  std::unique_ptr<encoder::Encoder> encoder_;
  std::unique_ptr<predictor::Predictor> predictor_;
  std::unique_ptr<joint::Jointer> jointer_;
};

}  // namespace translab::harness
