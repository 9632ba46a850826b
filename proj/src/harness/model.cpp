// src/harness/model.cpp

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

#include "harness/model.hpp"

#include <random>

#include "core/errors.hpp"
#include "core/ops.hpp"
#include "lattice/loss_op.hpp"

namespace translab::harness {

TransducerModel::TransducerModel(const ModelConfig &config, std::uint64_t seed)
    : config_(config) {
  config_.validate();
  std::mt19937_64 rng(seed);
  encoder_ = std::make_unique<encoder::Encoder>(config_.encoder, rng, params_);
  predictor_ = std::make_unique<predictor::Predictor>(config_.predictor, rng, params_);
  jointer_ = std::make_unique<joint::Jointer>(config_.joint, config_.encoder.model_dim,
                                              config_.predictor.model_dim, rng, params_);
}

void TransducerModel::set_normalize(bool on) {
  config_.joint.normalize = on;
  jointer_->set_normalize(on);
}

TransducerModel::UtteranceGraph TransducerModel::forward(const Utterance &utt) const {
  UtteranceGraph g;
  g.h_enc = encoder_->encode(utt.features);
  g.h_pre = predictor_->predict(utt.labels).h_pre;
  g.joint = jointer_->forward(g.h_enc, g.h_pre);
  g.frames = g.joint.frames;
  g.label_len = utt.labels.size();
  g.loss = rnnt::rnnt_loss_op(g.joint.logits, g.frames, utt.labels);
  return g;
}

TransducerModel::BatchGraph TransducerModel::forward(const Batch &batch) const {
  if (batch.utterances.empty()) throw InputError("forward: empty batch");
  BatchGraph bg;
  Var total;
  for (const Utterance &u : batch.utterances) {
    bg.items.push_back(forward(u));
    total = total ? ops::add(total, bg.items.back().loss) : bg.items.back().loss;
  }
  bg.loss = ops::scale(total, 1.0 / static_cast<real>(batch.utterances.size()));
  return bg;
}

std::vector<joint::GradStats> TransducerModel::grad_stats(const BatchGraph &graph,
                                                          std::size_t step) const {
  std::vector<joint::GradStats> out;
  for (const UtteranceGraph &u : graph.items) {
    joint::SideGrads before{u.joint.enc_summed->grad, u.joint.pre_summed->grad};
    joint::SideGrads after{u.joint.enc_side->grad, u.joint.pre_side->grad};
    out.push_back(joint::record_stats(before, after, u.frames, u.label_len, step));
  }
  return out;
}

}  // namespace translab::harness
