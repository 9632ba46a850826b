// src/harness/grad_problems.cpp

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

#include "harness/grad_problems.hpp"

#include <random>

#include "core/errors.hpp"
#include "core/ops.hpp"
#include "encoder/conformer.hpp"
#include "harness/model.hpp"
#include "harness/task.hpp"
#include "joint/jointer.hpp"
#include "lattice/loss_op.hpp"
#include "predictor/predictor.hpp"

namespace translab::harness {

namespace {

Array random_array(Shape shape, std::mt19937_64 &rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Array a(std::move(shape));
  for (real &v : a.values()) v = n(rng);
  return a;
}

std::vector<int> random_labels(std::size_t U, int V, std::mt19937_64 &rng) {
  std::uniform_int_distribution<int> d(1, V);
  std::vector<int> y(U);
  for (int &v : y) v = d(rng);
  return y;
}

// Checks run at a generic point rather than at the initialization, where
// zero biases and unit gains can leave layernorm inputs with very little
// spread and the difference quotient with a large truncation error.
void move_off_init(const ParamSet &params, std::mt19937_64 &rng) {
  std::normal_distribution<double> n(0.0, 0.1);
  for (const NamedParam &p : params.items())
    for (real &v : p.var->value.values()) v += n(rng);
}

// Weighted sum with fixed random weights, so every output element matters.
Var probe(const Var &x, const Array &weights) {
  return ops::sum(ops::mul(x, constant(weights)));
}

GradProblem loss_problem(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const std::size_t T = 4, U = 3, V = 3;
  Var logits = leaf(random_array({T, U + 1, V + 1}, rng), "logits");
  auto y = std::make_shared<std::vector<int>>(random_labels(U, static_cast<int>(V), rng));
  GradProblem p;
  p.build = [logits, y, T] { return rnnt::rnnt_loss_op(logits, T, *y); };
  p.wrt = {{"logits", logits}};
  p.owner = y;
  return p;
}

GradProblem joint_problem(std::uint64_t seed) {
  struct State {
    ParamSet params;
    std::unique_ptr<joint::Jointer> jointer;
    std::vector<int> labels;
  };
  auto s = std::make_shared<State>();
  std::mt19937_64 rng(seed);
  const std::size_t T = 4, U = 3, d = 8;
  // Normalization rescales what backward reports, so it is checked separately.
  joint::JointConfig cfg{16, 4, false, joint::DivisorConvention::kPredictorPositions};
  s->jointer = std::make_unique<joint::Jointer>(cfg, d, d, rng, s->params);
  Var h_enc = leaf(random_array({T, d}, rng), "h_enc");
  Var h_pre = leaf(random_array({U + 1, d}, rng), "h_pre");
  s->labels = random_labels(U, 4, rng);
  GradProblem p;
  p.build = [s, h_enc, h_pre, T] {
    return rnnt::rnnt_loss_op(s->jointer->forward(h_enc, h_pre).logits, T, s->labels);
  };
  p.wrt = s->params.items();
  p.wrt.push_back({"h_enc", h_enc});
  p.wrt.push_back({"h_pre", h_pre});
  p.owner = s;
  return p;
}

GradProblem encoder_problem(std::uint64_t seed) {
  struct State {
    ParamSet params;
    std::unique_ptr<encoder::Encoder> enc;
    Array weights;
  };
  auto s = std::make_shared<State>();
  std::mt19937_64 rng(seed);
  encoder::EncoderConfig cfg;  // desk defaults: 2 layers, 32 wide
  cfg.masks = {encoder::AttentionMask::band(2, 1)};
  s->enc = std::make_unique<encoder::Encoder>(cfg, rng, s->params);
  move_off_init(s->params, rng);
  const std::size_t frames = 12;
  Var x = leaf(random_array({frames, cfg.input_dim}, rng), "features");
  s->weights = random_array({cfg.output_length(frames), cfg.model_dim}, rng);
  GradProblem p;
  p.build = [s, x] { return probe(s->enc->encode(x), s->weights); };
  p.wrt = s->params.items();
  p.wrt.push_back({"features", x});
  p.coords_per_tensor = 6;
  p.owner = s;
  return p;
}

GradProblem predictor_problem(std::uint64_t seed) {
  struct State {
    ParamSet params;
    std::unique_ptr<predictor::Predictor> pred;
    std::vector<int> second;
    predictor::SegmentMemory memory;
    Array weights;
  };
  auto s = std::make_shared<State>();
  std::mt19937_64 rng(seed);
  predictor::PredictorConfig cfg;
  s->pred = std::make_unique<predictor::Predictor>(cfg, rng, s->params);
  move_off_init(s->params, rng);
  const auto first = random_labels(3, static_cast<int>(cfg.vocab_size), rng);
  s->second = random_labels(3, static_cast<int>(cfg.vocab_size), rng);
  s->weights = random_array({3, cfg.model_dim}, rng);
  s->memory = s->pred->predict(first).memory;
  GradProblem p;
  // Second segment against the first one's cached memory. The memory is a
  // constant, as in training, so perturbations do not flow through it.
  p.build = [s] { return probe(s->pred->predict(s->second, s->memory).h_pre, s->weights); };
  p.wrt = s->params.items();
  p.coords_per_tensor = 8;
  p.owner = s;
  return p;
}

GradProblem model_problem(std::uint64_t seed) {
  struct State {
    std::unique_ptr<TransducerModel> model;
    Batch batch;
  };
  auto s = std::make_shared<State>();
  ModelConfig mc;
  mc.encoder.masks = {encoder::AttentionMask::band(4, 2)};
  mc.joint.normalize = false;
  s->model = std::make_unique<TransducerModel>(mc, seed);
  ToyTaskConfig tc;
  tc.min_labels = 2;
  tc.max_labels = 4;
  tc.min_frames_per_token = 4;
  tc.max_frames_per_token = 4;
  tc.seed = seed;
  ToyTask task(tc);
  std::mt19937_64 rng(seed);
  s->batch = task.generate_batch(2, rng);
  move_off_init(s->model->params(), rng);
  GradProblem p;
  p.build = [s] { return s->model->forward(s->batch).loss; };
  p.wrt = s->model->params().items();
  p.coords_per_tensor = 4;
  p.owner = s;
  return p;
}

}  // namespace

const std::vector<std::string> &grad_problem_names() {
  static const std::vector<std::string> names = {"loss", "joint", "encoder", "predictor",
                                                 "model"};
  return names;
}

GradProblem make_grad_problem(const std::string &name, std::uint64_t seed) {
  GradProblem p;
  if (name == "loss") p = loss_problem(seed);
  else if (name == "joint") p = joint_problem(seed);
  else if (name == "encoder") p = encoder_problem(seed);
  else if (name == "predictor") p = predictor_problem(seed);
  else if (name == "model") p = model_problem(seed);
  else throw ConfigError("unknown gradient problem '" + name + "'");
  p.name = name;
  return p;
}

}  // namespace translab::harness
