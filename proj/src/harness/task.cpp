// src/harness/task.cpp

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

#include "harness/task.hpp"

#include <algorithm>

#include "core/errors.hpp"

namespace translab::harness {

PaddedBatch pad(const Batch &batch) {
  PaddedBatch p;
  std::size_t t_max = 0, f = 0;
  for (const Utterance &u : batch.utterances) {
    t_max = std::max(t_max, u.frames());
    f = u.features.dim(1);
  }
  p.features = Array(Shape{batch.utterances.size(), t_max, f});
  for (std::size_t b = 0; b < batch.utterances.size(); ++b) {
    const Utterance &u = batch.utterances[b];
    std::copy(u.features.values().begin(), u.features.values().end(),
              p.features.data() + b * t_max * f);
    p.frame_lengths.push_back(u.frames());
    p.labels.push_back(u.labels);
  }
  return p;
}

ToyTask::ToyTask(const ToyTaskConfig &config) : config_(config) {
  config_.validate();
  std::mt19937_64 rng(config_.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  embedding_ = Array(Shape{config_.vocab_size + 1, config_.feature_dim});
  for (std::size_t v = 1; v <= config_.vocab_size; ++v)
    for (std::size_t c = 0; c < config_.feature_dim; ++c) embedding_(v, c) = normal(rng);
}

Utterance ToyTask::sample(std::mt19937_64 &rng) const {
  std::uniform_int_distribution<std::size_t> len(config_.min_labels, config_.max_labels);
  std::uniform_int_distribution<int> tok(1, static_cast<int>(config_.vocab_size));
  std::uniform_int_distribution<std::size_t> rep(config_.min_frames_per_token,
                                                 config_.max_frames_per_token);
  std::normal_distribution<double> normal(0.0, 1.0);
  Utterance u;
  const std::size_t U = len(rng);
  std::vector<std::size_t> reps;
  for (std::size_t i = 0; i < U; ++i) {
    u.labels.push_back(tok(rng));
    reps.push_back(rep(rng));
  }
  std::size_t frames = 0;
  for (std::size_t r : reps) frames += r;
  const std::size_t f = config_.feature_dim;
  u.features = Array(Shape{frames, f});
  std::size_t row = 0;
  for (std::size_t i = 0; i < U; ++i)
    for (std::size_t r = 0; r < reps[i]; ++r, ++row)
      for (std::size_t c = 0; c < f; ++c)
        u.features(row, c) =
            static_cast<double>(embedding_(u.labels[i], c)) + config_.noise * normal(rng);
  return u;
}

Batch ToyTask::generate_batch(std::size_t n, std::mt19937_64 &rng) const {
  if (n == 0) throw ConfigError("generate_batch: batch size must be >= 1");
  Batch b;
  for (std::size_t i = 0; i < n; ++i) b.utterances.push_back(sample(rng));
  return b;
}

}  // namespace translab::harness
