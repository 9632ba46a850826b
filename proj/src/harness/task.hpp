// src/harness/task.hpp

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
#include <cstdint>
#include <random>
#include <vector>

#include "core/array.hpp"
#include "harness/config.hpp"

namespace translab::harness {

struct Utterance {
  Array features;           // [T_raw x f]
  std::vector<int> labels;  // U tokens in 1..V
  std::size_t frames() const { return features.dim(0); }
};

struct Batch {
  std::vector<Utterance> utterances;
};

// Padded view of a batch: features [B x T_max x f] with zero rows after each
// utterance's true length.
struct PaddedBatch {
  Array features;
  std::vector<std::size_t> frame_lengths;
  std::vector<std::vector<int>> labels;
};

PaddedBatch pad(const Batch &batch);

// Synthetic copy task. Each token maps to a fixed random feature vector
// (drawn from task.seed); an utterance repeats that vector r times per token,
// r uniform in [rmin, rmax], and adds Gaussian noise to every frame.
class ToyTask {
 public:
  explicit ToyTask(const ToyTaskConfig &config);

  const ToyTaskConfig &config() const { return config_; }
  const Array &token_embedding() const { return embedding_; }

  Utterance sample(std::mt19937_64 &rng) const;
  Batch generate_batch(std::size_t n, std::mt19937_64 &rng) const;

 private:
  ToyTaskConfig config_;
  Array embedding_;  // [(V+1) x f], row 0 unused
};

}  // namespace translab::harness
