// src/harness/decode.hpp

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
#include <functional>
#include <span>
#include <vector>

#include "harness/model.hpp"
#include "harness/task.hpp"

namespace translab::harness {

// Scores over {blank, 1..V} for frame t after emitting `prefix`. Any
// monotone transform of the probabilities works for greedy search.
using ScoreFn = std::function<std::vector<double>(std::size_t t, std::span<const int> prefix)>;

// Frame-synchronous greedy search: at each frame emit the argmax symbol until
// blank wins or max_symbols_per_frame symbols were emitted, then advance.
std::vector<int> greedy_search(std::size_t frames, std::size_t max_symbols_per_frame,
                               const ScoreFn &score);

// Greedy decoding with the model's predictor run incrementally through its
// segment memory (one segment per emitted token).
std::vector<int> greedy_decode(const TransducerModel &model, const Array &features,
                               std::size_t max_symbols_per_frame = 5);

std::size_t levenshtein(std::span<const int> a, std::span<const int> b);

struct EvalResult {
  double token_error_rate = 0.0;  // sum of edit distances / sum of reference lengths
  double sequence_accuracy = 0.0;
  double mean_loss = 0.0;  // mean per-utterance -ln P(y|x)
  std::size_t utterances = 0;
  std::size_t reference_tokens = 0;
  std::size_t edit_errors = 0;
  std::vector<std::vector<int>> hypotheses;
  std::vector<std::vector<int>> references;
};

// Scores a list of utterances; threads > 1 splits the list across workers
// (results do not depend on the thread count).
EvalResult evaluate(const TransducerModel &model, const std::vector<Utterance> &utterances,
                    std::size_t max_symbols_per_frame = 5, std::size_t threads = 1);

// n utterances drawn from the task with a fresh generator seeded by eval_seed.
std::vector<Utterance> eval_set(const ToyTask &task, std::size_t n, std::uint64_t eval_seed);

}  // namespace translab::harness
