// src/harness/decode.cpp

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

#include "harness/decode.hpp"

#include <algorithm>
#include <thread>

#include "core/autodiff.hpp"
#include "core/ops.hpp"
#include "lattice/rnnt_lattice.hpp"

namespace translab::harness {

std::vector<int> greedy_search(std::size_t frames, std::size_t max_symbols_per_frame,
                               const ScoreFn &score) {
  std::vector<int> out;
  for (std::size_t t = 0; t < frames; ++t) {
    for (std::size_t emitted = 0; emitted < max_symbols_per_frame; ++emitted) {
      std::vector<double> s = score(t, out);
      const int best =
          static_cast<int>(std::max_element(s.begin(), s.end()) - s.begin());
      if (best == rnnt::kBlank) break;
      out.push_back(best);
    }
  }
  return out;
}

std::vector<int> greedy_decode(const TransducerModel &model, const Array &features,
                               std::size_t max_symbols_per_frame) {
  NoGradGuard no_grad;
  const joint::Jointer &jointer = model.jointer();
  const predictor::Predictor &pred = model.predictor();
  Var enc = jointer.project_encoder(model.encoder().encode(features));
  const std::size_t frames = enc->value.dim(0);

  auto start = pred.predict({});
  predictor::SegmentMemory memory = std::move(start.memory);
  Var pre = jointer.project_predictor(start.h_pre);
  std::size_t pre_for = 0;  // prefix length the cached projection belongs to

  ScoreFn score = [&](std::size_t t, std::span<const int> prefix) {
    if (prefix.size() != pre_for) {
      const int token = prefix.back();
      auto step = pred.predict(std::span<const int>(&token, 1), memory);
      memory = std::move(step.memory);
      pre = jointer.project_predictor(step.h_pre);
      pre_for = prefix.size();
    }
    Var logits = jointer.combine(ops::slice_rows(enc, t, t + 1), pre);
    return logits->value.values();
  };
  return greedy_search(frames, max_symbols_per_frame, score);
}

std::size_t levenshtein(std::span<const int> a, std::span<const int> b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j)
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] != b[j - 1])});
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

EvalResult evaluate(const TransducerModel &model, const std::vector<Utterance> &utterances,
                    std::size_t max_symbols_per_frame, std::size_t threads) {
  const std::size_t n = utterances.size();
  std::vector<std::vector<int>> hyps(n);
  std::vector<double> losses(n);
  auto work = [&](std::size_t begin, std::size_t step) {
    NoGradGuard no_grad;
    for (std::size_t i = begin; i < n; i += step) {
      hyps[i] = greedy_decode(model, utterances[i].features, max_symbols_per_frame);
      losses[i] = model.forward(utterances[i]).loss->value[0];
    }
  };
  threads = std::max<std::size_t>(1, std::min(threads, n));
  if (threads == 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < threads; ++w) pool.emplace_back(work, w, threads);
    for (std::thread &th : pool) th.join();
  }

  EvalResult r;
  r.utterances = n;
  std::size_t exact = 0;
  double loss_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto &ref = utterances[i].labels;
    const std::size_t e = levenshtein(hyps[i], ref);
    r.edit_errors += e;
    r.reference_tokens += ref.size();
    exact += (e == 0);
    loss_sum += losses[i];
    r.references.push_back(ref);
  }
  r.hypotheses = std::move(hyps);
  if (n > 0) {
    r.token_error_rate = r.reference_tokens
                             ? static_cast<double>(r.edit_errors) /
                                   static_cast<double>(r.reference_tokens)
                             : 0.0;
    r.sequence_accuracy = static_cast<double>(exact) / static_cast<double>(n);
    r.mean_loss = loss_sum / static_cast<double>(n);
  }
  return r;
}

std::vector<Utterance> eval_set(const ToyTask &task, std::size_t n, std::uint64_t eval_seed) {
  std::mt19937_64 rng(eval_seed);
  std::vector<Utterance> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(task.sample(rng));
  return out;
}

}  // namespace translab::harness
