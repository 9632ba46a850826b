// src/lattice/rnnt_lattice.hpp

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
#include <span>
#include <vector>

#include "core/array.hpp"

namespace translab::rnnt {

inline constexpr int kBlank = 0;

// Log-posteriors ln p(t,u,k) for one utterance, shape [T x (U+1) x (V+1)],
// symbol 0 is blank.
struct PosteriorGrid {
  Array log_probs;

  std::size_t frames() const { return log_probs.dim(0); }
  std::size_t label_len() const { return log_probs.dim(1) - 1; }
  std::size_t vocab() const { return log_probs.dim(2) - 1; }

  // Row-wise log-softmax of logits shaped [T x (U+1) x (V+1)].
  static PosteriorGrid from_logits(const Array &logits);
  // Takes probabilities directly (zeros allowed; they become -inf).
  static PosteriorGrid from_probs(const Array &probs);
};

// Forward/backward tables over t = 1..T (stored 0..T-1) and u = 0..U.
// Unfilled tables are left empty.
struct Lattice {
  std::size_t frames = 0;
  std::size_t label_len = 0;
  std::vector<int> labels;
  Array log_alpha;  // [T x (U+1)]
  Array log_beta;   // [T x (U+1)]
  real log_prob = 0.0;  // ln P(y|x) from the pass(es) run
};

real log_add(real a, real b);

// alpha(1,0) = 1; alpha(t,u) = alpha(t-1,u) p_blk(t-1,u) + alpha(t,u-1) p_{y_u}(t,u-1).
// log_prob = ln alpha(T,U) + ln p_blk(T,U).
Lattice forward_alpha(const PosteriorGrid &grid, std::span<const int> labels);

// beta(T,U) = p_blk(T,U); beta(t,u) = beta(t+1,u) p_blk(t,u) + beta(t,u+1) p_{y_{u+1}}(t,u).
// log_prob = ln beta(1,0).
Lattice backward_beta(const PosteriorGrid &grid, std::span<const int> labels);

// Both tables; log_prob taken from the forward pass.
Lattice forward_backward(const PosteriorGrid &grid, std::span<const int> labels);

// ln of sum_{t+u=n} alpha(t,u) beta(t,u) for n = 1..T+U (1-based t), which
// equals ln P for every n.
std::vector<real> antidiagonal_log_sums(const Lattice &lattice);

struct LossResult {
  real loss = 0.0;      // -ln P(y|x)
  real log_prob = 0.0;  // ln P(y|x)
  Array d_logits;         // d loss / d logits, same shape as the logits
};

// Negative log-likelihood and its exact gradient with respect to the
// pre-softmax logits [T x (U+1) x (V+1)]. Throws NumericError when P == 0.
LossResult rnnt_loss(const Array &logits, std::span<const int> labels);

// Same, on a grid given as probabilities; the gradient is with respect to
// logits whose softmax is that grid.
LossResult rnnt_loss(const PosteriorGrid &grid, std::span<const int> labels);

inline constexpr std::size_t kOracleMaxLength = 14;

// Number of monotonic alignments: C(T+U-1, U).
std::size_t alignment_count(std::size_t frames, std::size_t label_len);

// Brute force: enumerates every alignment ending with blank at (T,U), sums
// linear-domain path probabilities and returns -ln of the sum. Refuses
// T+U > kOracleMaxLength.
real oracle_loss(const PosteriorGrid &grid, std::span<const int> labels,
                   std::size_t *paths_visited = nullptr);

}  // namespace translab::rnnt
