// src/core/ops.hpp

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
#include <random>
#include <span>

#include "core/autodiff.hpp"

namespace translab::ops {

// [m x k] . [k x n]
Var matmul(const Var &a, const Var &b);

// Elementwise binary ops. The smaller operand may be a scalar or match the
// trailing dimensions of the larger one; nothing else broadcasts.
Var add(const Var &a, const Var &b);
Var sub(const Var &a, const Var &b);
Var mul(const Var &a, const Var &b);
Var scale(const Var &a, real c);

Var tanh(const Var &a);
Var sigmoid(const Var &a);
// x * sigmoid(x)
Var swish(const Var &a);

Var softmax_lastdim(const Var &x);

inline constexpr real kLayerNormEps = 1e-5;
// Normalizes each row over the last dimension, then applies gain and bias
// (both of length cols).
Var layernorm(const Var &x, const Var &gain, const Var &bias);

enum class ConvPadding { kSameCentered, kCausalLeft };

// Per-channel 1-D convolution of x [T x d] with kernel [k x d], k odd. The
// output keeps length T; out-of-range frames read as zero.
Var depthwise_conv1d(const Var &x, const Var &kernel, ConvPadding padding);
// Same, with an explicit number of future frames read (0 = causal,
// (k-1)/2 = centered).
Var depthwise_conv1d(const Var &x, const Var &kernel, std::size_t lookahead);

Var sum(const Var &x);
Var mean(const Var &x);

// Rows of a 2-D table selected by ids.
Var gather_rows(const Var &table, std::span<const int> ids);
// [a; b] along the first axis (both 2-D with equal column counts).
Var concat_rows(const Var &a, const Var &b);
// Rows [begin, end) of a 2-D array.
Var slice_rows(const Var &x, std::size_t begin, std::size_t end);
Var reshape(const Var &x, Shape shape);

// Strided frame windows: output row o concatenates input rows
// stride*(o+1) - kernel ... stride*(o+1) - 1 (zero outside), so a window never
// reads past the end of its own stride block. Output length is
// ceil(T / stride); followed by a matmul this is a strided convolution.
Var unfold_frames(const Var &x, std::size_t kernel, std::size_t stride);

// Pairwise broadcast sum: row t*P + u of the result is a[t] + b[u], for
// a [T x d] and b [P x d]. Backward sums gradients over the broadcast axes.
Var pair_add(const Var &a, const Var &b);

// Identity forward; backward multiplies the incoming gradient by factor.
Var grad_scale(const Var &x, real factor);

// x . w + bias (bias may be null).
Var linear(const Var &x, const Var &w, const Var &bias);

// Inverted dropout. Identity unless a DropoutScope is active on this thread.
Var dropout(const Var &x);

// Enables dropout at the given rate for ops::dropout calls on this thread,
// drawing masks from rng. Scopes nest; the innermost wins.
class DropoutScope {
 public:
  DropoutScope(real rate, std::mt19937_64 &rng);
  ~DropoutScope();
  DropoutScope(const DropoutScope &) = delete;
  DropoutScope &operator=(const DropoutScope &) = delete;

 private:
  real previous_rate_;
  std::mt19937_64 *previous_rng_;
};

}  // namespace translab::ops
