// src/predictor/rel_attention.hpp

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

#include "core/array.hpp"
#include "core/autodiff.hpp"

namespace translab::predictor {

// Sinusoid table [n x d]: row p holds sin/cos of p at geometrically spaced
// frequencies (even columns sin, odd columns cos).
Array sinusoid_table(std::size_t n, std::size_t d);

// Causal relative-position attention over [memory; current segment].
//
//   q       [L x d]   queries of the current segment
//   k, v    [N x d]   keys/values for memory rows followed by the segment, N = M + L
//   r       [N x d]   row n encodes relative distance n
//   u, vb   [d]       global content and position biases
//
// Query i sits at absolute position M + i and sees keys j <= M + i with score
// ((q_i + u).k_j + (q_i + vb).r_{M+i-j}) / sqrt(d / heads), per head.
Var rel_attention(const Var &q, const Var &k, const Var &v, const Var &r, const Var &u,
                  const Var &vb, std::size_t heads, std::size_t memory_rows);

}  // namespace translab::predictor
