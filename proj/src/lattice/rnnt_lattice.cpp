// src/lattice/rnnt_lattice.cpp

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

#include "lattice/rnnt_lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "core/errors.hpp"

namespace translab::rnnt {

namespace {

constexpr real kNegInf = -std::numeric_limits<real>::infinity();

void validate(const PosteriorGrid &grid, std::span<const int> labels) {
  const Array &lp = grid.log_probs;
  if (lp.rank() != 3)
    throw DimensionError("rnnt: posterior grid must be [T x (U+1) x (V+1)], got " +
                         shape_str(lp.shape()));
  if (lp.dim(0) == 0) throw InputError("rnnt: T = 0 is not a valid utterance");
  if (lp.dim(1) == 0 || lp.dim(2) < 2)
    throw DimensionError("rnnt: degenerate grid " + shape_str(lp.shape()));
  if (labels.size() != grid.label_len())
    throw DimensionError("rnnt: grid has U = " + std::to_string(grid.label_len()) +
                         " but " + std::to_string(labels.size()) + " labels were given");
  const int V = static_cast<int>(grid.vocab());
  for (std::size_t u = 0; u < labels.size(); ++u) {
    if (labels[u] == kBlank)
      throw InputError("rnnt: blank (0) inside labels at position " + std::to_string(u));
    if (labels[u] < 1 || labels[u] > V)
      throw InputError("rnnt: label " + std::to_string(labels[u]) + " at position " +
                       std::to_string(u) + " outside 1.." + std::to_string(V));
  }
}

real safe_log(real p) { return p > 0.0 ? std::log(p) : kNegInf; }

}  // namespace

real log_add(real a, real b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  if (a < b) std::swap(a, b);
  return a + std::log1p(std::exp(b - a));
}

PosteriorGrid PosteriorGrid::from_logits(const Array &logits) {
  if (logits.rank() != 3)
    throw DimensionError("rnnt: logits must be [T x (U+1) x (V+1)], got " +
                         shape_str(logits.shape()));
  PosteriorGrid g{Array(logits.shape())};
  const std::size_t K = logits.dim(2), rows = logits.dim(0) * logits.dim(1);
  for (std::size_t r = 0; r < rows; ++r) {
    const real *z = logits.data() + r * K;
    real *o = g.log_probs.data() + r * K;
    real mx = *std::max_element(z, z + K);
    real s = 0.0;
    for (std::size_t k = 0; k < K; ++k) s += std::exp(z[k] - mx);
    const real lse = mx + std::log(s);
    for (std::size_t k = 0; k < K; ++k) o[k] = z[k] - lse;
  }
  return g;
}

PosteriorGrid PosteriorGrid::from_probs(const Array &probs) {
  PosteriorGrid g{Array(probs.shape())};
  for (std::size_t i = 0; i < probs.size(); ++i) g.log_probs[i] = safe_log(probs[i]);
  return g;
}

Lattice forward_alpha(const PosteriorGrid &grid, std::span<const int> labels) {
  validate(grid, labels);
  const std::size_t T = grid.frames(), U = grid.label_len();
  const Array &lp = grid.log_probs;
  Lattice lat{T, U, std::vector<int>(labels.begin(), labels.end()),
              Array(Shape{T, U + 1}, kNegInf), Array(), 0.0};
  Array &a = lat.log_alpha;
  a(0, 0) = 0.0;
  for (std::size_t t = 0; t < T; ++t)
    for (std::size_t u = 0; u <= U; ++u) {
      if (t == 0 && u == 0) continue;
      real v = kNegInf;
      if (t > 0) v = a(t - 1, u) + lp.at3(t - 1, u, kBlank);
      if (u > 0) v = log_add(v, a(t, u - 1) + lp.at3(t, u - 1, labels[u - 1]));
      a(t, u) = v;
    }
  lat.log_prob = a(T - 1, U) + lp.at3(T - 1, U, kBlank);
  return lat;
}

Lattice backward_beta(const PosteriorGrid &grid, std::span<const int> labels) {
  validate(grid, labels);
  const std::size_t T = grid.frames(), U = grid.label_len();
  const Array &lp = grid.log_probs;
  Lattice lat{T, U, std::vector<int>(labels.begin(), labels.end()), Array(),
              Array(Shape{T, U + 1}, kNegInf), 0.0};
  Array &b = lat.log_beta;
  for (std::size_t t = T; t-- > 0;)
    for (std::size_t u = U + 1; u-- > 0;) {
      real v = kNegInf;
      if (t == T - 1 && u == U) {
        v = lp.at3(t, u, kBlank);
      } else {
        if (t + 1 < T) v = b(t + 1, u) + lp.at3(t, u, kBlank);
        if (u < U) v = log_add(v, b(t, u + 1) + lp.at3(t, u, labels[u]));
      }
      b(t, u) = v;
    }
  lat.log_prob = b(0, 0);
  return lat;
}

Lattice forward_backward(const PosteriorGrid &grid, std::span<const int> labels) {
  Lattice lat = forward_alpha(grid, labels);
  lat.log_beta = backward_beta(grid, labels).log_beta;
  return lat;
}

std::vector<real> antidiagonal_log_sums(const Lattice &lat) {
  if (lat.log_alpha.size() == 0 || lat.log_beta.size() == 0)
    throw InternalError("antidiagonal_log_sums: lattice needs both alpha and beta");
  const std::size_t T = lat.frames, U = lat.label_len;
  std::vector<real> sums;
  // With 1-based t, n = t + u runs over 1..T+U; 0-based t gives n - 1.
  for (std::size_t n = 0; n < T + U; ++n) {
    real s = kNegInf;
    for (std::size_t u = 0; u <= std::min(n, U); ++u) {
      std::size_t t = n - u;
      if (t >= T) continue;
      s = log_add(s, lat.log_alpha(t, u) + lat.log_beta(t, u));
    }
    sums.push_back(s);
  }
  return sums;
}

LossResult rnnt_loss(const PosteriorGrid &grid, std::span<const int> labels) {
  Lattice lat = forward_backward(grid, labels);
  const real logP = lat.log_prob;
  if (!std::isfinite(logP))
    throw NumericError("rnnt_loss: total alignment probability is zero (impossible alignment)");
  const std::size_t T = lat.frames, U = lat.label_len, K = grid.vocab() + 1;
  const Array &lp = grid.log_probs;
  LossResult r{-logP, logP, Array(lp.shape())};
  for (std::size_t t = 0; t < T; ++t)
    for (std::size_t u = 0; u <= U; ++u) {
      const real la = lat.log_alpha(t, u);
      const real occupancy = std::exp(la + lat.log_beta(t, u) - logP);
      real *g = r.d_logits.data() + (t * (U + 1) + u) * K;
      for (std::size_t k = 0; k < K; ++k) g[k] = std::exp(lp.at3(t, u, k)) * occupancy;
      // Blank moves to (t+1,u); at (T,U) it terminates with beta = 1.
      real next_blank = kNegInf;
      if (t + 1 < T) next_blank = lat.log_beta(t + 1, u);
      else if (u == U) next_blank = 0.0;
      if (next_blank != kNegInf)
        g[kBlank] -= std::exp(la + lp.at3(t, u, kBlank) + next_blank - logP);
      if (u < U) {
        const int y = labels[u];
        g[y] -= std::exp(la + lp.at3(t, u, y) + lat.log_beta(t, u + 1) - logP);
      }
    }
  return r;
}

LossResult rnnt_loss(const Array &logits, std::span<const int> labels) {
  require_finite(logits, "rnnt_loss");
  return rnnt_loss(PosteriorGrid::from_logits(logits), labels);
}

std::size_t alignment_count(std::size_t frames, std::size_t label_len) {
  if (frames == 0) return 0;
  // C(T-1+U, U)
  std::size_t n = frames - 1 + label_len, k = label_len, c = 1;
  for (std::size_t i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

real oracle_loss(const PosteriorGrid &grid, std::span<const int> labels,
                   std::size_t *paths_visited) {
  validate(grid, labels);
  const std::size_t T = grid.frames(), U = grid.label_len();
  if (T + U > kOracleMaxLength)
    throw InputError("oracle_loss: T+U = " + std::to_string(T + U) + " exceeds " +
                     std::to_string(kOracleMaxLength));
  const Array &lp = grid.log_probs;
  real total = 0.0;
  std::size_t count = 0;
  // Iterative DFS over (t, u, running probability).
  struct Frame {
    std::size_t t, u;
    real p;
  };
  std::vector<Frame> stack{{0, 0, 1.0}};
  while (!stack.empty()) {
    Frame f = stack.back();
    stack.pop_back();
    const real p_blank = std::exp(lp.at3(f.t, f.u, kBlank));
    if (f.t == T - 1 && f.u == U) {
      total += f.p * p_blank;
      ++count;
      continue;
    }
    if (f.t + 1 < T) stack.push_back({f.t + 1, f.u, f.p * p_blank});
    if (f.u < U)
      stack.push_back({f.t, f.u + 1, f.p * std::exp(lp.at3(f.t, f.u, labels[f.u]))});
  }
  if (paths_visited) *paths_visited = count;
  return -std::log(total);
}

}  // namespace translab::rnnt
