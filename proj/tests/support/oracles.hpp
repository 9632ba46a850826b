// tests/support/oracles.hpp

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

// Reference implementations used only by the tests. Each one is written
// independently of the library code it checks: plain loops, no shared helpers.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include "core/array.hpp"
#include "core/autodiff.hpp"
#include "core/ops.hpp"

namespace oracle {

using translab::Array;
using translab::Shape;
using translab::Var;

inline Array random_array(Shape shape, std::mt19937_64 &rng, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  Array a(std::move(shape));
  for (double &v : a.values()) v = n(rng);
  return a;
}

inline double rel_err(double analytic, double numeric) {
  return std::abs(analytic - numeric) /
         std::max({std::abs(analytic), std::abs(numeric), 1e-8});
}

struct FdResult {
  double max_rel_err = 0.0;
  std::size_t coordinates = 0;
};

// Central differences of a scalar-valued graph with respect to every element
// of every leaf. `build` must rebuild the graph from the leaves' values.
inline FdResult finite_difference_check(const std::function<Var()> &build,
                                        const std::vector<Var> &leaves, double eps = 1e-5) {
  translab::zero_grads(std::span<const Var>(leaves));
  translab::backward(build());
  std::vector<Array> analytic;
  for (const Var &l : leaves) analytic.push_back(l->grad);
  FdResult r;
  translab::NoGradGuard guard;
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    Array &x = leaves[i]->value;
    for (std::size_t c = 0; c < x.size(); ++c) {
      const double orig = x[c];
      x[c] = orig + eps;
      const double plus = build()->value[0];
      x[c] = orig - eps;
      const double minus = build()->value[0];
      x[c] = orig;
      r.max_rel_err = std::max(r.max_rel_err, rel_err(analytic[i][c], (plus - minus) / (2 * eps)));
      ++r.coordinates;
    }
  }
  translab::zero_grads(std::span<const Var>(leaves));
  return r;
}

// sum(w * f) with fixed random weights w of f's shape.
inline Var probe(const Var &f, const Array &w) {
  return translab::ops::sum(translab::ops::mul(f, translab::constant(w)));
}

// Dense multi-head attention with the mask applied additively: masked
// scores become -inf before a max-shifted softmax. mask(i,l) != 0 allows.
inline Array dense_attention(const Array &q, const Array &k, const Array &v, const Array &mask,
                             std::size_t heads) {
  const std::size_t L = q.dim(0), M = k.dim(0), d = q.dim(1), dh = d / heads;
  Array out(Shape{L, d});
  for (std::size_t h = 0; h < heads; ++h)
    for (std::size_t i = 0; i < L; ++i) {
      std::vector<double> s(M);
      for (std::size_t l = 0; l < M; ++l) {
        double dot = 0.0;
        for (std::size_t c = 0; c < dh; ++c) dot += q(i, h * dh + c) * k(l, h * dh + c);
        s[l] = mask(i, l) != 0.0 ? dot / std::sqrt(static_cast<double>(dh))
                                 : -std::numeric_limits<double>::infinity();
      }
      const double mx = *std::max_element(s.begin(), s.end());
      double z = 0.0;
      for (double &x : s) z += (x = std::exp(x - mx));
      for (std::size_t c = 0; c < dh; ++c) {
        double acc = 0.0;
        for (std::size_t l = 0; l < M; ++l) acc += s[l] / z * v(l, h * dh + c);
        out(i, h * dh + c) = acc;
      }
    }
  return out;
}

// Probability of every monotone alignment path, enumerated recursively.
// probs is [T x (U+1) x (V+1)] with blank at index 0.
inline double path_sum(const Array &probs, const std::vector<int> &labels) {
  const std::size_t T = probs.dim(0), U = labels.size();
  std::function<double(std::size_t, std::size_t)> go = [&](std::size_t t,
                                                           std::size_t u) -> double {
    if (t == T - 1 && u == U) return probs.at3(t, u, 0);
    double total = 0.0;
    if (t + 1 < T) total += probs.at3(t, u, 0) * go(t + 1, u);
    if (u < U) total += probs.at3(t, u, static_cast<std::size_t>(labels[u])) * go(t, u + 1);
    return total;
  };
  return go(0, 0);
}

inline std::vector<double> ranks(const std::vector<double> &x) {
  std::vector<double> r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    double less = 0, equal = 0;
    for (double y : x) {
      if (y < x[i]) ++less;
      if (y == x[i]) ++equal;
    }
    r[i] = less + (equal + 1.0) / 2.0;
  }
  return r;
}

// Pearson correlation of the ranks.
inline double spearman(const std::vector<double> &x, const std::vector<double> &y) {
  const auto rx = ranks(x), ry = ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace oracle
