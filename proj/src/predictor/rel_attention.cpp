// src/predictor/rel_attention.cpp

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

#include "predictor/rel_attention.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "core/errors.hpp"

namespace translab::predictor {

Array sinusoid_table(std::size_t n, std::size_t d) {
  Array t(Shape{n, d});
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t c = 0; c < d; ++c) {
      const real freq =
          std::pow(10000.0, -static_cast<real>(c - c % 2) / static_cast<real>(d));
      const real a = static_cast<real>(p) * freq;
      t(p, c) = (c % 2 == 0) ? std::sin(a) : std::cos(a);
    }
  return t;
}

Var rel_attention(const Var &q, const Var &k, const Var &v, const Var &r, const Var &u,
                  const Var &vb, std::size_t heads, std::size_t memory_rows) {
  const Array &Q = q->value, &K = k->value, &V = v->value, &R = r->value;
  if (Q.rank() != 2 || K.rank() != 2 || V.rank() != 2 || R.rank() != 2)
    throw DimensionError("rel_attention: q, k, v, r must be 2-D");
  const std::size_t L = Q.dim(0), d = Q.dim(1), N = K.dim(0), M = memory_rows;
  if (N != M + L || V.dim(0) != N || R.dim(0) < N || K.dim(1) != d || V.dim(1) != d ||
      R.dim(1) != d || u->value.size() != d || vb->value.size() != d)
    throw DimensionError("rel_attention: q " + shape_str(Q.shape()) + ", k " +
                         shape_str(K.shape()) + ", v " + shape_str(V.shape()) + ", r " +
                         shape_str(R.shape()) + " with " + std::to_string(M) +
                         " memory rows");
  if (heads == 0 || d % heads != 0)
    throw ConfigError("rel_attention: width " + std::to_string(d) +
                      " not divisible by " + std::to_string(heads) + " heads");
  const std::size_t dk = d / heads;
  const real inv_sqrt = 1.0 / std::sqrt(static_cast<real>(dk));
  const Array &Ub = u->value, &Vb = vb->value;

  Array weights(Shape{heads, L, N});
  Array out(Shape{L, d});
  std::vector<real> scores(N);
  for (std::size_t h = 0; h < heads; ++h) {
    const std::size_t off = h * dk;
    for (std::size_t i = 0; i < L; ++i) {
      const std::size_t last = M + i;
      real mx = -INFINITY;
      for (std::size_t j = 0; j <= last; ++j) {
        const std::size_t dist = last - j;
        real s = 0.0;
        for (std::size_t c = off; c < off + dk; ++c)
          s += (Q(i, c) + Ub[c]) * K(j, c) + (Q(i, c) + Vb[c]) * R(dist, c);
        scores[j] = s * inv_sqrt;
        mx = std::max(mx, scores[j]);
      }
      real z = 0.0;
      for (std::size_t j = 0; j <= last; ++j)
        z += (weights.at3(h, i, j) = std::exp(scores[j] - mx));
      for (std::size_t j = 0; j <= last; ++j) {
        real &w = weights.at3(h, i, j);
        w /= z;
        for (std::size_t c = off; c < off + dk; ++c) out(i, c) += w * V(j, c);
      }
    }
  }
  require_finite(out, "rel_attention");
  return make_node(
      std::move(out), {q, k, v, r, u, vb}, "rel_attention",
      [weights = std::move(weights), heads, dk, L, M, inv_sqrt](Node &self) {
        Node &pq = *self.parents[0], &pk = *self.parents[1], &pv = *self.parents[2];
        Node &pr = *self.parents[3], &pu = *self.parents[4], &pvb = *self.parents[5];
        const Array &Q = pq.value, &K = pk.value, &V = pv.value, &R = pr.value;
        const Array &Ub = pu.value, &Vb = pvb.value;
        std::vector<real> dw(M + L);
        for (std::size_t h = 0; h < heads; ++h) {
          const std::size_t off = h * dk;
          for (std::size_t i = 0; i < L; ++i) {
            const std::size_t last = M + i;
            const real *g = self.grad.data() + i * self.grad.cols();
            real dot = 0.0;
            for (std::size_t j = 0; j <= last; ++j) {
              const real w = weights.at3(h, i, j);
              real s = 0.0;
              for (std::size_t c = off; c < off + dk; ++c) {
                s += g[c] * V(j, c);
                if (pv.requires_grad) pv.grad(j, c) += w * g[c];
              }
              dw[j] = s;
              dot += w * s;
            }
            for (std::size_t j = 0; j <= last; ++j) {
              const real ds = weights.at3(h, i, j) * (dw[j] - dot) * inv_sqrt;
              if (ds == 0.0) continue;
              const std::size_t dist = last - j;
              for (std::size_t c = off; c < off + dk; ++c) {
                if (pq.requires_grad) pq.grad(i, c) += ds * (K(j, c) + R(dist, c));
                if (pk.requires_grad) pk.grad(j, c) += ds * (Q(i, c) + Ub[c]);
                if (pr.requires_grad) pr.grad(dist, c) += ds * (Q(i, c) + Vb[c]);
                if (pu.requires_grad) pu.grad[c] += ds * K(j, c);
                if (pvb.requires_grad) pvb.grad[c] += ds * R(dist, c);
              }
            }
          }
        }
      });
}

}  // namespace translab::predictor
