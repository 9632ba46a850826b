// src/encoder/attention.cpp

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

#include "encoder/attention.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "core/errors.hpp"

namespace translab::encoder {

Array AttentionMask::realize(std::size_t queries, std::size_t keys,
                             std::optional<std::size_t> valid_keys) const {
  Array m(Shape{queries, keys});
  const std::size_t limit = valid_keys ? std::min(*valid_keys, keys) : keys;
  for (std::size_t i = 0; i < queries; ++i)
    for (std::size_t l = 0; l < limit; ++l) m(i, l) = allows(i, l) ? 1.0 : 0.0;
  return m;
}

Var masked_attention(const Var &q, const Var &k, const Var &v, const Array &mask,
                     std::size_t heads) {
  const Array &Q = q->value, &K = k->value, &V = v->value;
  if (Q.rank() != 2 || K.rank() != 2 || V.rank() != 2)
    throw DimensionError("masked_attention: Q, K, V must be 2-D");
  const std::size_t Lq = Q.dim(0), Lk = K.dim(0), d = Q.dim(1);
  if (K.dim(1) != d || V.dim(1) != d || V.dim(0) != Lk)
    throw DimensionError("masked_attention: Q " + shape_str(Q.shape()) + ", K " +
                         shape_str(K.shape()) + ", V " + shape_str(V.shape()));
  if (mask.rank() != 2 || mask.dim(0) != Lq || mask.dim(1) != Lk)
    throw DimensionError("masked_attention: mask " + shape_str(mask.shape()) +
                         " does not match " + std::to_string(Lq) + "x" + std::to_string(Lk));
  if (heads == 0 || d % heads != 0)
    throw ConfigError("masked_attention: width " + std::to_string(d) +
                      " not divisible by " + std::to_string(heads) + " heads");
  const std::size_t dk = d / heads;
  const real inv_sqrt = 1.0 / std::sqrt(static_cast<real>(dk));

  for (std::size_t i = 0; i < Lq; ++i) {
    bool any = false;
    for (std::size_t l = 0; l < Lk && !any; ++l) any = mask(i, l) != 0.0;
    if (!any)
      throw InputError("masked_attention: query row " + std::to_string(i) +
                       " has every key masked");
  }

  // weights[h][i][l]
  Array weights(Shape{heads, Lq, Lk});
  Array out(Shape{Lq, d});
  std::vector<real> scores(Lk);
  for (std::size_t h = 0; h < heads; ++h) {
    const std::size_t off = h * dk;
    for (std::size_t i = 0; i < Lq; ++i) {
      real mx = -INFINITY;
      for (std::size_t l = 0; l < Lk; ++l) {
        if (mask(i, l) == 0.0) continue;
        real s = 0.0;
        for (std::size_t c = 0; c < dk; ++c) s += Q(i, off + c) * K(l, off + c);
        scores[l] = s * inv_sqrt;
        mx = std::max(mx, scores[l]);
      }
      real z = 0.0;
      for (std::size_t l = 0; l < Lk; ++l)
        if (mask(i, l) != 0.0) z += (weights.at3(h, i, l) = std::exp(scores[l] - mx));
      for (std::size_t l = 0; l < Lk; ++l) {
        real &w = weights.at3(h, i, l);
        if (w == 0.0) continue;
        w /= z;
        for (std::size_t c = 0; c < dk; ++c) out(i, off + c) += w * V(l, off + c);
      }
    }
  }
  require_finite(out, "masked_attention");
  return make_node(
      std::move(out), {q, k, v}, "masked_attention",
      [weights = std::move(weights), heads, dk, Lq, Lk, inv_sqrt](Node &self) {
        Node &pq = *self.parents[0], &pk = *self.parents[1], &pv = *self.parents[2];
        const Array &Q = pq.value, &K = pk.value, &V = pv.value;
        std::vector<real> dw(Lk);
        for (std::size_t h = 0; h < heads; ++h) {
          const std::size_t off = h * dk;
          for (std::size_t i = 0; i < Lq; ++i) {
            const real *g = self.grad.data() + i * self.grad.cols() + off;
            real dot = 0.0;
            for (std::size_t l = 0; l < Lk; ++l) {
              const real w = weights.at3(h, i, l);
              if (w == 0.0) {
                dw[l] = 0.0;
                continue;
              }
              real s = 0.0;
              for (std::size_t c = 0; c < dk; ++c) {
                s += g[c] * V(l, off + c);
                if (pv.requires_grad) pv.grad(l, off + c) += w * g[c];
              }
              dw[l] = s;
              dot += w * s;
            }
            for (std::size_t l = 0; l < Lk; ++l) {
              const real w = weights.at3(h, i, l);
              if (w == 0.0) continue;
              const real ds = w * (dw[l] - dot) * inv_sqrt;
              for (std::size_t c = 0; c < dk; ++c) {
                if (pq.requires_grad) pq.grad(i, off + c) += ds * K(l, off + c);
                if (pk.requires_grad) pk.grad(l, off + c) += ds * Q(i, off + c);
              }
            }
          }
        }
      });
}

Var masked_attention(const Var &q, const Var &k, const Var &v, const AttentionMask &mask,
                     std::size_t heads) {
  return masked_attention(q, k, v, mask.realize(q->value.dim(0), k->value.dim(0)), heads);
}

}  // namespace translab::encoder
