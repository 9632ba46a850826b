// src/lattice/loss_op.cpp

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

#include "lattice/loss_op.hpp"

#include "core/errors.hpp"
#include "lattice/rnnt_lattice.hpp"

namespace translab::rnnt {

Var rnnt_loss_op(const Var &logits, std::size_t frames, std::span<const int> labels) {
  const std::size_t P = labels.size() + 1;
  const std::size_t n = logits->value.size();
  if (frames == 0 || n % (frames * P) != 0)
    throw DimensionError("rnnt_loss_op: logits " + shape_str(logits->shape()) +
                         " do not tile T = " + std::to_string(frames) +
                         ", U+1 = " + std::to_string(P));
  const std::size_t K = n / (frames * P);
  LossResult r = rnnt_loss(logits->value.reshaped(Shape{frames, P, K}), labels);
  Array d = std::move(r.d_logits);
  return make_node(Array::scalar(r.loss), {logits}, "rnnt_loss",
                   [d = std::move(d)](Node &self) {
                     Node &p = *self.parents[0];
                     const real g = self.grad[0];
                     for (std::size_t i = 0; i < d.size(); ++i) p.grad[i] += g * d[i];
                   });
}

}  // namespace translab::rnnt
