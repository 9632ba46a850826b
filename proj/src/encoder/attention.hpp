// src/encoder/attention.hpp

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
#include <optional>

#include "core/array.hpp"
#include "core/autodiff.hpp"

namespace translab::encoder {

// Band mask: key l is visible from query i iff -left <= l - i <= right.
// nullopt means unbounded on that side. The diagonal is always visible.
struct AttentionMask {
  std::optional<std::size_t> left;
  std::optional<std::size_t> right;

  static AttentionMask full() { return {}; }
  static AttentionMask band(std::size_t l, std::size_t r) { return {l, r}; }

  bool allows(std::size_t i, std::size_t l) const {
    if (l < i) return !left || i - l <= *left;
    return !right || l - i <= *right;
  }

  // Binary [queries x keys] matrix. Keys at or beyond valid_keys (padding)
  // are masked regardless of the band.
  Array realize(std::size_t queries, std::size_t keys,
                std::optional<std::size_t> valid_keys = std::nullopt) const;

  bool operator==(const AttentionMask &) const = default;
};

// Multi-head scaled dot-product attention restricted by a binary mask:
//   out_i = sum_l softmax over {j : M_ij = 1} of (Q_i.K_j / sqrt(d_k)) * V_l
// per head, with d_k = d / heads. Masked keys get zero weight and do not enter
// the normalizer. Q is [Lq x d], K and V are [Lk x d], mask is [Lq x Lk].
// A query row with no visible key is an InputError.
Var masked_attention(const Var &q, const Var &k, const Var &v, const Array &mask,
                     std::size_t heads = 1);

Var masked_attention(const Var &q, const Var &k, const Var &v, const AttentionMask &mask,
                     std::size_t heads = 1);

}  // namespace translab::encoder
