// src/lattice/loss_op.hpp

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

#include "core/autodiff.hpp"

namespace translab::rnnt {

// Graph node for -ln P(y|x). logits has T*(U+1)*(V+1) elements laid out as
// [T x (U+1) x (V+1)] (any rank); the backward rule injects the analytic
// lattice gradient rather than differentiating through the recursion.
Var rnnt_loss_op(const Var &logits, std::size_t frames, std::span<const int> labels);

}  // namespace translab::rnnt
