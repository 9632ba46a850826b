// src/core/params.hpp

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

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "core/autodiff.hpp"
#include "core/errors.hpp"

namespace translab {

struct NamedParam {
  std::string name;
  Var var;
};

// Ordered registry of trainable leaves. Order is registration order, which
// is what checkpoints and the optimizer iterate over.
class ParamSet {
 public:
  Var add(std::string name, Array init) {
    for (const NamedParam &p : items_)
      if (p.name == name) throw InternalError("ParamSet: duplicate parameter " + name);
    Var v = leaf(std::move(init), name);
    items_.push_back({std::move(name), v});
    return v;
  }

  const std::vector<NamedParam> &items() const { return items_; }
  std::vector<Var> vars() const {
    std::vector<Var> out;
    for (const NamedParam &p : items_) out.push_back(p.var);
    return out;
  }
  Var find(const std::string &name) const {
    for (const NamedParam &p : items_)
      if (p.name == name) return p.var;
    return nullptr;
  }
  std::size_t total_size() const {
    std::size_t n = 0;
    for (const NamedParam &p : items_) n += p.var->value.size();
    return n;
  }
  void zero_grads() const {
    for (const NamedParam &p : items_) translab::zero_grads(std::span<const Var>(&p.var, 1));
  }

 private:
  std::vector<NamedParam> items_;
};

// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)).
inline Array init_uniform(Shape shape, std::size_t fan_in, std::mt19937_64 &rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  std::uniform_real_distribution<double> dist(-bound, bound);
  Array a(std::move(shape));
  for (real &v : a.values()) v = dist(rng);
  return a;
}

}  // namespace translab
