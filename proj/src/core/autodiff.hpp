// src/core/autodiff.hpp

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

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "core/array.hpp"

namespace translab {

class Node;
using Var = std::shared_ptr<Node>;

// A value in the reverse-mode graph. `grad` always has the shape of `value`
// and accumulates additively until zero_grads() is called.
class Node {
 public:
  using BackwardFn = std::function<void(Node &)>;

  Array value;
  Array grad;
  std::vector<Var> parents;
  BackwardFn backward_fn;
  std::string op;
  bool requires_grad = false;

  const Shape &shape() const { return value.shape(); }

 private:
  friend void backward(const Var &root);
  friend void zero_grads(const Var &root);
  friend void zero_grads(std::span<const Var> vars);
  bool backward_done_ = false;
};

// Trainable (or at least gradient-receiving) leaf.
Var leaf(Array value, std::string name = "leaf");
// Leaf that never receives gradient.
Var constant(Array value);

// Builds an interior node. Parents that do not require grad are still kept so
// that the caller can read their values; the backward rule is dropped if no
// parent requires grad or if a NoGradGuard is active.
Var make_node(Array value, std::vector<Var> parents, std::string op,
              Node::BackwardFn fn);

// Reverse sweep from a scalar root. Each reachable node's backward rule runs
// exactly once, in reverse topological order.
void backward(const Var &root);

// Clears the gradients of every node reachable from root and re-arms
// backward() on it.
void zero_grads(const Var &root);
void zero_grads(std::span<const Var> vars);

// Nodes reachable from root, parents before children.
std::vector<Node *> topological_order(const Var &root);

// While alive on a thread, new nodes record no parents or backward rules.
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard &) = delete;
  NoGradGuard &operator=(const NoGradGuard &) = delete;

 private:
  bool previous_;
};

bool grad_enabled();

}  // namespace translab
