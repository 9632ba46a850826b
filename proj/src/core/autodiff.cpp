// src/core/autodiff.cpp

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

#include "core/autodiff.hpp"

#include <unordered_map>

#include "core/errors.hpp"

namespace translab {

namespace {
thread_local bool g_grad_enabled = true;
}  // namespace

bool grad_enabled() { return g_grad_enabled; }

NoGradGuard::NoGradGuard() : previous_(g_grad_enabled) { g_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { g_grad_enabled = previous_; }

Var leaf(Array value, std::string name) {
  auto n = std::make_shared<Node>();
  n->grad = Array(value.shape());
  n->value = std::move(value);
  n->op = std::move(name);
  n->requires_grad = true;
  return n;
}

Var constant(Array value) {
  auto n = std::make_shared<Node>();
  n->grad = Array(value.shape());
  n->value = std::move(value);
  n->op = "constant";
  n->requires_grad = false;
  return n;
}

Var make_node(Array value, std::vector<Var> parents, std::string op,
              Node::BackwardFn fn) {
  auto n = std::make_shared<Node>();
  n->grad = Array(value.shape());
  n->value = std::move(value);
  n->op = std::move(op);
  if (g_grad_enabled) {
    for (const Var &p : parents)
      if (p->requires_grad) n->requires_grad = true;
    if (n->requires_grad) {
      n->parents = std::move(parents);
      n->backward_fn = std::move(fn);
    }
  }
  return n;
}

std::vector<Node *> topological_order(const Var &root) {
  // 0 = unvisited, 1 = on stack, 2 = done.
  std::unordered_map<Node *, int> state;
  std::vector<Node *> order;
  std::vector<std::pair<Node *, std::size_t>> stack;
  stack.emplace_back(root.get(), 0);
  state[root.get()] = 1;
  while (!stack.empty()) {
    auto &[node, next] = stack.back();
    if (next < node->parents.size()) {
      Node *p = node->parents[next++].get();
      if (!p->requires_grad) continue;
      int &s = state[p];
      if (s == 1) throw InternalError("backward: cycle detected at node '" + p->op + "'");
      if (s == 0) {
        s = 1;
        stack.emplace_back(p, 0);
      }
    } else {
      state[node] = 2;
      order.push_back(node);
      stack.pop_back();
    }
  }
  return order;
}

void backward(const Var &root) {
  if (root->value.size() != 1)
    throw DimensionError("backward: root must be scalar, got shape " +
                         shape_str(root->shape()));
  if (root->backward_done_)
    throw InternalError("backward: called twice on the same root without zero_grads");
  if (!root->requires_grad) {
    root->backward_done_ = true;
    return;
  }
  std::vector<Node *> order = topological_order(root);
  root->grad[0] += 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node *n = *it;
    if (n->backward_fn) n->backward_fn(*n);
  }
  root->backward_done_ = true;
}

void zero_grads(const Var &root) {
  for (Node *n : topological_order(root)) n->grad.fill(0.0);
  root->grad.fill(0.0);
  root->backward_done_ = false;
}

void zero_grads(std::span<const Var> vars) {
  for (const Var &v : vars) {
    v->grad.fill(0.0);
    v->backward_done_ = false;
  }
}

}  // namespace translab
