// src/harness/optim.cpp

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

#include "harness/optim.hpp"

#include <algorithm>
#include <cmath>

#include "core/errors.hpp"

namespace translab::harness {

double lr_schedule(std::size_t step, const TrainConfig &cfg) {
  if (step < 1) step = 1;
  const double warmup = static_cast<double>(cfg.warmup_steps);
  if (step <= cfg.warmup_steps) {
    if (cfg.warmup_steps == 1) return cfg.peak_lr;
    const double frac = static_cast<double>(step - 1) / (warmup - 1.0);
    return cfg.init_lr + (cfg.peak_lr - cfg.init_lr) * frac;
  }
  const double e = static_cast<double>(step - cfg.warmup_steps) / warmup;
  return std::max(cfg.floor_lr, cfg.peak_lr * std::pow(cfg.decay, e));
}

AdamState AdamState::zeros_like(const ParamSet &params) {
  AdamState s;
  for (const NamedParam &p : params.items()) {
    s.m.emplace_back(p.var->shape());
    s.v.emplace_back(p.var->shape());
  }
  return s;
}

void adam_step(const ParamSet &params, AdamState &state, double lr, const TrainConfig &cfg) {
  const auto &items = params.items();
  if (state.m.size() != items.size())
    throw InternalError("adam_step: optimizer state does not match parameters");
  for (const NamedParam &p : items)
    if (!p.var->grad.all_finite())
      throw NumericError("adam_step: non-finite gradient in parameter '" + p.name + "'");
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(cfg.beta1, t), c2 = 1.0 - std::pow(cfg.beta2, t);
  for (std::size_t i = 0; i < items.size(); ++i) {
    Array &w = items[i].var->value;
    const Array &g = items[i].var->grad;
    Array &m = state.m[i], &v = state.v[i];
    for (std::size_t j = 0; j < w.size(); ++j) {
      m[j] = cfg.beta1 * m[j] + (1.0 - cfg.beta1) * g[j];
      v[j] = cfg.beta2 * v[j] + (1.0 - cfg.beta2) * g[j] * g[j];
      const double mhat = m[j] / c1, vhat = v[j] / c2;
      w[j] -= lr * mhat / (std::sqrt(vhat) + cfg.eps);
    }
  }
}

}  // namespace translab::harness
