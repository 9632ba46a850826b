// src/predictor/predictor.cpp

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

#include "predictor/predictor.hpp"

#include <algorithm>

#include "core/errors.hpp"
#include "core/ops.hpp"
#include "predictor/rel_attention.hpp"

namespace translab::predictor {

void PredictorConfig::validate() const {
  if (num_layers == 0) throw ConfigError("predictor.layers must be >= 1");
  if (model_dim < 2) throw ConfigError("predictor.dim must be >= 2");
  if (num_heads == 0 || model_dim % num_heads != 0)
    throw ConfigError("predictor.dim (" + std::to_string(model_dim) +
                      ") must be divisible by predictor.heads (" +
                      std::to_string(num_heads) + ")");
  if (ff_dim == 0) throw ConfigError("predictor.ff_dim must be >= 1");
  if (vocab_size == 0) throw ConfigError("predictor vocabulary must be non-empty");
}

Predictor::Predictor(const PredictorConfig &config, std::mt19937_64 &rng, ParamSet &params,
                     const std::string &prefix)
    : config_(config) {
  config_.validate();
  const std::size_t d = config_.model_dim, ff = config_.ff_dim;
  {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Array emb(Shape{config_.vocab_size + 1, d});
    for (real &v : emb.values()) v = dist(rng);
    embedding_ = params.add(prefix + ".embedding", std::move(emb));
  }
  bias_u_ = params.add(prefix + ".rel_bias_u", Array(Shape{d}));
  bias_v_ = params.add(prefix + ".rel_bias_v", Array(Shape{d}));
  for (std::size_t l = 0; l < config_.num_layers; ++l) {
    const std::string p = prefix + ".layer" + std::to_string(l);
    Layer L;
    L.wq = params.add(p + ".wq", init_uniform({d, d}, d, rng));
    L.wk = params.add(p + ".wk", init_uniform({d, d}, d, rng));
    L.wv = params.add(p + ".wv", init_uniform({d, d}, d, rng));
    L.wr = params.add(p + ".wr", init_uniform({d, d}, d, rng));
    L.wo = params.add(p + ".wo", init_uniform({d, d}, d, rng));
    L.bo = params.add(p + ".bo", Array(Shape{d}));
    L.ln1_g = params.add(p + ".ln1.g", Array(Shape{d}, 1.0));
    L.ln1_b = params.add(p + ".ln1.b", Array(Shape{d}));
    L.w1 = params.add(p + ".w1", init_uniform({d, ff}, d, rng));
    L.b1 = params.add(p + ".b1", Array(Shape{ff}));
    L.w2 = params.add(p + ".w2", init_uniform({ff, d}, ff, rng));
    L.b2 = params.add(p + ".b2", Array(Shape{d}));
    L.ln2_g = params.add(p + ".ln2.g", Array(Shape{d}, 1.0));
    L.ln2_b = params.add(p + ".ln2.b", Array(Shape{d}));
    layers_.push_back(std::move(L));
  }
}

Predictor::Result Predictor::predict(std::span<const int> labels,
                                     const SegmentMemory &memory) const {
  const int V = static_cast<int>(config_.vocab_size);
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] < 1 || labels[i] > V)
      throw InputError("predict: token " + std::to_string(labels[i]) + " at position " +
                       std::to_string(i) + " outside 1.." + std::to_string(V));
  if (!memory.empty() && memory.layers.size() != layers_.size())
    throw DimensionError("predict: memory has " + std::to_string(memory.layers.size()) +
                         " layers, model has " + std::to_string(layers_.size()));

  std::vector<int> ids;
  if (memory.empty()) ids.push_back(0);
  ids.insert(ids.end(), labels.begin(), labels.end());

  const std::size_t d = config_.model_dim, L = ids.size();
  Result result;
  if (L == 0) {
    result.h_pre = constant(Array(Shape{0, d}));
    result.memory = memory;
    return result;
  }
  result.memory.offset = memory.offset + L;
  Var h = ops::gather_rows(embedding_, ids);
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const Layer &ly = layers_[l];
    Array mem_rows = memory.empty() ? Array(Shape{0, d}) : memory.layers[l];
    const std::size_t M = mem_rows.dim(0);

    // Cache this layer's input for the next segment.
    {
      std::vector<real> joined(mem_rows.values());
      joined.insert(joined.end(), h->value.values().begin(), h->value.values().end());
      const std::size_t total = M + L;
      const std::size_t keep = std::min(total, config_.memory_length);
      std::vector<real> tail(joined.end() - static_cast<std::ptrdiff_t>(keep * d),
                               joined.end());
      result.memory.layers.emplace_back(Shape{keep, d}, std::move(tail));
    }

    Var mem = constant(std::move(mem_rows));
    result.memory_inputs.push_back(mem);
    Var context = M > 0 ? ops::concat_rows(mem, h) : h;
    Var q = ops::matmul(h, ly.wq);
    Var k = ops::matmul(context, ly.wk);
    Var v = ops::matmul(context, ly.wv);
    Var r = ops::matmul(constant(sinusoid_table(M + L, d)), ly.wr);
    Var att = rel_attention(q, k, v, r, bias_u_, bias_v_, config_.num_heads, M);
    Var h1 = ops::layernorm(ops::add(h, ops::dropout(ops::linear(att, ly.wo, ly.bo))), ly.ln1_g, ly.ln1_b);
    Var ff = ops::linear(ops::swish(ops::linear(h1, ly.w1, ly.b1)), ly.w2, ly.b2);
    h = ops::layernorm(ops::add(h1, ops::dropout(ff)), ly.ln2_g, ly.ln2_b);
  }
  result.h_pre = h;
  return result;
}

}  // namespace translab::predictor
