// src/encoder/conformer.cpp

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

#include "encoder/conformer.hpp"

#include <algorithm>

#include "core/errors.hpp"
#include "core/ops.hpp"

namespace translab::encoder {

namespace {

Var ones(ParamSet &params, const std::string &name, std::size_t n) {
  return params.add(name, Array(Shape{n}, 1.0));
}
Var zeros(ParamSet &params, const std::string &name, std::size_t n) {
  return params.add(name, Array(Shape{n}));
}
Var affine(ParamSet &params, const std::string &name, std::size_t in, std::size_t out,
           std::mt19937_64 &rng) {
  return params.add(name, init_uniform({in, out}, in, rng));
}

}  // namespace

std::pair<std::size_t, std::size_t> EncoderConfig::strides() const {
  switch (subsample) {
    case 1: return {1, 1};
    case 2: return {2, 1};
    case 4: return {2, 2};
    default: throw ConfigError("encoder.subsample must be 1, 2 or 4, got " +
                               std::to_string(subsample));
  }
}

std::size_t EncoderConfig::conv_lookahead(std::size_t layer) const {
  return mask_for(layer).right ? 0 : (conv_kernel - 1) / 2;
}

void EncoderConfig::validate() const {
  if (input_dim == 0) throw ConfigError("encoder input width must be >= 1");
  if (num_layers == 0) throw ConfigError("encoder.layers must be >= 1");
  if (model_dim < 2) throw ConfigError("encoder.dim must be >= 2");
  if (num_heads == 0 || model_dim % num_heads != 0)
    throw ConfigError("encoder.dim (" + std::to_string(model_dim) +
                      ") must be divisible by encoder.heads (" +
                      std::to_string(num_heads) + ")");
  if (ff_dim == 0) throw ConfigError("encoder.ff_dim must be >= 1");
  if (conv_kernel % 2 == 0)
    throw ConfigError("encoder.conv_kernel must be odd, got " + std::to_string(conv_kernel));
  strides();
  if (masks.size() != 1 && masks.size() != num_layers)
    throw ConfigError("encoder mask list has " + std::to_string(masks.size()) +
                      " entries for " + std::to_string(num_layers) + " layers");
}

EncoderConfig EncoderConfig::paper_scale() {
  EncoderConfig c;
  c.input_dim = 80;
  c.num_layers = 12;
  c.model_dim = 256;
  c.num_heads = 4;
  c.ff_dim = 2048;
  c.conv_kernel = 15;
  c.masks = {AttentionMask::band(40, 40)};
  return c;
}

EncoderConfig EncoderConfig::paper_scale_streaming() {
  EncoderConfig c = paper_scale();
  c.masks.clear();
  for (std::size_t i = 0; i < c.num_layers; ++i)
    c.masks.push_back(AttentionMask::band(40, i < 10 ? 1 : 0));
  return c;
}

Frontend::Frontend(const EncoderConfig &config, std::mt19937_64 &rng, ParamSet &params,
                   const std::string &prefix) {
  std::tie(stride1_, stride2_) = config.strides();
  const std::size_t f = config.input_dim, d = config.model_dim;
  w1_ = affine(params, prefix + ".conv1.w", 3 * f, d, rng);
  b1_ = zeros(params, prefix + ".conv1.b", d);
  w2_ = affine(params, prefix + ".conv2.w", 3 * d, d, rng);
  b2_ = zeros(params, prefix + ".conv2.b", d);
  wp_ = affine(params, prefix + ".proj.w", d, d, rng);
  bp_ = zeros(params, prefix + ".proj.b", d);
}

Var Frontend::forward(const Var &features) const {
  Var h = ops::swish(ops::linear(ops::unfold_frames(features, 3, stride1_), w1_, b1_));
  h = ops::swish(ops::linear(ops::unfold_frames(h, 3, stride2_), w2_, b2_));
  return ops::linear(h, wp_, bp_);
}

ConformerBlock::ConformerBlock(const EncoderConfig &config, std::size_t layer,
                               std::mt19937_64 &rng, ParamSet &params,
                               const std::string &prefix)
    : heads_(config.num_heads),
      mask_(config.mask_for(layer)),
      lookahead_(config.conv_lookahead(layer)) {
  const std::size_t d = config.model_dim, ff = config.ff_dim, k = config.conv_kernel;
  auto make_ff = [&](const std::string &p) {
    return FeedForward{ones(params, p + ".ln.g", d), zeros(params, p + ".ln.b", d),
                       affine(params, p + ".w1", d, ff, rng), zeros(params, p + ".b1", ff),
                       affine(params, p + ".w2", ff, d, rng), zeros(params, p + ".b2", d)};
  };
  ff1_ = make_ff(prefix + ".ff1");
  att_ln_g_ = ones(params, prefix + ".att.ln.g", d);
  att_ln_b_ = zeros(params, prefix + ".att.ln.b", d);
  wq_ = affine(params, prefix + ".att.wq", d, d, rng);
  bq_ = zeros(params, prefix + ".att.bq", d);
  wk_ = affine(params, prefix + ".att.wk", d, d, rng);
  wv_ = affine(params, prefix + ".att.wv", d, d, rng);
  bv_ = zeros(params, prefix + ".att.bv", d);
  wo_ = affine(params, prefix + ".att.wo", d, d, rng);
  bo_ = zeros(params, prefix + ".att.bo", d);
  conv_ln_g_ = ones(params, prefix + ".conv.ln.g", d);
  conv_ln_b_ = zeros(params, prefix + ".conv.ln.b", d);
  pw_a_ = affine(params, prefix + ".conv.pw_a.w", d, d, rng);
  pw_a_b_ = zeros(params, prefix + ".conv.pw_a.b", d);
  pw_gate_ = affine(params, prefix + ".conv.pw_gate.w", d, d, rng);
  pw_gate_b_ = zeros(params, prefix + ".conv.pw_gate.b", d);
  dw_ = params.add(prefix + ".conv.dw.w", init_uniform({k, d}, k, rng));
  dw_b_ = zeros(params, prefix + ".conv.dw.b", d);
  conv_norm_g_ = ones(params, prefix + ".conv.norm.g", d);
  conv_norm_b_ = zeros(params, prefix + ".conv.norm.b", d);
  pw_out_ = affine(params, prefix + ".conv.pw_out.w", d, d, rng);
  pw_out_b_ = zeros(params, prefix + ".conv.pw_out.b", d);
  ff2_ = make_ff(prefix + ".ff2");
  final_g_ = ones(params, prefix + ".final.ln.g", d);
  final_b_ = zeros(params, prefix + ".final.ln.b", d);
}

Var ConformerBlock::feed_forward(const FeedForward &f, const Var &x) const {
  Var h = ops::layernorm(x, f.ln_g, f.ln_b);
  h = ops::swish(ops::linear(h, f.w1, f.b1));
  return ops::linear(h, f.w2, f.b2);
}

Var ConformerBlock::self_attention(const Var &x) const {
  Var h = ops::layernorm(x, att_ln_g_, att_ln_b_);
  Var q = ops::linear(h, wq_, bq_);
  // No key bias: it shifts every score of a query equally and cancels in the softmax.
  Var k = ops::matmul(h, wk_);
  Var v = ops::linear(h, wv_, bv_);
  return ops::linear(masked_attention(q, k, v, mask_, heads_), wo_, bo_);
}

Var ConformerBlock::convolution(const Var &x) const {
  Var h = ops::layernorm(x, conv_ln_g_, conv_ln_b_);
  // GLU over two pointwise projections.
  h = ops::mul(ops::linear(h, pw_a_, pw_a_b_),
               ops::sigmoid(ops::linear(h, pw_gate_, pw_gate_b_)));
  h = ops::add(ops::depthwise_conv1d(h, dw_, lookahead_), dw_b_);
  h = ops::swish(ops::layernorm(h, conv_norm_g_, conv_norm_b_));
  return ops::linear(h, pw_out_, pw_out_b_);
}

Var ConformerBlock::forward(const Var &x) const {
  Var h = ops::add(x, ops::scale(ops::dropout(feed_forward(ff1_, x)), 0.5));
  h = ops::add(h, ops::dropout(self_attention(h)));
  h = ops::add(h, ops::dropout(convolution(h)));
  h = ops::add(h, ops::scale(ops::dropout(feed_forward(ff2_, h)), 0.5));
  return ops::layernorm(h, final_g_, final_b_);
}

void ConformerBlock::zero_output_projections() {
  for (const Var &v : {ff1_.w2, ff1_.b2, wo_, bo_, pw_out_, pw_out_b_, ff2_.w2, ff2_.b2})
    v->value.fill(0.0);
}

Encoder::Encoder(const EncoderConfig &config, std::mt19937_64 &rng, ParamSet &params,
                 const std::string &prefix)
    : config_(config),
      frontend_((config.validate(), config), rng, params, prefix + ".frontend") {
  for (std::size_t i = 0; i < config_.num_layers; ++i)
    blocks_.emplace_back(config_, i, rng, params, prefix + ".layer" + std::to_string(i));
}

Var Encoder::encode(const Var &features) const {
  const Array &x = features->value;
  if (x.rank() != 2 || x.dim(1) != config_.input_dim)
    throw DimensionError("encode: features " + shape_str(x.shape()) +
                         " do not have width " + std::to_string(config_.input_dim));
  if (x.dim(0) < config_.subsample)
    throw InputError("encode: " + std::to_string(x.dim(0)) +
                     " frames is shorter than the subsample factor " +
                     std::to_string(config_.subsample));
  Var h = frontend_.forward(features);
  for (const ConformerBlock &b : blocks_) h = b.forward(h);
  return h;
}

}  // namespace translab::encoder
