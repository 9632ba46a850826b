// src/encoder/conformer.hpp

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
#include <random>
#include <string>
#include <vector>

#include "core/autodiff.hpp"
#include "core/params.hpp"
#include "encoder/attention.hpp"

namespace translab::encoder {

struct EncoderConfig {
  std::size_t input_dim = 16;  // feature width f
  std::size_t num_layers = 2;
  std::size_t model_dim = 32;
  std::size_t num_heads = 4;
  std::size_t ff_dim = 64;
  std::size_t conv_kernel = 7;
  std::size_t subsample = 4;  // 1, 2 or 4
  // One mask per layer; a single entry applies to every layer.
  std::vector<AttentionMask> masks{AttentionMask::band(40, 40)};

  const AttentionMask &mask_for(std::size_t layer) const {
    return masks.size() == 1 ? masks[0] : masks.at(layer);
  }
  // Strides of the two front-end convolutions.
  std::pair<std::size_t, std::size_t> strides() const;
  // Frames the depthwise convolution of a layer reads ahead: the centered
  // half-width when the layer's right context is unbounded, otherwise 0 so
  // that attention alone spends the right-context budget.
  std::size_t conv_lookahead(std::size_t layer) const;
  std::size_t output_length(std::size_t raw_frames) const {
    return (raw_frames + subsample - 1) / subsample;
  }

  void validate() const;

  // 12 layers, 256 wide, 4 heads, 2048 feed-forward, 40/40 masks.
  static EncoderConfig paper_scale();
  // Streaming variant: right context 1 in the first 10 layers, 0 after.
  static EncoderConfig paper_scale_streaming();
};

// Two strided convolutions (kernel 3) with swish, then an affine map to
// model_dim. Length shrinks by the subsample factor, rounding up.
class Frontend {
 public:
  Frontend(const EncoderConfig &config, std::mt19937_64 &rng, ParamSet &params,
           const std::string &prefix);
  Var forward(const Var &features) const;

 private:
  std::size_t stride1_, stride2_;
  Var w1_, b1_, w2_, b2_, wp_, bp_;
};

// Feed-forward half step, masked multi-head self-attention, convolution
// module, second feed-forward half step, final layernorm; every sublayer is
// pre-normalized and residual.
class ConformerBlock {
 public:
  ConformerBlock(const EncoderConfig &config, std::size_t layer, std::mt19937_64 &rng,
                 ParamSet &params, const std::string &prefix);

  Var forward(const Var &x) const;

  // Zeroes the output projection of every sublayer so each residual branch
  // contributes nothing.
  void zero_output_projections();

 private:
  struct FeedForward {
    Var ln_g, ln_b, w1, b1, w2, b2;
  };
  Var feed_forward(const FeedForward &f, const Var &x) const;
  Var self_attention(const Var &x) const;
  Var convolution(const Var &x) const;

  std::size_t heads_;
  AttentionMask mask_;
  std::size_t lookahead_;
  FeedForward ff1_, ff2_;
  Var att_ln_g_, att_ln_b_, wq_, bq_, wk_, wv_, bv_, wo_, bo_;
  Var conv_ln_g_, conv_ln_b_, pw_a_, pw_a_b_, pw_gate_, pw_gate_b_, dw_, dw_b_;
  Var conv_norm_g_, conv_norm_b_, pw_out_, pw_out_b_;
  Var final_g_, final_b_;
};

class Encoder {
 public:
  Encoder(const EncoderConfig &config, std::mt19937_64 &rng, ParamSet &params,
          const std::string &prefix = "encoder");

  // features [T_raw x input_dim] -> h_enc [ceil(T_raw/subsample) x model_dim].
  Var encode(const Var &features) const;
  Var encode(const Array &features) const { return encode(constant(features)); }

  const EncoderConfig &config() const { return config_; }
  ConformerBlock &block(std::size_t i) { return blocks_.at(i); }

 private:
  EncoderConfig config_;
  Frontend frontend_;
  std::vector<ConformerBlock> blocks_;
};

}  // namespace translab::encoder
