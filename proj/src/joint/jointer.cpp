// src/joint/jointer.cpp

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

#include "joint/jointer.hpp"

#include <cmath>

#include "core/errors.hpp"
#include "core/ops.hpp"

namespace translab::joint {

void JointConfig::validate() const {
  if (joint_dim < 1) throw ConfigError("jointer.dim must be >= 1");
  if (vocab_size < 1) throw ConfigError("task.vocab must be >= 1");
}

real encoder_divisor(DivisorConvention convention, std::size_t label_len) {
  if (convention == DivisorConvention::kPredictorPositions)
    return static_cast<real>(label_len + 1);
  return static_cast<real>(label_len == 0 ? 1 : label_len);
}

SideGrads aggregate_grads(const Array &d_z) {
  if (d_z.rank() != 3)
    throw DimensionError("aggregate_grads: expected [T x (U+1) x d], got " +
                         shape_str(d_z.shape()));
  const std::size_t T = d_z.dim(0), P = d_z.dim(1), d = d_z.dim(2);
  SideGrads g{Array(Shape{T, d}), Array(Shape{P, d})};
  for (std::size_t t = 0; t < T; ++t)
    for (std::size_t u = 0; u < P; ++u)
      for (std::size_t c = 0; c < d; ++c) {
        const real v = d_z.at3(t, u, c);
        g.enc(t, c) += v;
        g.pre(u, c) += v;
      }
  return g;
}

SideGrads normalize_grads(const SideGrads &g, std::size_t frames, std::size_t label_len,
                          DivisorConvention convention) {
  if (frames == 0) throw InputError("normalize_grads: T must be >= 1");
  const real enc_div = encoder_divisor(convention, label_len);
  const real pre_div = predictor_divisor(frames);
  SideGrads out = g;
  for (real &v : out.enc.values()) v /= enc_div;
  for (real &v : out.pre.values()) v /= pre_div;
  return out;
}

ArrayStats array_stats(const Array &a) {
  ArrayStats s;
  const std::size_t n = a.size();
  if (n == 0) return s;
  real sq = 0.0, mean = 0.0;
  for (real v : a.values()) {
    sq += v * v;
    mean += v;
  }
  s.l2_norm = std::sqrt(sq);
  mean /= static_cast<real>(n);
  if (n > 1) {
    real ss = 0.0;
    for (real v : a.values()) ss += (v - mean) * (v - mean);
    s.variance = ss / static_cast<real>(n - 1);
  }
  const std::size_t rows = a.rows(), cols = a.cols();
  real row_sum = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    real rs = 0.0;
    for (std::size_t c = 0; c < cols; ++c) rs += a[r * cols + c] * a[r * cols + c];
    row_sum += std::sqrt(rs);
  }
  s.mean_row_norm = rows ? row_sum / static_cast<real>(rows) : 0.0;
  return s;
}

GradStats record_stats(const SideGrads &before, const SideGrads &after,
                       std::size_t frames, std::size_t label_len, std::size_t step) {
  return GradStats{step,
                   frames,
                   label_len,
                   array_stats(before.enc),
                   array_stats(after.enc),
                   array_stats(before.pre),
                   array_stats(after.pre)};
}

Jointer::Jointer(const JointConfig &config, std::size_t enc_dim, std::size_t pre_dim,
                 std::mt19937_64 &rng, ParamSet &params, const std::string &prefix)
    : config_(config), enc_dim_(enc_dim), pre_dim_(pre_dim) {
  config_.validate();
  const std::size_t J = config_.joint_dim, K = config_.vocab_size + 1;
  w_enc_ = params.add(prefix + ".enc_proj.w", init_uniform({enc_dim, J}, enc_dim, rng));
  b_enc_ = params.add(prefix + ".enc_proj.b", Array(Shape{J}));
  w_pre_ = params.add(prefix + ".pre_proj.w", init_uniform({pre_dim, J}, pre_dim, rng));
  w_out_ = params.add(prefix + ".out.w", init_uniform({J, K}, J, rng));
  b_out_ = params.add(prefix + ".out.b", Array(Shape{K}));
}

Var Jointer::project_encoder(const Var &h_enc) const {
  if (h_enc->value.rank() != 2 || h_enc->value.dim(1) != enc_dim_)
    throw DimensionError("jointer: encoder output " + shape_str(h_enc->shape()) +
                         " does not have width " + std::to_string(enc_dim_));
  return ops::linear(h_enc, w_enc_, b_enc_);
}

Var Jointer::project_predictor(const Var &h_pre) const {
  if (h_pre->value.rank() != 2 || h_pre->value.dim(1) != pre_dim_)
    throw DimensionError("jointer: predictor output " + shape_str(h_pre->shape()) +
                         " does not have width " + std::to_string(pre_dim_));
  return ops::matmul(h_pre, w_pre_);
}

Var Jointer::combine(const Var &enc_proj, const Var &pre_proj) const {
  Var hidden = ops::tanh(ops::pair_add(enc_proj, pre_proj));
  return ops::linear(hidden, w_out_, b_out_);
}

Jointer::Output Jointer::forward(const Var &h_enc, const Var &h_pre) const {
  Output out;
  out.frames = h_enc->value.dim(0);
  out.positions = h_pre->value.dim(0);
  out.enc_side = project_encoder(h_enc);
  out.pre_side = project_predictor(h_pre);
  if (config_.normalize) {
    const std::size_t U = out.positions - 1;
    out.enc_summed =
        ops::grad_scale(out.enc_side, 1.0 / encoder_divisor(config_.divisor, U));
    out.pre_summed = ops::grad_scale(out.pre_side, 1.0 / predictor_divisor(out.frames));
  } else {
    out.enc_summed = out.enc_side;
    out.pre_summed = out.pre_side;
  }
  out.logits = combine(out.enc_summed, out.pre_summed);
  return out;
}

}  // namespace translab::joint
