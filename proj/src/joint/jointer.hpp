// src/joint/jointer.hpp

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
#include <mutex>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "core/array.hpp"
#include "core/autodiff.hpp"
#include "core/params.hpp"

namespace translab::joint {

// Which count divides the encoder-side gradient sum.
enum class DivisorConvention {
  kPredictorPositions,  // U+1: every column of the lattice, start position included
  kLabelCount,          // U (clamped to 1 when U = 0)
};

struct JointConfig {
  std::size_t joint_dim = 32;
  std::size_t vocab_size = 8;  // V, blank excluded
  bool normalize = true;
  DivisorConvention divisor = DivisorConvention::kPredictorPositions;

  void validate() const;
};

real encoder_divisor(DivisorConvention convention, std::size_t label_len);
inline real predictor_divisor(std::size_t frames) { return static_cast<real>(frames); }

// Gradients reaching the two sides of the broadcast sum.
struct SideGrads {
  Array enc;  // [T x d]
  Array pre;  // [(U+1) x d]
};

// d_z is [T x (U+1) x d]: enc(t) = sum_u d_z(t,u), pre(u) = sum_t d_z(t,u).
SideGrads aggregate_grads(const Array &d_z);

// enc / encoder_divisor(U), pre / T.
SideGrads normalize_grads(const SideGrads &g, std::size_t frames, std::size_t label_len,
                          DivisorConvention convention = DivisorConvention::kPredictorPositions);

struct ArrayStats {
  real l2_norm = 0.0;
  real mean_row_norm = 0.0;  // average L2 norm of the rows (frames / positions)
  real variance = 0.0;       // two-pass sample variance of all elements
};

ArrayStats array_stats(const Array &a);

struct GradStats {
  std::size_t step = 0;
  std::size_t frames = 0;
  std::size_t label_len = 0;
  ArrayStats enc_before, enc_after;
  ArrayStats pre_before, pre_after;
};

GradStats record_stats(const SideGrads &before, const SideGrads &after,
                       std::size_t frames, std::size_t label_len, std::size_t step);

// Append-only, thread-safe record stream.
class GradStatsStream {
 public:
  void append(GradStats s) {
    std::lock_guard<std::mutex> lock(mu_);
    records_.push_back(std::move(s));
  }
  std::vector<GradStats> take() {
    std::lock_guard<std::mutex> lock(mu_);
    return std::exchange(records_, {});
  }

 private:
  std::mutex mu_;
  std::vector<GradStats> records_;
};

// z(t,u) = W_out tanh(enc_proj(t) + pre_proj(u)) + b_out, with separate
// affine projections of the encoder and predictor outputs into joint_dim.
class Jointer {
 public:
  Jointer(const JointConfig &config, std::size_t enc_dim, std::size_t pre_dim,
          std::mt19937_64 &rng, ParamSet &params, const std::string &prefix = "joint");

  struct Output {
    Var logits;      // [T*(U+1) x (V+1)], row t*(U+1)+u
    Var enc_side;    // projected encoder rows fed to the sum (gradient after scaling)
    Var pre_side;    // projected predictor rows fed to the sum
    Var enc_summed;  // node the sum reads from the encoder side (gradient before scaling)
    Var pre_summed;
    std::size_t frames = 0;
    std::size_t positions = 0;
  };

  // Full lattice of logits. When config.normalize is set the two sides pass
  // through gradient-scaling nodes with 1/divisor_U and 1/T.
  Output forward(const Var &h_enc, const Var &h_pre) const;

  Var project_encoder(const Var &h_enc) const;
  Var project_predictor(const Var &h_pre) const;
  // Logits for already-projected rows: combines a [T x J] with b [P x J].
  Var combine(const Var &enc_proj, const Var &pre_proj) const;

  const JointConfig &config() const { return config_; }
  void set_normalize(bool on) { config_.normalize = on; }

 private:
  JointConfig config_;
  std::size_t enc_dim_, pre_dim_;
  Var w_enc_, b_enc_, w_pre_, w_out_, b_out_;
};

}  // namespace translab::joint
