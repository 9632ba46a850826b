// src/harness/variance_study.hpp

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

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "harness/config.hpp"
#include "joint/jointer.hpp"

namespace translab::harness {

// Var(aggregated side gradient) / Var(d_z) for i.i.d. standard-normal d_z of
// shape [frames x positions x dim], pooled over `trials` draws.
struct SyntheticRatios {
  std::size_t frames = 0;
  std::size_t positions = 0;
  double enc_before = 0.0, enc_after = 0.0;
  double pre_before = 0.0, pre_after = 0.0;
};

SyntheticRatios synthetic_variance_ratios(std::size_t frames, std::size_t positions,
                                          std::size_t dim, std::size_t trials,
                                          std::uint64_t seed,
                                          joint::DivisorConvention convention =
                                              joint::DivisorConvention::kPredictorPositions);

// Spearman rank correlation with average ranks for ties. NaN when either
// side is constant.
double spearman(const std::vector<double> &x, const std::vector<double> &y);

// Real-model gradients over a mixed-length batch: one rank correlation
// between U and the per-utterance encoder-side gradient norm per trial.
struct RealGradientStudy {
  std::vector<std::size_t> label_lengths;
  std::vector<double> rho_before;  // per trial
  std::vector<double> rho_after;
  double median_before = 0.0;
  double median_after = 0.0;
};

struct RealGradientOptions {
  std::vector<std::size_t> label_lengths = {2, 8, 32};
  std::size_t per_length = 3;  // utterances per label length
  std::size_t trials = 20;
  std::size_t frames_per_token = 4;
  std::uint64_t seed = 17;
};

RealGradientStudy real_gradient_study(const ModelConfig &model, const RealGradientOptions &opt);

struct VarianceSetting {
  std::size_t positions = 0;  // U+1
  SyntheticRatios encoder_side;    // frames fixed, positions = U+1
  SyntheticRatios predictor_side;  // frames = U+1, positions fixed
  double rho_before = 0.0;  // real-gradient medians for the batch built from
  double rho_after = 0.0;   // U in {1, ..., this setting}
  std::vector<double> rho_before_trials, rho_after_trials;
};

struct VarianceStudyOptions {
  std::size_t umax = 64;  // largest U+1; settings are 2, 4, 8, ... <= umax
  std::size_t trials = 10000;
  std::size_t real_trials = 20;
  std::uint64_t seed = 17;
  std::size_t fixed_frames = 8;
  std::size_t fixed_positions = 8;
  std::size_t dim = 4;
};

std::vector<std::size_t> study_positions(std::size_t umax);

// Runs every setting and hands each finished record to `emit` as a JSON line.
std::vector<VarianceSetting> run_variance_study(const VarianceStudyOptions &opt,
                                                const std::function<void(const std::string &)> &emit);

std::string to_json_line(const VarianceSetting &s, std::uint64_t seed, std::size_t trials);

}  // namespace translab::harness
