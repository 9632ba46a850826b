// src/harness/variance_study.cpp

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

#include "harness/variance_study.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "json.hpp"

#include "core/errors.hpp"
#include "harness/model.hpp"
#include "harness/task.hpp"

namespace translab::harness {

namespace {

// Pooled second moment about zero; every entry has mean 0 by construction,
// so this is the variance estimator with known mean.
struct Moment {
  double sum_sq = 0.0;
  std::size_t n = 0;
  void add(const Array &a) {
    for (double v : a.values()) sum_sq += v * v;
    n += a.size();
  }
  double value() const { return n ? sum_sq / static_cast<double>(n) : 0.0; }
};

std::vector<double> average_ranks(const std::vector<double> &x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return x[a] < x[b]; });
  std::vector<double> rank(x.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) rank[order[k]] = r;
    i = j + 1;
  }
  return rank;
}

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace

SyntheticRatios synthetic_variance_ratios(std::size_t frames, std::size_t positions,
                                          std::size_t dim, std::size_t trials,
                                          std::uint64_t seed,
                                          joint::DivisorConvention convention) {
  if (frames == 0 || positions == 0 || dim == 0 || trials == 0)
    throw ConfigError("synthetic_variance_ratios: sizes and trials must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Moment dz, enc_b, enc_a, pre_b, pre_a;
  Array d_z({frames, positions, dim});
  for (std::size_t trial = 0; trial < trials; ++trial) {
    for (double &v : d_z.values()) v = normal(rng);
    const joint::SideGrads before = joint::aggregate_grads(d_z);
    const joint::SideGrads after =
        joint::normalize_grads(before, frames, positions - 1, convention);
    dz.add(d_z);
    enc_b.add(before.enc);
    enc_a.add(after.enc);
    pre_b.add(before.pre);
    pre_a.add(after.pre);
  }
  SyntheticRatios r;
  r.frames = frames;
  r.positions = positions;
  r.enc_before = enc_b.value() / dz.value();
  r.enc_after = enc_a.value() / dz.value();
  r.pre_before = pre_b.value() / dz.value();
  r.pre_after = pre_a.value() / dz.value();
  return r;
}

double spearman(const std::vector<double> &x, const std::vector<double> &y) {
  if (x.size() != y.size()) throw DimensionError("spearman: length mismatch");
  const std::size_t n = x.size();
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  const std::vector<double> rx = average_ranks(x), ry = average_ranks(y);
  const double mean = 0.5 * static_cast<double>(n + 1);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (rx[i] - mean) * (ry[i] - mean);
    sxx += (rx[i] - mean) * (rx[i] - mean);
    syy += (ry[i] - mean) * (ry[i] - mean);
  }
  if (sxx == 0.0 || syy == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return sxy / std::sqrt(sxx * syy);
}

RealGradientStudy real_gradient_study(const ModelConfig &model_config,
                                      const RealGradientOptions &opt) {
  if (opt.label_lengths.size() < 2 || opt.per_length == 0 || opt.trials == 0)
    throw ConfigError("real_gradient_study: need two label lengths and positive counts");
  RealGradientStudy study;
  for (std::size_t trial = 0; trial < opt.trials; ++trial) {
    const std::uint64_t seed = opt.seed + 7919 * trial;
    ModelConfig mc = model_config;
    mc.joint.normalize = true;
    TransducerModel model(mc, seed);
    Batch batch;
    std::mt19937_64 rng(seed ^ 0x5eedULL);
    for (std::size_t len : opt.label_lengths) {
      ToyTaskConfig tc;
      tc.vocab_size = mc.joint.vocab_size;
      tc.feature_dim = mc.encoder.input_dim;
      tc.min_labels = tc.max_labels = len;
      tc.min_frames_per_token = tc.max_frames_per_token = opt.frames_per_token;
      tc.seed = seed;
      ToyTask task(tc);
      for (std::size_t k = 0; k < opt.per_length; ++k) batch.utterances.push_back(task.sample(rng));
    }
    auto graph = model.forward(batch);
    backward(graph.loss);
    std::vector<double> u, before, after;
    for (const joint::GradStats &s : model.grad_stats(graph, 0)) {
      u.push_back(static_cast<double>(s.label_len));
      before.push_back(s.enc_before.l2_norm);
      after.push_back(s.enc_after.l2_norm);
    }
    if (trial == 0)
      for (double v : u) study.label_lengths.push_back(static_cast<std::size_t>(v));
    study.rho_before.push_back(spearman(u, before));
    study.rho_after.push_back(spearman(u, after));
  }
  study.median_before = median(study.rho_before);
  study.median_after = median(study.rho_after);
  return study;
}

std::vector<std::size_t> study_positions(std::size_t umax) {
  if (umax < 2) throw ConfigError("variance study: umax must be >= 2");
  std::vector<std::size_t> p;
  for (std::size_t v = 2; v <= umax; v *= 2) p.push_back(v);
  return p;
}

std::vector<VarianceSetting> run_variance_study(
    const VarianceStudyOptions &opt, const std::function<void(const std::string &)> &emit) {
  if (opt.trials == 0) throw ConfigError("variance study: trials must be positive");
  std::vector<VarianceSetting> out;
  ModelConfig mc;
  mc.joint.normalize = true;
  for (std::size_t positions : study_positions(opt.umax)) {
    VarianceSetting s;
    s.positions = positions;
    s.encoder_side = synthetic_variance_ratios(opt.fixed_frames, positions, opt.dim, opt.trials,
                                               opt.seed + positions);
    s.predictor_side = synthetic_variance_ratios(positions, opt.fixed_positions, opt.dim,
                                                 opt.trials, opt.seed + 1000 + positions);
    if (opt.real_trials > 0) {
      RealGradientOptions ro;
      ro.label_lengths.clear();
      // Mixed batch up to this setting: U = 1, 3, 7, ... (U+1 doubling).
      for (std::size_t p = 2; p <= positions; p *= 2) ro.label_lengths.push_back(p - 1);
      if (ro.label_lengths.size() < 2) ro.label_lengths = {1, 2};
      ro.trials = opt.real_trials;
      ro.seed = opt.seed;
      const RealGradientStudy rg = real_gradient_study(mc, ro);
      s.rho_before = rg.median_before;
      s.rho_after = rg.median_after;
      s.rho_before_trials = rg.rho_before;
      s.rho_after_trials = rg.rho_after;
    }
    if (emit) emit(to_json_line(s, opt.seed, opt.trials));
    out.push_back(std::move(s));
  }
  return out;
}

std::string to_json_line(const VarianceSetting &s, std::uint64_t seed, std::size_t trials) {
  auto ratios = [](const SyntheticRatios &r) {
    return nlohmann::json{{"frames", r.frames},
                          {"positions", r.positions},
                          {"enc_before", r.enc_before},
                          {"enc_after", r.enc_after},
                          {"pre_before", r.pre_before},
                          {"pre_after", r.pre_after}};
  };
  auto finite_or_null = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(); };
  nlohmann::json j{{"record", "variance_study"},
                   {"seed", seed},
                   {"trials", trials},
                   {"positions", s.positions},
                   {"label_len", s.positions - 1},
                   {"synthetic_encoder", ratios(s.encoder_side)},
                   {"synthetic_predictor", ratios(s.predictor_side)},
                   {"real_rho_before", finite_or_null(s.rho_before)},
                   {"real_rho_after", finite_or_null(s.rho_after)}};
  return j.dump();
}

}  // namespace translab::harness
