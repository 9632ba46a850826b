// tests/test_variance.cpp

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

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"

#include "harness/variance_study.hpp"
#include "support/oracles.hpp"

using namespace translab;
using namespace translab::harness;

TEST_CASE("spearman with ties") {
  CHECK(spearman({1, 2, 3, 4}, {10, 20, 30, 40}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(spearman({1, 2, 3, 4}, {4, 3, 2, 1}) == doctest::Approx(-1.0).epsilon(1e-15));
  std::mt19937_64 rng(301);
  std::uniform_int_distribution<int> d(0, 4);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> x(9), y(9);
    for (std::size_t i = 0; i < 9; ++i) x[i] = d(rng), y[i] = d(rng);
    if (oracle::ranks(x) == std::vector<double>(9, 5.0) || oracle::ranks(y) == std::vector<double>(9, 5.0))
      continue;
    CHECK(std::abs(spearman(x, y) - oracle::spearman(x, y)) <= 1e-12);
  }
}

TEST_CASE("study settings double up to umax") {
  CHECK(study_positions(64) == std::vector<std::size_t>{2, 4, 8, 16, 32, 64});
  CHECK(study_positions(20) == std::vector<std::size_t>{2, 4, 8, 16});
  CHECK(study_positions(2) == std::vector<std::size_t>{2});
}

TEST_CASE("synthetic ratios on both sides") {
  for (std::size_t P : {4u, 16u, 64u}) {
    const auto enc = synthetic_variance_ratios(8, P, 4, 10000, 17);
    CHECK(enc.enc_before / double(P) == doctest::Approx(1.0).epsilon(0.2));
    CHECK(enc.enc_after * double(P) == doctest::Approx(1.0).epsilon(0.2));
    const auto pre = synthetic_variance_ratios(P, 8, 4, 10000, 17);
    CHECK(pre.pre_before / double(P) == doctest::Approx(1.0).epsilon(0.2));
    CHECK(pre.pre_after * double(P) == doctest::Approx(1.0).epsilon(0.2));
  }
  // Label-count divisor: U = P - 1.
  const auto labels = synthetic_variance_ratios(8, 16, 4, 10000, 17, joint::DivisorConvention::kLabelCount);
  CHECK(labels.enc_after * 15.0 * 15.0 / 16.0 == doctest::Approx(1.0).epsilon(0.2));
}

TEST_CASE("study records are complete JSON") {
  VarianceStudyOptions opt;
  opt.umax = 8;
  opt.trials = 200;
  opt.real_trials = 1;
  std::vector<std::string> lines;
  const auto settings = run_variance_study(opt, [&](const std::string &l) { lines.push_back(l); });
  REQUIRE(settings.size() == 3);
  REQUIRE(lines.size() == 3);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto j = nlohmann::json::parse(lines[i]);
    CHECK(j.at("positions").get<std::size_t>() == study_positions(8)[i]);
    CHECK(j.at("label_len").get<std::size_t>() == study_positions(8)[i] - 1);
    CHECK(j.at("synthetic_encoder").at("enc_before").is_number());
    CHECK(j.at("synthetic_predictor").at("pre_after").is_number());
    CHECK(j.at("real_rho_before").is_number());
  }
}

// Un-normalized per-utterance encoder-gradient norms must rank with U
// (median rho > 0.9); normalized ones must not (|median rho| < 0.5).
TEST_CASE("real-gradient rank invariant over a mixed-length batch") {
  harness::ModelConfig model;
  model.encoder.subsample = 4;
  const RealGradientStudy s = real_gradient_study(model, RealGradientOptions{});
  MESSAGE("median rho before " << s.median_before << ", after " << s.median_after);
  CHECK(s.rho_before.size() == 20);
  CHECK(s.median_before > 0.9);
  CHECK(std::abs(s.median_after) < 0.5);
}
