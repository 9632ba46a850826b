// tests/test_lattice.cpp

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
#include <future>
#include <random>
#include <vector>

#include "doctest.h"

#include "core/errors.hpp"
#include "lattice/loss_op.hpp"
#include "lattice/rnnt_lattice.hpp"
#include "support/oracles.hpp"

using namespace translab;
using namespace translab::rnnt;

namespace {

struct Instance {
  Array logits;
  std::vector<int> labels;
};

Instance random_instance(std::mt19937_64 &rng, std::size_t T, std::size_t U, std::size_t V,
                         double scale = 2.0) {
  Instance in{oracle::random_array({T, U + 1, V + 1}, rng, scale), {}};
  std::uniform_int_distribution<int> tok(1, static_cast<int>(V));
  for (std::size_t u = 0; u < U; ++u) in.labels.push_back(tok(rng));
  return in;
}

Array softmax_grid(const Array &logits) {
  Array p = logits;
  const std::size_t K = logits.dim(2);
  for (std::size_t r = 0; r < logits.size() / K; ++r) {
    double m = -INFINITY, z = 0;
    for (std::size_t k = 0; k < K; ++k) m = std::max(m, logits[r * K + k]);
    for (std::size_t k = 0; k < K; ++k) z += std::exp(logits[r * K + k] - m);
    for (std::size_t k = 0; k < K; ++k) p[r * K + k] = std::exp(logits[r * K + k] - m) / z;
  }
  return p;
}

}  // namespace

TEST_CASE("single cell lattice") {
  Array probs(Shape{1, 1, 2}, std::vector<double>{0.7, 0.3});
  const auto grid = PosteriorGrid::from_probs(probs);
  const Lattice fwd = forward_alpha(grid, {});
  CHECK(fwd.log_alpha(0, 0) == 0.0);
  CHECK(std::abs(fwd.log_prob - std::log(0.7)) < 1e-15);
  const Lattice bwd = backward_beta(grid, {});
  CHECK(std::abs(bwd.log_beta(0, 0) - std::log(0.7)) < 1e-15);

  std::size_t visited = 0;
  CHECK(std::abs(oracle_loss(grid, {}, &visited) + std::log(0.7)) < 1e-15);
  CHECK(visited == 1);
}

TEST_CASE("certain event has zero loss and zero gradient") {
  const auto r = rnnt_loss(PosteriorGrid::from_probs(Array(Shape{1, 1, 2}, {1.0, 0.0})), {});
  CHECK(r.loss == 0.0);
  for (double g : r.d_logits.values()) CHECK(g == 0.0);
}

TEST_CASE("uniform two by two lattice") {
  const std::vector<int> y = {1};
  const Array logits(Shape{2, 2, 2}, 0.0);
  const auto r = rnnt_loss(logits, y);
  CHECK(std::abs(std::exp(r.log_prob) - 0.25) < 1e-15);
  CHECK(std::abs(r.loss - std::log(4.0)) < 1e-15);
  CHECK(r.loss == doctest::Approx(1.386294).epsilon(1e-6));
  const auto grid = PosteriorGrid::from_logits(logits);
  CHECK(std::abs(oracle_loss(grid, y) - std::log(4.0)) < 1e-15);
}

TEST_CASE("path counts") {
  CHECK(alignment_count(3, 2) == 6);
  CHECK(alignment_count(4, 3) == 20);
  CHECK(alignment_count(1, 0) == 1);
  std::mt19937_64 rng(2);
  const auto in = random_instance(rng, 3, 2, 3);
  std::size_t visited = 0;
  oracle_loss(PosteriorGrid::from_logits(in.logits), in.labels, &visited);
  CHECK(visited == 6);
}

TEST_CASE("forward, backward and enumeration agree on random grids") {
  std::mt19937_64 rng(3);
  {
    const auto in = random_instance(rng, 4, 3, 3);
    const auto grid = PosteriorGrid::from_logits(in.logits);
    const double p_paths = oracle::path_sum(softmax_grid(in.logits), in.labels);
    const double p_fwd = std::exp(forward_alpha(grid, in.labels).log_prob);
    CHECK(std::abs(p_fwd - p_paths) / p_paths < 1e-10);
  }
  std::uniform_int_distribution<std::size_t> Td(1, 7), Ud(0, 6), Vd(1, 4);
  double worst = 0;
  for (int i = 0; i < 100; ++i) {
    const std::size_t T = Td(rng), U = Ud(rng);
    const auto in = random_instance(rng, T, U, Vd(rng));
    const auto grid = PosteriorGrid::from_logits(in.logits);
    const double fwd = forward_alpha(grid, in.labels).log_prob;
    const double bwd = backward_beta(grid, in.labels).log_beta(0, 0);
    const double paths = -oracle_loss(grid, in.labels);
    const double p_enum = oracle::path_sum(softmax_grid(in.logits), in.labels);
    worst = std::max({worst, std::abs(std::expm1(fwd - paths)), std::abs(std::expm1(bwd - fwd)),
                      std::abs(std::exp(fwd) - p_enum) / p_enum});
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("enumeration refuses large lattices") {
  std::mt19937_64 rng(4);
  const auto in = random_instance(rng, 8, 7, 2);
  CHECK_THROWS_AS(oracle_loss(PosteriorGrid::from_logits(in.logits), in.labels), InputError);
}

TEST_CASE("anti-diagonal sums are constant") {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 20; ++rep) {
    const auto in = random_instance(rng, 5, 4, 3);
    const Lattice lat = forward_backward(PosteriorGrid::from_logits(in.logits), in.labels);
    const auto sums = antidiagonal_log_sums(lat);
    REQUIRE(sums.size() == 5 + 4);
    for (double s : sums) CHECK(std::abs(s - lat.log_prob) < 1e-9);
  }
}

TEST_CASE("log values stay non-positive for normalized posteriors") {
  std::mt19937_64 rng(6);
  const auto in = random_instance(rng, 6, 5, 4, 4.0);
  const Lattice lat = forward_backward(PosteriorGrid::from_logits(in.logits), in.labels);
  for (double v : lat.log_alpha.values()) CHECK(v <= 1e-9);
  for (double v : lat.log_beta.values()) CHECK(v <= 1e-9);
}

TEST_CASE("gradient properties") {
  std::mt19937_64 rng(7);
  for (int rep = 0; rep < 20; ++rep) {
    const auto in = random_instance(rng, 5, 3, 4);
    const auto r = rnnt_loss(in.logits, in.labels);
    const std::size_t K = in.logits.dim(2);
    for (std::size_t c = 0; c < in.logits.size() / K; ++c) {
      double s = 0;
      for (std::size_t k = 0; k < K; ++k) s += r.d_logits[c * K + k];
      CHECK(std::abs(s) < 1e-10);
    }
    Array shifted = in.logits;
    std::uniform_real_distribution<double> shift(-5, 5);
    for (std::size_t c = 0; c < in.logits.size() / K; ++c) {
      const double d = shift(rng);
      for (std::size_t k = 0; k < K; ++k) shifted[c * K + k] += d;
    }
    CHECK(std::abs(rnnt_loss(shifted, in.labels).loss - r.loss) < 1e-10);
  }
}

TEST_CASE("analytic gradient matches finite differences") {
  std::mt19937_64 rng(8);
  const auto in = random_instance(rng, 4, 3, 3);
  Var z = leaf(in.logits);
  const auto res = oracle::finite_difference_check(
      [&] { return rnnt_loss_op(z, 4, in.labels); }, {z});
  CHECK(res.coordinates == 4 * 4 * 4);
  CHECK(res.max_rel_err < 1e-4);

  // The op and the raw function agree.
  const auto r = rnnt_loss(in.logits, in.labels);
  zero_grads(std::span<const Var>(&z, 1));
  backward(rnnt_loss_op(z, 4, in.labels));
  CHECK(max_abs_diff(z->grad, r.d_logits) == 0.0);
}

TEST_CASE("input errors") {
  const Array logits(Shape{2, 3, 3}, 0.0);
  const std::vector<int> blank_inside = {1, 0};
  CHECK_THROWS_AS(rnnt_loss(logits, blank_inside), InputError);
  const std::vector<int> out_of_range = {1, 3};
  CHECK_THROWS_AS(rnnt_loss(logits, out_of_range), InputError);
  const std::vector<int> too_short = {1};
  CHECK_THROWS_AS(rnnt_loss(logits, too_short), DimensionError);
  CHECK_THROWS_AS(rnnt_loss(Array(Shape{0, 1, 2}), {}), InputError);
}

TEST_CASE("impossible alignment is reported") {
  Array probs(Shape{2, 2, 3}, std::vector<double>{0.5, 0.5, 0.0, 0.5, 0.5, 0.0,  //
                                                  0.5, 0.5, 0.0, 0.5, 0.5, 0.0});
  const std::vector<int> y = {2};
  const auto grid = PosteriorGrid::from_probs(probs);
  CHECK(std::isinf(forward_alpha(grid, y).log_prob));
  CHECK_THROWS_AS(rnnt_loss(grid, y), NumericError);
}

TEST_CASE("concurrent evaluation equals sequential evaluation") {
  std::mt19937_64 rng(9);
  std::vector<Instance> batch;
  for (std::size_t i = 0; i < 8; ++i) batch.push_back(random_instance(rng, 3 + i, i, 5));
  std::vector<std::future<LossResult>> futures;
  for (const auto &in : batch)
    futures.push_back(std::async(std::launch::async, [&in] { return rnnt_loss(in.logits, in.labels); }));
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto serial = rnnt_loss(batch[i].logits, batch[i].labels);
    const auto parallel = futures[i].get();
    CHECK(serial.loss == parallel.loss);
    CHECK(serial.d_logits == parallel.d_logits);
  }
}
