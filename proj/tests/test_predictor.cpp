// tests/test_predictor.cpp

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
#include <vector>

#include "doctest.h"

#include "core/errors.hpp"
#include "core/ops.hpp"
#include "predictor/predictor.hpp"
#include "predictor/rel_attention.hpp"
#include "support/oracles.hpp"

using namespace translab;
using namespace translab::predictor;
using oracle::random_array;

namespace {

// Scores written out term by term: content, content bias, position,
// position bias.
Array rel_attention_oracle(const Array &q, const Array &k, const Array &v, const Array &r,
                           const Array &u, const Array &vb, std::size_t heads, std::size_t M) {
  const std::size_t L = q.dim(0), d = q.dim(1), dk = d / heads;
  Array out(Shape{L, d});
  for (std::size_t h = 0; h < heads; ++h) {
    const std::size_t o = h * dk;
    for (std::size_t i = 0; i < L; ++i) {
      std::vector<double> s;
      for (std::size_t j = 0; j <= M + i; ++j) {
        double ac = 0, bu = 0, bd = 0, dv = 0;
        for (std::size_t c = o; c < o + dk; ++c) {
          ac += q(i, c) * k(j, c);
          bu += u[c] * k(j, c);
          bd += q(i, c) * r(M + i - j, c);
          dv += vb[c] * r(M + i - j, c);
        }
        s.push_back(std::exp((ac + bu + bd + dv) / std::sqrt(double(dk))));
      }
      double z = 0;
      for (double x : s) z += x;
      for (std::size_t j = 0; j < s.size(); ++j)
        for (std::size_t c = o; c < o + dk; ++c) out(i, c) += s[j] / z * v(j, c);
    }
  }
  return out;
}

PredictorConfig small_config(std::size_t memory = 16) {
  PredictorConfig c;
  c.num_layers = 2;
  c.model_dim = 8;
  c.num_heads = 2;
  c.ff_dim = 16;
  c.memory_length = memory;
  c.vocab_size = 5;
  return c;
}

struct PredictorFixture {
  ParamSet params;
  std::mt19937_64 rng{211};
  Predictor pred;
  explicit PredictorFixture(const PredictorConfig &c) : pred(c, rng, params) {
    // Off the initialization point: nonzero biases and position terms.
    std::normal_distribution<double> n(0.0, 0.3);
    for (const auto &p : params.items())
      for (double &v : p.var->value.values()) v += n(rng);
  }
};

Array rows(const Array &a, std::size_t begin, std::size_t end) {
  return ops::slice_rows(constant(a), begin, end)->value;
}

}  // namespace

TEST_CASE("relative attention equals the term-by-term oracle") {
  std::mt19937_64 rng(223);
  for (std::size_t M : {0u, 3u}) {
    const std::size_t L = 4, N = M + L, d = 6;
    const Array q = random_array({L, d}, rng), k = random_array({N, d}, rng),
                v = random_array({N, d}, rng), r = random_array({N, d}, rng),
                u = random_array({d}, rng), vb = random_array({d}, rng);
    const Array got = rel_attention(constant(q), constant(k), constant(v), constant(r),
                                    constant(u), constant(vb), 2, M)
                          ->value;
    CHECK(max_abs_diff(got, rel_attention_oracle(q, k, v, r, u, vb, 2, M)) <= 1e-12);
  }
}

TEST_CASE("without positions and biases it is causal content attention") {
  std::mt19937_64 rng(227);
  const std::size_t M = 2, L = 3, N = 5, d = 4;
  const Array q = random_array({L, d}, rng), k = random_array({N, d}, rng),
              v = random_array({N, d}, rng);
  Var zero_r = constant(Array(Shape{N, d})), zero_b = constant(Array(Shape{d}));
  const Array got =
      rel_attention(constant(q), constant(k), constant(v), zero_r, zero_b, zero_b, 2, M)->value;
  Array mask(Shape{L, N});
  for (std::size_t i = 0; i < L; ++i)
    for (std::size_t j = 0; j <= M + i; ++j) mask(i, j) = 1.0;
  CHECK(max_abs_diff(got, oracle::dense_attention(q, k, v, mask, 2)) <= 1e-12);
}

TEST_CASE("single key returns its value") {
  std::mt19937_64 rng(229);
  const Array v = random_array({1, 4}, rng);
  const Array got = rel_attention(constant(random_array({1, 4}, rng)),
                                  constant(random_array({1, 4}, rng)), constant(v),
                                  constant(random_array({1, 4}, rng)),
                                  constant(random_array({4}, rng)), constant(random_array({4}, rng)),
                                  2, 0)
                        ->value;
  CHECK(max_abs_diff(got, v) <= 1e-15);
}

TEST_CASE("relative attention shape errors") {
  Var a = constant(Array(Shape{3, 4})), b = constant(Array(Shape{4}));
  CHECK_THROWS_AS(rel_attention(a, constant(Array(Shape{4, 4})), a, a, b, b, 2, 0),
                  DimensionError);
  CHECK_THROWS_AS(rel_attention(a, a, a, constant(Array(Shape{2, 4})), b, b, 2, 0),
                  DimensionError);
  CHECK_THROWS_AS(rel_attention(a, a, a, a, b, b, 3, 0), ConfigError);
}

TEST_CASE("relative attention gradient on a 3-row segment") {
  std::mt19937_64 rng(233);
  const std::size_t M = 2, L = 3, N = 5, d = 4;
  Var q = leaf(random_array({L, d}, rng)), k = leaf(random_array({N, d}, rng)),
      v = leaf(random_array({N, d}, rng)), r = leaf(random_array({N, d}, rng)),
      u = leaf(random_array({d}, rng)), vb = leaf(random_array({d}, rng));
  const Array w = random_array({L, d}, rng);
  const auto res = oracle::finite_difference_check(
      [&] { return oracle::probe(rel_attention(q, k, v, r, u, vb, 2, M), w); },
      {q, k, v, r, u, vb});
  CHECK(res.max_rel_err < 1e-4);
}

TEST_CASE("sinusoid table") {
  const Array t = sinusoid_table(5, 6);
  REQUIRE(t.shape() == Shape{5, 6});
  for (std::size_t c = 0; c < 6; c += 2) {
    CHECK(t(0, c) == 0.0);
    CHECK(t(0, c + 1) == 1.0);
  }
  CHECK(t(3, 0) == doctest::Approx(std::sin(3.0)).epsilon(1e-15));
}

TEST_CASE("empty transcript gives the start state only") {
  PredictorFixture f(small_config());
  const auto r = f.pred.predict({});
  CHECK(r.h_pre->shape() == Shape{1, 8});
  CHECK(r.memory.offset == 1);
}

TEST_CASE("predictor is causal") {
  PredictorFixture f(small_config());
  const std::vector<int> y = {1, 4, 2, 5, 3};
  const Array base = f.pred.predict(y).h_pre->value;
  REQUIRE(base.dim(0) == 6);
  for (std::size_t pos = 0; pos < y.size(); ++pos) {
    std::vector<int> z = y;
    z[pos] = z[pos] % 5 + 1;
    const Array other = f.pred.predict(z).h_pre->value;
    // Token y_{pos+1} first appears in row pos+1.
    CHECK(max_abs_diff(rows(base, 0, pos + 1), rows(other, 0, pos + 1)) <= 1e-12);
    CHECK(max_abs_diff(rows(base, pos + 1, 6), rows(other, pos + 1, 6)) > 0.0);
  }
}

TEST_CASE("segments with enough memory equal one-shot processing") {
  const std::vector<int> y = {3, 1, 4, 1, 5, 2};
  for (std::size_t memory : {4u, 7u, 16u}) {
    PredictorFixture f(small_config(memory));
    const Array full = f.pred.predict(y).h_pre->value;
    const auto a = f.pred.predict(std::span<const int>(y).first(3));
    const auto b = f.pred.predict(std::span<const int>(y).subspan(3), a.memory);
    CHECK(a.h_pre->value.dim(0) == 4);
    CHECK(b.h_pre->value.dim(0) == 3);
    CHECK(b.memory.offset == 7);
    CHECK(max_abs_diff(rows(full, 0, 4), a.h_pre->value) <= 1e-9);
    CHECK(max_abs_diff(rows(full, 4, 7), b.h_pre->value) <= 1e-9);
  }
  // Token by token, as greedy decoding runs it.
  PredictorFixture f(small_config(7));
  const Array full = f.pred.predict(y).h_pre->value;
  auto state = f.pred.predict({});
  CHECK(max_abs_diff(rows(full, 0, 1), state.h_pre->value) <= 1e-9);
  for (std::size_t i = 0; i < y.size(); ++i) {
    state = f.pred.predict(std::span<const int>(y).subspan(i, 1), state.memory);
    CHECK(max_abs_diff(rows(full, i + 1, i + 2), state.h_pre->value) <= 1e-9);
  }
}

TEST_CASE("too short a memory loses context") {
  // The start symbol takes one slot, so three tokens need four.
  const std::vector<int> y = {3, 1, 4, 1, 5, 2};
  PredictorFixture f(small_config(3));
  const Array full = f.pred.predict(y).h_pre->value;
  const auto a = f.pred.predict(std::span<const int>(y).first(3));
  CHECK(a.memory.layers[0].dim(0) == 3);
  const auto b = f.pred.predict(std::span<const int>(y).subspan(3), a.memory);
  CHECK(max_abs_diff(rows(full, 4, 7), b.h_pre->value) > 1e-6);
}

TEST_CASE("longer than training sequences stay finite") {
  PredictorFixture f(small_config(16));
  std::mt19937_64 rng(239);
  std::uniform_int_distribution<int> tok(1, 5);
  for (std::size_t U : {12u, 64u}) {
    std::vector<int> y(U);
    for (int &t : y) t = tok(rng);
    const Array h = f.pred.predict(y).h_pre->value;
    CHECK(h.shape() == Shape{U + 1, 8});
    CHECK(h.all_finite());
    const Array p = ops::softmax_lastdim(constant(h))->value;
    for (std::size_t r = 0; r <= U; ++r) {
      double s = 0;
      for (std::size_t c = 0; c < 8; ++c) s += p(r, c);
      CHECK(std::abs(s - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("cached memory receives no gradient") {
  PredictorFixture f(small_config(16));
  const std::vector<int> y = {2, 2, 5, 1};
  const auto a = f.pred.predict(std::span<const int>(y).first(2));
  const auto b = f.pred.predict(std::span<const int>(y).subspan(2), a.memory);
  REQUIRE(b.memory_inputs.size() == 2);
  backward(ops::sum(ops::mul(b.h_pre, b.h_pre)));
  for (const Var &m : b.memory_inputs) {
    CHECK_FALSE(m->requires_grad);
    for (double g : m->grad.values()) CHECK(g == 0.0);
  }
  // Parameters still learn through the current segment.
  double total = 0;
  for (const Var &p : f.params.vars())
    for (double g : p->grad.values()) total += std::abs(g);
  CHECK(total > 0.0);
}

TEST_CASE("predictor input and config errors") {
  PredictorFixture f(small_config());
  const std::vector<int> zero = {1, 0}, big = {6};
  CHECK_THROWS_AS(f.pred.predict(zero), InputError);
  CHECK_THROWS_AS(f.pred.predict(big), InputError);
  PredictorConfig c = small_config();
  c.num_heads = 3;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}
