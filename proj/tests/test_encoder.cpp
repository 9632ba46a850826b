// tests/test_encoder.cpp

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
#include "encoder/attention.hpp"
#include "encoder/conformer.hpp"
#include "harness/gradcheck.hpp"
#include "support/oracles.hpp"

using namespace translab;
using namespace translab::encoder;
using oracle::random_array;

namespace {

EncoderConfig small_config(std::size_t subsample, std::vector<AttentionMask> masks) {
  EncoderConfig c;
  c.input_dim = 5;
  c.num_layers = masks.size();
  c.model_dim = 8;
  c.num_heads = 2;
  c.ff_dim = 16;
  c.conv_kernel = 5;
  c.subsample = subsample;
  c.masks = std::move(masks);
  return c;
}

struct EncoderFixture {
  ParamSet params;
  std::mt19937_64 rng{101};
  Encoder encoder;
  explicit EncoderFixture(const EncoderConfig &c) : encoder(c, rng, params) {}
  Array run(const Array &x) {
    NoGradGuard guard;
    return encoder.encode(x)->value;
  }
};

// Rows [0, upto) identical.
bool same_prefix(const Array &a, const Array &b, std::size_t upto) {
  for (std::size_t t = 0; t < upto; ++t)
    for (std::size_t c = 0; c < a.cols(); ++c)
      if (std::abs(a(t, c) - b(t, c)) > 1e-12) return false;
  return true;
}

}  // namespace

TEST_CASE("mask realization") {
  const Array m = AttentionMask::band(1, 2).realize(6, 6);
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(m(i, i) == 1.0);
    for (std::size_t l = 0; l < 6; ++l) {
      const long off = long(l) - long(i);
      CHECK(m(i, l) == ((off >= -1 && off <= 2) ? 1.0 : 0.0));
    }
  }
  const Array padded = AttentionMask::full().realize(3, 5, 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(padded(i, 3) == 0.0);
    CHECK(padded(i, 4) == 0.0);
    CHECK(padded(i, 0) == 1.0);
  }
}

TEST_CASE("masked attention equals the additive-mask oracle") {
  std::mt19937_64 rng(103);
  const Array q = random_array({4, 6}, rng), k = random_array({4, 6}, rng),
              v = random_array({4, 6}, rng);
  const Array m = AttentionMask::band(1, 1).realize(4, 4);
  const Array got = masked_attention(constant(q), constant(k), constant(v), m, 1)->value;
  CHECK(max_abs_diff(got, oracle::dense_attention(q, k, v, m, 1)) <= 1e-10);

  for (auto mask : {AttentionMask::band(0, 0), AttentionMask::band(2, 0), AttentionMask::band(0, 3),
                    AttentionMask::band(3, 1), AttentionMask{std::nullopt, 1},
                    AttentionMask{2, std::nullopt}}) {
    const Array q7 = random_array({7, 8}, rng, 2.0), k7 = random_array({7, 8}, rng, 2.0),
                v7 = random_array({7, 8}, rng);
    const Array mm = mask.realize(7, 7);
    const Array out = masked_attention(constant(q7), constant(k7), constant(v7), mask, 2)->value;
    CHECK(max_abs_diff(out, oracle::dense_attention(q7, k7, v7, mm, 2)) <= 1e-10);
  }
}

TEST_CASE("unmasked attention is standard attention") {
  std::mt19937_64 rng(107);
  const Array q = random_array({5, 4}, rng), k = random_array({5, 4}, rng),
              v = random_array({5, 4}, rng);
  const Array out = masked_attention(constant(q), constant(k), constant(v), AttentionMask::full())->value;
  // softmax(QK^T / 2) V, written out directly.
  Array ref(Shape{5, 4});
  for (std::size_t i = 0; i < 5; ++i) {
    std::vector<double> s(5);
    double z = 0;
    for (std::size_t l = 0; l < 5; ++l) {
      double dotp = 0;
      for (std::size_t c = 0; c < 4; ++c) dotp += q(i, c) * k(l, c);
      s[l] = std::exp(dotp / 2.0);
      z += s[l];
    }
    for (std::size_t l = 0; l < 5; ++l)
      for (std::size_t c = 0; c < 4; ++c) ref(i, c) += s[l] / z * v(l, c);
  }
  CHECK(max_abs_diff(out, ref) <= 1e-12);
}

TEST_CASE("diagonal mask returns the values") {
  std::mt19937_64 rng(109);
  const Array v = random_array({6, 4}, rng);
  const Array out = masked_attention(constant(random_array({6, 4}, rng)),
                                     constant(random_array({6, 4}, rng)), constant(v),
                                     AttentionMask::band(0, 0), 2)
                        ->value;
  CHECK(out == v);
}

TEST_CASE("fully masked row is rejected") {
  Array m(Shape{2, 2}, 1.0);
  m(1, 0) = m(1, 1) = 0.0;
  Var x = constant(Array(Shape{2, 2}, 1.0));
  CHECK_THROWS_AS(masked_attention(x, x, x, m), InputError);
}

TEST_CASE("zero padding keys never change the output") {
  std::mt19937_64 rng(113);
  const Array q = random_array({4, 4}, rng), k = random_array({4, 4}, rng),
              v = random_array({4, 4}, rng);
  const Array base = masked_attention(constant(q), constant(k), constant(v),
                                      AttentionMask::band(1, 1).realize(4, 4))->value;
  Array kp(Shape{7, 4}), vp(Shape{7, 4});
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t c = 0; c < 4; ++c) kp(i, c) = k(i, c), vp(i, c) = v(i, c);
  for (auto wider : {AttentionMask::band(1, 1), AttentionMask::band(3, 3), AttentionMask::full()}) {
    const Array m = wider.realize(4, 7, 4);
    Array narrow = AttentionMask::band(1, 1).realize(4, 7, 4);
    const Array out = masked_attention(constant(q), constant(kp), constant(vp),
                                       wider == AttentionMask::band(1, 1) ? narrow : m)->value;
    if (wider == AttentionMask::band(1, 1)) CHECK(out == base);
    for (double x : out.values()) CHECK(std::isfinite(x));
  }
}

TEST_CASE("attention gradient") {
  std::mt19937_64 rng(127);
  Var q = leaf(random_array({5, 4}, rng)), k = leaf(random_array({5, 4}, rng)),
      v = leaf(random_array({5, 4}, rng));
  const Array w = random_array({5, 4}, rng);
  const auto r = oracle::finite_difference_check(
      [&] { return oracle::probe(masked_attention(q, k, v, AttentionMask::band(2, 1), 2), w); },
      {q, k, v});
  CHECK(r.max_rel_err < 1e-4);
}

TEST_CASE("block with zeroed output projections reduces to its final layernorm") {
  const EncoderConfig c = small_config(1, {AttentionMask::band(2, 2)});
  ParamSet params;
  std::mt19937_64 rng(131);
  ConformerBlock block(c, 0, rng, params, "b");
  block.zero_output_projections();
  const Array x = random_array({6, 8}, rng);
  const Array out = block.forward(constant(x))->value;
  const Array ln = ops::layernorm(constant(x), constant(Array(Shape{8}, 1.0)),
                                  constant(Array(Shape{8})))->value;
  CHECK(max_abs_diff(out, ln) <= 1e-12);
}

TEST_CASE("block gradient on a 2x8 input") {
  const EncoderConfig c = small_config(1, {AttentionMask::full()});
  ParamSet params;
  std::mt19937_64 rng(137);
  ConformerBlock block(c, 0, rng, params, "b");
  // A unit-gain final layernorm makes every row of the output sum to zero.
  params.find("b.final.ln.g")->value = random_array({8}, rng);
  Var x = leaf(random_array({2, 8}, rng));
  std::vector<Var> leaves = {x};
  for (const Var &v : params.vars()) leaves.push_back(v);
  const auto r = oracle::finite_difference_check([&] { return ops::sum(block.forward(x)); }, leaves);
  CHECK(r.max_rel_err < 1e-4);
}

TEST_CASE("front-end lengths and errors") {
  for (std::size_t s : {1u, 2u, 4u}) {
    EncoderFixture f(small_config(s, {AttentionMask::band(2, 2)}));
    std::mt19937_64 rng(139);
    for (std::size_t raw : {s, s + 1, 8 * s + 1})
      CHECK(f.run(random_array({raw, 5}, rng)).dim(0) == (raw + s - 1) / s);
  }
  EncoderFixture f(small_config(4, {AttentionMask::band(2, 2)}));
  std::mt19937_64 rng(149);
  CHECK(f.run(random_array({8, 5}, rng)).dim(0) == 2);
  CHECK(f.run(random_array({9, 5}, rng)).dim(0) == 3);
  CHECK_THROWS_AS(f.run(random_array({3, 5}, rng)), InputError);
  CHECK_THROWS_AS(f.run(random_array({8, 4}, rng)), DimensionError);
}

TEST_CASE("configuration checks") {
  CHECK_NOTHROW(EncoderConfig::paper_scale().validate());
  const EncoderConfig s = EncoderConfig::paper_scale_streaming();
  CHECK_NOTHROW(s.validate());
  REQUIRE(s.masks.size() == 12);
  for (std::size_t i = 0; i < 12; ++i) CHECK(*s.mask_for(i).right == (i < 10 ? 1u : 0u));

  EncoderConfig bad = small_config(1, {AttentionMask::band(1, 1)});
  bad.num_heads = 3;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = small_config(1, {AttentionMask::band(1, 1)});
  bad.conv_kernel = 4;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = small_config(3, {AttentionMask::band(1, 1)});
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = small_config(1, {AttentionMask::band(1, 1), AttentionMask::band(1, 1)});
  bad.num_layers = 3;
  CHECK_THROWS_AS(bad.validate(), ConfigError);

  const EncoderConfig c = small_config(1, {AttentionMask::band(4, 0), AttentionMask::band(4, 2),
                                           AttentionMask::full()});
  CHECK(c.conv_lookahead(0) == 0);
  CHECK(c.conv_lookahead(1) == 0);
  CHECK(c.conv_lookahead(2) == 2);
}

TEST_CASE("diagonal-only masks still give finite outputs") {
  EncoderFixture f(small_config(2, {AttentionMask::band(0, 0), AttentionMask::band(0, 0)}));
  std::mt19937_64 rng(151);
  const Array out = f.run(random_array({10, 5}, rng, 3.0));
  CHECK(out.all_finite());
}

TEST_CASE("causal encoder ignores the future") {
  EncoderFixture f(small_config(1, {AttentionMask::band(3, 0), AttentionMask::band(3, 0)}));
  std::mt19937_64 rng(157);
  const Array x = random_array({10, 5}, rng);
  const Array base = f.run(x);
  for (std::size_t t = 0; t + 1 < 10; ++t) {
    Array bumped = x;
    for (std::size_t c = 0; c < 5; ++c) bumped(t + 1, c) += 1.0;
    const Array y = f.run(bumped);
    CHECK(same_prefix(base, y, t + 1));
    CHECK_FALSE(same_prefix(base, y, t + 2));
  }
}

TEST_CASE("streaming latency: frame t reads raw frames up to 4t+3") {
  EncoderFixture f(small_config(4, {AttentionMask::band(8, 0), AttentionMask::band(8, 0)}));
  std::mt19937_64 rng(163);
  const Array x = random_array({29, 5}, rng);
  const Array base = f.run(x);
  REQUIRE(base.dim(0) == 8);
  for (std::size_t raw = 0; raw < 29; ++raw) {
    Array bumped = x;
    bumped(raw, 0) += 0.5;
    const Array y = f.run(bumped);
    const std::size_t first_affected = raw / 4;  // smallest t with 4t+3 >= raw
    CHECK(same_prefix(base, y, first_affected));
    CHECK_FALSE(same_prefix(base, y, first_affected + 1));
  }
}

TEST_CASE("receptive field is bounded by the summed right contexts") {
  for (std::size_t s : {1u, 4u}) {
    EncoderFixture f(small_config(s, {AttentionMask::band(2, 1), AttentionMask::band(1, 2),
                                      AttentionMask::band(2, 0)}));
    const std::size_t R = 3, T = 12;
    std::mt19937_64 rng(167);
    const Array x = random_array({T * s, 5}, rng);
    const Array base = f.run(x);
    for (std::size_t t = 0; t + R + 1 < T; ++t) {
      // Perturb every encoder frame beyond t + R at once.
      Array bumped = x;
      for (std::size_t raw = (t + R + 1) * s; raw < T * s; ++raw) bumped(raw, 1) -= 0.7;
      CHECK(same_prefix(base, f.run(bumped), t + 1));
      Array at_bound = x;
      for (std::size_t raw = (t + R) * s; raw < (t + R + 1) * s; ++raw) at_bound(raw, 1) -= 0.7;
      const Array y = f.run(at_bound);
      CHECK(std::abs(y(t, 0) - base(t, 0)) > 0.0);
    }
  }
}

TEST_CASE("encoder output is deterministic") {
  EncoderFixture f(small_config(4, {AttentionMask::band(2, 2), AttentionMask::band(2, 2)}));
  std::mt19937_64 rng(173);
  const Array x = random_array({13, 5}, rng);
  CHECK(f.run(x) == f.run(x));
}

TEST_CASE("two-layer encoder gradient, front-end included") {
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto report = harness::run_gradcheck("encoder", seed, 1e-4);
    REQUIRE(report.checks.size() == 1);
    INFO(harness::format_result(report.checks[0]));
    CHECK(report.passed);
  }
}
