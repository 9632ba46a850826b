// src/core/ops.cpp

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

#include "core/ops.hpp"

#include <algorithm>
#include <cmath>

#include "core/errors.hpp"

namespace translab::ops {

namespace {

void require_rank2(const Var &x, const char *op) {
  if (x->value.rank() != 2)
    throw DimensionError(std::string(op) + ": expected a 2-D operand, got " +
                         shape_str(x->shape()));
}

bool is_suffix(const Shape &small, const Shape &big) {
  if (small.size() > big.size()) return false;
  return std::equal(small.rbegin(), small.rend(), big.rbegin());
}

// Resolves which operand is broadcast. Returns true if b is the big operand.
bool broadcast_swapped(const Var &a, const Var &b, const char *op) {
  const Shape &sa = a->shape(), &sb = b->shape();
  if (sa == sb) return false;
  if (b->value.size() == 1 || is_suffix(sb, sa)) return false;
  if (a->value.size() == 1 || is_suffix(sa, sb)) return true;
  throw DimensionError(std::string(op) + ": cannot broadcast " + shape_str(sa) +
                       " with " + shape_str(sb));
}

real sigmoid_scalar(real x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  real e = std::exp(x);
  return e / (1.0 + e);
}

template <typename F, typename D>
Var unary(const Var &a, const char *name, F f, D dfdx) {
  Array out(a->shape());
  const Array &x = a->value;
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = f(x[i]);
  require_finite(out, name);
  return make_node(std::move(out), {a}, name, [dfdx](Node &self) {
    Node &p = *self.parents[0];
    if (!p.requires_grad) return;
    for (std::size_t i = 0; i < self.grad.size(); ++i)
      p.grad[i] += self.grad[i] * dfdx(p.value[i], self.value[i]);
  });
}

}  // namespace

Var matmul(const Var &a, const Var &b) {
  require_rank2(a, "matmul");
  require_rank2(b, "matmul");
  const std::size_t m = a->value.dim(0), k = a->value.dim(1), n = b->value.dim(1);
  if (b->value.dim(0) != k)
    throw DimensionError("matmul: inner dimensions differ, " + shape_str(a->shape()) +
                         " vs " + shape_str(b->shape()));
  Array out(Shape{m, n});
  const real *A = a->value.data(), *B = b->value.data();
  real *C = out.data();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t l = 0; l < k; ++l) {
      const real av = A[i * k + l];
      if (av == 0.0) continue;
      const real *brow = B + l * n;
      real *crow = C + i * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  require_finite(out, "matmul");
  return make_node(std::move(out), {a, b}, "matmul", [m, k, n](Node &self) {
    Node &pa = *self.parents[0], &pb = *self.parents[1];
    const real *G = self.grad.data();
    if (pa.requires_grad) {
      const real *B = pb.value.data();
      real *dA = pa.grad.data();
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t l = 0; l < k; ++l) {
          real s = 0.0;
          const real *brow = B + l * n, *grow = G + i * n;
          for (std::size_t j = 0; j < n; ++j) s += grow[j] * brow[j];
          dA[i * k + l] += s;
        }
    }
    if (pb.requires_grad) {
      const real *A = pa.value.data();
      real *dB = pb.grad.data();
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t l = 0; l < k; ++l) {
          const real av = A[i * k + l];
          if (av == 0.0) continue;
          const real *grow = G + i * n;
          real *drow = dB + l * n;
          for (std::size_t j = 0; j < n; ++j) drow[j] += av * grow[j];
        }
    }
  });
}

Var add(const Var &a, const Var &b) {
  if (broadcast_swapped(a, b, "add")) return add(b, a);
  Array out(a->shape());
  const std::size_t period = b->value.size();
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = a->value[i] + b->value[i % period];
  require_finite(out, "add");
  return make_node(std::move(out), {a, b}, "add", [period](Node &self) {
    Node &pa = *self.parents[0], &pb = *self.parents[1];
    if (pa.requires_grad)
      for (std::size_t i = 0; i < self.grad.size(); ++i) pa.grad[i] += self.grad[i];
    if (pb.requires_grad)
      for (std::size_t i = 0; i < self.grad.size(); ++i)
        pb.grad[i % period] += self.grad[i];
  });
}

Var sub(const Var &a, const Var &b) { return add(a, scale(b, -1.0)); }

Var mul(const Var &a, const Var &b) {
  if (broadcast_swapped(a, b, "mul")) return mul(b, a);
  Array out(a->shape());
  const std::size_t period = b->value.size();
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = a->value[i] * b->value[i % period];
  require_finite(out, "mul");
  return make_node(std::move(out), {a, b}, "mul", [period](Node &self) {
    Node &pa = *self.parents[0], &pb = *self.parents[1];
    if (pa.requires_grad)
      for (std::size_t i = 0; i < self.grad.size(); ++i)
        pa.grad[i] += self.grad[i] * pb.value[i % period];
    if (pb.requires_grad)
      for (std::size_t i = 0; i < self.grad.size(); ++i)
        pb.grad[i % period] += self.grad[i] * pa.value[i];
  });
}

Var scale(const Var &a, real c) {
  return unary(
      a, "scale", [c](real x) { return c * x; },
      [c](real, real) { return c; });
}

Var tanh(const Var &a) {
  return unary(
      a, "tanh", [](real x) { return std::tanh(x); },
      [](real, real y) { return 1.0 - y * y; });
}

Var sigmoid(const Var &a) {
  return unary(a, "sigmoid", sigmoid_scalar,
               [](real, real y) { return y * (1.0 - y); });
}

Var swish(const Var &a) {
  return unary(
      a, "swish", [](real x) { return x * sigmoid_scalar(x); },
      [](real x, real) {
        real s = sigmoid_scalar(x);
        return s * (1.0 + x * (1.0 - s));
      });
}

Var softmax_lastdim(const Var &x) {
  const std::size_t cols = x->value.cols(), rows = x->value.rows();
  if (x->value.rank() == 0 || cols == 0)
    throw DimensionError("softmax_lastdim: empty last dimension in " +
                         shape_str(x->shape()));
  Array out(x->shape());
  for (std::size_t r = 0; r < rows; ++r) {
    const real *in = x->value.data() + r * cols;
    real *o = out.data() + r * cols;
    real mx = *std::max_element(in, in + cols);
    real z = 0.0;
    for (std::size_t c = 0; c < cols; ++c) z += (o[c] = std::exp(in[c] - mx));
    for (std::size_t c = 0; c < cols; ++c) o[c] /= z;
  }
  require_finite(out, "softmax_lastdim");
  return make_node(std::move(out), {x}, "softmax", [rows, cols](Node &self) {
    Node &p = *self.parents[0];
    for (std::size_t r = 0; r < rows; ++r) {
      const real *y = self.value.data() + r * cols, *g = self.grad.data() + r * cols;
      real dot = 0.0;
      for (std::size_t c = 0; c < cols; ++c) dot += g[c] * y[c];
      real *d = p.grad.data() + r * cols;
      for (std::size_t c = 0; c < cols; ++c) d[c] += y[c] * (g[c] - dot);
    }
  });
}

Var layernorm(const Var &x, const Var &gain, const Var &bias) {
  const std::size_t cols = x->value.cols(), rows = x->value.rows();
  if (x->value.rank() == 0 || cols < 2)
    throw DimensionError("layernorm: last dimension must be >= 2, got " +
                         shape_str(x->shape()));
  if (gain->value.size() != cols || bias->value.size() != cols)
    throw DimensionError("layernorm: gain/bias " + shape_str(gain->shape()) + "/" +
                         shape_str(bias->shape()) + " do not match rows of width " +
                         std::to_string(cols));
  Array out(x->shape());
  Array xhat(x->shape());
  std::vector<real> inv_std(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    const real *in = x->value.data() + r * cols;
    real mu = 0.0;
    for (std::size_t c = 0; c < cols; ++c) mu += in[c];
    mu /= static_cast<real>(cols);
    real var = 0.0;
    for (std::size_t c = 0; c < cols; ++c) var += (in[c] - mu) * (in[c] - mu);
    var /= static_cast<real>(cols);
    const real inv = 1.0 / std::sqrt(var + kLayerNormEps);
    inv_std[r] = inv;
    for (std::size_t c = 0; c < cols; ++c) {
      real h = (in[c] - mu) * inv;
      xhat(r, c) = h;
      out(r, c) = h * gain->value[c] + bias->value[c];
    }
  }
  require_finite(out, "layernorm");
  return make_node(
      std::move(out), {x, gain, bias}, "layernorm",
      [rows, cols, xhat = std::move(xhat), inv_std = std::move(inv_std)](Node &self) {
        Node &px = *self.parents[0], &pg = *self.parents[1], &pb = *self.parents[2];
        std::vector<real> dxhat(cols);
        for (std::size_t r = 0; r < rows; ++r) {
          const real *g = self.grad.data() + r * cols;
          real m1 = 0.0, m2 = 0.0;
          for (std::size_t c = 0; c < cols; ++c) {
            if (pg.requires_grad) pg.grad[c] += g[c] * xhat(r, c);
            if (pb.requires_grad) pb.grad[c] += g[c];
            dxhat[c] = g[c] * pg.value[c];
            m1 += dxhat[c];
            m2 += dxhat[c] * xhat(r, c);
          }
          if (!px.requires_grad) continue;
          m1 /= static_cast<real>(cols);
          m2 /= static_cast<real>(cols);
          real *d = px.grad.data() + r * cols;
          for (std::size_t c = 0; c < cols; ++c)
            d[c] += inv_std[r] * (dxhat[c] - m1 - xhat(r, c) * m2);
        }
      });
}

Var depthwise_conv1d(const Var &x, const Var &kernel, ConvPadding padding) {
  const std::size_t k = kernel->value.rank() == 2 ? kernel->value.dim(0) : 0;
  if (k % 2 == 0)
    throw ConfigError("depthwise_conv1d: kernel width must be odd, got " +
                      std::to_string(k));
  return depthwise_conv1d(x, kernel,
                          padding == ConvPadding::kCausalLeft ? 0 : (k - 1) / 2);
}

Var depthwise_conv1d(const Var &x, const Var &kernel, std::size_t lookahead) {
  require_rank2(x, "depthwise_conv1d");
  require_rank2(kernel, "depthwise_conv1d");
  const std::size_t T = x->value.dim(0), d = x->value.dim(1);
  const std::size_t k = kernel->value.dim(0);
  if (k % 2 == 0)
    throw ConfigError("depthwise_conv1d: kernel width must be odd, got " +
                      std::to_string(k));
  if (kernel->value.dim(1) != d)
    throw DimensionError("depthwise_conv1d: kernel " + shape_str(kernel->shape()) +
                         " does not match input " + shape_str(x->shape()));
  if (lookahead > k - 1)
    throw ConfigError("depthwise_conv1d: lookahead exceeds kernel span");
  // Frame read by tap j for output t: t + j - back.
  const std::ptrdiff_t back = static_cast<std::ptrdiff_t>(k - 1 - lookahead);
  const std::ptrdiff_t Ti = static_cast<std::ptrdiff_t>(T);
  Array out(Shape{T, d});
  for (std::ptrdiff_t t = 0; t < Ti; ++t)
    for (std::size_t j = 0; j < k; ++j) {
      std::ptrdiff_t s = t + static_cast<std::ptrdiff_t>(j) - back;
      if (s < 0 || s >= Ti) continue;
      const real *in = x->value.data() + s * d;
      const real *w = kernel->value.data() + j * d;
      real *o = out.data() + t * d;
      for (std::size_t c = 0; c < d; ++c) o[c] += w[c] * in[c];
    }
  require_finite(out, "depthwise_conv1d");
  return make_node(std::move(out), {x, kernel}, "depthwise_conv1d",
                   [Ti, d, k, back](Node &self) {
                     Node &px = *self.parents[0], &pk = *self.parents[1];
                     for (std::ptrdiff_t t = 0; t < Ti; ++t)
                       for (std::size_t j = 0; j < k; ++j) {
                         std::ptrdiff_t s = t + static_cast<std::ptrdiff_t>(j) - back;
                         if (s < 0 || s >= Ti) continue;
                         const real *g = self.grad.data() + t * d;
                         for (std::size_t c = 0; c < d; ++c) {
                           if (px.requires_grad)
                             px.grad[s * d + c] += g[c] * pk.value[j * d + c];
                           if (pk.requires_grad)
                             pk.grad[j * d + c] += g[c] * px.value[s * d + c];
                         }
                       }
                   });
}

Var sum(const Var &x) {
  real s = 0.0;
  for (real v : x->value.values()) s += v;
  Array out = Array::scalar(s);
  require_finite(out, "sum");
  return make_node(std::move(out), {x}, "sum", [](Node &self) {
    Node &p = *self.parents[0];
    const real g = self.grad[0];
    for (real &v : p.grad.values()) v += g;
  });
}

Var mean(const Var &x) {
  if (x->value.size() == 0) throw DimensionError("mean: empty operand");
  return scale(sum(x), 1.0 / static_cast<real>(x->value.size()));
}

Var gather_rows(const Var &table, std::span<const int> ids) {
  require_rank2(table, "gather_rows");
  const std::size_t n = table->value.dim(0), d = table->value.dim(1);
  Array out(Shape{ids.size(), d});
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || static_cast<std::size_t>(ids[i]) >= n)
      throw InputError("gather_rows: id " + std::to_string(ids[i]) +
                       " outside table of " + std::to_string(n) + " rows");
    std::copy_n(table->value.data() + ids[i] * d, d, out.data() + i * d);
  }
  std::vector<int> idx(ids.begin(), ids.end());
  return make_node(std::move(out), {table}, "gather_rows",
                   [idx = std::move(idx), d](Node &self) {
                     Node &p = *self.parents[0];
                     for (std::size_t i = 0; i < idx.size(); ++i)
                       for (std::size_t c = 0; c < d; ++c)
                         p.grad[idx[i] * d + c] += self.grad[i * d + c];
                   });
}

Var concat_rows(const Var &a, const Var &b) {
  require_rank2(a, "concat_rows");
  require_rank2(b, "concat_rows");
  if (a->value.dim(1) != b->value.dim(1))
    throw DimensionError("concat_rows: " + shape_str(a->shape()) + " vs " +
                         shape_str(b->shape()));
  const std::size_t na = a->value.size();
  std::vector<real> data(a->value.values());
  data.insert(data.end(), b->value.values().begin(), b->value.values().end());
  Array out(Shape{a->value.dim(0) + b->value.dim(0), a->value.dim(1)}, std::move(data));
  return make_node(std::move(out), {a, b}, "concat_rows", [na](Node &self) {
    Node &pa = *self.parents[0], &pb = *self.parents[1];
    if (pa.requires_grad)
      for (std::size_t i = 0; i < na; ++i) pa.grad[i] += self.grad[i];
    if (pb.requires_grad)
      for (std::size_t i = 0; i < pb.grad.size(); ++i) pb.grad[i] += self.grad[na + i];
  });
}

Var slice_rows(const Var &x, std::size_t begin, std::size_t end) {
  require_rank2(x, "slice_rows");
  if (begin > end || end > x->value.dim(0))
    throw DimensionError("slice_rows: [" + std::to_string(begin) + "," +
                         std::to_string(end) + ") outside " + shape_str(x->shape()));
  const std::size_t d = x->value.dim(1);
  std::vector<real> data(x->value.data() + begin * d, x->value.data() + end * d);
  Array out(Shape{end - begin, d}, std::move(data));
  return make_node(std::move(out), {x}, "slice_rows", [begin, d](Node &self) {
    Node &p = *self.parents[0];
    for (std::size_t i = 0; i < self.grad.size(); ++i) p.grad[begin * d + i] += self.grad[i];
  });
}

Var reshape(const Var &x, Shape shape) {
  Array out = x->value.reshaped(std::move(shape));
  return make_node(std::move(out), {x}, "reshape", [](Node &self) {
    Node &p = *self.parents[0];
    for (std::size_t i = 0; i < self.grad.size(); ++i) p.grad[i] += self.grad[i];
  });
}

Var unfold_frames(const Var &x, std::size_t kernel, std::size_t stride) {
  require_rank2(x, "unfold_frames");
  if (kernel == 0 || stride == 0) throw ConfigError("unfold_frames: zero kernel or stride");
  const std::size_t T = x->value.dim(0), d = x->value.dim(1);
  const std::size_t To = (T + stride - 1) / stride;
  Array out(Shape{To, kernel * d});
  auto src = [=](std::size_t o, std::size_t j) {
    return static_cast<std::ptrdiff_t>(stride * (o + 1) + j) -
           static_cast<std::ptrdiff_t>(kernel);
  };
  for (std::size_t o = 0; o < To; ++o)
    for (std::size_t j = 0; j < kernel; ++j) {
      std::ptrdiff_t s = src(o, j);
      if (s < 0 || s >= static_cast<std::ptrdiff_t>(T)) continue;
      std::copy_n(x->value.data() + s * d, d, out.data() + (o * kernel + j) * d);
    }
  return make_node(std::move(out), {x}, "unfold_frames",
                   [To, T, d, kernel, src](Node &self) {
                     Node &p = *self.parents[0];
                     for (std::size_t o = 0; o < To; ++o)
                       for (std::size_t j = 0; j < kernel; ++j) {
                         std::ptrdiff_t s = src(o, j);
                         if (s < 0 || s >= static_cast<std::ptrdiff_t>(T)) continue;
                         const real *g = self.grad.data() + (o * kernel + j) * d;
                         for (std::size_t c = 0; c < d; ++c) p.grad[s * d + c] += g[c];
                       }
                   });
}

Var pair_add(const Var &a, const Var &b) {
  require_rank2(a, "pair_add");
  require_rank2(b, "pair_add");
  const std::size_t T = a->value.dim(0), P = b->value.dim(0), d = a->value.dim(1);
  if (b->value.dim(1) != d)
    throw DimensionError("pair_add: width mismatch " + shape_str(a->shape()) + " vs " +
                         shape_str(b->shape()));
  Array out(Shape{T * P, d});
  for (std::size_t t = 0; t < T; ++t)
    for (std::size_t u = 0; u < P; ++u) {
      real *o = out.data() + (t * P + u) * d;
      const real *ea = a->value.data() + t * d, *eb = b->value.data() + u * d;
      for (std::size_t c = 0; c < d; ++c) o[c] = ea[c] + eb[c];
    }
  require_finite(out, "pair_add");
  return make_node(std::move(out), {a, b}, "pair_add", [T, P, d](Node &self) {
    Node &pa = *self.parents[0], &pb = *self.parents[1];
    for (std::size_t t = 0; t < T; ++t)
      for (std::size_t u = 0; u < P; ++u) {
        const real *g = self.grad.data() + (t * P + u) * d;
        for (std::size_t c = 0; c < d; ++c) {
          if (pa.requires_grad) pa.grad[t * d + c] += g[c];
          if (pb.requires_grad) pb.grad[u * d + c] += g[c];
        }
      }
  });
}

Var grad_scale(const Var &x, real factor) {
  Array out = x->value;
  return make_node(std::move(out), {x}, "grad_scale", [factor](Node &self) {
    Node &p = *self.parents[0];
    for (std::size_t i = 0; i < self.grad.size(); ++i) p.grad[i] += factor * self.grad[i];
  });
}

Var linear(const Var &x, const Var &w, const Var &bias) {
  Var y = matmul(x, w);
  return bias ? add(y, bias) : y;
}

namespace {
thread_local real t_dropout_rate = 0;
thread_local std::mt19937_64 *t_dropout_rng = nullptr;
}  // namespace

DropoutScope::DropoutScope(real rate, std::mt19937_64 &rng)
    : previous_rate_(t_dropout_rate), previous_rng_(t_dropout_rng) {
  if (!(rate >= 0 && rate < 1))
    throw InputError("dropout rate must be in [0, 1), got " + std::to_string(double(rate)));
  t_dropout_rate = rate;
  t_dropout_rng = &rng;
}

DropoutScope::~DropoutScope() {
  t_dropout_rate = previous_rate_;
  t_dropout_rng = previous_rng_;
}

Var dropout(const Var &x) {
  if (t_dropout_rate == 0 || !t_dropout_rng) return x;
  const real keep = 1 - t_dropout_rate;
  std::bernoulli_distribution draw{static_cast<double>(keep)};
  Array mask(x->value.shape());
  for (real &m : mask.values()) m = draw(*t_dropout_rng) ? 1 / keep : 0;
  Array out = x->value;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= mask[i];
  return make_node(std::move(out), {x}, "dropout", [mask = std::move(mask)](Node &self) {
    Node &p = *self.parents[0];
    for (std::size_t i = 0; i < self.grad.size(); ++i) p.grad[i] += mask[i] * self.grad[i];
  });
}

}  // namespace translab::ops
