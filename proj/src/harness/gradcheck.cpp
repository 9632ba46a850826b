// src/harness/gradcheck.cpp

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

#include "harness/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "core/errors.hpp"
#include "harness/fd_oracle.hpp"
#include "harness/grad_problems.hpp"

namespace translab::harness {

namespace {

std::string index_str(const Shape &shape, std::size_t flat) {
  std::vector<std::size_t> idx(shape.size());
  for (std::size_t k = shape.size(); k-- > 0;) {
    idx[k] = flat % shape[k];
    flat /= shape[k];
  }
  std::string s = "[";
  for (std::size_t k = 0; k < idx.size(); ++k) s += (k ? "," : "") + std::to_string(idx[k]);
  return s + "]";
}

void note(GradcheckResult &r, const std::string &where, double analytic, double numeric) {
  const double err = relative_error(analytic, numeric);
  ++r.coordinates;
  if (err > r.max_rel_error || r.worst.empty()) {
    r.max_rel_error = err;
    r.worst = where;
    r.worst_analytic = analytic;
    r.worst_numeric = numeric;
  }
}

}  // namespace

double relative_error(double analytic, double numeric) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
  return std::abs(analytic - numeric) / denom;
}

std::vector<std::size_t> select_coordinates(const Array &grad, std::size_t per_tensor,
                                            std::mt19937_64 &rng) {
  std::vector<std::size_t> all(grad.size());
  std::iota(all.begin(), all.end(), 0);
  if (per_tensor == 0 || all.size() <= per_tensor) return all;
  auto by_mag = [&](std::size_t a, std::size_t b) {
    return std::abs(grad[a]) < std::abs(grad[b]);
  };
  const std::size_t lo = *std::min_element(all.begin(), all.end(), by_mag);
  const std::size_t hi = *std::max_element(all.begin(), all.end(), by_mag);
  std::vector<std::size_t> picked = {hi};
  if (lo != hi) picked.push_back(lo);
  std::shuffle(all.begin(), all.end(), rng);
  for (std::size_t c : all) {
    if (picked.size() >= per_tensor) break;
    if (c != lo && c != hi) picked.push_back(c);
  }
  return picked;
}

GradcheckResult check_gradients(const std::string &name, const std::function<Var()> &build,
                                const std::vector<NamedParam> &wrt,
                                const GradcheckOptions &options) {
  for (const NamedParam &p : wrt) zero_grads(std::span<const Var>(&p.var, 1));
  backward(build());
  std::vector<Array> analytic;
  for (const NamedParam &p : wrt) analytic.push_back(p.var->grad);
  for (const NamedParam &p : wrt) zero_grads(std::span<const Var>(&p.var, 1));

  GradcheckResult r;
  r.name = name;
  std::mt19937_64 rng(options.seed);
  NoGradGuard no_grad;
  for (std::size_t i = 0; i < wrt.size(); ++i) {
    Array &value = wrt[i].var->value;
    for (std::size_t c : select_coordinates(analytic[i], options.max_coords_per_tensor, rng)) {
      const real orig = value[c];
      value[c] = orig + options.eps;
      const real plus = build()->value[0];
      value[c] = orig - options.eps;
      const real minus = build()->value[0];
      value[c] = orig;
      note(r, wrt[i].name + index_str(value.shape(), c), static_cast<double>(analytic[i][c]),
           static_cast<double>((plus - minus) / (2 * options.eps)));
    }
  }
  r.passed = r.max_rel_error < options.tol;
  return r;
}

GradcheckReport run_gradcheck(const std::string &scope, std::uint64_t seed, double tol,
                              const std::function<void(const GradcheckResult &)> &on_result) {
  const auto &names = grad_problem_names();
  if (scope != "all" && std::find(names.begin(), names.end(), scope) == names.end())
    throw ConfigError("gradcheck: unknown scope '" + scope +
                      "' (expected loss|joint|encoder|predictor|model|all)");
  GradcheckReport report;
  for (const std::string &name : names) {
    if (scope != "all" && scope != name) continue;
    GradProblem p = make_grad_problem(name, seed);
    backward(p.build());

    if (translab_fd::tensor_names(name, seed).size() != p.wrt.size())
      throw InternalError("gradcheck: extended build disagrees on problem '" + name + "'");
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    std::vector<translab_fd::Coordinate> coords;
    for (std::size_t i = 0; i < p.wrt.size(); ++i)
      for (std::size_t c : select_coordinates(p.wrt[i].var->grad, p.coords_per_tensor, rng))
        coords.push_back({i, c});
    const std::vector<long double> numeric =
        translab_fd::central_differences(name, seed, coords, 1e-5L);

    GradcheckResult r;
    r.name = name;
    for (std::size_t k = 0; k < coords.size(); ++k) {
      const NamedParam &w = p.wrt[coords[k].tensor];
      note(r, w.name + index_str(w.var->value.shape(), coords[k].index),
           static_cast<double>(w.var->grad[coords[k].index]), static_cast<double>(numeric[k]));
    }
    r.passed = r.max_rel_error < tol;
    report.passed = report.passed && r.passed;
    if (on_result) on_result(r);
    report.checks.push_back(std::move(r));
  }
  return report;
}

std::string format_result(const GradcheckResult &r) {
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "%-10s %s max_rel_err=%.3e over %zu coords (worst %s: analytic=%.12e "
                "numeric=%.12e)",
                r.name.c_str(), r.passed ? "PASS" : "FAIL", r.max_rel_error, r.coordinates,
                r.worst.c_str(), r.worst_analytic, r.worst_numeric);
  return buf;
}

}  // namespace translab::harness
