// src/capi/translab_capi.cpp

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

#include "translab/translab.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <random>
#include <string>

#include "core/errors.hpp"
#include "harness/config.hpp"
#include "harness/decode.hpp"
#include "harness/gradcheck.hpp"
#include "harness/metrics.hpp"
#include "harness/task.hpp"
#include "harness/train.hpp"
#include "harness/variance_study.hpp"
#include "lattice/rnnt_lattice.hpp"

using namespace translab;

struct tl_config {
  harness::Config config;
};

struct tl_model {
  std::unique_ptr<harness::TransducerModel> model;
  harness::Config config;
};

namespace {

thread_local std::string g_last_error;

tl_status fail(tl_status s, std::string msg) {
  g_last_error = std::move(msg);
  return s;
}

template <class F>
tl_status guarded(F &&f) {
  g_last_error.clear();
  try {
    return f();
  } catch (const ConfigError &e) {
    return fail(TL_ERR_CONFIG, e.what());
  } catch (const IoError &e) {
    return fail(TL_ERR_IO, e.what());
  } catch (const InputError &e) {
    return fail(TL_ERR_INPUT, e.what());
  } catch (const DimensionError &e) {
    return fail(TL_ERR_DIMENSION, e.what());
  } catch (const NumericError &e) {
    return fail(TL_ERR_NUMERIC, e.what());
  } catch (const std::bad_alloc &) {
    return fail(TL_ERR_INTERNAL, "out of memory");
  } catch (const std::exception &e) {
    return fail(TL_ERR_INTERNAL, e.what());
  }
}

char *dup_string(const std::string &s) {
  char *out = static_cast<char *>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void emit(tl_line_fn fn, void *user, const std::string &line) {
  if (fn) fn(line.c_str(), user);
}

std::string join_tokens(const std::vector<int> &v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + std::to_string(v[i]);
  return s;
}

}  // namespace

extern "C" {

const char *tl_last_error(void) { return g_last_error.c_str(); }

const char *tl_status_name(tl_status status) {
  switch (status) {
    case TL_OK: return "ok";
    case TL_ERR_ARGUMENT: return "invalid argument";
    case TL_ERR_CONFIG: return "config error";
    case TL_ERR_IO: return "io error";
    case TL_ERR_INPUT: return "input error";
    case TL_ERR_DIMENSION: return "dimension error";
    case TL_ERR_NUMERIC: return "numeric error";
    case TL_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char *tl_version(void) { return "0.1.0"; }

void tl_string_free(char *s) { std::free(s); }

tl_status tl_config_create(tl_config **out) {
  if (!out) return fail(TL_ERR_ARGUMENT, "tl_config_create: null output");
  return guarded([&] {
    *out = new tl_config();
    return TL_OK;
  });
}

void tl_config_destroy(tl_config *config) { delete config; }

tl_status tl_config_load_file(tl_config *config, const char *path) {
  if (!config || !path) return fail(TL_ERR_ARGUMENT, "tl_config_load_file: null argument");
  return guarded([&] {
    config->config.load_file(path);
    return TL_OK;
  });
}

tl_status tl_config_parse(tl_config *config, const char *text, const char *source) {
  if (!config || !text) return fail(TL_ERR_ARGUMENT, "tl_config_parse: null argument");
  return guarded([&] {
    config->config.parse(text, source ? source : "<config>");
    return TL_OK;
  });
}

tl_status tl_config_set(tl_config *config, const char *assignment) {
  if (!config || !assignment) return fail(TL_ERR_ARGUMENT, "tl_config_set: null argument");
  return guarded([&] {
    config->config.set_assignment(assignment);
    return TL_OK;
  });
}

tl_status tl_config_get(const tl_config *config, const char *key, char **value) {
  if (!config || !key || !value) return fail(TL_ERR_ARGUMENT, "tl_config_get: null argument");
  return guarded([&] {
    *value = dup_string(config->config.get(key));
    return TL_OK;
  });
}

tl_status tl_config_to_text(const tl_config *config, char **text) {
  if (!config || !text) return fail(TL_ERR_ARGUMENT, "tl_config_to_text: null argument");
  return guarded([&] {
    *text = dup_string(config->config.to_text());
    return TL_OK;
  });
}

tl_status tl_config_validate(const tl_config *config) {
  if (!config) return fail(TL_ERR_ARGUMENT, "tl_config_validate: null argument");
  return guarded([&] {
    harness::RunConfig::from(config->config);
    return TL_OK;
  });
}

tl_status tl_gradcheck(const char *scope, uint64_t seed, double tol, tl_line_fn on_line,
                       void *user, int *passed) {
  if (!scope || !passed) return fail(TL_ERR_ARGUMENT, "tl_gradcheck: null argument");
  if (!(tol > 0.0)) return fail(TL_ERR_ARGUMENT, "tl_gradcheck: tol must be positive");
  return guarded([&] {
    const auto report = harness::run_gradcheck(
        scope, seed, tol,
        [&](const harness::GradcheckResult &r) { emit(on_line, user, harness::format_result(r)); });
    *passed = report.passed ? 1 : 0;
    return TL_OK;
  });
}

tl_status tl_loss_oracle(uint64_t seed, size_t instances, double tol, tl_line_fn on_line,
                         void *user, int *passed, double *max_rel_error) {
  if (!passed) return fail(TL_ERR_ARGUMENT, "tl_loss_oracle: null argument");
  if (instances == 0) return fail(TL_ERR_ARGUMENT, "tl_loss_oracle: instances must be positive");
  return guarded([&] {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> dT(1, 5), dU(0, 4), dV(1, 3);
    std::normal_distribution<double> normal(0.0, 2.0);
    double worst = 0.0;
    bool ok = true;
    for (std::size_t i = 0; i < instances; ++i) {
      const std::size_t T = dT(rng), U = dU(rng), V = dV(rng);
      Array logits({T, U + 1, V + 1});
      for (double &v : logits.values()) v = normal(rng);
      std::uniform_int_distribution<int> dy(1, static_cast<int>(V));
      std::vector<int> y(U);
      for (int &v : y) v = dy(rng);
      const double dp = rnnt::rnnt_loss(logits, y).loss;
      std::size_t paths = 0;
      const double brute = rnnt::oracle_loss(rnnt::PosteriorGrid::from_logits(logits), y, &paths);
      const double rel = std::abs(dp - brute) / std::max(std::abs(brute), 1e-300);
      worst = std::max(worst, rel);
      const bool good = rel < tol;
      ok = ok && good;
      char buf[256];
      std::snprintf(buf, sizeof(buf),
                    "instance %zu T=%zu U=%zu V=%zu paths=%zu loss=%.15e oracle=%.15e rel=%.3e %s",
                    i, T, U, V, paths, dp, brute, rel, good ? "PASS" : "FAIL");
      emit(on_line, user, buf);
    }
    *passed = ok ? 1 : 0;
    if (max_rel_error) *max_rel_error = worst;
    return TL_OK;
  });
}

tl_status tl_variance_study(size_t umax, size_t trials, size_t real_trials, uint64_t seed,
                            tl_line_fn on_record, void *user) {
  if (umax < 2) return fail(TL_ERR_ARGUMENT, "tl_variance_study: umax must be >= 2");
  if (trials == 0) return fail(TL_ERR_ARGUMENT, "tl_variance_study: trials must be positive");
  return guarded([&] {
    harness::VarianceStudyOptions opt;
    opt.umax = umax;
    opt.trials = trials;
    opt.real_trials = real_trials;
    opt.seed = seed;
    harness::run_variance_study(opt, [&](const std::string &line) { emit(on_record, user, line); });
    return TL_OK;
  });
}

tl_status tl_train(const tl_config *config, const char *out_dir, tl_line_fn on_line, void *user,
                   tl_train_summary *summary) {
  if (!config || !out_dir) return fail(TL_ERR_ARGUMENT, "tl_train: null argument");
  return guarded([&] {
    harness::TrainCallbacks cb;
    if (on_line) {
      cb.on_step = [&](const harness::StepRecord &r) { emit(on_line, user, harness::to_json_line(r)); };
      cb.on_eval = [&](const harness::EvalRecord &r) { emit(on_line, user, harness::to_json_line(r)); };
    }
    const harness::TrainResult r = harness::train(config->config, out_dir, cb);
    if (summary) {
      summary->steps = r.steps;
      summary->final_loss = r.final_loss;
      summary->final_eval_loss = r.final_eval.eval_loss;
      summary->final_token_error_rate = r.final_eval.token_error_rate;
      summary->best_token_error_rate = r.best_eval.token_error_rate;
    }
    return TL_OK;
  });
}

tl_status tl_model_load(const char *checkpoint_path, tl_model **out) {
  if (!checkpoint_path || !out) return fail(TL_ERR_ARGUMENT, "tl_model_load: null argument");
  return guarded([&] {
    auto m = std::make_unique<tl_model>();
    m->model = harness::load_model(checkpoint_path, &m->config);
    *out = m.release();
    return TL_OK;
  });
}

void tl_model_destroy(tl_model *model) { delete model; }

tl_status tl_model_config_text(const tl_model *model, char **text) {
  if (!model || !text) return fail(TL_ERR_ARGUMENT, "tl_model_config_text: null argument");
  return guarded([&] {
    *text = dup_string(model->config.to_text());
    return TL_OK;
  });
}

tl_status tl_model_feature_dim(const tl_model *model, size_t *dim) {
  if (!model || !dim) return fail(TL_ERR_ARGUMENT, "tl_model_feature_dim: null argument");
  *dim = model->model->config().encoder.input_dim;
  return TL_OK;
}

tl_status tl_model_evaluate(const tl_model *model, size_t n, uint64_t eval_seed, size_t threads,
                            tl_line_fn on_line, void *user, tl_eval_summary *summary) {
  if (!model || !summary) return fail(TL_ERR_ARGUMENT, "tl_model_evaluate: null argument");
  return guarded([&] {
    const harness::RunConfig rc = harness::RunConfig::from(model->config);
    const harness::ToyTask task(rc.task);
    const auto utts = harness::eval_set(task, n ? n : rc.train.eval_size,
                                        eval_seed ? eval_seed : rc.task.eval_seed);
    const harness::EvalResult r = harness::evaluate(*model->model, utts,
                                                    rc.train.max_symbols_per_frame,
                                                    threads ? threads : 1);
    if (on_line)
      for (std::size_t i = 0; i < r.hypotheses.size(); ++i)
        emit(on_line, user,
             "utt " + std::to_string(i) + " ref " + join_tokens(r.references[i]) + " | hyp " +
                 join_tokens(r.hypotheses[i]));
    summary->utterances = r.utterances;
    summary->reference_tokens = r.reference_tokens;
    summary->edit_errors = r.edit_errors;
    summary->token_error_rate = r.token_error_rate;
    summary->sequence_accuracy = r.sequence_accuracy;
    summary->mean_loss = r.mean_loss;
    return TL_OK;
  });
}

tl_status tl_model_decode(const tl_model *model, const double *features, size_t frames,
                          size_t dim, int *tokens, size_t capacity, size_t *count) {
  if (!model || !features || !count) return fail(TL_ERR_ARGUMENT, "tl_model_decode: null argument");
  return guarded([&] {
    Array x({frames, dim});
    std::copy(features, features + frames * dim, x.values().begin());
    const harness::RunConfig rc = harness::RunConfig::from(model->config);
    const std::vector<int> hyp =
        harness::greedy_decode(*model->model, x, rc.train.max_symbols_per_frame);
    *count = hyp.size();
    if (hyp.size() > capacity || (!tokens && !hyp.empty()))
      return fail(TL_ERR_ARGUMENT, "tl_model_decode: token buffer too small");
    std::copy(hyp.begin(), hyp.end(), tokens);
    return TL_OK;
  });
}

}  // extern "C"
