// src/harness/train.cpp

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

#include "harness/train.hpp"

#include <cmath>
#include <filesystem>

#include "core/errors.hpp"
#include "core/ops.hpp"
#include "harness/checkpoint.hpp"
#include "harness/optim.hpp"
#include "harness/task.hpp"

namespace translab::harness {

namespace {

double global_grad_norm(const ParamSet &params) {
  double s = 0.0;
  for (const NamedParam &p : params.items())
    for (double g : p.var->grad.values()) s += g * g;
  return std::sqrt(s);
}

bool better(const EvalRecord &a, const EvalRecord &b) {
  if (a.token_error_rate != b.token_error_rate) return a.token_error_rate < b.token_error_rate;
  return a.eval_loss < b.eval_loss;
}

}  // namespace

TrainResult train(const Config &config, const std::string &out_dir,
                  const TrainCallbacks &callbacks) {
  const RunConfig run = RunConfig::from(config);
  const std::string config_text = config.to_text();
  std::filesystem::create_directories(out_dir);
  const std::string base = (std::filesystem::path(out_dir) / run.run_id).string();

  TrainResult result;
  result.metrics_path = base + ".metrics.jsonl";
  result.checkpoint_path = base + ".ckpt";
  result.best_checkpoint_path = base + ".best.ckpt";

  TransducerModel model(run.model, run.seed);
  ToyTask task(run.task);
  const std::vector<Utterance> held_out = eval_set(task, run.train.eval_size, run.task.eval_seed);
  std::mt19937_64 rng(run.seed);
  // Separate stream, so the batch sequence does not depend on the dropout rate.
  std::mt19937_64 dropout_rng(run.seed ^ 0x9e3779b97f4a7c15ULL);
  AdamState adam = AdamState::zeros_like(model.params());
  MetricsWriter metrics(result.metrics_path);
  bool have_best = false;

  auto run_eval = [&](std::size_t step) {
    EvalResult e = evaluate(model, held_out, run.train.max_symbols_per_frame, run.train.threads);
    EvalRecord rec{run.run_id, run.seed, step, e.mean_loss, e.token_error_rate,
                   e.sequence_accuracy, e.utterances};
    metrics.write(rec);
    if (callbacks.on_eval) callbacks.on_eval(rec);
    if (!have_best || better(rec, result.best_eval)) {
      have_best = true;
      result.best_eval = rec;
      write_checkpoint(result.best_checkpoint_path, snapshot(config_text, model.params()));
    }
    result.final_eval = rec;
  };

  for (std::size_t step = 1; step <= run.train.total_steps; ++step) {
    Batch batch = task.generate_batch(run.train.batch_size, rng);
    const double lr = lr_schedule(step, run.train);
    StepRecord rec{run.run_id, run.seed, step, 0.0, lr, 0.0, {}};
    try {
      TransducerModel::BatchGraph graph = [&] {
        ops::DropoutScope scope(run.train.dropout, dropout_rng);
        return model.forward(batch);
      }();
      rec.loss = graph.loss->value[0];
      backward(graph.loss);
      rec.grad_norm = global_grad_norm(model.params());
      rec.grad_stats = model.grad_stats(graph, step);
      adam_step(model.params(), adam, lr, run.train);
    } catch (const NumericError &e) {
      const std::string path = base + ".last_good.ckpt";
      write_checkpoint(path, snapshot(config_text, model.params()));
      throw NumericError("training diverged at step " + std::to_string(step) + " (" +
                         e.what() + "); last good parameters saved to " + path);
    }
    model.params().zero_grads();
    metrics.write(rec);
    if (callbacks.on_step) callbacks.on_step(rec);
    result.steps = step;
    result.final_loss = rec.loss;
    if (step % run.train.eval_interval == 0 || step == run.train.total_steps) run_eval(step);
  }
  if (run.train.total_steps == 0) run_eval(0);
  write_checkpoint(result.checkpoint_path, snapshot(config_text, model.params()));
  return result;
}

std::unique_ptr<TransducerModel> load_model(const std::string &checkpoint_path,
                                            Config *config_out) {
  CheckpointData data = read_checkpoint(checkpoint_path);
  Config config;
  config.parse(data.config_text, checkpoint_path + "#config");
  RunConfig run = RunConfig::from(config);
  auto model = std::make_unique<TransducerModel>(run.model, run.seed);
  restore(data, model->params());
  if (config_out) *config_out = config;
  return model;
}

}  // namespace translab::harness
