// tools/translab_cli.cpp

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

// translab command-line front end. Talks to the library only through the C
// interface in translab/translab.h.
//
// Exit codes: 0 success, 1 check failure (or a run that diverged),
// 2 usage, config or IO error.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "translab/translab.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;

int exit_code_for(tl_status s) {
  switch (s) {
    case TL_OK: return kExitOk;
    case TL_ERR_ARGUMENT:
    case TL_ERR_CONFIG:
    case TL_ERR_IO:
    case TL_ERR_INPUT:
    case TL_ERR_DIMENSION: return kExitUsage;
    default: return kExitCheckFailed;
  }
}

int report(tl_status s) {
  if (s != TL_OK) std::cerr << "translab: " << tl_status_name(s) << ": " << tl_last_error() << "\n";
  return exit_code_for(s);
}

void print_line(const char *line, void *) { std::printf("%s\n", line); std::fflush(stdout); }

// Seed precedence: --seed, then TRANSDUCER_LAB_SEED, then the command default.
std::optional<std::uint64_t> resolve_seed(const std::optional<std::uint64_t> &flag) {
  if (flag) return flag;
  if (const char *env = std::getenv("TRANSDUCER_LAB_SEED"); env && *env) {
    try {
      std::size_t pos = 0;
      const unsigned long long v = std::stoull(env, &pos);
      if (pos == std::string(env).size()) return static_cast<std::uint64_t>(v);
    } catch (const std::exception &) {
    }
    throw CLI::ValidationError("TRANSDUCER_LAB_SEED", std::string("not an unsigned integer: ") + env);
  }
  return std::nullopt;
}

struct ConfigHandle {
  tl_config *ptr = nullptr;
  ~ConfigHandle() { tl_config_destroy(ptr); }
};

struct ModelHandle {
  tl_model *ptr = nullptr;
  ~ModelHandle() { tl_model_destroy(ptr); }
};

bool ensure_dir(const std::string &dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) std::cerr << "translab: cannot create output directory " << dir << ": " << ec.message() << "\n";
  return !ec;
}

struct LineFile {
  std::ofstream out;
  static void write(const char *line, void *user) {
    auto *self = static_cast<LineFile *>(user);
    self->out << line << '\n';
    std::printf("%s\n", line);
    std::fflush(stdout);
  }
};

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"translab: neural transducer desk laboratory"};
  app.require_subcommand(1);

  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
  std::string config_path, ckpt_path;
  std::vector<std::string> overrides;
  std::size_t threads = 1;

  // gradcheck
  std::string scope = "all";
  double tol = 1e-4;
  auto *gradcheck = app.add_subcommand("gradcheck", "finite-difference gradient checks");
  gradcheck->add_option("--scope", scope, "loss|joint|encoder|predictor|model|all")
      ->check(CLI::IsMember({"loss", "joint", "encoder", "predictor", "model", "all"}));
  gradcheck->add_option("--seed", seed, "seed (default 1)");
  gradcheck->add_option("--tol", tol, "max relative error")->check(CLI::PositiveNumber);

  // loss-oracle
  std::size_t instances = 200;
  double oracle_tol = 1e-9;
  auto *oracle = app.add_subcommand("loss-oracle", "forward-backward loss vs path enumeration");
  oracle->add_option("--seed", seed, "seed (default 1)");
  oracle->add_option("--trials", instances, "random instances")->check(CLI::PositiveNumber);
  oracle->add_option("--tol", oracle_tol, "max relative error")->check(CLI::PositiveNumber);

  // variance-study
  std::size_t umax = 64, trials = 10000, real_trials = 20;
  auto *variance = app.add_subcommand("variance-study", "gradient variance vs sequence length");
  variance->add_option("--umax", umax, "largest U+1 (settings 2, 4, ..., umax)")->check(CLI::Range(2, 1 << 20));
  variance->add_option("--trials", trials, "Monte-Carlo draws per setting")->check(CLI::PositiveNumber);
  variance->add_option("--real-trials", real_trials, "real-model trials per setting (0 skips)");
  variance->add_option("--seed", seed, "seed (default 17)");
  variance->add_option("--out", out_dir, "output directory");

  // train
  auto *train = app.add_subcommand("train", "train on the synthetic task");
  train->add_option("--config", config_path, "config file")->check(CLI::ExistingFile);
  train->add_option("--set", overrides, "key=value override, repeatable")->allow_extra_args(false);
  train->add_option("--seed", seed, "run seed (overrides the config)");
  train->add_option("--out", out_dir, "output directory");
  train->add_option("--threads", threads, "evaluation worker threads")->check(CLI::PositiveNumber);

  // eval / decode
  std::size_t eval_size = 0;
  auto add_model_cmd = [&](const char *name, const char *help) {
    auto *cmd = app.add_subcommand(name, help);
    cmd->add_option("--ckpt", ckpt_path, "checkpoint")->required();
    cmd->add_option("--seed", seed, "evaluation seed (default task.eval_seed)");
    cmd->add_option("--size", eval_size, "utterances (default train.eval_size)");
    cmd->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    cmd->add_option("--out", out_dir, "output directory");
    return cmd;
  };
  auto *eval = add_model_cmd("eval", "evaluate a checkpoint");
  auto *decode = add_model_cmd("decode", "greedy-decode the evaluation set");

  try {
    app.parse(argc, argv);
    seed = resolve_seed(seed);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return kExitUsage;
  }

  if (*gradcheck) {
    int passed = 0;
    const tl_status s = tl_gradcheck(scope.c_str(), seed.value_or(1), tol, print_line, nullptr, &passed);
    if (s != TL_OK) return report(s);
    std::printf("gradcheck %s (tol %.1e)\n", passed ? "PASS" : "FAIL", tol);
    return passed ? kExitOk : kExitCheckFailed;
  }

  if (*oracle) {
    int passed = 0;
    double worst = 0.0;
    const tl_status s = tl_loss_oracle(seed.value_or(1), instances, oracle_tol, print_line, nullptr,
                                       &passed, &worst);
    if (s != TL_OK) return report(s);
    std::printf("loss-oracle %s: %zu instances, max rel err %.3e (tol %.1e)\n",
                passed ? "PASS" : "FAIL", instances, worst, oracle_tol);
    return passed ? kExitOk : kExitCheckFailed;
  }

  if (*variance) {
    if (!ensure_dir(out_dir)) return kExitUsage;
    LineFile file;
    const std::string path = (std::filesystem::path(out_dir) / "variance_study.jsonl").string();
    file.out.open(path, std::ios::trunc);
    if (!file.out) {
      std::cerr << "translab: cannot write " << path << "\n";
      return kExitUsage;
    }
    const tl_status s = tl_variance_study(umax, trials, real_trials, seed.value_or(17),
                                          LineFile::write, &file);
    file.out.close();
    if (s != TL_OK) return report(s);
    std::fprintf(stderr, "wrote %s\n", path.c_str());
    return kExitOk;
  }

  if (*train) {
    ConfigHandle cfg;
    if (tl_status s = tl_config_create(&cfg.ptr); s != TL_OK) return report(s);
    if (!config_path.empty())
      if (tl_status s = tl_config_load_file(cfg.ptr, config_path.c_str()); s != TL_OK) return report(s);
    for (const std::string &o : overrides)
      if (tl_status s = tl_config_set(cfg.ptr, o.c_str()); s != TL_OK) return report(s);
    if (seed) {
      const std::string a = "seed=" + std::to_string(*seed);
      if (tl_status s = tl_config_set(cfg.ptr, a.c_str()); s != TL_OK) return report(s);
    }
    if (threads != 1) {
      const std::string a = "train.threads=" + std::to_string(threads);
      if (tl_status s = tl_config_set(cfg.ptr, a.c_str()); s != TL_OK) return report(s);
    }
    if (tl_status s = tl_config_validate(cfg.ptr); s != TL_OK) return report(s);
    if (!ensure_dir(out_dir)) return kExitUsage;
    tl_train_summary summary{};
    auto on_line = [](const char *line, void *) {
      // Step records are in the metrics file; echo evaluations only.
      if (std::strstr(line, "\"eval_loss\"")) print_line(line, nullptr);
    };
    const tl_status s = tl_train(cfg.ptr, out_dir.c_str(), on_line, nullptr, &summary);
    if (s != TL_OK) return report(s);
    std::printf("trained %zu steps: final loss %.6f, eval loss %.6f, token error %.4f (best %.4f)\n",
                summary.steps, summary.final_loss, summary.final_eval_loss,
                summary.final_token_error_rate, summary.best_token_error_rate);
    return kExitOk;
  }

  if (*eval || *decode) {
    ModelHandle model;
    if (tl_status s = tl_model_load(ckpt_path.c_str(), &model.ptr); s != TL_OK) return report(s);
    tl_eval_summary summary{};
    const bool decoding = static_cast<bool>(*decode);
    LineFile file;
    if (decoding) {
      if (!ensure_dir(out_dir)) return kExitUsage;
      const std::string path = (std::filesystem::path(out_dir) / "decode.txt").string();
      file.out.open(path, std::ios::trunc);
      if (!file.out) {
        std::cerr << "translab: cannot write " << path << "\n";
        return kExitUsage;
      }
    }
    const tl_status s =
        tl_model_evaluate(model.ptr, eval_size, seed.value_or(0), threads,
                          decoding ? LineFile::write : nullptr, decoding ? &file : nullptr, &summary);
    if (s != TL_OK) return report(s);
    std::printf(
        "{\"utterances\":%zu,\"reference_tokens\":%zu,\"edit_errors\":%zu,"
        "\"token_error_rate\":%.17g,\"sequence_accuracy\":%.17g,\"eval_loss\":%.17g}\n",
        summary.utterances, summary.reference_tokens, summary.edit_errors,
        summary.token_error_rate, summary.sequence_accuracy, summary.mean_loss);
    return kExitOk;
  }
  return kExitUsage;
}
