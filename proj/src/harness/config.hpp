// src/harness/config.hpp

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

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "encoder/conformer.hpp"
#include "joint/jointer.hpp"
#include "predictor/predictor.hpp"

namespace translab::harness {

// Flat dotted-key configuration. Every key has a default; unknown keys are
// rejected. Text form is one `key = value` per line, `#` starts a comment.
class Config {
 public:
  Config();

  // Parses text on top of the current values. Errors carry the line number.
  void parse(const std::string &text, const std::string &source = "<config>");
  void load_file(const std::string &path);
  void set(const std::string &key, const std::string &value);
  // "key=value"
  void set_assignment(const std::string &assignment);

  bool has(const std::string &key) const { return values_.count(key) != 0; }
  const std::string &get(const std::string &key) const;
  std::int64_t get_int(const std::string &key) const;
  std::size_t get_size(const std::string &key) const;
  double get_double(const std::string &key) const;
  bool get_bool(const std::string &key) const;

  // Canonical text with every key, sorted; parse(to_text()) reproduces it.
  std::string to_text() const;
  const std::map<std::string, std::string> &values() const { return values_; }

  static const std::map<std::string, std::string> &defaults();

 private:
  std::map<std::string, std::string> values_;
};

struct ToyTaskConfig {
  std::size_t vocab_size = 8;
  std::size_t min_labels = 2;
  std::size_t max_labels = 6;
  std::size_t min_frames_per_token = 1;
  std::size_t max_frames_per_token = 1;
  std::size_t feature_dim = 16;
  double noise = 0.05;
  std::uint64_t seed = 1234;
  std::uint64_t eval_seed = 999983;

  void validate() const;
};

struct TrainConfig {
  std::size_t batch_size = 8;
  std::size_t total_steps = 3000;
  std::size_t warmup_steps = 300;
  double init_lr = 1e-7;
  double peak_lr = 5e-4;
  double floor_lr = 1e-5;
  double decay = 0.98;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::size_t eval_interval = 250;
  std::size_t eval_size = 64;
  std::size_t max_symbols_per_frame = 5;
  std::size_t threads = 1;
  double dropout = 0.0;

  void validate() const;
};

struct ModelConfig {
  encoder::EncoderConfig encoder;
  predictor::PredictorConfig predictor;
  joint::JointConfig joint;

  void validate() const;
};

struct RunConfig {
  std::string run_id = "run";
  std::uint64_t seed = 17;
  ModelConfig model;
  ToyTaskConfig task;
  TrainConfig train;

  static RunConfig from(const Config &config);
  void validate() const;
};

// Parses "40", "inf", "-1" (unbounded) or a list "[1, 1, 0]".
std::vector<std::optional<std::size_t>> parse_context_list(const std::string &value);

}  // namespace translab::harness
