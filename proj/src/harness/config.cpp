// src/harness/config.cpp

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

#include "harness/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "core/errors.hpp"

namespace translab::harness {

namespace {

std::string trim(const std::string &s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

}  // namespace

const std::map<std::string, std::string> &Config::defaults() {
  static const std::map<std::string, std::string> d = {
      {"run_id", "run"},
      {"seed", "17"},
      {"encoder.layers", "2"},
      {"encoder.dim", "32"},
      {"encoder.heads", "4"},
      {"encoder.ff_dim", "64"},
      {"encoder.conv_kernel", "7"},
      {"encoder.mask.left", "40"},
      {"encoder.mask.right", "40"},
      {"encoder.subsample", "4"},
      {"predictor.layers", "1"},
      {"predictor.dim", "32"},
      {"predictor.heads", "2"},
      {"predictor.ff_dim", "64"},
      {"predictor.memory", "16"},
      {"jointer.dim", "32"},
      {"jointer.normalize", "true"},
      {"jointer.divisor", "positions"},
      {"task.vocab", "8"},
      {"task.umin", "2"},
      {"task.umax", "6"},
      {"task.rmin", "4"},
      {"task.rmax", "4"},
      {"task.feat_dim", "16"},
      {"task.noise", "0.05"},
      {"task.seed", "1234"},
      {"task.eval_seed", "999983"},
      {"train.batch", "8"},
      {"train.steps", "3000"},
      {"train.warmup", "300"},
      {"train.init_lr", "1e-7"},
      {"train.peak_lr", "5e-4"},
      {"train.floor_lr", "1e-5"},
      {"train.decay", "0.98"},
      {"train.beta1", "0.9"},
      {"train.beta2", "0.999"},
      {"train.eps", "1e-8"},
      {"train.eval_interval", "250"},
      {"train.eval_size", "64"},
      {"train.max_symbols", "5"},
      {"train.threads", "1"},
      {"train.dropout", "0"},
  };
  return d;
}

Config::Config() : values_(defaults()) {}

void Config::set(const std::string &key, const std::string &value) {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("unknown config key '" + key + "'");
  it->second = value;
}

void Config::set_assignment(const std::string &assignment) {
  const std::size_t eq = assignment.find('=');
  if (eq == std::string::npos)
    throw ConfigError("expected key=value, got '" + assignment + "'");
  set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

void Config::parse(const std::string &text, const std::string &source) {
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    const std::string where = source + ":" + std::to_string(lineno) + ": ";
    if (eq == std::string::npos) throw ConfigError(where + "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) throw ConfigError(where + "empty key or value");
    try {
      set(key, value);
    } catch (const ConfigError &e) {
      throw ConfigError(where + e.what());
    }
  }
}

void Config::load_file(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  parse(ss.str(), path);
}

const std::string &Config::get(const std::string &key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("unknown config key '" + key + "'");
  return it->second;
}

std::int64_t Config::get_int(const std::string &key) const {
  const std::string &s = get(key);
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw ConfigError(key + ": expected an integer, got '" + s + "'");
  return v;
}

std::size_t Config::get_size(const std::string &key) const {
  std::int64_t v = get_int(key);
  if (v < 0) throw ConfigError(key + ": must be non-negative, got " + std::to_string(v));
  return static_cast<std::size_t>(v);
}

double Config::get_double(const std::string &key) const {
  const std::string &s = get(key);
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception &) {
    throw ConfigError(key + ": expected a number, got '" + s + "'");
  }
}

bool Config::get_bool(const std::string &key) const {
  const std::string &s = get(key);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigError(key + ": expected true/false, got '" + s + "'");
}

std::string Config::to_text() const {
  std::ostringstream os;
  for (const auto &[k, v] : values_) os << k << " = " << v << '\n';
  return os.str();
}

std::vector<std::optional<std::size_t>> parse_context_list(const std::string &value) {
  std::string body = trim(value);
  const bool list = !body.empty() && body.front() == '[';
  if (list) {
    if (body.back() != ']') throw ConfigError("unterminated list '" + value + "'");
    body = body.substr(1, body.size() - 2);
  }
  std::vector<std::optional<std::size_t>> out;
  std::istringstream in(body);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (item == "inf" || item == "-1") {
      out.push_back(std::nullopt);
      continue;
    }
    std::size_t v = 0;
    auto [p, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc() || p != item.data() + item.size())
      throw ConfigError("bad context value '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError("empty context value '" + value + "'");
  return out;
}

void ToyTaskConfig::validate() const {
  if (vocab_size < 1) throw ConfigError("task.vocab must be >= 1");
  if (min_labels < 1 || min_labels > max_labels)
    throw ConfigError("task label range [" + std::to_string(min_labels) + ", " +
                      std::to_string(max_labels) + "] is degenerate");
  if (min_frames_per_token < 1 || min_frames_per_token > max_frames_per_token)
    throw ConfigError("task frames-per-token range [" +
                      std::to_string(min_frames_per_token) + ", " +
                      std::to_string(max_frames_per_token) + "] is degenerate");
  if (feature_dim < 1) throw ConfigError("task.feat_dim must be >= 1");
  if (!(noise >= 0.0)) throw ConfigError("task.noise must be >= 0");
}

void TrainConfig::validate() const {
  if (batch_size < 1) throw ConfigError("train.batch must be >= 1");
  if (warmup_steps < 1) throw ConfigError("train.warmup must be >= 1");
  if (!(init_lr > 0.0) || !(init_lr <= peak_lr))
    throw ConfigError("train.init_lr must satisfy 0 < init_lr <= peak_lr");
  if (!(floor_lr > 0.0) || !(floor_lr <= peak_lr))
    throw ConfigError("train.floor_lr must satisfy 0 < floor_lr <= peak_lr");
  if (!(decay > 0.0) || decay > 1.0) throw ConfigError("train.decay must be in (0, 1]");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0))
    throw ConfigError("Adam betas must be in [0, 1)");
  if (!(eps > 0.0)) throw ConfigError("train.eps must be > 0");
  if (eval_interval < 1) throw ConfigError("train.eval_interval must be >= 1");
  if (max_symbols_per_frame < 1) throw ConfigError("train.max_symbols must be >= 1");
  if (threads < 1) throw ConfigError("train.threads must be >= 1");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("train.dropout must be in [0, 1)");
}

void ModelConfig::validate() const {
  encoder.validate();
  predictor.validate();
  joint.validate();
  if (predictor.vocab_size != joint.vocab_size)
    throw ConfigError("predictor and jointer vocabularies differ");
}

RunConfig RunConfig::from(const Config &c) {
  RunConfig r;
  r.run_id = c.get("run_id");
  r.seed = static_cast<std::uint64_t>(c.get_size("seed"));

  auto &e = r.model.encoder;
  e.num_layers = c.get_size("encoder.layers");
  e.model_dim = c.get_size("encoder.dim");
  e.num_heads = c.get_size("encoder.heads");
  e.ff_dim = c.get_size("encoder.ff_dim");
  e.conv_kernel = c.get_size("encoder.conv_kernel");
  e.subsample = c.get_size("encoder.subsample");
  {
    auto left = parse_context_list(c.get("encoder.mask.left"));
    auto right = parse_context_list(c.get("encoder.mask.right"));
    const std::size_t n = std::max(left.size(), right.size());
    if ((left.size() != 1 && left.size() != n) || (right.size() != 1 && right.size() != n))
      throw ConfigError("encoder.mask.left and encoder.mask.right list lengths differ");
    e.masks.clear();
    for (std::size_t i = 0; i < n; ++i)
      e.masks.push_back({left[left.size() == 1 ? 0 : i], right[right.size() == 1 ? 0 : i]});
  }

  auto &t = r.task;
  t.vocab_size = c.get_size("task.vocab");
  t.min_labels = c.get_size("task.umin");
  t.max_labels = c.get_size("task.umax");
  t.min_frames_per_token = c.get_size("task.rmin");
  t.max_frames_per_token = c.get_size("task.rmax");
  t.feature_dim = c.get_size("task.feat_dim");
  t.noise = c.get_double("task.noise");
  t.seed = static_cast<std::uint64_t>(c.get_size("task.seed"));
  t.eval_seed = static_cast<std::uint64_t>(c.get_size("task.eval_seed"));
  e.input_dim = t.feature_dim;

  auto &p = r.model.predictor;
  p.num_layers = c.get_size("predictor.layers");
  p.model_dim = c.get_size("predictor.dim");
  p.num_heads = c.get_size("predictor.heads");
  p.ff_dim = c.get_size("predictor.ff_dim");
  p.memory_length = c.get_size("predictor.memory");
  p.vocab_size = t.vocab_size;

  auto &j = r.model.joint;
  j.joint_dim = c.get_size("jointer.dim");
  j.vocab_size = t.vocab_size;
  j.normalize = c.get_bool("jointer.normalize");
  const std::string &div = c.get("jointer.divisor");
  if (div == "positions") j.divisor = joint::DivisorConvention::kPredictorPositions;
  else if (div == "labels") j.divisor = joint::DivisorConvention::kLabelCount;
  else throw ConfigError("jointer.divisor must be 'positions' or 'labels', got '" + div + "'");

  auto &tr = r.train;
  tr.batch_size = c.get_size("train.batch");
  tr.total_steps = c.get_size("train.steps");
  tr.warmup_steps = c.get_size("train.warmup");
  tr.init_lr = c.get_double("train.init_lr");
  tr.peak_lr = c.get_double("train.peak_lr");
  tr.floor_lr = c.get_double("train.floor_lr");
  tr.decay = c.get_double("train.decay");
  tr.beta1 = c.get_double("train.beta1");
  tr.beta2 = c.get_double("train.beta2");
  tr.eps = c.get_double("train.eps");
  tr.eval_interval = c.get_size("train.eval_interval");
  tr.eval_size = c.get_size("train.eval_size");
  tr.max_symbols_per_frame = c.get_size("train.max_symbols");
  tr.threads = c.get_size("train.threads");
  tr.dropout = c.get_double("train.dropout");

  r.validate();
  return r;
}

void RunConfig::validate() const {
  model.validate();
  task.validate();
  train.validate();
  if (model.encoder.input_dim != task.feature_dim)
    throw ConfigError("encoder input width differs from task.feat_dim");
  const std::size_t shortest = task.min_labels * task.min_frames_per_token;
  if (shortest < model.encoder.subsample)
    throw ConfigError("shortest task utterance has " + std::to_string(shortest) +
                      " frames, fewer than encoder.subsample = " +
                      std::to_string(model.encoder.subsample));
  // Training sees the whole label prefix; greedy decoding sees the start
  // symbol plus at most predictor.memory cached positions.
  if (model.predictor.memory_length < task.max_labels + 1)
    throw ConfigError("predictor.memory = " + std::to_string(model.predictor.memory_length) +
                      " is shorter than task.umax + 1 = " + std::to_string(task.max_labels + 1) +
                      "; decoding would lose label context that training uses");
}

}  // namespace translab::harness
