// src/harness/metrics.cpp

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

#include "harness/metrics.hpp"

#include <sstream>

#include "core/errors.hpp"
#include "json.hpp"

namespace translab::harness {

using nlohmann::json;

namespace {

bool same_stats(const joint::ArrayStats &a, const joint::ArrayStats &b) {
  return a.l2_norm == b.l2_norm && a.mean_row_norm == b.mean_row_norm &&
         a.variance == b.variance;
}

json stats_json(const joint::ArrayStats &s) {
  return {{"l2_norm", s.l2_norm}, {"mean_row_norm", s.mean_row_norm}, {"variance", s.variance}};
}

void require(bool ok, std::size_t line, const std::string &what) {
  if (!ok) throw IoError("metrics line " + std::to_string(line) + ": " + what);
}

const json &field(const json &j, const char *name, std::size_t line) {
  require(j.contains(name), line, std::string("missing field '") + name + "'");
  return j.at(name);
}

double num(const json &j, const char *name, std::size_t line) {
  const json &v = field(j, name, line);
  require(v.is_number(), line, std::string("field '") + name + "' must be a number");
  return v.get<double>();
}

std::uint64_t uint(const json &j, const char *name, std::size_t line) {
  const json &v = field(j, name, line);
  require(v.is_number_unsigned(), line,
          std::string("field '") + name + "' must be a non-negative integer");
  return v.get<std::uint64_t>();
}

joint::ArrayStats stats_from(const json &j, const char *name, std::size_t line) {
  const json &s = field(j, name, line);
  require(s.is_object(), line, std::string("field '") + name + "' must be an object");
  return {num(s, "l2_norm", line), num(s, "mean_row_norm", line), num(s, "variance", line)};
}

}  // namespace

bool StepRecord::operator==(const StepRecord &o) const {
  if (run_id != o.run_id || seed != o.seed || step != o.step || loss != o.loss ||
      lr != o.lr || grad_norm != o.grad_norm || grad_stats.size() != o.grad_stats.size())
    return false;
  for (std::size_t i = 0; i < grad_stats.size(); ++i) {
    const auto &a = grad_stats[i], &b = o.grad_stats[i];
    if (a.step != b.step || a.frames != b.frames || a.label_len != b.label_len ||
        !same_stats(a.enc_before, b.enc_before) || !same_stats(a.enc_after, b.enc_after) ||
        !same_stats(a.pre_before, b.pre_before) || !same_stats(a.pre_after, b.pre_after))
      return false;
  }
  return true;
}

std::string to_json_line(const StepRecord &r) {
  json stats = json::array();
  for (const joint::GradStats &g : r.grad_stats)
    stats.push_back({{"T", g.frames},
                     {"U", g.label_len},
                     {"enc_before", stats_json(g.enc_before)},
                     {"enc_after", stats_json(g.enc_after)},
                     {"pre_before", stats_json(g.pre_before)},
                     {"pre_after", stats_json(g.pre_after)}});
  json j = {{"type", "step"}, {"run_id", r.run_id}, {"seed", r.seed},
            {"step", r.step}, {"loss", r.loss},     {"lr", r.lr},
            {"grad_norm", r.grad_norm}, {"grad_stats", stats}};
  return j.dump();
}

std::string to_json_line(const EvalRecord &r) {
  json j = {{"type", "eval"},
            {"run_id", r.run_id},
            {"seed", r.seed},
            {"step", r.step},
            {"eval_loss", r.eval_loss},
            {"token_error_rate", r.token_error_rate},
            {"sequence_accuracy", r.sequence_accuracy},
            {"utterances", r.utterances}};
  return j.dump();
}

MetricsLog parse_metrics(const std::string &text) {
  MetricsLog log;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error &e) {
      throw IoError("metrics line " + std::to_string(lineno) + ": " + e.what());
    }
    require(j.is_object(), lineno, "record must be an object");
    const json &type = field(j, "type", lineno);
    require(type.is_string(), lineno, "'type' must be a string");
    const json &run = field(j, "run_id", lineno);
    require(run.is_string(), lineno, "'run_id' must be a string");
    if (type == "step") {
      StepRecord r;
      r.run_id = run.get<std::string>();
      r.seed = uint(j, "seed", lineno);
      r.step = uint(j, "step", lineno);
      r.loss = num(j, "loss", lineno);
      r.lr = num(j, "lr", lineno);
      r.grad_norm = num(j, "grad_norm", lineno);
      const json &gs = field(j, "grad_stats", lineno);
      require(gs.is_array(), lineno, "'grad_stats' must be an array");
      for (const json &g : gs) {
        require(g.is_object(), lineno, "grad_stats entries must be objects");
        joint::GradStats s;
        s.step = r.step;
        s.frames = uint(g, "T", lineno);
        s.label_len = uint(g, "U", lineno);
        s.enc_before = stats_from(g, "enc_before", lineno);
        s.enc_after = stats_from(g, "enc_after", lineno);
        s.pre_before = stats_from(g, "pre_before", lineno);
        s.pre_after = stats_from(g, "pre_after", lineno);
        r.grad_stats.push_back(s);
      }
      require(log.steps.empty() || r.step > log.steps.back().step, lineno,
              "step indices must increase");
      log.steps.push_back(std::move(r));
    } else if (type == "eval") {
      EvalRecord r;
      r.run_id = run.get<std::string>();
      r.seed = uint(j, "seed", lineno);
      r.step = uint(j, "step", lineno);
      r.eval_loss = num(j, "eval_loss", lineno);
      r.token_error_rate = num(j, "token_error_rate", lineno);
      r.sequence_accuracy = num(j, "sequence_accuracy", lineno);
      r.utterances = uint(j, "utterances", lineno);
      require(log.evals.empty() || r.step > log.evals.back().step, lineno,
              "eval step indices must increase");
      log.evals.push_back(std::move(r));
    } else {
      require(false, lineno, "unknown record type '" + type.get<std::string>() + "'");
    }
  }
  return log;
}

MetricsLog read_metrics(const std::string &path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot read metrics file " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_metrics(ss.str());
}

MetricsWriter::MetricsWriter(const std::string &path)
    : path_(path), out_(path, std::ios::trunc) {
  if (!out_) throw IoError("cannot write metrics file " + path);
}

void MetricsWriter::write(const StepRecord &r) { write_line(to_json_line(r)); }
void MetricsWriter::write(const EvalRecord &r) { write_line(to_json_line(r)); }

void MetricsWriter::write_line(const std::string &line) {
  std::lock_guard<std::mutex> lock(mu_);
  out_ << line << '\n';
  out_.flush();
  if (!out_) throw IoError("write to metrics file " + path_ + " failed");
}

}  // namespace translab::harness
