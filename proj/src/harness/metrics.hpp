// src/harness/metrics.hpp

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
#include <fstream>
#include <mutex>
#include <string>
#include <vector>

#include "joint/jointer.hpp"

namespace translab::harness {

// One line of <run_id>.metrics.jsonl with "type": "step".
struct StepRecord {
  std::string run_id;
  std::uint64_t seed = 0;
  std::size_t step = 0;
  double loss = 0.0;
  double lr = 0.0;
  double grad_norm = 0.0;
  std::vector<joint::GradStats> grad_stats;

  bool operator==(const StepRecord &) const;
};

// One line with "type": "eval".
struct EvalRecord {
  std::string run_id;
  std::uint64_t seed = 0;
  std::size_t step = 0;
  double eval_loss = 0.0;
  double token_error_rate = 0.0;
  double sequence_accuracy = 0.0;
  std::size_t utterances = 0;

  bool operator==(const EvalRecord &) const = default;
};

struct MetricsLog {
  std::vector<StepRecord> steps;
  std::vector<EvalRecord> evals;
};

std::string to_json_line(const StepRecord &r);
std::string to_json_line(const EvalRecord &r);

// Parses and schema-checks a metrics file: every line must be a known record
// type with all fields of the right JSON type, and step indices must be
// strictly increasing per type. Violations raise IoError with the line number.
MetricsLog read_metrics(const std::string &path);
MetricsLog parse_metrics(const std::string &text);

// Serialized append-only writer.
class MetricsWriter {
 public:
  explicit MetricsWriter(const std::string &path);
  void write(const StepRecord &r);
  void write(const EvalRecord &r);
  const std::string &path() const { return path_; }

 private:
  void write_line(const std::string &line);
  std::string path_;
  std::ofstream out_;
  std::mutex mu_;
};

}  // namespace translab::harness
