// src/predictor/predictor.hpp

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

#include <cstddef>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "core/autodiff.hpp"
#include "core/params.hpp"

namespace translab::predictor {

struct PredictorConfig {
  std::size_t num_layers = 1;
  std::size_t model_dim = 32;
  std::size_t num_heads = 2;
  std::size_t ff_dim = 64;
  std::size_t memory_length = 16;
  std::size_t vocab_size = 8;

  void validate() const;
};

// Per-layer inputs cached from earlier segments. Plain arrays: nothing that
// reads them can push gradient back into the segment that produced them.
struct SegmentMemory {
  std::vector<Array> layers;  // each [<= memory_length x model_dim]
  std::size_t offset = 0;     // positions processed so far, start symbol included

  bool empty() const { return offset == 0; }
};

// Transformer-XL style causal predictor over label tokens. The first segment
// of a stream starts with a learned start-of-sequence embedding, so for U
// labels the first call returns U+1 rows; later segments return one row per
// token.
class Predictor {
 public:
  Predictor(const PredictorConfig &config, std::mt19937_64 &rng, ParamSet &params,
            const std::string &prefix = "predictor");

  struct Result {
    Var h_pre;
    SegmentMemory memory;
    // Memory rows fed to each layer as graph constants (for inspection).
    std::vector<Var> memory_inputs;
  };

  Result predict(std::span<const int> labels, const SegmentMemory &memory = {}) const;

  const PredictorConfig &config() const { return config_; }

 private:
  struct Layer {
    Var wq, wk, wv, wr, wo, bo, ln1_g, ln1_b, w1, b1, w2, b2, ln2_g, ln2_b;
  };

  PredictorConfig config_;
  Var embedding_;  // row 0 is the start symbol, rows 1..V the tokens
  Var bias_u_, bias_v_;
  std::vector<Layer> layers_;
};

}  // namespace translab::predictor
