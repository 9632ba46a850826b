// src/harness/checkpoint.hpp

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
#include <string>
#include <utility>
#include <vector>

#include "core/array.hpp"
#include "core/params.hpp"

namespace translab::harness {

// Binary layout, all integers little-endian:
//   magic "TLCKPT01" | u32 format version | u64 n | n bytes config text (UTF-8)
//   u64 parameter count, then per parameter:
//   u32 n | n bytes name (UTF-8) | u32 rank | rank x u64 extents | f64 data
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct CheckpointData {
  std::uint32_t version = kCheckpointVersion;
  std::string config_text;
  std::vector<std::pair<std::string, Array>> params;
};

void write_checkpoint(const std::string &path, const CheckpointData &data);
CheckpointData read_checkpoint(const std::string &path);

CheckpointData snapshot(const std::string &config_text, const ParamSet &params);
// Copies values into params; names and shapes must match exactly.
void restore(const CheckpointData &data, ParamSet &params);

}  // namespace translab::harness
