// src/harness/checkpoint.cpp

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

#include "harness/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "core/errors.hpp"

namespace translab::harness {

namespace {

constexpr char kMagic[8] = {'T', 'L', 'C', 'K', 'P', 'T', '0', '1'};

template <typename T>
void put_le(std::string &out, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i)
    out.push_back(static_cast<char>((static_cast<std::uint64_t>(v) >> (8 * i)) & 0xff));
}

class Reader {
 public:
  Reader(std::string bytes, std::string path) : bytes_(std::move(bytes)), path_(std::move(path)) {}

  template <typename T>
  T get_le() {
    need(sizeof(T));
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i)
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    pos_ += sizeof(T);
    return static_cast<T>(v);
  }
  std::string get_bytes(std::size_t n) {
    need(n);
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n)
      throw IoError("checkpoint " + path_ + " is truncated at byte " + std::to_string(pos_));
  }
  std::string bytes_;
  std::string path_;
  std::size_t pos_ = 0;
};

}  // namespace

void write_checkpoint(const std::string &path, const CheckpointData &data) {
  std::string out(kMagic, sizeof(kMagic));
  put_le<std::uint32_t>(out, data.version);
  put_le<std::uint64_t>(out, data.config_text.size());
  out += data.config_text;
  put_le<std::uint64_t>(out, data.params.size());
  for (const auto &[name, a] : data.params) {
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(name.size()));
    out += name;
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(a.rank()));
    for (std::size_t e : a.shape()) put_le<std::uint64_t>(out, e);
    for (double v : a.values()) put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(v));
  }
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot write checkpoint " + tmp);
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!f) throw IoError("short write to checkpoint " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw IoError("cannot move checkpoint into place at " + path);
}

CheckpointData read_checkpoint(const std::string &path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open checkpoint " + path);
  Reader r(std::string(std::istreambuf_iterator<char>(f), {}), path);
  if (r.get_bytes(sizeof(kMagic)) != std::string(kMagic, sizeof(kMagic)))
    throw IoError(path + " is not a translab checkpoint");
  CheckpointData d;
  d.version = r.get_le<std::uint32_t>();
  if (d.version != kCheckpointVersion)
    throw IoError(path + ": unsupported checkpoint version " + std::to_string(d.version));
  d.config_text = r.get_bytes(r.get_le<std::uint64_t>());
  const std::uint64_t count = r.get_le<std::uint64_t>();
  for (std::uint64_t i = 0; i < count; ++i) {
    std::string name = r.get_bytes(r.get_le<std::uint32_t>());
    const std::uint32_t rank = r.get_le<std::uint32_t>();
    Shape shape;
    for (std::uint32_t k = 0; k < rank; ++k) shape.push_back(r.get_le<std::uint64_t>());
    Array a(shape);
    for (double &v : a.values()) v = std::bit_cast<double>(r.get_le<std::uint64_t>());
    d.params.emplace_back(std::move(name), std::move(a));
  }
  if (!r.done()) throw IoError(path + ": trailing bytes after last parameter");
  return d;
}

CheckpointData snapshot(const std::string &config_text, const ParamSet &params) {
  CheckpointData d;
  d.config_text = config_text;
  for (const NamedParam &p : params.items()) d.params.emplace_back(p.name, p.var->value);
  return d;
}

void restore(const CheckpointData &data, ParamSet &params) {
  if (data.params.size() != params.items().size())
    throw IoError("checkpoint has " + std::to_string(data.params.size()) +
                  " parameters, model has " + std::to_string(params.items().size()));
  for (const auto &[name, a] : data.params) {
    Var v = params.find(name);
    if (!v) throw IoError("checkpoint parameter '" + name + "' is not in the model");
    if (v->shape() != a.shape())
      throw IoError("checkpoint parameter '" + name + "' has shape " + shape_str(a.shape()) +
                    ", model expects " + shape_str(v->shape()));
    v->value = a;
  }
}

}  // namespace translab::harness
