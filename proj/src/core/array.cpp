// src/core/array.cpp

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

#include "core/array.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "core/errors.hpp"

namespace translab {

std::size_t shape_size(const Shape &shape) {
  std::size_t n = 1;
  for (std::size_t e : shape) n *= e;
  return n;
}

std::string shape_str(const Shape &shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << 'x';
    os << shape[i];
  }
  os << ']';
  return os.str();
}

Array::Array(Shape shape, real fill)
    : shape_(std::move(shape)), data_(shape_size(shape_), fill) {}

Array::Array(Shape shape, std::vector<real> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  if (shape_size(shape_) != data_.size())
    throw DimensionError("Array: shape " + shape_str(shape_) + " holds " +
                         std::to_string(shape_size(shape_)) + " elements, got " +
                         std::to_string(data_.size()));
}

Array Array::matrix(std::size_t rows, std::size_t cols,
                    std::initializer_list<real> values) {
  return Array(Shape{rows, cols}, std::vector<real>(values));
}

Array Array::vector(std::initializer_list<real> values) {
  return Array(Shape{values.size()}, std::vector<real>(values));
}

std::size_t Array::rows() const {
  if (shape_.empty()) return 1;
  std::size_t c = shape_.back();
  return c == 0 ? 0 : data_.size() / c;
}

std::size_t Array::cols() const { return shape_.empty() ? 1 : shape_.back(); }

void Array::fill(real v) { std::fill(data_.begin(), data_.end(), v); }

Array Array::reshaped(Shape shape) const {
  if (shape_size(shape) != data_.size())
    throw DimensionError("reshape: cannot view " + shape_str(shape_) + " as " +
                         shape_str(shape));
  return Array(std::move(shape), data_);
}

bool Array::all_finite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](real v) { return std::isfinite(v); });
}

void require_finite(const Array &a, const char *where) {
  if (!a.all_finite())
    throw NumericError(std::string(where) + ": non-finite value in result of shape " +
                       shape_str(a.shape()));
}

real max_abs_diff(const Array &a, const Array &b) {
  if (a.shape() != b.shape())
    throw DimensionError("max_abs_diff: " + shape_str(a.shape()) + " vs " +
                         shape_str(b.shape()));
  real m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace translab
