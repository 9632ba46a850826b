// src/core/array.hpp

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
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "core/real.hpp"

namespace translab {

using Shape = std::vector<std::size_t>;

std::size_t shape_size(const Shape &shape);
std::string shape_str(const Shape &shape);

// Dense row-major array of reals. The universal value carrier: every
// activation, parameter and gradient is one of these.
class Array {
 public:
  Array() = default;
  explicit Array(Shape shape, real fill = 0.0);
  Array(Shape shape, std::vector<real> data);

  static Array scalar(real v) { return Array(Shape{}, std::vector<real>{v}); }
  static Array matrix(std::size_t rows, std::size_t cols,
                      std::initializer_list<real> values);
  static Array vector(std::initializer_list<real> values);

  const Shape &shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t size() const { return data_.size(); }
  std::size_t dim(std::size_t i) const { return shape_.at(i); }

  // Product of all extents but the last; 1 for scalars.
  std::size_t rows() const;
  // Last extent; 1 for scalars.
  std::size_t cols() const;

  real *data() { return data_.data(); }
  const real *data() const { return data_.data(); }
  std::span<real> span() { return data_; }
  std::span<const real> span() const { return data_; }
  std::vector<real> &values() { return data_; }
  const std::vector<real> &values() const { return data_; }

  real &operator[](std::size_t i) { return data_[i]; }
  real operator[](std::size_t i) const { return data_[i]; }
  real &operator()(std::size_t r, std::size_t c) { return data_[r * cols() + c]; }
  real operator()(std::size_t r, std::size_t c) const { return data_[r * cols() + c]; }
  real &at3(std::size_t i, std::size_t j, std::size_t k) {
    return data_[(i * shape_[1] + j) * shape_[2] + k];
  }
  real at3(std::size_t i, std::size_t j, std::size_t k) const {
    return data_[(i * shape_[1] + j) * shape_[2] + k];
  }

  void fill(real v);
  Array reshaped(Shape shape) const;
  bool all_finite() const;

  bool operator==(const Array &other) const = default;

 private:
  Shape shape_;
  std::vector<real> data_;
};

// Throws NumericError naming `where` if any element is NaN or Inf.
void require_finite(const Array &a, const char *where);

real max_abs_diff(const Array &a, const Array &b);

}  // namespace translab
