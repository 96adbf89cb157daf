// Copyright 2026 The LH-IQN Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef LHIQN_NN_NUM_ARRAY_H_
#define LHIQN_NN_NUM_ARRAY_H_

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lhiqn/errors.h"

namespace lhiqn::nn {

template <typename T>
using RowMatrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MatrixMap = Eigen::Map<RowMatrix<T>>;
template <typename T>
using ConstMatrixMap = Eigen::Map<const RowMatrix<T>>;

// Buffers start on Eigen's maximum alignment so vectorized kernels take the
// same path (and round the same way) wherever the allocation lands.
template <typename T>
using AlignedVector = std::vector<T, Eigen::aligned_allocator<T>>;

std::string ShapeString(const std::vector<int>& shape);

// Dense row-major array. Batched layer inputs use the leading dimension as
// the row index; matrix() views everything after it as columns.
template <typename T>
class NumArray {
 public:
  NumArray() = default;
  explicit NumArray(std::vector<int> shape, T fill = T(0))
      : shape_(std::move(shape)), data_(Count(shape_), fill) {}
  NumArray(std::vector<int> shape, std::initializer_list<T> data)
      : NumArray(std::move(shape), AlignedVector<T>(data)) {}
  NumArray(std::vector<int> shape, const std::vector<T>& data)
      : NumArray(std::move(shape), AlignedVector<T>(data.begin(), data.end())) {}
  NumArray(std::vector<int> shape, AlignedVector<T> data)
      : shape_(std::move(shape)), data_(std::move(data)) {
    if (data_.size() != Count(shape_)) {
      throw ConfigError("NumArray: " + std::to_string(data_.size()) +
                        " elements do not fill shape " + ShapeString(shape_));
    }
  }

  const std::vector<int>& shape() const { return shape_; }
  int rank() const { return static_cast<int>(shape_.size()); }
  int dim(int i) const { return shape_.at(i); }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  int rows() const { return shape_.empty() ? 0 : shape_[0]; }
  int cols() const {
    if (shape_.empty() || shape_[0] == 0) return 0;
    return static_cast<int>(data_.size() / shape_[0]);
  }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }
  std::span<T> values() { return data_; }
  std::span<const T> values() const { return data_; }
  AlignedVector<T>& storage() { return data_; }
  const AlignedVector<T>& storage() const { return data_; }

  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }
  T& at(int r, int c) { return data_[static_cast<std::size_t>(r) * cols() + c]; }
  const T& at(int r, int c) const {
    return data_[static_cast<std::size_t>(r) * cols() + c];
  }

  MatrixMap<T> matrix() { return MatrixMap<T>(data_.data(), rows(), cols()); }
  ConstMatrixMap<T> matrix() const {
    return ConstMatrixMap<T>(data_.data(), rows(), cols());
  }

  void fill(T v) { std::fill(data_.begin(), data_.end(), v); }

  // Reinterprets the element buffer under a new shape of equal size.
  void reshape(std::vector<int> shape) {
    if (Count(shape) != data_.size()) {
      throw ConfigError("NumArray: cannot reshape " + ShapeString(shape_) +
                        " to " + ShapeString(shape));
    }
    shape_ = std::move(shape);
  }

  bool all_finite() const {
    for (T v : data_) {
      if (!std::isfinite(v)) return false;
    }
    return true;
  }

  bool operator==(const NumArray& other) const = default;

  static std::size_t Count(const std::vector<int>& shape) {
    std::size_t n = 1;
    for (int d : shape) {
      if (d < 0) throw ConfigError("NumArray: negative dimension");
      n *= static_cast<std::size_t>(d);
    }
    return n;
  }

 private:
  std::vector<int> shape_;
  AlignedVector<T> data_;
};

// A trainable tensor together with its gradient accumulator and Adam moments.
template <typename T>
struct Param {
  Param() = default;
  Param(std::string param_name, std::vector<int> shape)
      : name(std::move(param_name)),
        value(shape),
        grad(shape),
        adam_m(shape),
        adam_v(std::move(shape)) {}

  std::string name;
  NumArray<T> value;
  NumArray<T> grad;
  NumArray<T> adam_m;
  NumArray<T> adam_v;
  long step_count = 0;

  void zero_grad() { grad.fill(T(0)); }
};

}  // namespace lhiqn::nn

#endif  // LHIQN_NN_NUM_ARRAY_H_
