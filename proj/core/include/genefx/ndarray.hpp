// Copyright (c) 2026 The genefx Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "genefx/error.hpp"

namespace genefx {

using Shape = std::vector<std::size_t>;

std::size_t shape_numel(const Shape& shape);
std::string shape_str(const Shape& shape);

/// Dense row-major array. Plain value type: copies are deep.
template <typename T>
class NdArray {
 public:
  using value_type = T;

  NdArray() = default;

  explicit NdArray(Shape shape, T fill = T{0})
      : shape_(std::move(shape)), data_(shape_numel(shape_), fill) {
    check_extents();
  }

  NdArray(Shape shape, std::vector<T> data) : shape_(std::move(shape)), data_(std::move(data)) {
    check_extents();
    if (data_.size() != shape_numel(shape_)) {
      throw DimensionError("NdArray: " + std::to_string(data_.size()) +
                           " values do not fill shape " + shape_str(shape_));
    }
  }

  const Shape& shape() const noexcept { return shape_; }
  std::size_t rank() const noexcept { return shape_.size(); }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  std::size_t dim(std::size_t axis) const {
    if (axis >= shape_.size()) {
      throw DimensionError("NdArray::dim: axis " + std::to_string(axis) + " out of range for " +
                           shape_str(shape_));
    }
    return shape_[axis];
  }

  std::span<T> data() noexcept { return data_; }
  std::span<const T> data() const noexcept { return data_; }
  const std::vector<T>& vec() const noexcept { return data_; }

  T& operator[](std::size_t i) noexcept { return data_[i]; }
  const T& operator[](std::size_t i) const noexcept { return data_[i]; }

  T& at(std::size_t i, std::size_t j) noexcept { return data_[i * shape_[1] + j]; }
  const T& at(std::size_t i, std::size_t j) const noexcept { return data_[i * shape_[1] + j]; }

  T& at(std::size_t n, std::size_t c, std::size_t h, std::size_t w) noexcept {
    return data_[((n * shape_[1] + c) * shape_[2] + h) * shape_[3] + w];
  }
  const T& at(std::size_t n, std::size_t c, std::size_t h, std::size_t w) const noexcept {
    return data_[((n * shape_[1] + c) * shape_[2] + h) * shape_[3] + w];
  }

  /// Same data under a new shape with equal element count.
  NdArray reshaped(Shape shape) const {
    if (shape_numel(shape) != data_.size()) {
      throw DimensionError("reshape " + shape_str(shape_) + " -> " + shape_str(shape));
    }
    return NdArray(std::move(shape), data_);
  }

  void fill(T v) {
    for (auto& x : data_) x = v;
  }

  template <typename U>
  NdArray<U> cast() const {
    std::vector<U> out(data_.begin(), data_.end());
    return NdArray<U>(shape_, std::move(out));
  }

  bool operator==(const NdArray& other) const = default;

 private:
  void check_extents() const {
    for (auto e : shape_) {
      if (e == 0) throw DimensionError("NdArray: zero extent in shape " + shape_str(shape_));
    }
  }

  Shape shape_;
  std::vector<T> data_;
};

/// Bitwise equality of shape and payload (distinguishes -0.0 and NaN payloads).
template <typename T>
bool bit_identical(const NdArray<T>& a, const NdArray<T>& b);

/// True when every element is finite.
template <typename T>
bool all_finite(const NdArray<T>& a);

template <typename T>
T max_abs_diff(const NdArray<T>& a, const NdArray<T>& b);

}  // namespace genefx
