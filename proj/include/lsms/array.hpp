#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

namespace lsms {

/// Dense row-major 2-D array with value semantics.
template <class T>
class Array2 {
 public:
  Array2() = default;
  Array2(std::size_t rows, std::size_t cols, T init = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, init) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }

  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<T> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const T> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::span<T> flat() noexcept { return data_; }
  std::span<const T> flat() const noexcept { return data_; }

  void fill(T value) { std::fill(data_.begin(), data_.end(), value); }

  bool same_shape(std::size_t rows, std::size_t cols) const noexcept {
    return rows_ == rows && cols_ == cols;
  }

  friend bool operator==(const Array2&, const Array2&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

/// Dense 3-D array indexed (a, b, c) with c fastest.
template <class T>
class Array3 {
 public:
  Array3() = default;
  Array3(std::size_t n0, std::size_t n1, std::size_t n2, T init = T{})
      : n0_(n0), n1_(n1), n2_(n2), data_(n0 * n1 * n2, init) {}

  std::size_t dim0() const noexcept { return n0_; }
  std::size_t dim1() const noexcept { return n1_; }
  std::size_t dim2() const noexcept { return n2_; }
  std::size_t size() const noexcept { return data_.size(); }

  T& operator()(std::size_t a, std::size_t b, std::size_t c) {
    return data_[(a * n1_ + b) * n2_ + c];
  }
  const T& operator()(std::size_t a, std::size_t b, std::size_t c) const {
    return data_[(a * n1_ + b) * n2_ + c];
  }

  std::span<T> flat() noexcept { return data_; }
  std::span<const T> flat() const noexcept { return data_; }

  void fill(T value) { std::fill(data_.begin(), data_.end(), value); }

  bool same_shape(std::size_t n0, std::size_t n1, std::size_t n2) const noexcept {
    return n0_ == n0 && n1_ == n1 && n2_ == n2;
  }

  friend bool operator==(const Array3&, const Array3&) = default;

 private:
  std::size_t n0_ = 0;
  std::size_t n1_ = 0;
  std::size_t n2_ = 0;
  std::vector<T> data_;
};

using Matrix = Array2<double>;
using Tensor3 = Array3<double>;

}  // namespace lsms
