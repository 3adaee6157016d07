// SPDX-License-Identifier: Apache-2.0

#ifndef SEMLINK_COMPLEX_GRID_HPP
#define SEMLINK_COMPLEX_GRID_HPP

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "semlink/errors.hpp"

namespace semlink {

using cplx = std::complex<double>;
using CVec = std::vector<cplx>;

/// Dense row-major complex matrix. Rows are OFDM symbols, columns are
/// subcarriers (or time samples) throughout the library.
class ComplexGrid {
 public:
  ComplexGrid() = default;
  ComplexGrid(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols) {}
  ComplexGrid(std::size_t rows, std::size_t cols, CVec data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
      throw InvalidArgument("ComplexGrid: data size does not match shape");
    }
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  cplx& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const cplx& operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  std::span<cplx> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const cplx> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  const CVec& data() const noexcept { return data_; }
  CVec& data() noexcept { return data_; }

  bool same_shape(const ComplexGrid& other) const noexcept {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  friend bool operator==(const ComplexGrid&, const ComplexGrid&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  CVec data_;
};

}  // namespace semlink

#endif  // SEMLINK_COMPLEX_GRID_HPP
