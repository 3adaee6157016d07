// SPDX-License-Identifier: Apache-2.0
//
// Gray-mapped square QAM with unit average power and max-log LLRs.

#ifndef SEMLINK_QAM_HPP
#define SEMLINK_QAM_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "semlink/complex_grid.hpp"

namespace semlink {

/// Square constellation of order 4, 16, 64 or 256. Each symbol carries
/// log2(order) bits, the first half on the in-phase axis and the second
/// half on the quadrature axis, each half Gray coded, MSB first.
class QamConstellation {
 public:
  explicit QamConstellation(int order);

  int order() const noexcept { return order_; }
  int bits_per_symbol() const noexcept { return bits_; }
  /// Distance from the origin to the nearest level on one axis.
  double unit() const noexcept { return unit_; }
  /// All points, indexed by the bit label read MSB first.
  const CVec& points() const noexcept { return points_; }

  std::vector<cplx> map(std::span<const std::uint8_t> bits) const;
  /// LLR = log P(b=0)/P(b=1) under complex noise of variance sigma2 per
  /// symbol; sigma2 = 0 gives signed infinities.
  std::vector<double> demap_llr(std::span<const cplx> symbols, double sigma2) const;
  std::vector<double> demap_llr(std::span<const cplx> symbols,
                                std::span<const double> sigma2) const;

 private:
  void axis_llr(double y, double sigma2, double* out) const;

  int order_;
  int bits_;
  int side_;
  double unit_;
  std::vector<double> levels_;       // per axis, indexed by gray label
  std::vector<std::uint32_t> label_;  // axis position -> gray label
  CVec points_;
};

/// Throws InvalidArgument for an unsupported order or a bit count that is
/// not a multiple of log2(order).
std::vector<cplx> qam_map(std::span<const std::uint8_t> bits, int order);
std::vector<double> qam_demap_llr(std::span<const cplx> symbols, int order, double sigma2);

}  // namespace semlink

#endif  // SEMLINK_QAM_HPP
