// SPDX-License-Identifier: Apache-2.0

#include "semlink/qam.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <string>

#include "semlink/errors.hpp"

namespace semlink {

QamConstellation::QamConstellation(int order) : order_(order) {
  if (order != 4 && order != 16 && order != 64 && order != 256) {
    throw InvalidArgument("QAM order must be 4, 16, 64 or 256, got " + std::to_string(order));
  }
  bits_ = std::countr_zero(static_cast<unsigned>(order));
  side_ = 1 << (bits_ / 2);
  unit_ = std::sqrt(3.0 / (2.0 * (order - 1)));

  levels_.resize(static_cast<std::size_t>(side_));
  label_.resize(static_cast<std::size_t>(side_));
  for (int p = 0; p < side_; ++p) {
    const auto gray = static_cast<std::uint32_t>(p ^ (p >> 1));
    label_[static_cast<std::size_t>(p)] = gray;
    levels_[gray] = (2.0 * p - (side_ - 1)) * unit_;
  }

  const int half = bits_ / 2;
  points_.resize(static_cast<std::size_t>(order));
  for (int s = 0; s < order; ++s) {
    const auto i_label = static_cast<std::size_t>(s >> half);
    const auto q_label = static_cast<std::size_t>(s & (side_ - 1));
    points_[static_cast<std::size_t>(s)] = {levels_[i_label], levels_[q_label]};
  }
}

std::vector<cplx> QamConstellation::map(std::span<const std::uint8_t> bits) const {
  const auto b = static_cast<std::size_t>(bits_);
  if (bits.size() % b != 0) {
    throw InvalidArgument("qam_map: bit count is not a multiple of log2(order)");
  }
  std::vector<cplx> out(bits.size() / b);
  for (std::size_t n = 0; n < out.size(); ++n) {
    std::size_t label = 0;
    for (std::size_t j = 0; j < b; ++j) label = (label << 1) | (bits[n * b + j] & 1U);
    out[n] = points_[label];
  }
  return out;
}

void QamConstellation::axis_llr(double y, double sigma2, double* out) const {
  const int half = bits_ / 2;
  for (int j = 0; j < half; ++j) {
    const unsigned mask = 1U << (half - 1 - j);
    double d0 = std::numeric_limits<double>::infinity();
    double d1 = d0;
    for (std::size_t label = 0; label < levels_.size(); ++label) {
      const double d = (y - levels_[label]) * (y - levels_[label]);
      if (label & mask) {
        d1 = std::min(d1, d);
      } else {
        d0 = std::min(d0, d);
      }
    }
    if (sigma2 > 0.0) {
      out[j] = (d1 - d0) / sigma2;
    } else {
      constexpr double inf = std::numeric_limits<double>::infinity();
      out[j] = d1 > d0 ? inf : (d1 < d0 ? -inf : 0.0);
    }
  }
}

std::vector<double> QamConstellation::demap_llr(std::span<const cplx> symbols,
                                                double sigma2) const {
  if (sigma2 < 0.0) throw InvalidArgument("qam_demap_llr: negative noise variance");
  const auto b = static_cast<std::size_t>(bits_);
  std::vector<double> llr(symbols.size() * b);
  for (std::size_t n = 0; n < symbols.size(); ++n) {
    axis_llr(symbols[n].real(), sigma2, llr.data() + n * b);
    axis_llr(symbols[n].imag(), sigma2, llr.data() + n * b + b / 2);
  }
  return llr;
}

std::vector<double> QamConstellation::demap_llr(std::span<const cplx> symbols,
                                                std::span<const double> sigma2) const {
  if (sigma2.size() != symbols.size()) {
    throw InvalidArgument("qam_demap_llr: one noise variance per symbol required");
  }
  const auto b = static_cast<std::size_t>(bits_);
  std::vector<double> llr(symbols.size() * b);
  for (std::size_t n = 0; n < symbols.size(); ++n) {
    if (sigma2[n] < 0.0) throw InvalidArgument("qam_demap_llr: negative noise variance");
    axis_llr(symbols[n].real(), sigma2[n], llr.data() + n * b);
    axis_llr(symbols[n].imag(), sigma2[n], llr.data() + n * b + b / 2);
  }
  return llr;
}

std::vector<cplx> qam_map(std::span<const std::uint8_t> bits, int order) {
  return QamConstellation(order).map(bits);
}

std::vector<double> qam_demap_llr(std::span<const cplx> symbols, int order, double sigma2) {
  return QamConstellation(order).demap_llr(symbols, sigma2);
}

}  // namespace semlink
