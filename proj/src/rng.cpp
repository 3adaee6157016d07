// SPDX-License-Identifier: Apache-2.0

#include "semlink/rng.hpp"

#include <cmath>

namespace semlink {

double RngStream::uniform() noexcept {
  // 53 high bits -> [0, 1)
  return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

double RngStream::normal() { return normal_(*this); }

std::complex<double> RngStream::complex_normal(double variance) {
  const double s = std::sqrt(variance / 2.0);
  const double re = normal();
  const double im = normal();
  return {s * re, s * im};
}

}  // namespace semlink
