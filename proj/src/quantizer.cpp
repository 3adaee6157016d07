// SPDX-License-Identifier: Apache-2.0

#include "semlink/quantizer.hpp"

#include <algorithm>
#include <cmath>

#include "semlink/errors.hpp"

namespace semlink {

Quantized quantize_8bit(std::span<const double> v) {
  Quantized out;
  if (v.empty()) return out;
  for (double x : v) {
    if (!std::isfinite(x)) throw InvalidArgument("quantize_8bit: non-finite input");
  }
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  out.params.minimum = *lo;
  out.params.zero_point = 0;
  out.params.scale = *hi > *lo ? (*hi - *lo) / 255.0 : 1.0;
  out.bytes.reserve(v.size());
  for (double x : v) {
    const double q = std::round((x - *lo) / out.params.scale) + out.params.zero_point;
    out.bytes.push_back(static_cast<std::uint8_t>(std::clamp(q, 0.0, 255.0)));
  }
  return out;
}

std::vector<double> dequantize_8bit(std::span<const std::uint8_t> q, const QuantizerParams& p) {
  std::vector<double> out;
  out.reserve(q.size());
  for (auto b : q) out.push_back(p.minimum + (static_cast<int>(b) - p.zero_point) * p.scale);
  return out;
}

std::vector<std::uint8_t> bytes_to_bits(std::span<const std::uint8_t> bytes) {
  std::vector<std::uint8_t> bits;
  bits.reserve(bytes.size() * 8);
  for (auto b : bytes) {
    for (int i = 7; i >= 0; --i) bits.push_back(static_cast<std::uint8_t>((b >> i) & 1U));
  }
  return bits;
}

std::vector<std::uint8_t> bits_to_bytes(std::span<const std::uint8_t> bits) {
  if (bits.size() % 8 != 0) throw InvalidArgument("bits_to_bytes: length not a multiple of 8");
  std::vector<std::uint8_t> out(bits.size() / 8, 0);
  for (std::size_t i = 0; i < bits.size(); ++i) {
    out[i / 8] = static_cast<std::uint8_t>(out[i / 8] | ((bits[i] & 1U) << (7 - i % 8)));
  }
  return out;
}

}  // namespace semlink
