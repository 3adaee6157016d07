// SPDX-License-Identifier: Apache-2.0

#ifndef SEMLINK_QUANTIZER_HPP
#define SEMLINK_QUANTIZER_HPP

#include <cstdint>
#include <span>
#include <vector>

namespace semlink {

/// Affine 8-bit quantizer: value = minimum + (q - zero_point) * scale.
struct QuantizerParams {
  double scale = 1.0;
  int zero_point = 0;
  double minimum = 0.0;
};

struct Quantized {
  std::vector<std::uint8_t> bytes;
  QuantizerParams params;
};

/// Min-max quantization with scale = (max - min) / 255 and zero_point 0.
/// A constant vector gets scale 1 and maps every entry to zero_point.
Quantized quantize_8bit(std::span<const double> v);

std::vector<double> dequantize_8bit(std::span<const std::uint8_t> q, const QuantizerParams& p);

/// MSB-first bit expansion and its inverse.
std::vector<std::uint8_t> bytes_to_bits(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> bits_to_bytes(std::span<const std::uint8_t> bits);

}  // namespace semlink

#endif  // SEMLINK_QUANTIZER_HPP
