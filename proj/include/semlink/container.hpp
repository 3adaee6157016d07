// SPDX-License-Identifier: Apache-2.0
//
// Flat little-endian binary container shared by tensors, grids, frames,
// CSI estimates and trained codecs:
//
//   u32 magic | u32 version | u32 d0 | u32 d1 | u32 d2 | payload
//
// Real payloads are IEEE-754 binary64; complex payloads interleave
// (real, imag). Some kinds append extra u32 fields before the payload;
// see the per-kind writers.

#ifndef SEMLINK_CONTAINER_HPP
#define SEMLINK_CONTAINER_HPP

#include <array>
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "semlink/complex_grid.hpp"
#include "semlink/features.hpp"

namespace semlink::container {

inline constexpr std::uint32_t kVersion = 1;

constexpr std::uint32_t fourcc(const char (&s)[5]) {
  return static_cast<std::uint32_t>(static_cast<unsigned char>(s[0])) |
         static_cast<std::uint32_t>(static_cast<unsigned char>(s[1])) << 8 |
         static_cast<std::uint32_t>(static_cast<unsigned char>(s[2])) << 16 |
         static_cast<std::uint32_t>(static_cast<unsigned char>(s[3])) << 24;
}

inline constexpr std::uint32_t kFeatureTensor = fourcc("SLFT");
inline constexpr std::uint32_t kComplexGrid = fourcc("SLCG");
inline constexpr std::uint32_t kOfdmFrame = fourcc("SLOF");
inline constexpr std::uint32_t kCsiEstimate = fourcc("SLCS");
inline constexpr std::uint32_t kLinearCodec = fourcc("SLLC");

struct Header {
  std::uint32_t magic = 0;
  std::uint32_t version = kVersion;
  std::array<std::uint32_t, 3> dims{};
};

void write_u32(std::ostream& os, std::uint32_t v);
void write_f64(std::ostream& os, double v);
std::uint32_t read_u32(std::istream& is);
double read_f64(std::istream& is);

void write_header(std::ostream& os, const Header& h);
/// Throws IoError on a short read, wrong magic or unknown version.
Header read_header(std::istream& is, std::uint32_t expected_magic);

void write_reals(std::ostream& os, std::span<const double> v);
std::vector<double> read_reals(std::istream& is, std::size_t n);
void write_complex(std::ostream& os, std::span<const cplx> v);
CVec read_complex(std::istream& is, std::size_t n);

void write_feature_tensor(std::ostream& os, const FeatureTensor& t);
FeatureTensor read_feature_tensor(std::istream& is);

/// Several tensors back to back (synthetic corpora).
void write_feature_corpus(const std::string& path, std::span<const FeatureTensor> corpus);
std::vector<FeatureTensor> read_feature_corpus(const std::string& path);

void write_complex_grid(std::ostream& os, const ComplexGrid& g);
ComplexGrid read_complex_grid(std::istream& is);

}  // namespace semlink::container

#endif  // SEMLINK_CONTAINER_HPP
