// SPDX-License-Identifier: Apache-2.0

#include "semlink/container.hpp"

#include <bit>
#include <fstream>
#include <limits>

#include "semlink/errors.hpp"

namespace semlink::container {

namespace {

void put_bytes(std::ostream& os, std::uint64_t v, int n) {
  char buf[8];
  for (int i = 0; i < n; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xffU);
  os.write(buf, n);
  if (!os) throw IoError("container: write failed");
}

std::uint64_t get_bytes(std::istream& is, int n) {
  unsigned char buf[8];
  is.read(reinterpret_cast<char*>(buf), n);
  if (is.gcount() != n) throw IoError("container: unexpected end of stream");
  std::uint64_t v = 0;
  for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return v;
}

std::uint32_t checked_u32(std::size_t v) {
  if (v > std::numeric_limits<std::uint32_t>::max()) {
    throw IoError("container: dimension exceeds 32 bits");
  }
  return static_cast<std::uint32_t>(v);
}

}  // namespace

void write_u32(std::ostream& os, std::uint32_t v) { put_bytes(os, v, 4); }
void write_f64(std::ostream& os, double v) { put_bytes(os, std::bit_cast<std::uint64_t>(v), 8); }
std::uint32_t read_u32(std::istream& is) { return static_cast<std::uint32_t>(get_bytes(is, 4)); }
double read_f64(std::istream& is) { return std::bit_cast<double>(get_bytes(is, 8)); }

void write_header(std::ostream& os, const Header& h) {
  write_u32(os, h.magic);
  write_u32(os, h.version);
  for (auto d : h.dims) write_u32(os, d);
}

Header read_header(std::istream& is, std::uint32_t expected_magic) {
  Header h;
  h.magic = read_u32(is);
  if (h.magic != expected_magic) throw IoError("container: wrong magic");
  h.version = read_u32(is);
  if (h.version != kVersion) throw IoError("container: unsupported version");
  for (auto& d : h.dims) d = read_u32(is);
  return h;
}

void write_reals(std::ostream& os, std::span<const double> v) {
  for (double x : v) write_f64(os, x);
}

std::vector<double> read_reals(std::istream& is, std::size_t n) {
  std::vector<double> out(n);
  for (auto& x : out) x = read_f64(is);
  return out;
}

void write_complex(std::ostream& os, std::span<const cplx> v) {
  for (const cplx& z : v) {
    write_f64(os, z.real());
    write_f64(os, z.imag());
  }
}

CVec read_complex(std::istream& is, std::size_t n) {
  CVec out(n);
  for (auto& z : out) {
    const double re = read_f64(is);
    const double im = read_f64(is);
    z = {re, im};
  }
  return out;
}

void write_feature_tensor(std::ostream& os, const FeatureTensor& t) {
  write_header(os, {kFeatureTensor, kVersion,
                    {checked_u32(t.channels()), checked_u32(t.height()),
                     checked_u32(t.width())}});
  write_reals(os, t.values());
}

FeatureTensor read_feature_tensor(std::istream& is) {
  const Header h = read_header(is, kFeatureTensor);
  const std::size_t n = std::size_t{h.dims[0]} * h.dims[1] * h.dims[2];
  return FeatureTensor(h.dims[0], h.dims[1], h.dims[2], read_reals(is, n));
}

void write_feature_corpus(const std::string& path, std::span<const FeatureTensor> corpus) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path + " for writing");
  for (const auto& t : corpus) write_feature_tensor(os, t);
}

std::vector<FeatureTensor> read_feature_corpus(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path);
  std::vector<FeatureTensor> out;
  while (is.peek() != std::char_traits<char>::eof()) out.push_back(read_feature_tensor(is));
  return out;
}

void write_complex_grid(std::ostream& os, const ComplexGrid& g) {
  write_header(os, {kComplexGrid, kVersion, {checked_u32(g.rows()), checked_u32(g.cols()), 0}});
  write_complex(os, g.data());
}

ComplexGrid read_complex_grid(std::istream& is) {
  const Header h = read_header(is, kComplexGrid);
  const std::size_t n = std::size_t{h.dims[0]} * h.dims[1];
  return ComplexGrid(h.dims[0], h.dims[1], read_complex(is, n));
}

}  // namespace semlink::container
