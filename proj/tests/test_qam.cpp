// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <bit>
#include <cmath>

#include "semlink/errors.hpp"
#include "semlink/qam.hpp"
#include "semlink/rng.hpp"

using namespace semlink;

namespace {

std::vector<std::uint8_t> random_bits(RngStream& rng, std::size_t n) {
  std::vector<std::uint8_t> b(n);
  for (auto& x : b) x = static_cast<std::uint8_t>(rng() & 1U);
  return b;
}

double q_func(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

}  // namespace

TEST_CASE("constellations have unit average power") {
  for (int order : {4, 16, 64, 256}) {
    const QamConstellation c(order);
    CHECK(c.bits_per_symbol() == std::countr_zero(static_cast<unsigned>(order)));
    REQUIRE(c.points().size() == static_cast<std::size_t>(order));
    double p = 0.0;
    for (const auto& s : c.points()) p += std::norm(s);
    CHECK(std::abs(p / order - 1.0) < 1e-12);
    CHECK(c.unit() == doctest::Approx(std::sqrt(3.0 / (2.0 * (order - 1)))));
  }
}

TEST_CASE("16QAM labels") {
  const QamConstellation c(16);
  const double u = 1.0 / std::sqrt(10.0);
  // label 0000 sits at the negative corner, I bits first
  CHECK(std::abs(c.points()[0] - cplx(-3 * u, -3 * u)) < 1e-12);
  CHECK(std::abs(c.map(std::vector<std::uint8_t>{0, 1, 0, 0})[0] - cplx(-u, -3 * u)) < 1e-12);
  CHECK(std::abs(c.map(std::vector<std::uint8_t>{0, 0, 1, 0})[0] - cplx(-3 * u, 3 * u)) < 1e-12);
}

TEST_CASE("nearest neighbours differ in exactly one bit") {
  for (int order : {4, 16, 64, 256}) {
    const QamConstellation c(order);
    const double d_min = 2.0 * c.unit();
    for (int a = 0; a < order; ++a) {
      for (int b = a + 1; b < order; ++b) {
        if (std::abs(std::abs(c.points()[a] - c.points()[b]) - d_min) < 1e-9) {
          CHECK(std::popcount(static_cast<unsigned>(a ^ b)) == 1);
        }
      }
    }
  }
}

TEST_CASE("noiseless demapping recovers the bits") {
  RngStream rng(1);
  for (int order : {4, 16, 64, 256}) {
    const auto bits = random_bits(rng, 6000 - 6000 % std::countr_zero(static_cast<unsigned>(order)));
    const auto sym = qam_map(bits, order);
    for (double s2 : {0.0, 1e-6}) {
      const auto llr = qam_demap_llr(sym, order, s2);
      REQUIRE(llr.size() == bits.size());
      for (std::size_t i = 0; i < bits.size(); ++i) CHECK((llr[i] < 0) == (bits[i] == 1));
    }
    for (double l : qam_demap_llr(sym, order, 0.0)) CHECK(std::isinf(l));
  }
}

TEST_CASE("invalid orders and bit counts") {
  CHECK_THROWS_AS(QamConstellation(8), InvalidArgument);
  CHECK_THROWS_AS(QamConstellation(2), InvalidArgument);
  CHECK_THROWS_AS(qam_map(std::vector<std::uint8_t>(5), 16), InvalidArgument);
  CHECK_THROWS_AS(qam_map(std::vector<std::uint8_t>(4), 32), InvalidArgument);
  CHECK_THROWS_AS(qam_demap_llr(CVec(3), 12, 1.0), InvalidArgument);
}

TEST_CASE("per-symbol noise variances scale the LLRs") {
  const QamConstellation c(16);
  const CVec y{{0.1, -0.2}, {0.1, -0.2}};
  const std::vector<double> s2{0.5, 1.0};
  const auto llr = c.demap_llr(y, s2);
  for (int b = 0; b < 4; ++b) CHECK(llr[b] == doctest::Approx(2.0 * llr[4 + b]));
  CHECK_THROWS_AS(c.demap_llr(y, std::vector<double>{1.0}), InvalidArgument);
}

TEST_CASE("uncoded 16QAM BER at 10 dB matches the Gray closed form") {
  RngStream rng(2);
  const double snr = 10.0;
  const double s2 = 1.0 / snr;
  constexpr std::size_t symbols = 1'000'000;
  const auto bits = random_bits(rng, 4 * symbols);
  auto sym = qam_map(bits, 16);
  for (auto& s : sym) s += rng.complex_normal(s2);
  const auto llr = qam_demap_llr(sym, 16, s2);
  std::size_t errors = 0;
  for (std::size_t i = 0; i < bits.size(); ++i) errors += (llr[i] < 0) != (bits[i] == 1);
  const double ber = static_cast<double>(errors) / static_cast<double>(bits.size());
  const double d = std::sqrt(snr / 5.0);
  const double oracle = (3.0 * q_func(d) + 2.0 * q_func(3.0 * d) - q_func(5.0 * d)) / 4.0;
  CHECK(std::abs(ber - oracle) / oracle < 0.1);
}
