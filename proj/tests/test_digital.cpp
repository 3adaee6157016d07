// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "semlink/digital_chain.hpp"
#include "semlink/errors.hpp"

using namespace semlink;

namespace {

std::vector<double> random_vector(RngStream& rng, std::size_t n) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.normal();
  return v;
}

double max_abs_error(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double mean_sq_error(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m += (a[i] - b[i]) * (a[i] - b[i]);
  return m / static_cast<double>(a.size());
}

}  // namespace

TEST_CASE("chain configuration") {
  DigitalChainConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.modulation_order = 256;
  CHECK_NOTHROW(cfg.validate());
  cfg.modulation_order = 32;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg = {};
  cfg.code_rate = 0.75;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg = {};
  cfg.quant_bits = 4;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
}

TEST_CASE("transmitter block and symbol counts") {
  RngStream rng(1);
  DigitalChainConfig cfg;
  const auto v = random_vector(rng, 100);  // 800 bits -> two blocks
  const auto tx = digital_transmit(v, cfg);
  CHECK(tx.values == 100);
  CHECK(tx.payload_bits.size() == 800);
  CHECK(tx.codewords == 2);
  CHECK(tx.symbols.size() == 2 * 1024 / 4);
  cfg.modulation_order = 256;
  CHECK(digital_transmit(v, cfg).symbols.size() == 2 * 1024 / 8);
  CHECK_THROWS_AS(digital_transmit(std::vector<double>{}, cfg), InvalidArgument);
}

TEST_CASE("noiseless chain reproduces the quantized vector") {
  RngStream rng(2);
  const DigitalChainConfig cfg;
  const auto v = random_vector(rng, 300);
  const auto res = run_digital_chain(v, cfg, awgn_symbol_channel(INFINITY), rng);
  const auto q = quantize_8bit(v);
  CHECK(res.reconstructed == dequantize_8bit(q.bytes, q.params));
  CHECK(res.ber == 0.0);
  CHECK(res.failed_codewords == 0);
  CHECK(res.decoded_bits == bytes_to_bits(q.bytes));
}

TEST_CASE("16QAM at 18 dB leaves only quantization error") {
  RngStream rng(3);
  const DigitalChainConfig cfg;
  const auto channel = awgn_symbol_channel(18.0);
  std::size_t bad = 0;
  for (int n = 0; n < 1000; ++n) {
    const auto v = random_vector(rng, 128);
    const auto res = run_digital_chain(v, cfg, channel, rng);
    if (max_abs_error(res.reconstructed, v) > res.params.scale / 2.0 * (1.0 + 1e-12)) ++bad;
  }
  CHECK(bad == 0);
}

TEST_CASE("the digital chain falls off a cliff at low SNR") {
  RngStream rng(4);
  const DigitalChainConfig cfg;
  double low = 0.0, high = 0.0;
  for (int n = 0; n < 50; ++n) {
    const auto v = random_vector(rng, 128);
    low += mean_sq_error(run_digital_chain(v, cfg, awgn_symbol_channel(0.0), rng).reconstructed, v);
    high += mean_sq_error(run_digital_chain(v, cfg, awgn_symbol_channel(18.0), rng).reconstructed, v);
  }
  CHECK(low >= 10.0 * high);
}

TEST_CASE("receiver rejects a mismatched observation") {
  RngStream rng(5);
  const DigitalChainConfig cfg;
  const auto tx = digital_transmit(random_vector(rng, 64), cfg);
  SymbolObservation obs;
  obs.symbols.assign(tx.symbols.begin(), tx.symbols.end() - 1);
  obs.noise_variance.assign(obs.symbols.size(), 0.1);
  CHECK_THROWS_AS(digital_receive(obs, tx, cfg), InvalidArgument);
}

TEST_CASE("channel-use accounting") {
  CHECK(channel_uses(1000.0, 0.00125, 16, 0.5) == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(channel_uses(1000.0, 0.0025, 256, 0.5) == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(channel_uses(1000.0, 0.25, 4, 1.0) == doctest::Approx(1000.0).epsilon(1e-12));
  CHECK(analog_channel_uses(1000.0, 0.005) == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(parity_compression_rate(0.005, 16, 0.5) == doctest::Approx(0.00125).epsilon(1e-12));
  CHECK(parity_compression_rate(0.005, 256, 0.5) == doctest::Approx(0.0025).epsilon(1e-12));
  CHECK_THROWS_AS(channel_uses(0.0, 0.1, 16, 0.5), InvalidArgument);
  CHECK_THROWS_AS(channel_uses(10.0, 0.1, 16, 0.0), InvalidArgument);

  // the parity rate always lands back on the analog channel uses
  for (double d_r : {51200.0, 1000.0, 777.0}) {
    for (int order : {4, 16, 64, 256}) {
      const double cr = parity_compression_rate(0.005, order, 0.5);
      CHECK(channel_uses(d_r, cr, order, 0.5) == doctest::Approx(analog_channel_uses(d_r, 0.005)));
    }
  }
}
