// SPDX-License-Identifier: Apache-2.0

#include "semlink/digital_chain.hpp"

#include <algorithm>
#include <cmath>

#include "semlink/channel.hpp"
#include "semlink/errors.hpp"
#include "semlink/qam.hpp"

namespace semlink {

void DigitalChainConfig::validate() const {
  if (quant_bits != 8) throw InvalidArgument("digital chain: only 8-bit quantization is supported");
  if (code_rate != 0.5 || code_length != 1024) {
    throw InvalidArgument("digital chain: only the rate-1/2 length-1024 LDPC code is supported");
  }
  if (modulation_order != 4 && modulation_order != 16 && modulation_order != 64 &&
      modulation_order != 256) {
    throw InvalidArgument("digital chain: modulation order must be a square QAM");
  }
  if (max_iters < 1) throw InvalidArgument("digital chain: max_iters must be positive");
}

DigitalTx digital_transmit(std::span<const double> v, const DigitalChainConfig& cfg,
                           const LdpcCode& code) {
  cfg.validate();
  if (v.empty()) throw InvalidArgument("digital_transmit: empty input");
  const QamConstellation qam(cfg.modulation_order);

  DigitalTx tx;
  Quantized q = quantize_8bit(v);
  tx.params = q.params;
  tx.values = v.size();
  tx.payload_bits = bytes_to_bits(q.bytes);

  const std::size_t k = code.k();
  tx.codewords = (tx.payload_bits.size() + k - 1) / k;
  std::vector<std::uint8_t> coded;
  coded.reserve(tx.codewords * code.n());
  std::vector<std::uint8_t> block(k);
  for (std::size_t b = 0; b < tx.codewords; ++b) {
    std::fill(block.begin(), block.end(), 0);
    const std::size_t start = b * k;
    const std::size_t len = std::min(k, tx.payload_bits.size() - start);
    std::copy_n(tx.payload_bits.begin() + static_cast<std::ptrdiff_t>(start), len, block.begin());
    const auto cw = code.encode(block);
    coded.insert(coded.end(), cw.begin(), cw.end());
  }
  const auto bps = static_cast<std::size_t>(qam.bits_per_symbol());
  coded.resize((coded.size() + bps - 1) / bps * bps, 0);
  tx.symbols = qam.map(coded);
  return tx;
}

DigitalResult digital_receive(const SymbolObservation& obs, const DigitalTx& tx,
                              const DigitalChainConfig& cfg, const LdpcCode& code) {
  cfg.validate();
  if (obs.symbols.size() != tx.symbols.size()) {
    throw InvalidArgument("digital_receive: symbol count differs from the transmitter");
  }
  const QamConstellation qam(cfg.modulation_order);
  const std::vector<double> llr = qam.demap_llr(obs.symbols, obs.noise_variance);

  DigitalResult res;
  res.params = tx.params;
  res.channel_symbols = tx.symbols.size();
  res.codewords = tx.codewords;
  res.decoded_bits.reserve(tx.codewords * code.k());
  for (std::size_t b = 0; b < tx.codewords; ++b) {
    const std::span<const double> block(llr.data() + b * code.n(), code.n());
    const LdpcDecodeResult d = code.decode(block, cfg.max_iters);
    if (!d.converged) ++res.failed_codewords;
    res.decoded_bits.insert(res.decoded_bits.end(), d.message.begin(), d.message.end());
  }
  res.decoded_bits.resize(tx.payload_bits.size());

  std::size_t errors = 0;
  for (std::size_t i = 0; i < res.decoded_bits.size(); ++i) {
    errors += res.decoded_bits[i] != tx.payload_bits[i];
  }
  res.ber = static_cast<double>(errors) / static_cast<double>(res.decoded_bits.size());
  res.reconstructed = dequantize_8bit(bits_to_bytes(res.decoded_bits), tx.params);
  return res;
}

SymbolChannel awgn_symbol_channel(double snr_db) {
  const double sigma2 = noise_variance(snr_db, 1.0);
  return [sigma2](std::span<const cplx> symbols, RngStream& rng) {
    SymbolObservation obs;
    obs.symbols.assign(symbols.begin(), symbols.end());
    obs.noise_variance.assign(symbols.size(), sigma2);
    if (sigma2 > 0.0) {
      for (auto& s : obs.symbols) s += rng.complex_normal(sigma2);
    }
    return obs;
  };
}

DigitalResult run_digital_chain(std::span<const double> v, const DigitalChainConfig& cfg,
                                const SymbolChannel& channel, RngStream& rng,
                                const LdpcCode& code) {
  const DigitalTx tx = digital_transmit(v, cfg, code);
  const SymbolObservation obs = channel(tx.symbols, rng);
  return digital_receive(obs, tx, cfg, code);
}

double channel_uses(double d_r_bytes, double cr, int order, double rate) {
  if (!(d_r_bytes > 0.0) || !(cr > 0.0) || order < 2 || !(rate > 0.0)) {
    throw InvalidArgument("channel_uses: arguments must be positive");
  }
  return d_r_bytes * cr * 8.0 / (std::log2(static_cast<double>(order)) * rate);
}

double analog_channel_uses(double d_r_bytes, double cr) {
  if (!(d_r_bytes > 0.0) || !(cr > 0.0)) {
    throw InvalidArgument("analog_channel_uses: arguments must be positive");
  }
  return d_r_bytes * cr;
}

double parity_compression_rate(double cr_analog, int order, double rate) {
  if (!(cr_analog > 0.0) || order < 2 || !(rate > 0.0)) {
    throw InvalidArgument("parity_compression_rate: arguments must be positive");
  }
  return cr_analog * std::log2(static_cast<double>(order)) * rate / 8.0;
}

}  // namespace semlink
