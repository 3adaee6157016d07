// SPDX-License-Identifier: Apache-2.0
//
// Separate source/channel coding baseline: 8-bit quantization, LDPC and
// Gray QAM, plus channel-use accounting against the analog chain.

#ifndef SEMLINK_DIGITAL_CHAIN_HPP
#define SEMLINK_DIGITAL_CHAIN_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "semlink/complex_grid.hpp"
#include "semlink/ldpc.hpp"
#include "semlink/quantizer.hpp"
#include "semlink/rng.hpp"

namespace semlink {

struct DigitalChainConfig {
  int quant_bits = 8;
  int modulation_order = 16;
  double code_rate = 0.5;
  std::size_t code_length = 1024;
  int max_iters = 50;

  /// Throws InvalidArgument unless this describes the shipped chain
  /// (8-bit, rate 1/2, length 1024, square QAM).
  void validate() const;
};

/// Transmitter output. Message bits are split into LDPC blocks with the
/// last block zero padded; coded bits map to symbols sequentially.
struct DigitalTx {
  std::vector<cplx> symbols;
  std::vector<std::uint8_t> payload_bits;  // before padding
  QuantizerParams params;
  std::size_t values = 0;
  std::size_t codewords = 0;
};

/// Equalized symbols with the per-symbol noise variance seen by the demapper.
struct SymbolObservation {
  std::vector<cplx> symbols;
  std::vector<double> noise_variance;
};

using SymbolChannel =
    std::function<SymbolObservation(std::span<const cplx> symbols, RngStream& rng)>;

struct DigitalResult {
  std::vector<double> reconstructed;
  std::vector<std::uint8_t> decoded_bits;
  double ber = 0.0;  // payload bits after decoding
  std::size_t channel_symbols = 0;
  std::size_t codewords = 0;
  std::size_t failed_codewords = 0;
  QuantizerParams params;
};

DigitalTx digital_transmit(std::span<const double> v, const DigitalChainConfig& cfg,
                           const LdpcCode& code = LdpcCode::standard());

DigitalResult digital_receive(const SymbolObservation& obs, const DigitalTx& tx,
                              const DigitalChainConfig& cfg,
                              const LdpcCode& code = LdpcCode::standard());

/// Complex AWGN at unit signal power.
SymbolChannel awgn_symbol_channel(double snr_db);

DigitalResult run_digital_chain(std::span<const double> v, const DigitalChainConfig& cfg,
                                const SymbolChannel& channel, RngStream& rng,
                                const LdpcCode& code = LdpcCode::standard());

/// Channel uses of the digital chain for d_r bytes at compression rate cr:
/// d_r cr 8 / (log2(order) rate).
double channel_uses(double d_r_bytes, double cr, int order, double rate);

/// Channel uses of the analog reference: one per retained byte, d_r cr.
double analog_channel_uses(double d_r_bytes, double cr);

/// Digital compression rate giving the same channel uses as the analog
/// chain at cr_analog: cr_analog log2(order) rate / 8.
double parity_compression_rate(double cr_analog, int order, double rate);

}  // namespace semlink

#endif  // SEMLINK_DIGITAL_CHAIN_HPP
