// SPDX-License-Identifier: Apache-2.0
//
// OFDM slot framing with block-type pilots, power normalization,
// unitary (I)FFT with cyclic prefix, and transmission through a
// tapped-delay-line realization.

#ifndef SEMLINK_OFDM_HPP
#define SEMLINK_OFDM_HPP

#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <string_view>
#include <vector>

#include "semlink/channel.hpp"
#include "semlink/complex_grid.hpp"
#include "semlink/rng.hpp"

namespace semlink {

struct OfdmConfig {
  std::size_t l_fft = 2048;
  std::size_t l_cp = 144;
  std::size_t n_p = 2;
  std::size_t n_s = 12;
  double delta_f = 15e3;
  double f_c = 3.5e9;
  double power = 1.0;

  std::size_t symbols() const noexcept { return n_p + n_s; }
  double sample_period() const noexcept { return 1.0 / (static_cast<double>(l_fft) * delta_f); }
  double symbol_duration() const noexcept {
    return static_cast<double>(l_fft + l_cp) * sample_period();
  }
  std::size_t capacity() const noexcept { return n_s * l_fft; }
  /// Start time of every symbol in the slot.
  std::vector<double> symbol_times(double t0 = 0.0) const;

  /// Throws InvalidArgument on zero sizes or nonpositive rates.
  void validate() const;
  /// Throws ConfigError if the cyclic prefix is shorter than the delay.
  void require_cp_covers(double max_delay_ns) const;
};

enum class PilotKind { BlockLeading, Kronecker, OnePilot };

std::string_view to_string(PilotKind k);
PilotKind parse_pilot_kind(std::string_view s);

/// Pilot symbol positions inside the slot.
struct PilotScheme {
  PilotKind kind = PilotKind::BlockLeading;
  std::vector<std::size_t> positions;

  /// BlockLeading: 0..n_p-1. Kronecker: {2, 11}. OnePilot: {0}.
  static PilotScheme make(PilotKind kind, std::size_t n_p = 2);
};

/// Slot configuration matching a scheme: the slot keeps
/// `total_symbols` symbols and the pilot count follows the scheme.
OfdmConfig config_for_scheme(const PilotScheme& scheme, OfdmConfig base = {},
                             std::size_t total_symbols = 14);

struct OfdmFrame {
  ComplexGrid pilots;  // n_p x l_fft
  ComplexGrid data;    // n_s x l_fft
  std::vector<std::size_t> pilot_positions;
  std::size_t payload_len = 0;

  std::size_t symbols() const noexcept { return pilots.rows() + data.rows(); }
  /// Throws InvalidArgument if positions or shapes are inconsistent.
  void validate() const;
  /// All symbols in slot order.
  ComplexGrid slot_grid() const;
  /// Inverse of slot_grid.
  static OfdmFrame from_slot(const ComplexGrid& slot, std::vector<std::size_t> pilot_positions,
                             std::size_t payload_len);
  /// Slot indices of the data symbols, ascending.
  std::vector<std::size_t> data_positions() const;
};

/// sqrt(L p) t / ||t||, so that the mean power is exactly p.
CVec normalize_power(std::span<const cplx> t, double p);

/// sqrt(L p) / ||t||, the gain applied by normalize_power.
double normalization_gain(std::span<const cplx> t, double p);

/// Row-major fill of an n_s x l_fft grid, zero-padded.
ComplexGrid map_to_grid(std::span<const cplx> t_n, const OfdmConfig& cfg);
/// First `payload_len` entries of the grid in row-major order.
CVec unmap_from_grid(const ComplexGrid& grid, std::size_t payload_len);

/// Unit-power 4-QAM symbols from random bits, deterministic in `seed`.
ComplexGrid generate_pilots(std::uint64_t seed, const OfdmConfig& cfg);

OfdmFrame make_frame(std::span<const cplx> payload, const ComplexGrid& pilots,
                     const PilotScheme& scheme, const OfdmConfig& cfg);

/// (n_p + n_s) x (l_fft + l_cp) time samples, slot order.
ComplexGrid ofdm_modulate(const OfdmFrame& frame, const OfdmConfig& cfg);
/// Removes the cyclic prefix and applies the unitary FFT.
OfdmFrame ofdm_demodulate(const ComplexGrid& samples, const OfdmConfig& cfg,
                          std::vector<std::size_t> pilot_positions, std::size_t payload_len);

/// Received frame under T'[i,k] = H[i,k] T[i,k] + Z, with H from the
/// realization (one gain set per symbol) and Z ~ CN(0, P 10^(-snr/10)).
OfdmFrame pass_through_channel(const OfdmFrame& frame, const ChannelRealization& real,
                               double snr_db, const OfdmConfig& cfg, RngStream& rng);

/// Same as pass_through_channel but with an already evaluated H grid.
OfdmFrame pass_through_channel(const OfdmFrame& frame, const ComplexGrid& h, double snr_db,
                               const OfdmConfig& cfg, RngStream& rng);

/// Validation path: IFFT + CP, tapped-delay-line convolution in the time
/// domain with delays rounded to whole samples, CP removal and FFT. Matches
/// pass_through_channel when the realization's delays sit on the sample
/// grid and gains are constant over each symbol.
OfdmFrame pass_through_channel_time_domain(const OfdmFrame& frame,
                                           const ChannelRealization& real, double snr_db,
                                           const OfdmConfig& cfg, RngStream& rng);

void write_frame(std::ostream& os, const OfdmFrame& frame);
OfdmFrame read_frame(std::istream& is);

}  // namespace semlink

#endif  // SEMLINK_OFDM_HPP
