// SPDX-License-Identifier: Apache-2.0
//
// Flat AWGN / Rayleigh block channels and time-varying tapped-delay-line
// channels with sum-of-sinusoids Jakes fading.

#ifndef SEMLINK_CHANNEL_HPP
#define SEMLINK_CHANNEL_HPP

#include <array>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "semlink/complex_grid.hpp"
#include "semlink/rng.hpp"

namespace semlink {

inline constexpr double kSpeedOfLight = 299'792'458.0;

/// Noise variance for a given SNR (dB) and average signal power. +inf dB
/// gives zero.
double noise_variance(double snr_db, double signal_power);

enum class FlatChannelKind { Awgn, Rayleigh };

struct FlatChannelSpec {
  FlatChannelKind kind = FlatChannelKind::Awgn;
  double snr_db = 0.0;
  double hc = 1.0;  // E|h|^2, Rayleigh only
};

struct FlatChannelOutput {
  CVec y;
  cplx h{1.0, 0.0};
  double noise_variance = 0.0;
};

/// y = h x + n with one h per block (h = 1 for AWGN). The noise variance
/// follows from snr_db and the mean power of x. The receiver is assumed
/// to know h.
FlatChannelOutput transmit_flat(std::span<const cplx> x, const FlatChannelSpec& spec,
                                RngStream& rng);

// ------------------------------------------------------------------ TDL

enum class TdlModel { A, B, C, D, E };

inline constexpr std::array<TdlModel, 5> kAllTdlModels{TdlModel::A, TdlModel::B, TdlModel::C,
                                                       TdlModel::D, TdlModel::E};

std::string_view to_string(TdlModel m);
/// Accepts "TDL-A", "tdl-a", "A", ...; throws InvalidArgument otherwise.
TdlModel parse_tdl_model(std::string_view name);

/// Power-delay profile with unit total energy. For LOS profiles the
/// first tap carries both the specular and the diffuse power, and
/// `k_factor_db` is their ratio.
struct TdlProfile {
  TdlModel model = TdlModel::A;
  std::vector<double> normalized_delays;  // ascending, first is 0
  std::vector<double> powers_db;          // normalized
  bool los = false;
  double k_factor_db = 0.0;

  std::size_t taps() const noexcept { return normalized_delays.size(); }
  std::vector<double> linear_powers() const;
};

const TdlProfile& tdl_profile(TdlModel model);

/// Named delay spreads, in ns.
struct DelaySpreadPreset {
  std::string_view name;
  double ds_ns;
};
inline constexpr std::array<DelaySpreadPreset, 5> kDelaySpreadPresets{{
    {"Very short delay spread", 10.0},
    {"Short delay spread", 30.0},
    {"Nominal delay spread", 100.0},
    {"Long delay spread", 300.0},
    {"Very long delay spread", 1000.0},
}};

/// Absolute tap delays in ns: normalized delay times the desired RMS
/// delay spread.
std::vector<double> scale_delays(const TdlProfile& profile, double ds_desired_ns);

/// Plain-text dump of every shipped profile: one row per tap with
/// model, tap index, normalized delay, power (dB) and K-factor (dB, or
/// "-" for Rayleigh taps).
void write_profile_table(std::ostream& os);

struct DopplerSpec {
  double max_doppler_hz = 0.0;
  double los_doppler_hz = 0.0;
  int num_sinusoids = 32;

  /// f_D = v f_c / c and the LOS peak at 0.7 f_D.
  static DopplerSpec from_speed(double speed_mps, double carrier_hz, int num_sinusoids = 32);
};

/// Tap gains sampled at the start of each OFDM symbol.
struct ChannelRealization {
  std::vector<double> tap_delays_ns;
  ComplexGrid gains;  // symbols x taps
  std::vector<double> sample_times;

  std::size_t symbols() const noexcept { return gains.rows(); }
  std::size_t taps() const noexcept { return gains.cols(); }
  double max_delay_ns() const;
};

/// Sum-of-sinusoids gains. Each diffuse tap is the normalized sum of
/// `num_sinusoids` unit phasors with Doppler f_D cos(alpha_n) and random
/// phase; a LOS first tap adds a specular phasor at f_S whose power sets
/// the Ricean K-factor.
ChannelRealization generate_tap_gains(const TdlProfile& profile, double ds_desired_ns,
                                      const DopplerSpec& doppler,
                                      std::span<const double> sample_times, RngStream& rng);

/// Gains from explicit delays and powers (linear) with Rayleigh taps.
ChannelRealization generate_tap_gains(std::span<const double> delays_ns,
                                      std::span<const double> linear_powers,
                                      const DopplerSpec& doppler,
                                      std::span<const double> sample_times, RngStream& rng);

/// h_{i,k} = sum_m a_m(i) exp(-j 2 pi k delta_f tau_m).
cplx frequency_response(const ChannelRealization& real, double delta_f, std::size_t k,
                        std::size_t i);

/// Frequency response for every symbol and subcarrier 0..l_fft-1.
ComplexGrid frequency_response_grid(const ChannelRealization& real, double delta_f,
                                    std::size_t l_fft);

/// Copy with delays rounded to the nearest multiple of `sample_period_s`.
ChannelRealization quantize_delays(const ChannelRealization& real, double sample_period_s);

}  // namespace semlink

#endif  // SEMLINK_CHANNEL_HPP
