// SPDX-License-Identifier: Apache-2.0

#include "semlink/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "semlink/errors.hpp"

namespace semlink {

double noise_variance(double snr_db, double signal_power) {
  if (std::isinf(snr_db) && snr_db > 0) return 0.0;
  return signal_power / std::pow(10.0, snr_db / 10.0);
}

FlatChannelOutput transmit_flat(std::span<const cplx> x, const FlatChannelSpec& spec,
                                RngStream& rng) {
  if (x.empty()) throw InvalidArgument("transmit_flat: empty input");
  if (spec.kind == FlatChannelKind::Rayleigh && !(spec.hc > 0.0)) {
    throw InvalidArgument("transmit_flat: Rayleigh variance must be positive");
  }
  double power = 0.0;
  for (const cplx& v : x) power += std::norm(v);
  power /= static_cast<double>(x.size());

  FlatChannelOutput out;
  out.noise_variance = noise_variance(spec.snr_db, power);
  if (spec.kind == FlatChannelKind::Rayleigh) out.h = rng.complex_normal(spec.hc);

  out.y.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    out.y[i] = out.h * x[i];
    if (out.noise_variance > 0.0) out.y[i] += rng.complex_normal(out.noise_variance);
  }
  return out;
}

std::vector<double> scale_delays(const TdlProfile& profile, double ds_desired_ns) {
  if (!(ds_desired_ns > 0.0) || !std::isfinite(ds_desired_ns)) {
    throw InvalidArgument("scale_delays: delay spread must be positive");
  }
  std::vector<double> out;
  out.reserve(profile.taps());
  for (double d : profile.normalized_delays) out.push_back(d * ds_desired_ns);
  return out;
}

DopplerSpec DopplerSpec::from_speed(double speed_mps, double carrier_hz, int num_sinusoids) {
  if (speed_mps < 0.0 || carrier_hz <= 0.0) {
    throw InvalidArgument("DopplerSpec: speed must be >= 0 and carrier > 0");
  }
  DopplerSpec d;
  d.max_doppler_hz = speed_mps * carrier_hz / kSpeedOfLight;
  d.los_doppler_hz = 0.7 * d.max_doppler_hz;
  d.num_sinusoids = num_sinusoids;
  return d;
}

double ChannelRealization::max_delay_ns() const {
  return tap_delays_ns.empty() ? 0.0
                               : *std::max_element(tap_delays_ns.begin(), tap_delays_ns.end());
}

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_times(std::span<const double> t) {
  if (t.empty()) throw InvalidArgument("generate_tap_gains: no sample times");
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (t[i] < t[i - 1]) throw InvalidArgument("generate_tap_gains: times must ascend");
  }
}

// Adds a sum-of-sinusoids Rayleigh process of the given power to one tap column.
void add_diffuse(ComplexGrid& gains, std::size_t tap, double power, const DopplerSpec& d,
                 std::span<const double> times, RngStream& rng) {
  const int n = d.num_sinusoids;
  const double amp = std::sqrt(power / n);
  std::vector<double> freq(static_cast<std::size_t>(n));
  std::vector<double> phase(static_cast<std::size_t>(n));
  for (int s = 0; s < n; ++s) {
    freq[s] = d.max_doppler_hz * std::cos(kTwoPi * rng.uniform());
    phase[s] = kTwoPi * rng.uniform();
  }
  for (std::size_t i = 0; i < times.size(); ++i) {
    cplx acc{0.0, 0.0};
    for (int s = 0; s < n; ++s) acc += std::polar(1.0, kTwoPi * freq[s] * times[i] + phase[s]);
    gains(i, tap) += amp * acc;
  }
}

}  // namespace

ChannelRealization generate_tap_gains(std::span<const double> delays_ns,
                                      std::span<const double> linear_powers,
                                      const DopplerSpec& doppler,
                                      std::span<const double> sample_times, RngStream& rng) {
  if (delays_ns.size() != linear_powers.size() || delays_ns.empty()) {
    throw InvalidArgument("generate_tap_gains: delays and powers must be nonempty and aligned");
  }
  if (doppler.num_sinusoids < 1 || doppler.max_doppler_hz < 0.0) {
    throw InvalidArgument("generate_tap_gains: invalid Doppler spec");
  }
  check_times(sample_times);
  ChannelRealization r;
  r.tap_delays_ns.assign(delays_ns.begin(), delays_ns.end());
  r.sample_times.assign(sample_times.begin(), sample_times.end());
  r.gains = ComplexGrid(sample_times.size(), delays_ns.size());
  for (std::size_t m = 0; m < delays_ns.size(); ++m) {
    add_diffuse(r.gains, m, linear_powers[m], doppler, sample_times, rng);
  }
  return r;
}

ChannelRealization generate_tap_gains(const TdlProfile& profile, double ds_desired_ns,
                                      const DopplerSpec& doppler,
                                      std::span<const double> sample_times, RngStream& rng) {
  if (doppler.num_sinusoids < 1 || doppler.max_doppler_hz < 0.0) {
    throw InvalidArgument("generate_tap_gains: invalid Doppler spec");
  }
  check_times(sample_times);
  const std::vector<double> powers = profile.linear_powers();

  ChannelRealization r;
  r.tap_delays_ns = scale_delays(profile, ds_desired_ns);
  r.sample_times.assign(sample_times.begin(), sample_times.end());
  r.gains = ComplexGrid(sample_times.size(), profile.taps());

  for (std::size_t m = 0; m < profile.taps(); ++m) {
    double diffuse = powers[m];
    if (profile.los && m == 0) {
      const double k = std::pow(10.0, profile.k_factor_db / 10.0);
      diffuse = powers[m] / (k + 1.0);
      const double specular_amp = std::sqrt(powers[m] * k / (k + 1.0));
      const double phase0 = kTwoPi * rng.uniform();
      for (std::size_t i = 0; i < sample_times.size(); ++i) {
        r.gains(i, 0) +=
            std::polar(specular_amp, kTwoPi * doppler.los_doppler_hz * sample_times[i] + phase0);
      }
    }
    add_diffuse(r.gains, m, diffuse, doppler, sample_times, rng);
  }
  return r;
}

cplx frequency_response(const ChannelRealization& real, double delta_f, std::size_t k,
                        std::size_t i) {
  if (i >= real.symbols()) throw InvalidArgument("frequency_response: symbol index out of range");
  cplx h{0.0, 0.0};
  const double kd = static_cast<double>(k);
  for (std::size_t m = 0; m < real.taps(); ++m) {
    const double tau = real.tap_delays_ns[m] * 1e-9;
    h += real.gains(i, m) * std::polar(1.0, -kTwoPi * kd * delta_f * tau);
  }
  return h;
}

ComplexGrid frequency_response_grid(const ChannelRealization& real, double delta_f,
                                    std::size_t l_fft) {
  const std::size_t taps = real.taps();
  // phasor table shared by all symbols
  ComplexGrid phasor(taps, l_fft);
  for (std::size_t m = 0; m < taps; ++m) {
    const double tau = real.tap_delays_ns[m] * 1e-9;
    for (std::size_t k = 0; k < l_fft; ++k) {
      phasor(m, k) = std::polar(1.0, -kTwoPi * static_cast<double>(k) * delta_f * tau);
    }
  }
  ComplexGrid h(real.symbols(), l_fft);
  for (std::size_t i = 0; i < real.symbols(); ++i) {
    auto out = h.row(i);
    for (std::size_t m = 0; m < taps; ++m) {
      const cplx a = real.gains(i, m);
      auto p = phasor.row(m);
      for (std::size_t k = 0; k < l_fft; ++k) out[k] += a * p[k];
    }
  }
  return h;
}

ChannelRealization quantize_delays(const ChannelRealization& real, double sample_period_s) {
  if (!(sample_period_s > 0.0)) throw InvalidArgument("quantize_delays: bad sample period");
  ChannelRealization out = real;
  const double ts_ns = sample_period_s * 1e9;
  for (double& d : out.tap_delays_ns) d = std::round(d / ts_ns) * ts_ns;
  return out;
}

}  // namespace semlink
