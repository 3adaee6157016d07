// SPDX-License-Identifier: Apache-2.0

#include "semlink/ofdm.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <string>

#include "semlink/container.hpp"
#include "semlink/errors.hpp"
#include "semlink/fft.hpp"

namespace semlink {

std::vector<double> OfdmConfig::symbol_times(double t0) const {
  std::vector<double> t(symbols());
  for (std::size_t i = 0; i < t.size(); ++i) {
    t[i] = t0 + static_cast<double>(i) * symbol_duration();
  }
  return t;
}

void OfdmConfig::validate() const {
  if (l_fft == 0 || n_s == 0 || n_p == 0) {
    throw InvalidArgument("OfdmConfig: l_fft, n_p and n_s must be positive");
  }
  if (l_cp >= l_fft) throw InvalidArgument("OfdmConfig: cyclic prefix must be shorter than l_fft");
  if (!(delta_f > 0.0) || !(f_c > 0.0) || !(power > 0.0)) {
    throw InvalidArgument("OfdmConfig: delta_f, f_c and power must be positive");
  }
}

void OfdmConfig::require_cp_covers(double max_delay_ns) const {
  const double needed = std::ceil(max_delay_ns * 1e-9 / sample_period() - 1e-9);
  if (static_cast<double>(l_cp) < needed) {
    throw ConfigError("cyclic prefix of " + std::to_string(l_cp) +
                      " samples is shorter than the channel delay (" +
                      std::to_string(static_cast<long long>(needed)) + " samples)");
  }
}

std::string_view to_string(PilotKind k) {
  switch (k) {
    case PilotKind::BlockLeading: return "block";
    case PilotKind::Kronecker: return "kronecker";
    case PilotKind::OnePilot: return "one_pilot";
  }
  return "?";
}

PilotKind parse_pilot_kind(std::string_view s) {
  if (s == "block") return PilotKind::BlockLeading;
  if (s == "kronecker") return PilotKind::Kronecker;
  if (s == "one_pilot") return PilotKind::OnePilot;
  throw InvalidArgument("unknown pilot scheme: " + std::string(s));
}

PilotScheme PilotScheme::make(PilotKind kind, std::size_t n_p) {
  PilotScheme s{kind, {}};
  switch (kind) {
    case PilotKind::BlockLeading:
      if (n_p == 0) throw InvalidArgument("PilotScheme: need at least one pilot");
      for (std::size_t i = 0; i < n_p; ++i) s.positions.push_back(i);
      break;
    case PilotKind::Kronecker:
      // third and twelfth symbols of the slot
      s.positions = {2, 11};
      break;
    case PilotKind::OnePilot:
      s.positions = {0};
      break;
  }
  return s;
}

OfdmConfig config_for_scheme(const PilotScheme& scheme, OfdmConfig base,
                             std::size_t total_symbols) {
  if (scheme.positions.empty() || scheme.positions.size() >= total_symbols) {
    throw ConfigError("pilot scheme does not fit the slot");
  }
  for (auto p : scheme.positions) {
    if (p >= total_symbols) throw ConfigError("pilot position outside the slot");
  }
  base.n_p = scheme.positions.size();
  base.n_s = total_symbols - base.n_p;
  return base;
}

void OfdmFrame::validate() const {
  const std::size_t total = symbols();
  if (pilot_positions.size() != pilots.rows()) {
    throw InvalidArgument("OfdmFrame: pilot position count differs from pilot rows");
  }
  if (pilots.cols() != data.cols()) throw InvalidArgument("OfdmFrame: grid widths differ");
  std::vector<std::size_t> sorted = pilot_positions;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw InvalidArgument("OfdmFrame: duplicate pilot positions");
  }
  if (!sorted.empty() && sorted.back() >= total) {
    throw InvalidArgument("OfdmFrame: pilot position outside the slot");
  }
  if (payload_len > data.size()) throw InvalidArgument("OfdmFrame: payload exceeds data grid");
}

std::vector<std::size_t> OfdmFrame::data_positions() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < symbols(); ++i) {
    if (std::find(pilot_positions.begin(), pilot_positions.end(), i) == pilot_positions.end()) {
      out.push_back(i);
    }
  }
  return out;
}

ComplexGrid OfdmFrame::slot_grid() const {
  validate();
  ComplexGrid slot(symbols(), data.cols());
  for (std::size_t j = 0; j < pilot_positions.size(); ++j) {
    std::copy(pilots.row(j).begin(), pilots.row(j).end(), slot.row(pilot_positions[j]).begin());
  }
  const auto dpos = data_positions();
  for (std::size_t j = 0; j < dpos.size(); ++j) {
    std::copy(data.row(j).begin(), data.row(j).end(), slot.row(dpos[j]).begin());
  }
  return slot;
}

OfdmFrame OfdmFrame::from_slot(const ComplexGrid& slot, std::vector<std::size_t> pilot_positions,
                               std::size_t payload_len) {
  OfdmFrame f;
  const std::size_t n_p = pilot_positions.size();
  if (n_p > slot.rows()) throw InvalidArgument("from_slot: more pilots than symbols");
  f.pilots = ComplexGrid(n_p, slot.cols());
  f.data = ComplexGrid(slot.rows() - n_p, slot.cols());
  f.pilot_positions = std::move(pilot_positions);
  f.payload_len = payload_len;
  f.validate();
  for (std::size_t j = 0; j < n_p; ++j) {
    const auto src = slot.row(f.pilot_positions[j]);
    std::copy(src.begin(), src.end(), f.pilots.row(j).begin());
  }
  const auto dpos = f.data_positions();
  for (std::size_t j = 0; j < dpos.size(); ++j) {
    const auto src = slot.row(dpos[j]);
    std::copy(src.begin(), src.end(), f.data.row(j).begin());
  }
  return f;
}

double normalization_gain(std::span<const cplx> t, double p) {
  if (!(p > 0.0)) throw InvalidArgument("normalize_power: power must be positive");
  double energy = 0.0;
  for (const cplx& z : t) energy += std::norm(z);
  if (!(energy > 0.0)) throw InvalidArgument("normalize_power: zero-norm input");
  return std::sqrt(static_cast<double>(t.size()) * p / energy);
}

CVec normalize_power(std::span<const cplx> t, double p) {
  const double g = normalization_gain(t, p);
  CVec out(t.begin(), t.end());
  for (auto& z : out) z *= g;
  return out;
}

ComplexGrid map_to_grid(std::span<const cplx> t_n, const OfdmConfig& cfg) {
  if (t_n.empty()) throw InvalidArgument("map_to_grid: empty payload");
  if (t_n.size() > cfg.capacity()) {
    throw CapacityError("map_to_grid: payload of " + std::to_string(t_n.size()) +
                        " symbols exceeds slot capacity " + std::to_string(cfg.capacity()));
  }
  ComplexGrid g(cfg.n_s, cfg.l_fft);
  std::copy(t_n.begin(), t_n.end(), g.data().begin());
  return g;
}

CVec unmap_from_grid(const ComplexGrid& grid, std::size_t payload_len) {
  if (payload_len > grid.size()) throw InvalidArgument("unmap_from_grid: payload too long");
  return CVec(grid.data().begin(),
              grid.data().begin() + static_cast<std::ptrdiff_t>(payload_len));
}

ComplexGrid generate_pilots(std::uint64_t seed, const OfdmConfig& cfg) {
  RngStream rng(seed);
  const double a = 1.0 / std::numbers::sqrt2;
  ComplexGrid g(cfg.n_p, cfg.l_fft);
  std::uint64_t word = 0;
  int left = 0;
  for (auto& z : g.data()) {
    if (left < 2) {
      word = rng();
      left = 64;
    }
    const double re = (word & 1U) ? -a : a;
    const double im = (word & 2U) ? -a : a;
    word >>= 2;
    left -= 2;
    z = {re, im};
  }
  return g;
}

OfdmFrame make_frame(std::span<const cplx> payload, const ComplexGrid& pilots,
                     const PilotScheme& scheme, const OfdmConfig& cfg) {
  if (pilots.rows() != scheme.positions.size() || pilots.cols() != cfg.l_fft) {
    throw InvalidArgument("make_frame: pilot grid does not match scheme");
  }
  OfdmFrame f;
  f.pilots = pilots;
  f.data = map_to_grid(payload, cfg);
  f.pilot_positions = scheme.positions;
  f.payload_len = payload.size();
  f.validate();
  return f;
}

ComplexGrid ofdm_modulate(const OfdmFrame& frame, const OfdmConfig& cfg) {
  const ComplexGrid slot = frame.slot_grid();
  if (slot.cols() != cfg.l_fft) throw InvalidArgument("ofdm_modulate: grid width != l_fft");
  const std::size_t len = cfg.l_fft + cfg.l_cp;
  ComplexGrid out(slot.rows(), len);
  CVec buf(cfg.l_fft);
  for (std::size_t i = 0; i < slot.rows(); ++i) {
    std::copy(slot.row(i).begin(), slot.row(i).end(), buf.begin());
    ifft_unitary(buf);
    auto dst = out.row(i);
    std::copy(buf.end() - static_cast<std::ptrdiff_t>(cfg.l_cp), buf.end(), dst.begin());
    std::copy(buf.begin(), buf.end(), dst.begin() + static_cast<std::ptrdiff_t>(cfg.l_cp));
  }
  return out;
}

OfdmFrame ofdm_demodulate(const ComplexGrid& samples, const OfdmConfig& cfg,
                          std::vector<std::size_t> pilot_positions, std::size_t payload_len) {
  if (samples.cols() != cfg.l_fft + cfg.l_cp) {
    throw InvalidArgument("ofdm_demodulate: wrong symbol length");
  }
  ComplexGrid slot(samples.rows(), cfg.l_fft);
  for (std::size_t i = 0; i < samples.rows(); ++i) {
    auto src = samples.row(i).subspan(cfg.l_cp);
    auto dst = slot.row(i);
    std::copy(src.begin(), src.end(), dst.begin());
    fft_unitary(dst);
  }
  return OfdmFrame::from_slot(slot, std::move(pilot_positions), payload_len);
}

OfdmFrame pass_through_channel(const OfdmFrame& frame, const ComplexGrid& h, double snr_db,
                               const OfdmConfig& cfg, RngStream& rng) {
  ComplexGrid slot = frame.slot_grid();
  if (!slot.same_shape(h)) throw InvalidArgument("pass_through_channel: H grid shape mismatch");
  const double sigma2 = noise_variance(snr_db, cfg.power);
  for (std::size_t n = 0; n < slot.size(); ++n) {
    slot.data()[n] *= h.data()[n];
    if (sigma2 > 0.0) slot.data()[n] += rng.complex_normal(sigma2);
  }
  return OfdmFrame::from_slot(slot, frame.pilot_positions, frame.payload_len);
}

OfdmFrame pass_through_channel(const OfdmFrame& frame, const ChannelRealization& real,
                               double snr_db, const OfdmConfig& cfg, RngStream& rng) {
  cfg.require_cp_covers(real.max_delay_ns());
  if (real.symbols() != frame.symbols()) {
    throw InvalidArgument("pass_through_channel: realization covers a different symbol count");
  }
  return pass_through_channel(frame, frequency_response_grid(real, cfg.delta_f, cfg.l_fft),
                              snr_db, cfg, rng);
}

OfdmFrame pass_through_channel_time_domain(const OfdmFrame& frame,
                                           const ChannelRealization& real, double snr_db,
                                           const OfdmConfig& cfg, RngStream& rng) {
  cfg.require_cp_covers(real.max_delay_ns());
  if (real.symbols() != frame.symbols()) {
    throw InvalidArgument("pass_through_channel: realization covers a different symbol count");
  }
  const ComplexGrid tx = ofdm_modulate(frame, cfg);
  const std::size_t len = tx.cols();
  const double ts_ns = cfg.sample_period() * 1e9;
  std::vector<std::size_t> lag(real.taps());
  for (std::size_t m = 0; m < real.taps(); ++m) {
    lag[m] = static_cast<std::size_t>(std::llround(real.tap_delays_ns[m] / ts_ns));
  }

  const double sigma2 = noise_variance(snr_db, cfg.power);
  ComplexGrid rx(tx.rows(), len);
  const CVec& stream = tx.data();  // symbols back to back
  for (std::size_t i = 0; i < tx.rows(); ++i) {
    const std::size_t start = i * len;
    for (std::size_t n = 0; n < len; ++n) {
      cplx acc{0.0, 0.0};
      for (std::size_t m = 0; m < real.taps(); ++m) {
        if (start + n >= lag[m]) acc += real.gains(i, m) * stream[start + n - lag[m]];
      }
      if (sigma2 > 0.0) acc += rng.complex_normal(sigma2);
      rx(i, n) = acc;
    }
  }
  return ofdm_demodulate(rx, cfg, frame.pilot_positions, frame.payload_len);
}

void write_frame(std::ostream& os, const OfdmFrame& frame) {
  frame.validate();
  namespace ct = container;
  ct::write_header(os, {ct::kOfdmFrame, ct::kVersion,
                        {static_cast<std::uint32_t>(frame.symbols()),
                         static_cast<std::uint32_t>(frame.data.cols()),
                         static_cast<std::uint32_t>(frame.pilot_positions.size())}});
  for (auto p : frame.pilot_positions) ct::write_u32(os, static_cast<std::uint32_t>(p));
  ct::write_u32(os, static_cast<std::uint32_t>(frame.payload_len));
  ct::write_complex(os, frame.slot_grid().data());
}

OfdmFrame read_frame(std::istream& is) {
  namespace ct = container;
  const ct::Header h = ct::read_header(is, ct::kOfdmFrame);
  std::vector<std::size_t> positions(h.dims[2]);
  for (auto& p : positions) p = ct::read_u32(is);
  const std::size_t payload = ct::read_u32(is);
  const std::size_t n = std::size_t{h.dims[0]} * h.dims[1];
  ComplexGrid slot(h.dims[0], h.dims[1], ct::read_complex(is, n));
  return OfdmFrame::from_slot(slot, std::move(positions), payload);
}

}  // namespace semlink
