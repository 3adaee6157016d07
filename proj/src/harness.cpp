// SPDX-License-Identifier: Apache-2.0

#include "semlink/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "semlink/channel.hpp"
#include "semlink/digital_chain.hpp"
#include "semlink/errors.hpp"

namespace semlink {

FeatureTensor generate_synthetic_feature(const CorpusSpec& spec, RngStream& rng) {
  const std::size_t cells = spec.height * spec.width;
  std::vector<double> values(spec.channels * cells, 0.0);
  std::vector<double> profile(cells);
  const double inv2s2 = 1.0 / (2.0 * spec.blob_sigma * spec.blob_sigma);
  for (std::size_t b = 0; b < spec.blobs; ++b) {
    const double r0 = rng.uniform() * static_cast<double>(spec.height);
    const double c0 = rng.uniform() * static_cast<double>(spec.width);
    for (std::size_t r = 0; r < spec.height; ++r) {
      for (std::size_t c = 0; c < spec.width; ++c) {
        const double dr = static_cast<double>(r) - r0;
        const double dc = static_cast<double>(c) - c0;
        profile[r * spec.width + c] = std::exp(-(dr * dr + dc * dc) * inv2s2);
      }
    }
    for (std::size_t ch = 0; ch < spec.channels; ++ch) {
      const double amp = rng.normal();
      double* dst = values.data() + ch * cells;
      for (std::size_t i = 0; i < cells; ++i) dst[i] += amp * profile[i];
    }
  }
  return FeatureTensor(spec.channels, spec.height, spec.width, std::move(values));
}

std::vector<FeatureTensor> generate_synthetic_corpus(const CorpusSpec& spec, std::size_t count,
                                                     RngStream& rng) {
  std::vector<FeatureTensor> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(generate_synthetic_feature(spec, rng));
  return out;
}

namespace {

constexpr auto tag(Stage s) { return static_cast<std::uint64_t>(s); }

double cell_rate(std::size_t cells, const CorpusSpec& spec) {
  return static_cast<double>(cells) / static_cast<double>(spec.height * spec.width);
}

SparseFeature sparsify(const FeatureTensor& f, double cr) {
  const ImportanceMap map = generate_importance_map(f, cr);
  return pack(apply_mask(f, map), map);
}

/// Receiver view of the transmitted symbols after equalization.
struct LinkOutput {
  CVec equalized;                    // MMSE equalizer output
  std::vector<double> unbiased_var;  // noise variance of equalized / bias
  CVec unbiased;
  bool has_estimation_mse = false;
  double estimation_mse = 0.0;
};

void unbias(LinkOutput& out, std::span<const cplx> h, double sigma2) {
  out.unbiased.resize(out.equalized.size());
  out.unbiased_var.resize(out.equalized.size());
  for (std::size_t i = 0; i < out.equalized.size(); ++i) {
    const double g = std::norm(h[i]);
    if (g > 0.0) {
      out.unbiased[i] = out.equalized[i] * ((g + sigma2) / g);
      out.unbiased_var[i] = sigma2 / g;
    } else {
      out.unbiased[i] = 0.0;
      out.unbiased_var[i] = std::numeric_limits<double>::infinity();
    }
  }
}

LinkOutput transmit_link(const ExperimentConfig& cfg, std::span<const cplx> t, double snr,
                         RngStream& chan_rng, RngStream& noise_rng, std::uint64_t pilot_seed) {
  LinkOutput out;
  if (!cfg.is_tdl()) {
    FlatChannelSpec spec;
    spec.kind = cfg.channel == "rayleigh" ? FlatChannelKind::Rayleigh : FlatChannelKind::Awgn;
    spec.snr_db = snr;
    spec.hc = cfg.rayleigh_hc;
    const FlatChannelOutput y = transmit_flat(t, spec, noise_rng);
    const double s2 = y.noise_variance;
    const double den = std::norm(y.h) + s2;
    out.equalized.resize(y.y.size());
    for (std::size_t i = 0; i < y.y.size(); ++i) {
      out.equalized[i] = den > 0.0 ? std::conj(y.h) * y.y[i] / den : cplx{0.0, 0.0};
    }
    const std::vector<cplx> h(t.size(), y.h);
    unbias(out, h, s2);
    return out;
  }

  const TdlModel model = parse_tdl_model(cfg.channel.substr(4));
  const PilotScheme scheme = PilotScheme::make(cfg.pilot_scheme, cfg.ofdm.n_p);
  const OfdmConfig oc = config_for_scheme(scheme, cfg.ofdm);
  const DopplerSpec doppler = DopplerSpec::from_speed(cfg.speed_mps, oc.f_c);
  const std::vector<double> times = oc.symbol_times();
  const ChannelRealization real =
      generate_tap_gains(tdl_profile(model), cfg.ds_desired_ns, doppler, times, chan_rng);
  oc.require_cp_covers(real.max_delay_ns());

  const ComplexGrid pilots = generate_pilots(pilot_seed, oc);
  const OfdmFrame frame = make_frame(t, pilots, scheme, oc);
  const ComplexGrid h = frequency_response_grid(real, oc.delta_f, oc.l_fft);
  const OfdmFrame rx = pass_through_channel(frame, h, snr, oc, noise_rng);
  const double sigma2 = noise_variance(snr, oc.power);

  CsiEstimate csi;
  if (cfg.estimation == EstimationMethod::Perfect) {
    csi.h = h;
    csi.pilot_positions = frame.pilot_positions;
  } else {
    csi = estimate_channel(rx, pilots, cfg.pilot_scheme, cfg.estimation,
                           std::pow(10.0, snr / 10.0));
  }
  out.has_estimation_mse = true;
  out.estimation_mse = estimation_mse(csi.h, h);

  const ComplexGrid hd = csi.rows_at(frame.data_positions());
  out.equalized = unmap_from_grid(equalize(rx.data, hd, sigma2), frame.payload_len);
  unbias(out, std::span<const cplx>(hd.data()).first(frame.payload_len), sigma2);
  return out;
}

double packed_mse(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += (a[i] - b[i]) * (a[i] - b[i]);
  return acc / static_cast<double>(a.size());
}

}  // namespace

SweepPlan::SweepPlan(ExperimentConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  hash_ = config_hash(cfg_);
  const CorpusSpec& cs = cfg_.corpus;
  const std::size_t plane = cs.height * cs.width;
  const std::size_t analog_cells = semlink::retained_cells(cfg_.cr, plane);
  // d_r in bytes: one byte per feature element
  const double d_r = static_cast<double>(cs.channels * plane);
  analog_uses_ = analog_channel_uses(d_r, cell_rate(analog_cells, cs));

  if (cfg_.chain == ChainKind::Analog) {
    cells_ = analog_cells;
    chain_uses_ = analog_uses_;
    if (cfg_.codec == "pairing") {
      codec_ = std::make_shared<PairingCodec>();
    } else {
      const std::size_t n = cells_ * cs.channels;
      LinearTrainOptions opt;
      opt.latent_dim = cfg_.latent_dim ? cfg_.latent_dim : (n / 2) & ~std::size_t{1};
      opt.snr_train_db = cfg_.train_snr_db;
      opt.epochs = cfg_.train_epochs;
      RngStream rng = RngStream(cfg_.master_seed).derive(tag(Stage::Training));
      const auto corpus = generate_synthetic_corpus(cs, cfg_.train_samples, rng);
      std::vector<std::vector<double>> packed;
      packed.reserve(corpus.size());
      for (const auto& f : corpus) packed.push_back(sparsify(f, cell_rate(cells_, cs)).packed);
      codec_ = std::make_shared<LinearCodec>(LinearCodec::train(
          packed, opt, awgn_training_channel(opt.snr_train_db), rng));
    }
    return;
  }

  if (!cfg_.parity) {
    cells_ = analog_cells;
  } else {
    const double cr_d = parity_compression_rate(cell_rate(analog_cells, cs),
                                                cfg_.modulation_order, 0.5);
    cells_ = static_cast<std::size_t>(std::llround(cr_d * static_cast<double>(plane)));
    if (cells_ == 0) {
      throw ConfigError("digital parity: no whole number of cells matches the analog channel uses");
    }
  }
  chain_uses_ = semlink::channel_uses(d_r, cell_rate(cells_, cs), cfg_.modulation_order, 0.5);
  if (cfg_.parity && std::abs(chain_uses_ - analog_uses_) > 1.0) {
    throw ConfigError("digital parity: closest feasible CR gives " + std::to_string(chain_uses_) +
                      " channel uses against " + std::to_string(analog_uses_) + " for the analog chain");
  }
}

std::vector<SweepRow> SweepPlan::run_trial(std::size_t snr_index, std::size_t trial) const {
  if (snr_index >= cfg_.snr_grid_db.size() || trial >= cfg_.trials) {
    throw InvalidArgument("run_trial: index out of range");
  }
  const double snr = cfg_.snr_grid_db[snr_index];
  const RngStream master(cfg_.master_seed);
  // the feature depends on the trial only, so every SNR point sees the same tensors
  RngStream feature_rng = master.derive({tag(Stage::Feature), trial});
  const RngStream link = master.derive({std::uint64_t{snr_index}, std::uint64_t{trial}});
  RngStream chan_rng = link.derive(tag(Stage::Channel));
  RngStream noise_rng = link.derive(tag(Stage::Noise));
  const std::uint64_t pilot_seed = link.derive(tag(Stage::Pilots))();

  const FeatureTensor f = generate_synthetic_feature(cfg_.corpus, feature_rng);
  const SparseFeature s = sparsify(f, cell_rate(cells_, cfg_.corpus));

  std::vector<SweepRow> rows;
  auto emit = [&](std::string metric, double value) {
    rows.push_back({snr, trial, std::move(metric), value, hash_});
  };

  if (cfg_.chain == ChainKind::Analog) {
    const CVec sym = codec_->encode(s.packed);
    const double g = normalization_gain(sym, cfg_.ofdm.power);
    CVec t(sym.size());
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = sym[i] * g;
    LinkOutput link_out = transmit_link(cfg_, t, snr, chan_rng, noise_rng, pilot_seed);
    // the decoder sees t + n, the model it was trained against; the gain
    // travels with the mask as side information
    for (auto& z : link_out.unbiased) z /= g;
    const std::vector<double> rec = codec_->decode(link_out.unbiased, s.packed.size());
    emit("reconstruction_mse", packed_mse(s.packed, rec));
    if (link_out.has_estimation_mse) emit("estimation_mse", link_out.estimation_mse);
    emit("channel_uses", chain_uses_);
    emit("channel_symbols", static_cast<double>(t.size()));
    return rows;
  }

  DigitalChainConfig dcfg;
  dcfg.modulation_order = cfg_.modulation_order;
  const DigitalTx tx = digital_transmit(s.packed, dcfg);
  const LinkOutput link_out = transmit_link(cfg_, tx.symbols, snr, chan_rng, noise_rng, pilot_seed);
  const DigitalResult res = digital_receive({link_out.unbiased, link_out.unbiased_var}, tx, dcfg);
  emit("reconstruction_mse", packed_mse(s.packed, res.reconstructed));
  if (link_out.has_estimation_mse) emit("estimation_mse", link_out.estimation_mse);
  emit("ber", res.ber);
  emit("channel_uses", chain_uses_);
  emit("channel_symbols", static_cast<double>(tx.symbols.size()));
  return rows;
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg, unsigned parallel) {
  const SweepPlan plan(cfg);
  const std::size_t trials = cfg.trials;
  const std::size_t tasks = cfg.snr_grid_db.size() * trials;
  std::vector<std::vector<SweepRow>> results(tasks);

  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(std::max(1U, parallel), tasks));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < tasks; i = next++) {
      try {
        results[i] = plan.run_trial(i / trials, i % trials);
      } catch (...) {
        const std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = tasks;
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<SweepRow> rows;
  for (auto& r : results) std::move(r.begin(), r.end(), std::back_inserter(rows));
  return rows;
}

}  // namespace semlink
