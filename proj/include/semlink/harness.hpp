// SPDX-License-Identifier: Apache-2.0
//
// Configuration-driven SNR sweeps over the full link: synthetic features,
// sparsification, analog or digital chain, flat or OFDM/TDL channel,
// channel estimation and equalization.

#ifndef SEMLINK_HARNESS_HPP
#define SEMLINK_HARNESS_HPP

#include <cstdint>
#include <istream>
#include <limits>
#include <memory>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "semlink/analog_codec.hpp"
#include "semlink/estimation.hpp"
#include "semlink/features.hpp"
#include "semlink/ofdm.hpp"
#include "semlink/rng.hpp"

namespace semlink {

// ---------------------------------------------------------------- corpus

struct CorpusSpec {
  std::size_t channels = 16;
  std::size_t height = 40;
  std::size_t width = 80;
  std::size_t blobs = 2;
  double blob_sigma = 1.0;  // in cells
};

/// Sum of isotropic Gaussian blobs with uniformly placed centers and
/// standard normal per-channel amplitudes.
FeatureTensor generate_synthetic_feature(const CorpusSpec& spec, RngStream& rng);
std::vector<FeatureTensor> generate_synthetic_corpus(const CorpusSpec& spec, std::size_t count,
                                                     RngStream& rng);

// ---------------------------------------------------------------- config

enum class ChainKind { Analog, Digital };

struct ExperimentConfig {
  ChainKind chain = ChainKind::Analog;

  std::string codec = "pairing";  // pairing | linear
  std::size_t latent_dim = 0;     // linear: real dimensions, 0 means half the input
  double train_snr_db = 10.0;
  int train_epochs = 50;
  std::size_t train_samples = 256;

  int modulation_order = 16;
  bool parity = true;

  std::string channel = "awgn";  // awgn | rayleigh | tdl-a .. tdl-e
  double rayleigh_hc = 1.0;
  double ds_desired_ns = 300.0;
  double speed_mps = 30.0;

  std::vector<double> snr_grid_db{0.0, 5.0, 10.0, 15.0, 20.0};
  double cr = 0.005;
  PilotKind pilot_scheme = PilotKind::BlockLeading;
  EstimationMethod estimation = EstimationMethod::Perfect;
  std::size_t trials = 10;
  std::uint64_t master_seed = 1;

  CorpusSpec corpus;
  OfdmConfig ofdm;  // n_p and n_s follow the pilot scheme

  /// Throws ConfigError on any inconsistency.
  void validate() const;
  bool is_tdl() const;
};

/// `key = value` lines, '#' starts a comment. Unknown or repeated keys,
/// malformed values and failed validation throw ConfigError.
ExperimentConfig parse_config(std::istream& is);
ExperimentConfig load_config(const std::string& path);

/// Every key with its value, sorted by key. Parsing the result gives
/// back an equal configuration.
std::string canonical_config(const ExperimentConfig& cfg);

/// FNV-1a 64 of the canonical form, as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

/// Key reference: name, default and meaning, one per line.
void write_config_reference(std::ostream& os);

// ---------------------------------------------------------------- sweep

struct SweepRow {
  double snr_db = 0.0;
  std::size_t trial = 0;
  std::string metric;
  double value = 0.0;
  std::string config_hash;

  friend bool operator==(const SweepRow&, const SweepRow&) = default;
};

/// Stage tags for RNG stream derivation.
enum class Stage : std::uint64_t { Feature = 1, Channel = 2, Noise = 3, Pilots = 4, Training = 5 };

/// Everything shared by the trials of one sweep: the resolved digital
/// compression rate and, for the linear codec, the trained model.
class SweepPlan {
 public:
  explicit SweepPlan(ExperimentConfig cfg);

  const ExperimentConfig& config() const noexcept { return cfg_; }
  const std::string& hash() const noexcept { return hash_; }
  /// Cells kept per tensor by the chain actually run.
  std::size_t retained_cells() const noexcept { return cells_; }
  /// Channel uses of the analog reference at cfg.cr.
  double analog_reference_uses() const noexcept { return analog_uses_; }
  /// Channel uses reported for the configured chain.
  double channel_uses() const noexcept { return chain_uses_; }
  const AnalogCodec* codec() const noexcept { return codec_.get(); }

  /// Rows for one (snr index, trial). Pure function of the plan and the
  /// indices.
  std::vector<SweepRow> run_trial(std::size_t snr_index, std::size_t trial) const;

 private:
  ExperimentConfig cfg_;
  std::string hash_;
  std::size_t cells_ = 0;
  double analog_uses_ = 0.0;
  double chain_uses_ = 0.0;
  std::shared_ptr<const AnalogCodec> codec_;
};

/// All (snr, trial) rows in snr-major, trial-minor order, computed on up
/// to `parallel` threads.
std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg, unsigned parallel = 1);

// ---------------------------------------------------------------- output

inline constexpr std::string_view kCsvHeader = "snr_db,trial,metric,value,config_hash";

/// Throws InvalidArgument on empty rows.
void write_csv(std::ostream& os, const std::vector<SweepRow>& rows);
std::vector<SweepRow> read_csv(std::istream& is);

/// Mean of each metric against SNR, one polyline per metric, log scale
/// when every mean is positive.
void write_svg_plot(std::ostream& os, const std::vector<SweepRow>& rows,
                    std::string_view title);

/// Writes sweep.csv, sweep.svg and config.txt into `dir` (created if
/// missing). Throws IoError on failure.
void emit_outputs(const std::string& dir, const std::vector<SweepRow>& rows,
                  const ExperimentConfig& cfg);

}  // namespace semlink

#endif  // SEMLINK_HARNESS_HPP
