// SPDX-License-Identifier: Apache-2.0
//
// Analog joint source-channel codecs: real feature vectors in, complex
// channel symbols out. Power normalization happens outside the codec.

#ifndef SEMLINK_ANALOG_CODEC_HPP
#define SEMLINK_ANALOG_CODEC_HPP

#include <Eigen/Dense>

#include <functional>
#include <istream>
#include <limits>
#include <ostream>
#include <span>
#include <string_view>
#include <vector>

#include "semlink/complex_grid.hpp"
#include "semlink/rng.hpp"

namespace semlink {

class AnalogCodec {
 public:
  virtual ~AnalogCodec() = default;

  virtual std::string_view name() const = 0;
  virtual CVec encode(std::span<const double> v) const = 0;
  /// `source_len` is the length of the vector that was encoded.
  virtual std::vector<double> decode(std::span<const cplx> symbols,
                                     std::size_t source_len) const = 0;
  /// Complex symbols emitted per real input.
  virtual double bandwidth_ratio() const = 0;
  virtual std::size_t symbols_for(std::size_t source_len) const = 0;
  /// Max abs error of decode(encode(v)) over the identity channel, for
  /// inputs the codec is meant for.
  virtual double roundtrip_tolerance() const = 0;
};

/// Consecutive real pairs become (re, im); an odd tail is padded with a
/// zero imaginary part.
class PairingCodec final : public AnalogCodec {
 public:
  std::string_view name() const override { return "pairing"; }
  CVec encode(std::span<const double> v) const override;
  std::vector<double> decode(std::span<const cplx> symbols,
                             std::size_t source_len) const override;
  double bandwidth_ratio() const override { return 0.5; }
  std::size_t symbols_for(std::size_t source_len) const override { return (source_len + 1) / 2; }
  double roundtrip_tolerance() const override { return 0.0; }

  static bool padded(std::size_t source_len) { return source_len % 2 != 0; }
};

/// Adds channel impairments in place to normalized symbols given as
/// interleaved (re, im) reals.
using TrainingChannel = std::function<void(std::span<double> symbols, RngStream& rng)>;

/// Complex AWGN at unit signal power; +inf dB is noiseless.
TrainingChannel awgn_training_channel(double snr_db);

struct LinearTrainOptions {
  std::size_t latent_dim = 0;  // real channel dimensions, even
  double snr_train_db = std::numeric_limits<double>::infinity();
  int epochs = 200;
  std::size_t batch_size = 32;
  double learning_rate = 1e-2;
};

struct LinearTrainReport {
  std::vector<double> epoch_loss;  // mean per-sample squared error
  std::vector<double> best_so_far;
};

/// v -> E v packed into complex pairs, and y -> D y. Trained end to end
/// through per-vector power normalization and a training channel; the
/// normalization gain reaches the receiver as side information.
class LinearCodec final : public AnalogCodec {
 public:
  LinearCodec(Eigen::MatrixXd encoder, Eigen::MatrixXd decoder, double tolerance = 0.0);

  /// Minibatch Adam on the mean squared reconstruction error.
  static LinearCodec train(std::span<const std::vector<double>> corpus,
                           const LinearTrainOptions& options, const TrainingChannel& channel,
                           RngStream& rng, LinearTrainReport* report = nullptr);

  std::string_view name() const override { return "linear"; }
  CVec encode(std::span<const double> v) const override;
  std::vector<double> decode(std::span<const cplx> symbols,
                             std::size_t source_len) const override;
  double bandwidth_ratio() const override;
  std::size_t symbols_for(std::size_t) const override { return latent_dim() / 2; }
  double roundtrip_tolerance() const override { return tolerance_; }

  std::size_t input_dim() const { return static_cast<std::size_t>(encoder_.cols()); }
  std::size_t latent_dim() const { return static_cast<std::size_t>(encoder_.rows()); }
  const Eigen::MatrixXd& encoder() const { return encoder_; }
  const Eigen::MatrixXd& decoder() const { return decoder_; }

  void write(std::ostream& os) const;
  static LinearCodec read(std::istream& is);

 private:
  Eigen::MatrixXd encoder_;  // k x n
  Eigen::MatrixXd decoder_;  // n x k
  double tolerance_ = 0.0;
};

}  // namespace semlink

#endif  // SEMLINK_ANALOG_CODEC_HPP
