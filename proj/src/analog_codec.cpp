// SPDX-License-Identifier: Apache-2.0

#include "semlink/analog_codec.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "semlink/channel.hpp"
#include "semlink/container.hpp"
#include "semlink/errors.hpp"

namespace semlink {

CVec PairingCodec::encode(std::span<const double> v) const {
  CVec out(symbols_for(v.size()));
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double im = 2 * i + 1 < v.size() ? v[2 * i + 1] : 0.0;
    out[i] = {v[2 * i], im};
  }
  return out;
}

std::vector<double> PairingCodec::decode(std::span<const cplx> symbols,
                                         std::size_t source_len) const {
  if (symbols.size() != symbols_for(source_len)) {
    throw InvalidArgument("PairingCodec::decode: symbol count does not match source length");
  }
  std::vector<double> out(source_len);
  for (std::size_t i = 0; i < source_len; ++i) {
    out[i] = i % 2 == 0 ? symbols[i / 2].real() : symbols[i / 2].imag();
  }
  return out;
}

TrainingChannel awgn_training_channel(double snr_db) {
  const double sigma2 = noise_variance(snr_db, 1.0);
  return [sigma2](std::span<double> s, RngStream& rng) {
    if (sigma2 == 0.0) return;
    const double sd = std::sqrt(sigma2 / 2.0);
    for (double& x : s) x += sd * rng.normal();
  };
}

LinearCodec::LinearCodec(Eigen::MatrixXd encoder, Eigen::MatrixXd decoder, double tolerance)
    : encoder_(std::move(encoder)), decoder_(std::move(decoder)), tolerance_(tolerance) {
  if (encoder_.rows() == 0 || encoder_.rows() % 2 != 0) {
    throw InvalidArgument("LinearCodec: latent dimension must be positive and even");
  }
  if (decoder_.rows() != encoder_.cols() || decoder_.cols() != encoder_.rows()) {
    throw InvalidArgument("LinearCodec: encoder and decoder shapes are not transposed");
  }
}

double LinearCodec::bandwidth_ratio() const {
  return static_cast<double>(latent_dim()) / (2.0 * static_cast<double>(input_dim()));
}

CVec LinearCodec::encode(std::span<const double> v) const {
  if (v.size() != input_dim()) throw InvalidArgument("LinearCodec::encode: wrong input length");
  const Eigen::Map<const Eigen::VectorXd> x(v.data(), static_cast<Eigen::Index>(v.size()));
  const Eigen::VectorXd z = encoder_ * x;
  CVec out(latent_dim() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = {z(static_cast<Eigen::Index>(2 * i)), z(static_cast<Eigen::Index>(2 * i + 1))};
  }
  return out;
}

std::vector<double> LinearCodec::decode(std::span<const cplx> symbols,
                                        std::size_t source_len) const {
  if (source_len != input_dim() || symbols.size() != latent_dim() / 2) {
    throw InvalidArgument("LinearCodec::decode: wrong symbol count or source length");
  }
  Eigen::VectorXd y(static_cast<Eigen::Index>(latent_dim()));
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    y(static_cast<Eigen::Index>(2 * i)) = symbols[i].real();
    y(static_cast<Eigen::Index>(2 * i + 1)) = symbols[i].imag();
  }
  const Eigen::VectorXd x = decoder_ * y;
  return {x.data(), x.data() + x.size()};
}

namespace {

struct Adam {
  Eigen::MatrixXd m, v;
  double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  long step = 0;

  explicit Adam(const Eigen::MatrixXd& like)
      : m(Eigen::MatrixXd::Zero(like.rows(), like.cols())),
        v(Eigen::MatrixXd::Zero(like.rows(), like.cols())) {}

  void apply(Eigen::MatrixXd& param, const Eigen::MatrixXd& grad, double lr) {
    ++step;
    m = beta1 * m + (1.0 - beta1) * grad;
    v = beta2 * v + (1.0 - beta2) * grad.cwiseProduct(grad);
    const double c1 = 1.0 - std::pow(beta1, static_cast<double>(step));
    const double c2 = 1.0 - std::pow(beta2, static_cast<double>(step));
    param.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
  }
};

}  // namespace

LinearCodec LinearCodec::train(std::span<const std::vector<double>> corpus,
                               const LinearTrainOptions& opt, const TrainingChannel& channel,
                               RngStream& rng, LinearTrainReport* report) {
  if (corpus.empty()) throw InvalidArgument("LinearCodec::train: empty corpus");
  const std::size_t n = corpus.front().size();
  for (const auto& v : corpus) {
    if (v.size() != n) throw InvalidArgument("LinearCodec::train: corpus vectors differ in length");
  }
  const std::size_t k = opt.latent_dim;
  if (k >= n) throw InvalidArgument("LinearCodec::train: latent dimension must be below input length");
  if (k == 0 || k % 2 != 0) throw InvalidArgument("LinearCodec::train: latent dimension must be even");
  if (opt.epochs < 1 || opt.batch_size == 0) throw InvalidArgument("LinearCodec::train: bad schedule");

  const auto ni = static_cast<Eigen::Index>(n);
  const auto ki = static_cast<Eigen::Index>(k);
  const TrainingChannel chan = channel ? channel : awgn_training_channel(opt.snr_train_db);
  const double half_k_sqrt = std::sqrt(static_cast<double>(k) / 2.0);

  Eigen::MatrixXd enc(ki, ni);
  for (Eigen::Index i = 0; i < enc.size(); ++i) {
    enc.data()[i] = rng.normal() / std::sqrt(static_cast<double>(n));
  }
  Eigen::MatrixXd dec = enc.transpose();
  Adam adam_e(enc), adam_d(dec);

  Eigen::MatrixXd data(ni, static_cast<Eigen::Index>(corpus.size()));
  for (std::size_t j = 0; j < corpus.size(); ++j) {
    data.col(static_cast<Eigen::Index>(j)) =
        Eigen::Map<const Eigen::VectorXd>(corpus[j].data(), ni);
  }

  std::vector<std::size_t> order(corpus.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> sym(k);

  for (int epoch = 0; epoch < opt.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    // linear decay to a tenth of the initial rate
    const double lr = opt.learning_rate * (1.0 - 0.9 * epoch / std::max(1, opt.epochs - 1));
    double epoch_loss = 0.0;

    for (std::size_t b0 = 0; b0 < order.size(); b0 += opt.batch_size) {
      const std::size_t bs = std::min(opt.batch_size, order.size() - b0);
      const auto bsi = static_cast<Eigen::Index>(bs);
      Eigen::MatrixXd v(ni, bsi);
      for (std::size_t j = 0; j < bs; ++j) v.col(static_cast<Eigen::Index>(j)) = data.col(
          static_cast<Eigen::Index>(order[b0 + j]));

      const Eigen::MatrixXd z = enc * v;
      Eigen::MatrixXd yhat(ki, bsi);
      Eigen::MatrixXd noise(ki, bsi);
      Eigen::VectorXd norms(bsi);
      for (Eigen::Index j = 0; j < bsi; ++j) {
        const double nz = z.col(j).norm();
        norms(j) = nz;
        if (nz == 0.0) {
          yhat.col(j).setZero();
          noise.col(j).setZero();
          continue;
        }
        const Eigen::VectorXd s = z.col(j) * (half_k_sqrt / nz);
        for (std::size_t i = 0; i < k; ++i) sym[i] = s(static_cast<Eigen::Index>(i));
        chan(sym, rng);
        for (std::size_t i = 0; i < k; ++i) {
          noise(static_cast<Eigen::Index>(i), j) = sym[i] - s(static_cast<Eigen::Index>(i));
        }
        // receiver undoes the normalization with the side-information gain
        yhat.col(j) = z.col(j) + noise.col(j) * (nz / half_k_sqrt);
      }

      const Eigen::MatrixXd err = dec * yhat - v;
      epoch_loss += err.squaredNorm();

      const double scale = 2.0 / static_cast<double>(bs);
      const Eigen::MatrixXd g_dec = scale * err * yhat.transpose();
      const Eigen::MatrixXd g_y = scale * dec.transpose() * err;
      Eigen::MatrixXd g_z = g_y;
      for (Eigen::Index j = 0; j < bsi; ++j) {
        if (norms(j) == 0.0) continue;
        const double proj = noise.col(j).dot(g_y.col(j));
        g_z.col(j) += z.col(j) * (proj / (norms(j) * half_k_sqrt));
      }
      const Eigen::MatrixXd g_enc = g_z * v.transpose();

      adam_e.apply(enc, g_enc, lr);
      adam_d.apply(dec, g_dec, lr);
    }

    epoch_loss /= static_cast<double>(corpus.size());
    best = std::min(best, epoch_loss);
    if (report) {
      report->epoch_loss.push_back(epoch_loss);
      report->best_so_far.push_back(best);
    }
  }

  // identity-channel roundtrip error on the training set
  const Eigen::MatrixXd rt = dec * (enc * data) - data;
  const double tol = 2.0 * rt.cwiseAbs().maxCoeff() + 1e-12;
  return LinearCodec(std::move(enc), std::move(dec), tol);
}

void LinearCodec::write(std::ostream& os) const {
  namespace ct = container;
  ct::write_header(os, {ct::kLinearCodec, ct::kVersion,
                        {static_cast<std::uint32_t>(latent_dim()),
                         static_cast<std::uint32_t>(input_dim()), 0}});
  ct::write_f64(os, tolerance_);
  // row-major
  for (Eigen::Index r = 0; r < encoder_.rows(); ++r) {
    for (Eigen::Index c = 0; c < encoder_.cols(); ++c) ct::write_f64(os, encoder_(r, c));
  }
  for (Eigen::Index r = 0; r < decoder_.rows(); ++r) {
    for (Eigen::Index c = 0; c < decoder_.cols(); ++c) ct::write_f64(os, decoder_(r, c));
  }
}

LinearCodec LinearCodec::read(std::istream& is) {
  namespace ct = container;
  const ct::Header h = ct::read_header(is, ct::kLinearCodec);
  const auto k = static_cast<Eigen::Index>(h.dims[0]);
  const auto n = static_cast<Eigen::Index>(h.dims[1]);
  const double tol = ct::read_f64(is);
  Eigen::MatrixXd enc(k, n), dec(n, k);
  for (Eigen::Index r = 0; r < k; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) enc(r, c) = ct::read_f64(is);
  }
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < k; ++c) dec(r, c) = ct::read_f64(is);
  }
  return LinearCodec(std::move(enc), std::move(dec), tol);
}

}  // namespace semlink
