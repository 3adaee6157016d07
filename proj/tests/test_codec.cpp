// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <sstream>

#include "semlink/analog_codec.hpp"
#include "semlink/errors.hpp"
#include "semlink/quantizer.hpp"
#include "semlink/rng.hpp"

using namespace semlink;

namespace {

// Vectors v = B c with a fixed random n x k basis B and standard normal c.
std::vector<std::vector<double>> subspace_corpus(RngStream& rng, std::size_t n, std::size_t k,
                                                 std::size_t count) {
  Eigen::MatrixXd basis(n, k);
  for (Eigen::Index i = 0; i < basis.size(); ++i) basis.data()[i] = rng.normal();
  std::vector<std::vector<double>> out;
  for (std::size_t s = 0; s < count; ++s) {
    Eigen::VectorXd c(k);
    for (Eigen::Index i = 0; i < c.size(); ++i) c(i) = rng.normal();
    const Eigen::VectorXd v = basis * c;
    out.emplace_back(v.data(), v.data() + v.size());
  }
  return out;
}

// Independent coordinates with decaying variance.
std::vector<std::vector<double>> decaying_corpus(RngStream& rng, std::size_t n, std::size_t count) {
  std::vector<std::vector<double>> out(count, std::vector<double>(n));
  for (auto& v : out) {
    for (std::size_t i = 0; i < n; ++i) v[i] = rng.normal() / (1.0 + static_cast<double>(i));
  }
  return out;
}

double mean_power(const std::vector<std::vector<double>>& corpus) {
  double p = 0.0;
  for (const auto& v : corpus) {
    for (double x : v) p += x * x;
  }
  return p / static_cast<double>(corpus.size());
}

// encode, normalize to unit symbol power, AWGN, undo the gain, decode
double test_mse(const LinearCodec& codec, const std::vector<std::vector<double>>& corpus,
                double snr_db, RngStream& rng) {
  const double s2 = std::pow(10.0, -snr_db / 10.0);
  double acc = 0.0;
  for (const auto& v : corpus) {
    CVec z = codec.encode(v);
    double p = 0.0;
    for (const auto& x : z) p += std::norm(x);
    const double g = std::sqrt(static_cast<double>(z.size()) / p);
    for (auto& x : z) x = (x * g + rng.complex_normal(s2)) / g;
    const auto r = codec.decode(z, v.size());
    for (std::size_t i = 0; i < v.size(); ++i) acc += (r[i] - v[i]) * (r[i] - v[i]);
  }
  return acc / static_cast<double>(corpus.size());
}

}  // namespace

TEST_CASE("pairing codec layout") {
  const PairingCodec codec;
  const std::vector<double> v{1, 2, 3, 4};
  CHECK(codec.encode(v) == CVec{{1, 2}, {3, 4}});
  CHECK(codec.decode(codec.encode(v), 4) == v);
  CHECK(codec.bandwidth_ratio() == 0.5);

  const std::vector<double> odd{1, 2, 3};
  CHECK(codec.encode(odd) == CVec{{1, 2}, {3, 0}});
  CHECK(PairingCodec::padded(3));
  CHECK_FALSE(PairingCodec::padded(4));
  CHECK(codec.symbols_for(3) == 2);
  CHECK(codec.decode(codec.encode(odd), 3) == odd);
  CHECK_THROWS_AS(codec.decode(CVec{{1, 2}}, 4), InvalidArgument);
}

TEST_CASE("pairing codec roundtrip on random vectors") {
  RngStream rng(1);
  const PairingCodec codec;
  for (std::size_t n : {1U, 2U, 7U, 64U, 513U}) {
    std::vector<double> v(n);
    for (auto& x : v) x = rng.normal();
    const auto back = codec.decode(codec.encode(v), n);
    REQUIRE(back.size() == n);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(back[i] - v[i]) <= codec.roundtrip_tolerance());
  }
}

TEST_CASE("linear codec recovers a subspace corpus over a noiseless channel") {
  RngStream rng(2);
  const std::size_t n = 32, k = 16;
  const auto corpus = subspace_corpus(rng, n, k, 512);
  LinearTrainOptions opt;
  opt.latent_dim = k;
  opt.epochs = 300;
  LinearTrainReport report;
  const auto codec = LinearCodec::train(corpus, opt, awgn_training_channel(INFINITY), rng, &report);

  double mse = 0.0;
  for (const auto& v : corpus) {
    const auto r = codec.decode(codec.encode(v), n);
    for (std::size_t i = 0; i < n; ++i) mse += (r[i] - v[i]) * (r[i] - v[i]);
  }
  mse /= static_cast<double>(corpus.size());
  CHECK(mse < 1e-3 * mean_power(corpus));

  // PCA oracle: the achievable error on an exactly k-dimensional corpus is zero
  Eigen::MatrixXd data(n, corpus.size());
  for (std::size_t j = 0; j < corpus.size(); ++j) {
    data.col(static_cast<Eigen::Index>(j)) = Eigen::Map<const Eigen::VectorXd>(corpus[j].data(), n);
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(data, Eigen::ComputeThinU);
  const Eigen::MatrixXd u = svd.matrixU().leftCols(k);
  const double pca = (u * (u.transpose() * data) - data).squaredNorm() / static_cast<double>(corpus.size());
  CHECK(pca < 1e-20 * mean_power(corpus) + 1e-18);
  CHECK(mse >= pca);

  REQUIRE(report.epoch_loss.size() == 300);
  for (std::size_t e = 1; e < report.best_so_far.size(); ++e) {
    CHECK(report.best_so_far[e] <= report.best_so_far[e - 1]);
  }
  CHECK(report.best_so_far.back() < 1e-2 * report.epoch_loss.front());
}

TEST_CASE("linear codec declares a tolerance it meets") {
  RngStream rng(3);
  const auto corpus = decaying_corpus(rng, 20, 256);
  LinearTrainOptions opt;
  opt.latent_dim = 10;
  opt.epochs = 50;
  const auto codec = LinearCodec::train(corpus, opt, {}, rng);
  CHECK(codec.bandwidth_ratio() == 0.25);
  CHECK(codec.symbols_for(20) == 5);
  for (const auto& v : corpus) {
    const auto r = codec.decode(codec.encode(v), v.size());
    for (std::size_t i = 0; i < v.size(); ++i) CHECK(std::abs(r[i] - v[i]) <= codec.roundtrip_tolerance());
  }
}

TEST_CASE("linear codec rejects bad dimensions") {
  RngStream rng(4);
  const auto corpus = decaying_corpus(rng, 8, 16);
  LinearTrainOptions opt;
  opt.latent_dim = 8;
  CHECK_THROWS_AS(LinearCodec::train(corpus, opt, {}, rng), InvalidArgument);
  opt.latent_dim = 10;
  CHECK_THROWS_AS(LinearCodec::train(corpus, opt, {}, rng), InvalidArgument);
  opt.latent_dim = 3;
  CHECK_THROWS_AS(LinearCodec::train(corpus, opt, {}, rng), InvalidArgument);
  opt.latent_dim = 4;
  CHECK_THROWS_AS(LinearCodec::train({}, opt, {}, rng), InvalidArgument);
  auto ragged = corpus;
  ragged[3].pop_back();
  CHECK_THROWS_AS(LinearCodec::train(ragged, opt, {}, rng), InvalidArgument);

  const auto codec = LinearCodec::train(corpus, opt, {}, rng);
  CHECK_THROWS_AS(codec.encode(std::vector<double>(7)), InvalidArgument);
  CHECK_THROWS_AS(codec.decode(CVec(3), 8), InvalidArgument);
}

TEST_CASE("training at low SNR is more robust at low test SNR") {
  RngStream rng(5);
  const auto corpus = decaying_corpus(rng, 16, 512);
  const auto held_out = decaying_corpus(rng, 16, 2000);
  LinearTrainOptions opt;
  opt.latent_dim = 8;
  opt.epochs = 100;
  opt.snr_train_db = 0.0;
  const auto low = LinearCodec::train(corpus, opt, {}, rng);
  opt.snr_train_db = 20.0;
  const auto high = LinearCodec::train(corpus, opt, {}, rng);
  RngStream eval_a(99), eval_b(99);
  CHECK(test_mse(low, held_out, 0.0, eval_a) < test_mse(high, held_out, 0.0, eval_b));
}

TEST_CASE("linear codec container roundtrip") {
  RngStream rng(6);
  const auto corpus = decaying_corpus(rng, 12, 64);
  LinearTrainOptions opt;
  opt.latent_dim = 6;
  opt.epochs = 5;
  const auto codec = LinearCodec::train(corpus, opt, {}, rng);
  std::stringstream ss;
  codec.write(ss);
  const auto back = LinearCodec::read(ss);
  CHECK(back.encoder() == codec.encoder());
  CHECK(back.decoder() == codec.decoder());
  CHECK(back.roundtrip_tolerance() == codec.roundtrip_tolerance());
  std::stringstream bad("SLFT");
  CHECK_THROWS_AS(LinearCodec::read(bad), IoError);
}

TEST_CASE("training channel noise power") {
  RngStream rng(7);
  const auto chan = awgn_training_channel(3.0);
  std::vector<double> sym(200000, 0.0);
  chan(sym, rng);
  double p = 0.0;
  for (double x : sym) p += x * x;
  // complex noise variance spread over interleaved re/im pairs
  CHECK(p / 100000.0 == doctest::Approx(std::pow(10.0, -0.3)).epsilon(0.02));
  std::vector<double> quiet(10, 1.0);
  awgn_training_channel(INFINITY)(quiet, rng);
  CHECK(quiet == std::vector<double>(10, 1.0));
}

TEST_CASE("8-bit quantizer examples") {
  std::vector<double> ramp(256);
  for (int i = 0; i < 256; ++i) ramp[i] = i * 255.0 / 255.0 + (i % 3) * 0.1;
  ramp.front() = 0.0;
  ramp.back() = 255.0;
  const auto q = quantize_8bit(ramp);
  CHECK(q.params.scale == 1.0);
  CHECK(q.params.zero_point == 0);
  const auto d = dequantize_8bit(q.bytes, q.params);
  for (std::size_t i = 0; i < ramp.size(); ++i) CHECK(std::abs(d[i] - ramp[i]) <= 0.5);

  const std::vector<double> flat(5, -3.25);
  const auto qc = quantize_8bit(flat);
  CHECK(qc.params.scale == 1.0);
  for (auto b : qc.bytes) CHECK(b == qc.params.zero_point);
  CHECK(dequantize_8bit(qc.bytes, qc.params) == flat);

  const std::vector<double> two{0.0, 1.0};
  const auto q2 = quantize_8bit(two);
  CHECK(q2.params.scale == doctest::Approx(1.0 / 255.0));
  const auto d2 = dequantize_8bit(q2.bytes, q2.params);
  for (std::size_t i = 0; i < 2; ++i) CHECK(std::abs(d2[i] - two[i]) <= 1.0 / 510.0);
}

TEST_CASE("quantizer error is bounded by half a step") {
  RngStream rng(8);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> v(97);
    for (auto& x : v) x = 10.0 * rng.normal() + rep;
    const auto q = quantize_8bit(v);
    const auto d = dequantize_8bit(q.bytes, q.params);
    for (std::size_t i = 0; i < v.size(); ++i) {
      CHECK(std::abs(d[i] - v[i]) <= q.params.scale / 2.0 * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("bit expansion is MSB first and invertible") {
  const std::vector<std::uint8_t> bytes{0x80, 0x01, 0xa5};
  const auto bits = bytes_to_bits(bytes);
  REQUIRE(bits.size() == 24);
  CHECK(bits[0] == 1);
  CHECK(bits[7] == 0);
  CHECK(bits[15] == 1);
  CHECK(std::vector<std::uint8_t>(bits.begin() + 16, bits.end()) ==
        std::vector<std::uint8_t>{1, 0, 1, 0, 0, 1, 0, 1});
  CHECK(bits_to_bytes(bits) == bytes);
  CHECK_THROWS_AS(bits_to_bytes(std::vector<std::uint8_t>(7, 0)), InvalidArgument);
}
