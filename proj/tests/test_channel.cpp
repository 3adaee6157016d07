// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "semlink/channel.hpp"
#include "semlink/errors.hpp"

using namespace semlink;

TEST_CASE("noise variance follows the SNR definition") {
  CHECK(noise_variance(0.0, 1.0) == 1.0);
  CHECK(noise_variance(10.0, 1.0) == doctest::Approx(0.1));
  CHECK(noise_variance(20.0, 3.0) == doctest::Approx(0.03));
  CHECK(noise_variance(INFINITY, 1.0) == 0.0);
}

TEST_CASE("AWGN at infinite SNR is the identity") {
  RngStream rng(1);
  CVec x{{1, 2}, {-0.5, 0.25}, {0, -3}};
  const auto out = transmit_flat(x, {FlatChannelKind::Awgn, INFINITY, 1.0}, rng);
  CHECK(out.y == x);
  CHECK(out.h == cplx(1, 0));
  CHECK(out.noise_variance == 0.0);
}

TEST_CASE("flat channel rejects empty input and nonpositive Rayleigh variance") {
  RngStream rng(1);
  CHECK_THROWS_AS(transmit_flat(CVec{}, {}, rng), InvalidArgument);
  CVec x{{1, 0}};
  CHECK_THROWS_AS(transmit_flat(x, {FlatChannelKind::Rayleigh, 0.0, 0.0}, rng), InvalidArgument);
}

TEST_CASE("Rayleigh block gain has unit second moment") {
  RngStream rng(2);
  CVec x{{1, 0}};
  double acc = 0.0;
  constexpr int n = 100000;
  for (int i = 0; i < n; ++i) {
    acc += std::norm(transmit_flat(x, {FlatChannelKind::Rayleigh, INFINITY, 1.0}, rng).h);
  }
  CHECK(acc / n == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("Rayleigh gain is applied to the whole block") {
  RngStream rng(3);
  CVec x(16, cplx(1, 0));
  const auto out = transmit_flat(x, {FlatChannelKind::Rayleigh, INFINITY, 2.0}, rng);
  for (const auto& y : out.y) CHECK(y == out.h);
}

TEST_CASE("AWGN noise power at 0 dB") {
  RngStream rng(4);
  CVec x(1'000'000);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::polar(1.0, 0.001 * static_cast<double>(i));
  const auto out = transmit_flat(x, {FlatChannelKind::Awgn, 0.0, 1.0}, rng);
  double p = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) p += std::norm(out.y[i] - x[i]);
  CHECK(p / static_cast<double>(x.size()) == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("shipped TDL profiles are normalized and sorted") {
  for (auto m : kAllTdlModels) {
    const auto& p = tdl_profile(m);
    CAPTURE(to_string(m));
    REQUIRE(p.taps() > 0);
    CHECK(p.normalized_delays.front() == 0.0);
    for (std::size_t i = 1; i < p.taps(); ++i) {
      CHECK(p.normalized_delays[i] >= p.normalized_delays[i - 1]);
    }
    const auto lin = p.linear_powers();
    CHECK(std::abs(std::accumulate(lin.begin(), lin.end(), 0.0) - 1.0) < 1e-9);
  }
  CHECK_FALSE(tdl_profile(TdlModel::A).los);
  CHECK_FALSE(tdl_profile(TdlModel::B).los);
  CHECK_FALSE(tdl_profile(TdlModel::C).los);
  CHECK(tdl_profile(TdlModel::D).los);
  CHECK(tdl_profile(TdlModel::E).los);
  CHECK(tdl_profile(TdlModel::D).k_factor_db == doctest::Approx(13.3).epsilon(1e-3));
  CHECK(tdl_profile(TdlModel::E).k_factor_db == doctest::Approx(22.0).epsilon(1e-3));
}

TEST_CASE("TDL model names parse") {
  CHECK(parse_tdl_model("TDL-A") == TdlModel::A);
  CHECK(parse_tdl_model("tdl-c") == TdlModel::C);
  CHECK(parse_tdl_model("E") == TdlModel::E);
  CHECK_THROWS_AS(parse_tdl_model("TDL-F"), InvalidArgument);
  for (auto m : kAllTdlModels) CHECK(parse_tdl_model(to_string(m)) == m);
}

TEST_CASE("delay scaling") {
  TdlProfile p;
  p.normalized_delays = {0.0, 0.5, 1.0};
  p.powers_db = {0, 0, 0};
  CHECK(scale_delays(p, 300.0)[2] == 300.0);
  CHECK(kDelaySpreadPresets.front().ds_ns == 10.0);
  CHECK(kDelaySpreadPresets.back().ds_ns == 1000.0);
  const auto a = scale_delays(p, kDelaySpreadPresets.front().ds_ns);
  const auto b = scale_delays(p, kDelaySpreadPresets.back().ds_ns);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(a[i] == doctest::Approx(p.normalized_delays[i] * 10.0));
    CHECK(b[i] == doctest::Approx(p.normalized_delays[i] * 1000.0));
  }
  CHECK_THROWS_AS(scale_delays(p, 0.0), InvalidArgument);
  CHECK_THROWS_AS(scale_delays(p, -5.0), InvalidArgument);

  // linear in the delay spread
  for (auto m : kAllTdlModels) {
    const auto& prof = tdl_profile(m);
    const auto d1 = scale_delays(prof, 37.0);
    const auto d2 = scale_delays(prof, 37.0 * 4.5);
    for (std::size_t i = 0; i < d1.size(); ++i) CHECK(d2[i] == doctest::Approx(4.5 * d1[i]));
  }
}

TEST_CASE("profile table lists every tap") {
  std::ostringstream os;
  write_profile_table(os);
  std::size_t rows = 0;
  std::istringstream is(os.str());
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line[0] != '#') ++rows;
  }
  std::size_t taps = 0;
  for (auto m : kAllTdlModels) taps += tdl_profile(m).taps();
  CHECK(rows == taps);
}

TEST_CASE("Doppler from speed") {
  const auto d = DopplerSpec::from_speed(30.0, 3.5e9);
  CHECK(d.max_doppler_hz == doctest::Approx(30.0 * 3.5e9 / 299792458.0));
  CHECK(d.los_doppler_hz == doctest::Approx(0.7 * d.max_doppler_hz));
  CHECK(d.num_sinusoids == 32);
  CHECK_THROWS_AS(DopplerSpec::from_speed(-1.0, 3.5e9), InvalidArgument);
}

TEST_CASE("zero Doppler freezes the gains") {
  RngStream rng(5);
  std::vector<double> t(20);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = 1e-3 * static_cast<double>(i);
  for (auto m : kAllTdlModels) {
    const auto r = generate_tap_gains(tdl_profile(m), 300.0, DopplerSpec{}, t, rng);
    for (std::size_t i = 1; i < r.symbols(); ++i) {
      for (std::size_t k = 0; k < r.taps(); ++k) CHECK(r.gains(i, k) == r.gains(0, k));
    }
    // frequency response then does not depend on the symbol
    for (std::size_t k : {0U, 5U, 700U}) {
      CHECK(std::abs(frequency_response(r, 15e3, k, 7) - frequency_response(r, 15e3, k, 0)) < 1e-12);
    }
  }
}

TEST_CASE("generate_tap_gains rejects descending times") {
  RngStream rng(5);
  std::vector<double> t{0.0, 2.0, 1.0};
  CHECK_THROWS_AS(generate_tap_gains(tdl_profile(TdlModel::A), 100.0, DopplerSpec{}, t, rng),
                  InvalidArgument);
}

TEST_CASE("single diffuse tap has unit time-averaged power") {
  RngStream rng(6);
  const auto d = DopplerSpec::from_speed(30.0, 3.5e9);
  const double ts = (2048.0 + 144.0) / (2048.0 * 15e3);
  std::vector<double> t(100000);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = ts * static_cast<double>(i);
  const std::vector<double> delay{0.0}, power{1.0};
  const auto r = generate_tap_gains(delay, power, d, t, rng);
  double acc = 0.0;
  for (std::size_t i = 0; i < r.symbols(); ++i) acc += std::norm(r.gains(i, 0));
  CHECK(acc / static_cast<double>(r.symbols()) == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("tap autocorrelation follows the Jakes Bessel shape") {
  RngStream rng(7);
  DopplerSpec d;
  d.max_doppler_hz = 100.0;
  constexpr int lags = 26;
  std::vector<double> t(lags);
  for (int i = 0; i < lags; ++i) t[i] = 0.5 / d.max_doppler_hz * i / (lags - 1);
  const std::vector<double> delay{0.0}, power{1.0};
  std::vector<cplx> acc(lags);
  double p0 = 0.0;
  constexpr int reals = 10000;
  for (int n = 0; n < reals; ++n) {
    const auto r = generate_tap_gains(delay, power, d, t, rng);
    for (int i = 0; i < lags; ++i) acc[i] += r.gains(0, 0) * std::conj(r.gains(i, 0));
    p0 += std::norm(r.gains(0, 0));
  }
  double worst = 0.0;
  for (int i = 0; i < lags; ++i) {
    const double rho = std::real(acc[i]) / p0;
    const double j0 = std::cyl_bessel_j(0.0, 2.0 * std::numbers::pi * d.max_doppler_hz * t[i]);
    worst = std::max(worst, std::abs(rho - j0));
  }
  CHECK(worst < 0.05);
}

TEST_CASE("per-tap power of LOS and NLOS profiles converges to the table") {
  RngStream rng(8);
  const auto d = DopplerSpec::from_speed(30.0, 3.5e9);
  const std::vector<double> t{0.0};
  for (auto m : {TdlModel::A, TdlModel::D}) {
    const auto& p = tdl_profile(m);
    const auto lin = p.linear_powers();
    std::vector<double> acc(p.taps());
    constexpr int n = 4000;
    for (int r = 0; r < n; ++r) {
      const auto real = generate_tap_gains(p, 100.0, d, t, rng);
      for (std::size_t k = 0; k < p.taps(); ++k) acc[k] += std::norm(real.gains(0, k));
    }
    for (std::size_t k = 0; k < p.taps(); ++k) {
      CHECK(acc[k] / n == doctest::Approx(lin[k]).epsilon(0.1));
    }
  }
}

TEST_CASE("frequency response examples") {
  ChannelRealization r;
  r.sample_times = {0.0, 1e-4};
  r.tap_delays_ns = {0.0};
  r.gains = ComplexGrid(2, 1, {{0.3, -0.4}, {1.0, 2.0}});
  for (std::size_t k : {0U, 1U, 100U, 2047U}) {
    CHECK(frequency_response(r, 15e3, k, 0) == cplx(0.3, -0.4));
    CHECK(frequency_response(r, 15e3, k, 1) == cplx(1.0, 2.0));
  }
  CHECK_THROWS_AS(frequency_response(r, 15e3, 0, 2), InvalidArgument);

  ChannelRealization s;
  s.sample_times = {0.0};
  s.tap_delays_ns = {0.0, 123.0, 4567.0};
  s.gains = ComplexGrid(1, 3, {{1, 0}, {0, 1}, {-0.5, 0.5}});
  const cplx sum = s.gains(0, 0) + s.gains(0, 1) + s.gains(0, 2);
  CHECK(std::abs(frequency_response(s, 15e3, 0, 0) - sum) < 1e-15);

  // delta_f * tau1 = 0.5: tau1 = 1 / (2 * 15 kHz)
  ChannelRealization two;
  two.sample_times = {0.0};
  two.tap_delays_ns = {0.0, 1e9 / (2.0 * 15e3)};
  const cplx a0{0.7, 0.1}, a1{0.7, 0.1};
  two.gains = ComplexGrid(1, 2, {a0, a1});
  CHECK(std::abs(frequency_response(two, 15e3, 1, 0) - (a0 - a1)) < 1e-12);
}

TEST_CASE("frequency response obeys the triangle inequality and matches the grid") {
  RngStream rng(9);
  const auto d = DopplerSpec::from_speed(30.0, 3.5e9);
  std::vector<double> t{0.0, 1e-4, 2e-4};
  for (auto m : kAllTdlModels) {
    const auto r = generate_tap_gains(tdl_profile(m), 300.0, d, t, rng);
    const auto grid = frequency_response_grid(r, 15e3, 256);
    for (std::size_t i = 0; i < r.symbols(); ++i) {
      double bound = 0.0;
      for (std::size_t k = 0; k < r.taps(); ++k) bound += std::abs(r.gains(i, k));
      for (std::size_t k = 0; k < 256; ++k) {
        const cplx h = frequency_response(r, 15e3, k, i);
        CHECK(std::abs(h) <= bound + 1e-12);
        CHECK(std::abs(grid(i, k) - h) < 1e-12);
      }
    }
  }
}

TEST_CASE("quantize_delays rounds to the sample grid") {
  ChannelRealization r;
  r.tap_delays_ns = {0.0, 40.0, 70.0};
  r.sample_times = {0.0};
  r.gains = ComplexGrid(1, 3);
  const auto q = quantize_delays(r, 32.552083333e-9);
  CHECK(q.tap_delays_ns[0] == 0.0);
  CHECK(q.tap_delays_ns[1] == doctest::Approx(32.552083333));
  CHECK(q.tap_delays_ns[2] == doctest::Approx(65.104166666));
  CHECK_THROWS_AS(quantize_delays(r, 0.0), InvalidArgument);
}
