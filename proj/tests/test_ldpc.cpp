// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "semlink/errors.hpp"
#include "semlink/ldpc.hpp"
#include "semlink/rng.hpp"

using namespace semlink;

namespace {

std::vector<std::uint8_t> random_bits(RngStream& rng, std::size_t n) {
  std::vector<std::uint8_t> b(n);
  for (auto& x : b) x = static_cast<std::uint8_t>(rng() & 1U);
  return b;
}

struct Triplets {
  std::size_t rows = 0, cols = 0, nnz = 0;
  std::vector<std::pair<std::size_t, std::size_t>> entries;
};

Triplets parse_triplets(const LdpcCode& code) {
  std::stringstream ss;
  code.write_triplets(ss);
  Triplets t;
  std::string hash, tag;
  ss >> hash >> tag >> t.rows >> t.cols >> t.nnz;
  REQUIRE(hash == "#");
  REQUIRE(tag == "ldpc");
  std::size_t r = 0, c = 0;
  while (ss >> r >> c) t.entries.emplace_back(r, c);
  return t;
}

// BPSK over AWGN at the given Eb/N0; returns (bit errors, bits).
std::pair<std::size_t, std::size_t> bpsk_run(const LdpcCode& code, double ebn0_db, int words,
                                             RngStream& rng) {
  const double sigma2 = 1.0 / (2.0 * code.rate() * std::pow(10.0, ebn0_db / 10.0));
  const double sigma = std::sqrt(sigma2);
  std::size_t errors = 0;
  std::vector<double> llr(code.n());
  for (int w = 0; w < words; ++w) {
    const auto msg = random_bits(rng, code.k());
    const auto cw = code.encode(msg);
    for (std::size_t i = 0; i < code.n(); ++i) {
      const double y = (cw[i] ? -1.0 : 1.0) + sigma * rng.normal();
      llr[i] = 2.0 * y / sigma2;
    }
    const auto res = code.decode(llr);
    for (std::size_t i = 0; i < code.k(); ++i) errors += res.message[i] != msg[i];
  }
  return {errors, static_cast<std::size_t>(words) * code.k()};
}

}  // namespace

TEST_CASE("standard code dimensions and regularity") {
  const auto& code = LdpcCode::standard();
  CHECK(code.n() == 1024);
  CHECK(code.checks() == 512);
  CHECK(code.k() == 512);
  CHECK(code.rate() == 0.5);

  const auto t = parse_triplets(code);
  CHECK(t.rows == 512);
  CHECK(t.cols == 1024);
  CHECK(t.nnz == 3 * 1024);
  REQUIRE(t.entries.size() == t.nnz);
  std::vector<int> row_w(t.rows), col_w(t.cols);
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (std::size_t i = 0; i < t.entries.size(); ++i) {
    const auto [r, c] = t.entries[i];
    REQUIRE(r < t.rows);
    REQUIRE(c < t.cols);
    ++row_w[r];
    ++col_w[c];
    CHECK(seen.insert(t.entries[i]).second);
    if (i > 0) CHECK(t.entries[i - 1].first <= r);
  }
  for (int w : row_w) CHECK(w == 6);
  for (int w : col_w) CHECK(w == 3);
}

TEST_CASE("no length-4 cycles") {
  const auto& code = LdpcCode::standard();
  CHECK(code.four_cycles() == 0);

  // independent count from the triplets: two rows sharing two columns
  const auto t = parse_triplets(code);
  std::vector<std::vector<std::size_t>> rows(t.rows);
  for (const auto& [r, c] : t.entries) rows[r].push_back(c);
  std::size_t shared_pairs = 0;
  for (std::size_t a = 0; a < rows.size(); ++a) {
    const std::set<std::size_t> sa(rows[a].begin(), rows[a].end());
    for (std::size_t b = a + 1; b < rows.size(); ++b) {
      int common = 0;
      for (auto c : rows[b]) common += static_cast<int>(sa.count(c));
      if (common >= 2) ++shared_pairs;
    }
  }
  CHECK(shared_pairs == 0);
}

TEST_CASE("construction is deterministic in the seed") {
  const auto a = LdpcCode::regular(96, 3, 6, 5);
  const auto b = LdpcCode::regular(96, 3, 6, 5);
  const auto c = LdpcCode::regular(96, 3, 6, 6);
  std::stringstream sa, sb, sc;
  a.write_triplets(sa);
  b.write_triplets(sb);
  c.write_triplets(sc);
  CHECK(sa.str() == sb.str());
  CHECK(sa.str() != sc.str());
  CHECK_THROWS_AS(LdpcCode::regular(101, 3, 6), InvalidArgument);
}

TEST_CASE("all-zero message encodes to a valid codeword") {
  const auto& code = LdpcCode::standard();
  const auto cw = code.encode(std::vector<std::uint8_t>(code.k(), 0));
  CHECK(cw == std::vector<std::uint8_t>(code.n(), 0));
  CHECK(code.satisfies_parity(cw));
}

TEST_CASE("random messages encode to valid systematic codewords") {
  const auto& code = LdpcCode::standard();
  RngStream rng(1);
  const auto& info = code.information_positions();
  REQUIRE(info.size() == code.k());
  for (int rep = 0; rep < 50; ++rep) {
    const auto msg = random_bits(rng, code.k());
    const auto cw = code.encode(msg);
    CHECK(code.satisfies_parity(cw));
    for (std::size_t i = 0; i < code.k(); ++i) CHECK(cw[info[i]] == msg[i]);
    auto broken = cw;
    broken[rep] ^= 1U;
    CHECK_FALSE(code.satisfies_parity(broken));
  }
  CHECK_THROWS_AS(code.encode(std::vector<std::uint8_t>(code.k() - 1)), InvalidArgument);
}

TEST_CASE("decoding infinite correct LLRs returns the message") {
  const auto& code = LdpcCode::standard();
  RngStream rng(2);
  const double inf = std::numeric_limits<double>::infinity();
  for (int rep = 0; rep < 5; ++rep) {
    const auto msg = random_bits(rng, code.k());
    const auto cw = code.encode(msg);
    std::vector<double> llr(code.n());
    for (std::size_t i = 0; i < code.n(); ++i) llr[i] = cw[i] ? -inf : inf;
    const auto res = code.decode(llr);
    CHECK(res.converged);
    CHECK(res.message == msg);
    CHECK(res.codeword == cw);
  }
  CHECK_THROWS_AS(code.decode(std::vector<double>(10)), InvalidArgument);
}

TEST_CASE("decoder corrects flipped bits") {
  const auto& code = LdpcCode::standard();
  RngStream rng(3);
  const auto msg = random_bits(rng, code.k());
  const auto cw = code.encode(msg);
  std::vector<double> llr(code.n());
  for (std::size_t i = 0; i < code.n(); ++i) llr[i] = cw[i] ? -4.0 : 4.0;
  for (std::size_t i = 0; i < code.n(); i += 64) llr[i] = -llr[i];  // 16 wrong bits
  const auto res = code.decode(llr);
  CHECK(res.converged);
  CHECK(res.message == msg);
}

TEST_CASE("non-convergence is flagged") {
  const auto& code = LdpcCode::standard();
  RngStream rng(4);
  std::vector<double> llr(code.n());
  for (auto& x : llr) x = 0.5 * rng.normal();
  const auto res = code.decode(llr, 5);
  CHECK(res.iterations <= 5);
  CHECK(res.codeword.size() == code.n());
  CHECK(res.message.size() == code.k());
  if (!res.converged) CHECK_FALSE(code.satisfies_parity(res.codeword));
}

TEST_CASE("BER falls with Eb/N0") {
  const auto& code = LdpcCode::standard();
  RngStream rng(5);
  const auto [e1, n1] = bpsk_run(code, 1.0, 200, rng);
  const auto [e3, n3] = bpsk_run(code, 3.0, 200, rng);
  const double ber1 = static_cast<double>(e1) / static_cast<double>(n1);
  const double ber3 = static_cast<double>(e3) / static_cast<double>(n3);
  CHECK(ber1 > 0.0);
  CHECK(ber3 < ber1 / 100.0);
}
