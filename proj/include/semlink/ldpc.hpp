// SPDX-License-Identifier: Apache-2.0
//
// Regular Gallager-style LDPC code with systematic encoding and
// sum-product (belief propagation) decoding.

#ifndef SEMLINK_LDPC_HPP
#define SEMLINK_LDPC_HPP

#include <cstdint>
#include <ostream>
#include <span>
#include <vector>

namespace semlink {

struct LdpcDecodeResult {
  std::vector<std::uint8_t> message;   // k bits
  std::vector<std::uint8_t> codeword;  // n bits, hard decision
  bool converged = false;
  int iterations = 0;
};

class LdpcCode {
 public:
  static constexpr std::uint64_t kDefaultSeed = 0x1d9c2024ULL;

  /// Random (col_weight, row_weight)-regular parity-check matrix from a
  /// fixed-seed socket permutation, with parallel edges removed and
  /// length-4 cycles broken where a swap allows it.
  static LdpcCode regular(std::size_t n = 1024, int col_weight = 3, int row_weight = 6,
                          std::uint64_t seed = kDefaultSeed);

  /// Shared rate-1/2 (3,6) code of length 1024.
  static const LdpcCode& standard();

  std::size_t n() const noexcept { return n_; }
  std::size_t k() const noexcept { return k_; }
  std::size_t checks() const noexcept { return m_; }
  double rate() const noexcept { return static_cast<double>(k_) / static_cast<double>(n_); }

  /// Message bits appear verbatim at information_positions().
  std::vector<std::uint8_t> encode(std::span<const std::uint8_t> message) const;
  /// LLRs are log P(0)/P(1); infinities are allowed.
  LdpcDecodeResult decode(std::span<const double> llr, int max_iters = 50) const;

  bool satisfies_parity(std::span<const std::uint8_t> codeword) const;
  const std::vector<std::size_t>& information_positions() const noexcept { return info_pos_; }
  std::size_t four_cycles() const;

  /// "# ldpc <rows> <cols> <nnz>" header, then one "row col" pair per
  /// nonzero, zero-based, sorted by row.
  void write_triplets(std::ostream& os) const;

 private:
  LdpcCode() = default;
  void build_encoder();

  std::size_t n_ = 0, m_ = 0, k_ = 0;
  // checks -> edges (CSR)
  std::vector<std::size_t> check_start_;
  std::vector<std::uint32_t> edge_var_;
  // variables -> edges
  std::vector<std::size_t> var_start_;
  std::vector<std::uint32_t> var_edges_;

  // encoder: for each pivot row, its pivot column and dense row over free columns
  std::size_t words_ = 0;
  std::vector<std::size_t> pivot_col_;
  std::vector<std::uint64_t> rref_;  // m_ rows x words_
  std::vector<std::size_t> info_pos_;
};

}  // namespace semlink

#endif  // SEMLINK_LDPC_HPP
