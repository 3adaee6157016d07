// SPDX-License-Identifier: Apache-2.0

#include "semlink/ldpc.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "semlink/errors.hpp"
#include "semlink/rng.hpp"

namespace semlink {

namespace {

using Rows = std::vector<std::vector<std::uint32_t>>;

bool has_duplicate(const std::vector<std::uint32_t>& row) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    for (std::size_t j = i + 1; j < row.size(); ++j) {
      if (row[i] == row[j]) return true;
    }
  }
  return false;
}

// Length-4 cycles through rows a and b (the pair a-b counted once).
std::size_t local_cycles(const Rows& rows, const Rows& var_rows, std::size_t a, std::size_t b) {
  std::size_t total = 0;
  auto count_for = [&](std::size_t r, std::size_t skip) {
    std::vector<std::pair<std::uint32_t, int>> overlap;
    for (auto v : rows[r]) {
      for (auto r2 : var_rows[v]) {
        if (r2 == r || r2 == skip) continue;
        auto it = std::find_if(overlap.begin(), overlap.end(),
                               [&](const auto& p) { return p.first == r2; });
        if (it == overlap.end()) {
          overlap.emplace_back(r2, 1);
        } else {
          ++it->second;
        }
      }
    }
    std::size_t c = 0;
    for (const auto& [r2, k] : overlap) c += static_cast<std::size_t>(k * (k - 1) / 2);
    return c;
  };
  total += count_for(a, a == b ? a : static_cast<std::size_t>(-1));
  if (b != a) total += count_for(b, a);
  return total;
}

void swap_sockets(Rows& rows, Rows& var_rows, std::size_t r1, std::size_t p1, std::size_t r2,
                  std::size_t p2) {
  const auto v1 = rows[r1][p1];
  const auto v2 = rows[r2][p2];
  if (v1 == v2) return;
  std::swap(rows[r1][p1], rows[r2][p2]);
  *std::find(var_rows[v1].begin(), var_rows[v1].end(), static_cast<std::uint32_t>(r1)) =
      static_cast<std::uint32_t>(r2);
  *std::find(var_rows[v2].begin(), var_rows[v2].end(), static_cast<std::uint32_t>(r2)) =
      static_cast<std::uint32_t>(r1);
}

}  // namespace

LdpcCode LdpcCode::regular(std::size_t n, int col_weight, int row_weight, std::uint64_t seed) {
  if (col_weight < 2 || row_weight <= col_weight || n == 0 ||
      (n * static_cast<std::size_t>(col_weight)) % static_cast<std::size_t>(row_weight) != 0) {
    throw InvalidArgument("LdpcCode::regular: inconsistent dimensions");
  }
  const auto wc = static_cast<std::size_t>(col_weight);
  const auto wr = static_cast<std::size_t>(row_weight);
  const std::size_t m = n * wc / wr;
  RngStream rng(seed);

  std::vector<std::uint32_t> sockets;
  sockets.reserve(n * wc);
  for (std::size_t v = 0; v < n; ++v) {
    for (std::size_t j = 0; j < wc; ++j) sockets.push_back(static_cast<std::uint32_t>(v));
  }
  std::shuffle(sockets.begin(), sockets.end(), rng);

  Rows rows(m);
  Rows var_rows(n);
  for (std::size_t r = 0; r < m; ++r) {
    rows[r].assign(sockets.begin() + static_cast<std::ptrdiff_t>(r * wr),
                   sockets.begin() + static_cast<std::ptrdiff_t>((r + 1) * wr));
    for (auto v : rows[r]) var_rows[v].push_back(static_cast<std::uint32_t>(r));
  }

  auto random_socket = [&](std::size_t avoid_row) {
    std::size_t r2;
    do {
      r2 = static_cast<std::size_t>(rng() % m);
    } while (r2 == avoid_row);
    return std::make_pair(r2, static_cast<std::size_t>(rng() % wr));
  };

  // parallel edges
  for (std::size_t r = 0; r < m; ++r) {
    while (has_duplicate(rows[r])) {
      std::size_t p = 0;
      for (std::size_t i = 0; i < wr && p == 0; ++i) {
        for (std::size_t j = i + 1; j < wr; ++j) {
          if (rows[r][i] == rows[r][j]) {
            p = j;
            break;
          }
        }
      }
      auto [r2, p2] = random_socket(r);
      swap_sockets(rows, var_rows, r, p, r2, p2);
      if (has_duplicate(rows[r2])) swap_sockets(rows, var_rows, r, p, r2, p2);
    }
  }

  // length-4 cycles: greedy swaps that never increase the local count
  for (int pass = 0; pass < 20; ++pass) {
    bool any = false;
    for (std::size_t r = 0; r < m; ++r) {
      for (int attempt = 0; attempt < 50 && local_cycles(rows, var_rows, r, r) > 0; ++attempt) {
        any = true;
        const std::size_t p = static_cast<std::size_t>(rng() % wr);
        auto [r2, p2] = random_socket(r);
        const std::size_t before = local_cycles(rows, var_rows, r, r2);
        swap_sockets(rows, var_rows, r, p, r2, p2);
        if (has_duplicate(rows[r]) || has_duplicate(rows[r2]) ||
            local_cycles(rows, var_rows, r, r2) >= before) {
          swap_sockets(rows, var_rows, r, p, r2, p2);
        }
      }
    }
    if (!any) break;
  }

  LdpcCode code;
  code.n_ = n;
  code.m_ = m;
  code.k_ = n - m;
  code.check_start_.push_back(0);
  for (auto& row : rows) {
    std::sort(row.begin(), row.end());
    code.edge_var_.insert(code.edge_var_.end(), row.begin(), row.end());
    code.check_start_.push_back(code.edge_var_.size());
  }
  std::vector<std::vector<std::uint32_t>> var_edge_lists(n);
  for (std::size_t e = 0; e < code.edge_var_.size(); ++e) {
    var_edge_lists[code.edge_var_[e]].push_back(static_cast<std::uint32_t>(e));
  }
  code.var_start_.push_back(0);
  for (const auto& l : var_edge_lists) {
    code.var_edges_.insert(code.var_edges_.end(), l.begin(), l.end());
    code.var_start_.push_back(code.var_edges_.size());
  }
  code.build_encoder();
  return code;
}

const LdpcCode& LdpcCode::standard() {
  static const LdpcCode code = regular();
  return code;
}

void LdpcCode::build_encoder() {
  words_ = (n_ + 63) / 64;
  rref_.assign(m_ * words_, 0);
  for (std::size_t c = 0; c < m_; ++c) {
    for (std::size_t e = check_start_[c]; e < check_start_[c + 1]; ++e) {
      const auto v = edge_var_[e];
      rref_[c * words_ + v / 64] |= std::uint64_t{1} << (v % 64);
    }
  }
  auto row = [&](std::size_t r) { return rref_.data() + r * words_; };

  // Gauss-Jordan over GF(2)
  std::size_t rank = 0;
  std::vector<bool> is_pivot(n_, false);
  for (std::size_t col = 0; col < n_ && rank < m_; ++col) {
    const std::size_t w = col / 64;
    const std::uint64_t bit = std::uint64_t{1} << (col % 64);
    std::size_t piv = rank;
    while (piv < m_ && !(row(piv)[w] & bit)) ++piv;
    if (piv == m_) continue;
    if (piv != rank) std::swap_ranges(row(piv), row(piv) + words_, row(rank));
    for (std::size_t r = 0; r < m_; ++r) {
      if (r != rank && (row(r)[w] & bit)) {
        for (std::size_t i = 0; i < words_; ++i) row(r)[i] ^= row(rank)[i];
      }
    }
    pivot_col_.push_back(col);
    is_pivot[col] = true;
    ++rank;
  }
  rref_.resize(rank * words_);

  // the first k free columns carry the message; any extra free columns
  // (rank-deficient H) stay zero
  info_pos_.clear();
  for (std::size_t col = 0; col < n_ && info_pos_.size() < k_; ++col) {
    if (!is_pivot[col]) info_pos_.push_back(col);
  }
}

std::vector<std::uint8_t> LdpcCode::encode(std::span<const std::uint8_t> message) const {
  if (message.size() != k_) throw InvalidArgument("LdpcCode::encode: message length must equal k");
  std::vector<std::uint64_t> x(words_, 0);
  for (std::size_t i = 0; i < k_; ++i) {
    if (message[i] & 1U) x[info_pos_[i] / 64] |= std::uint64_t{1} << (info_pos_[i] % 64);
  }
  for (std::size_t r = 0; r < pivot_col_.size(); ++r) {
    const std::uint64_t* h = rref_.data() + r * words_;
    int parity = 0;
    for (std::size_t i = 0; i < words_; ++i) parity ^= std::popcount(h[i] & x[i]) & 1;
    if (parity) x[pivot_col_[r] / 64] |= std::uint64_t{1} << (pivot_col_[r] % 64);
  }
  std::vector<std::uint8_t> cw(n_);
  for (std::size_t v = 0; v < n_; ++v) cw[v] = static_cast<std::uint8_t>((x[v / 64] >> (v % 64)) & 1U);
  return cw;
}

bool LdpcCode::satisfies_parity(std::span<const std::uint8_t> codeword) const {
  if (codeword.size() != n_) throw InvalidArgument("satisfies_parity: wrong codeword length");
  for (std::size_t c = 0; c < m_; ++c) {
    unsigned s = 0;
    for (std::size_t e = check_start_[c]; e < check_start_[c + 1]; ++e) s ^= codeword[edge_var_[e]] & 1U;
    if (s) return false;
  }
  return true;
}

LdpcDecodeResult LdpcCode::decode(std::span<const double> llr, int max_iters) const {
  if (llr.size() != n_) throw InvalidArgument("LdpcCode::decode: wrong LLR length");
  if (max_iters < 1) throw InvalidArgument("LdpcCode::decode: max_iters must be positive");
  // messages in single precision; the clamps keep atanh finite
  constexpr float kMaxProduct = 1.0f - 1e-7f;
  constexpr float kMaxLlr = 30.0f;

  const std::size_t edges = edge_var_.size();
  std::vector<float> v2c(edges), c2v(edges, 0.0f);
  for (std::size_t e = 0; e < edges; ++e) {
    v2c[e] = static_cast<float>(std::clamp(llr[edge_var_[e]], -1e30, 1e30));
  }

  LdpcDecodeResult res;
  res.codeword.assign(n_, 0);
  for (std::size_t v = 0; v < n_; ++v) res.codeword[v] = llr[v] < 0.0 ? 1 : 0;

  std::vector<float> t, prefix;
  for (int iter = 1; iter <= max_iters; ++iter) {
    for (std::size_t c = 0; c < m_; ++c) {
      const std::size_t s = check_start_[c];
      const std::size_t deg = check_start_[c + 1] - s;
      t.resize(deg);
      prefix.resize(deg + 1);
      for (std::size_t j = 0; j < deg; ++j) {
        // tanh(x/2) = (e^x - 1) / (e^x + 1)
        const float e = std::exp(std::clamp(v2c[s + j], -kMaxLlr, kMaxLlr));
        t[j] = (e - 1.0f) / (e + 1.0f);
      }
      prefix[0] = 1.0f;
      for (std::size_t j = 0; j < deg; ++j) prefix[j + 1] = prefix[j] * t[j];
      float suffix = 1.0f;
      for (std::size_t j = deg; j-- > 0;) {
        const float p = std::clamp(prefix[j] * suffix, -kMaxProduct, kMaxProduct);
        c2v[s + j] = std::log((1.0f + p) / (1.0f - p));
        suffix *= t[j];
      }
    }
    for (std::size_t v = 0; v < n_; ++v) {
      double total = llr[v];
      for (std::size_t i = var_start_[v]; i < var_start_[v + 1]; ++i) total += c2v[var_edges_[i]];
      const float total_f = static_cast<float>(std::clamp(total, -1e30, 1e30));
      for (std::size_t i = var_start_[v]; i < var_start_[v + 1]; ++i) {
        const auto e = var_edges_[i];
        v2c[e] = total_f - c2v[e];
      }
      res.codeword[v] = total < 0.0 ? 1 : 0;
    }
    res.iterations = iter;
    if (satisfies_parity(res.codeword)) {
      res.converged = true;
      break;
    }
  }

  res.message.resize(k_);
  for (std::size_t i = 0; i < k_; ++i) res.message[i] = res.codeword[info_pos_[i]];
  return res;
}

std::size_t LdpcCode::four_cycles() const {
  std::size_t total = 0;
  std::vector<int> overlap(m_, 0);
  std::vector<std::size_t> touched;
  for (std::size_t c = 0; c < m_; ++c) {
    touched.clear();
    for (std::size_t e = check_start_[c]; e < check_start_[c + 1]; ++e) {
      const auto v = edge_var_[e];
      for (std::size_t i = var_start_[v]; i < var_start_[v + 1]; ++i) {
        const auto e2 = var_edges_[i];
        const auto c2 = static_cast<std::size_t>(
            std::upper_bound(check_start_.begin(), check_start_.end(), e2) -
            check_start_.begin() - 1);
        if (c2 <= c) continue;
        if (overlap[c2]++ == 0) touched.push_back(c2);
      }
    }
    for (auto c2 : touched) {
      total += static_cast<std::size_t>(overlap[c2] * (overlap[c2] - 1) / 2);
      overlap[c2] = 0;
    }
  }
  return total;
}

void LdpcCode::write_triplets(std::ostream& os) const {
  os << "# ldpc " << m_ << ' ' << n_ << ' ' << edge_var_.size() << '\n';
  for (std::size_t c = 0; c < m_; ++c) {
    for (std::size_t e = check_start_[c]; e < check_start_[c + 1]; ++e) {
      os << c << ' ' << edge_var_[e] << '\n';
    }
  }
}

}  // namespace semlink
