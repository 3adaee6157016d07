// SPDX-License-Identifier: Apache-2.0

#include "semlink/estimation.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "semlink/container.hpp"
#include "semlink/errors.hpp"

namespace semlink {

std::string_view to_string(EstimationMethod m) {
  switch (m) {
    case EstimationMethod::Perfect: return "perfect";
    case EstimationMethod::LS: return "ls";
    case EstimationMethod::MMSE: return "mmse";
  }
  return "?";
}

EstimationMethod parse_estimation_method(std::string_view s) {
  if (s == "perfect") return EstimationMethod::Perfect;
  if (s == "ls") return EstimationMethod::LS;
  if (s == "mmse") return EstimationMethod::MMSE;
  throw InvalidArgument("unknown estimation method: " + std::string(s));
}

ComplexGrid CsiEstimate::rows_at(std::span<const std::size_t> positions) const {
  ComplexGrid out(positions.size(), h.cols());
  for (std::size_t j = 0; j < positions.size(); ++j) {
    if (positions[j] >= h.rows()) throw InvalidArgument("CsiEstimate: row out of range");
    const auto src = h.row(positions[j]);
    std::copy(src.begin(), src.end(), out.row(j).begin());
  }
  return out;
}

CVec ls_estimate(std::span<const cplx> rx_pilot, std::span<const cplx> tx_pilot) {
  if (rx_pilot.size() != tx_pilot.size()) {
    throw InvalidArgument("ls_estimate: pilot lengths differ");
  }
  CVec h(rx_pilot.size());
  for (std::size_t k = 0; k < h.size(); ++k) {
    if (tx_pilot[k] == cplx{0.0, 0.0}) throw InvalidArgument("ls_estimate: zero pilot symbol");
    h[k] = rx_pilot[k] / tx_pilot[k];
  }
  return h;
}

CVec mmse_estimate(std::span<const cplx> h_ls, double snr_linear, std::size_t window) {
  if (!(snr_linear > 0.0)) throw InvalidArgument("mmse_estimate: SNR must be positive");
  const std::size_t len = h_ls.size();
  if (len == 0) return {};
  const std::size_t w = std::clamp<std::size_t>(window, 1, len);

  // biased lag estimates keep the Toeplitz matrix positive semidefinite
  std::vector<cplx> r(w);
  for (std::size_t d = 0; d < w; ++d) {
    cplx acc{0.0, 0.0};
    for (std::size_t k = 0; k + d < len; ++k) acc += h_ls[k + d] * std::conj(h_ls[k]);
    r[d] = acc / static_cast<double>(len);
  }

  const auto n = static_cast<Eigen::Index>(w);
  Eigen::MatrixXcd rhh(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      rhh(i, j) = i >= j ? r[static_cast<std::size_t>(i - j)]
                         : std::conj(r[static_cast<std::size_t>(j - i)]);
    }
  }
  Eigen::MatrixXcd reg = rhh;
  reg.diagonal().array() += 1.0 / snr_linear;
  Eigen::LLT<Eigen::MatrixXcd> llt(reg);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("mmse_estimate: regularized correlation matrix is not positive definite");
  }
  // R and R + cI commute, so R (R + cI)^-1 = (R + cI)^-1 R
  const Eigen::MatrixXcd filter = llt.solve(rhh);
  if (!filter.allFinite()) throw NumericalError("mmse_estimate: non-finite filter");

  CVec out(len);
  const std::size_t half = w / 2;
  for (std::size_t k = 0; k < len; ++k) {
    const std::size_t start = std::min(k > half ? k - half : 0, len - w);
    const auto row = static_cast<Eigen::Index>(k - start);
    cplx acc{0.0, 0.0};
    for (std::size_t j = 0; j < w; ++j) {
      acc += filter(row, static_cast<Eigen::Index>(j)) * h_ls[start + j];
    }
    out[k] = acc;
  }
  return out;
}

CsiEstimate interpolate_csi(const std::map<std::size_t, CVec>& pilot_estimates, PilotKind kind,
                            std::size_t total_symbols, EstimationMethod method) {
  if (pilot_estimates.empty()) throw InvalidArgument("interpolate_csi: no pilot estimates");
  const std::size_t width = pilot_estimates.begin()->second.size();
  for (const auto& [pos, v] : pilot_estimates) {
    if (v.size() != width) throw InvalidArgument("interpolate_csi: estimates differ in length");
    if (pos >= total_symbols) throw InvalidArgument("interpolate_csi: pilot outside the slot");
  }

  CsiEstimate csi;
  csi.method = method;
  csi.h = ComplexGrid(total_symbols, width);
  for (const auto& kv : pilot_estimates) csi.pilot_positions.push_back(kv.first);

  if (kind == PilotKind::Kronecker && pilot_estimates.size() >= 2) {
    for (std::size_t i = 0; i < total_symbols; ++i) {
      auto hi = pilot_estimates.upper_bound(i);  // first pilot after i
      auto out = csi.h.row(i);
      if (hi == pilot_estimates.begin()) {
        std::copy(hi->second.begin(), hi->second.end(), out.begin());
      } else if (hi == pilot_estimates.end()) {
        const auto& last = std::prev(hi)->second;
        std::copy(last.begin(), last.end(), out.begin());
      } else {
        auto lo = std::prev(hi);
        const double t = static_cast<double>(i - lo->first) /
                         static_cast<double>(hi->first - lo->first);
        for (std::size_t k = 0; k < width; ++k) {
          out[k] = (1.0 - t) * lo->second[k] + t * hi->second[k];
        }
      }
    }
    return csi;
  }

  CVec mean(width);
  for (const auto& kv : pilot_estimates) {
    for (std::size_t k = 0; k < width; ++k) mean[k] += kv.second[k];
  }
  const double inv = 1.0 / static_cast<double>(pilot_estimates.size());
  for (auto& z : mean) z *= inv;
  for (std::size_t i = 0; i < total_symbols; ++i) {
    std::copy(mean.begin(), mean.end(), csi.h.row(i).begin());
  }
  return csi;
}

CsiEstimate estimate_channel(const OfdmFrame& received, const ComplexGrid& tx_pilots,
                             PilotKind kind, EstimationMethod method, double snr_linear) {
  if (method == EstimationMethod::Perfect) {
    throw InvalidArgument("estimate_channel: perfect CSI comes from the channel, not the pilots");
  }
  if (!tx_pilots.same_shape(received.pilots)) {
    throw InvalidArgument("estimate_channel: pilot grids differ in shape");
  }
  std::map<std::size_t, CVec> per_pilot;
  for (std::size_t j = 0; j < received.pilot_positions.size(); ++j) {
    CVec h = ls_estimate(received.pilots.row(j), tx_pilots.row(j));
    if (method == EstimationMethod::MMSE) h = mmse_estimate(h, snr_linear);
    per_pilot.emplace(received.pilot_positions[j], std::move(h));
  }
  return interpolate_csi(per_pilot, kind, received.symbols(), method);
}

ComplexGrid equalize(const ComplexGrid& rx, const ComplexGrid& h, double sigma2) {
  if (!rx.same_shape(h)) throw InvalidArgument("equalize: shape mismatch");
  if (sigma2 < 0.0) throw InvalidArgument("equalize: negative noise variance");
  ComplexGrid out(rx.rows(), rx.cols());
  for (std::size_t n = 0; n < rx.size(); ++n) {
    const cplx hh = h.data()[n];
    const double den = std::norm(hh) + sigma2;
    out.data()[n] = den > 0.0 ? std::conj(hh) * rx.data()[n] / den : cplx{0.0, 0.0};
  }
  return out;
}

double estimation_mse(const ComplexGrid& estimate, const ComplexGrid& truth) {
  if (!estimate.same_shape(truth) || truth.empty()) {
    throw InvalidArgument("estimation_mse: shape mismatch");
  }
  double acc = 0.0;
  for (std::size_t n = 0; n < truth.size(); ++n) {
    acc += std::norm(estimate.data()[n] - truth.data()[n]);
  }
  return acc / static_cast<double>(truth.size());
}

void write_estimation_mse_csv(std::ostream& os, std::span<const EstimationMseRecord> records) {
  os << "snr_db,method,mse\n";
  char buf[64];
  for (const auto& r : records) {
    std::snprintf(buf, sizeof buf, "%.17g", r.snr_db);
    os << buf << ',' << r.method << ',';
    std::snprintf(buf, sizeof buf, "%.17g", r.mse);
    os << buf << '\n';
  }
}

void write_csi(std::ostream& os, const CsiEstimate& csi) {
  namespace ct = container;
  ct::write_header(os, {ct::kCsiEstimate, ct::kVersion,
                        {static_cast<std::uint32_t>(csi.h.rows()),
                         static_cast<std::uint32_t>(csi.h.cols()),
                         static_cast<std::uint32_t>(csi.method)}});
  ct::write_u32(os, static_cast<std::uint32_t>(csi.pilot_positions.size()));
  for (auto p : csi.pilot_positions) ct::write_u32(os, static_cast<std::uint32_t>(p));
  ct::write_complex(os, csi.h.data());
}

CsiEstimate read_csi(std::istream& is) {
  namespace ct = container;
  const ct::Header h = ct::read_header(is, ct::kCsiEstimate);
  if (h.dims[2] > 2) throw IoError("read_csi: unknown estimation method");
  CsiEstimate csi;
  csi.method = static_cast<EstimationMethod>(h.dims[2]);
  csi.pilot_positions.resize(ct::read_u32(is));
  for (auto& p : csi.pilot_positions) p = ct::read_u32(is);
  const std::size_t n = std::size_t{h.dims[0]} * h.dims[1];
  csi.h = ComplexGrid(h.dims[0], h.dims[1], ct::read_complex(is, n));
  return csi;
}

}  // namespace semlink
