// SPDX-License-Identifier: Apache-2.0
//
// Pilot-based channel estimation (LS, MMSE), temporal interpolation
// across the slot, and MMSE equalization.

#ifndef SEMLINK_ESTIMATION_HPP
#define SEMLINK_ESTIMATION_HPP

#include <map>
#include <ostream>
#include <span>
#include <string_view>
#include <vector>

#include "semlink/complex_grid.hpp"
#include "semlink/ofdm.hpp"

namespace semlink {

enum class EstimationMethod { Perfect, LS, MMSE };

std::string_view to_string(EstimationMethod m);
EstimationMethod parse_estimation_method(std::string_view s);

struct CsiEstimate {
  ComplexGrid h;  // all slot symbols x l_fft
  EstimationMethod method = EstimationMethod::Perfect;
  std::vector<std::size_t> pilot_positions;

  /// Rows of `h` at the given slot positions.
  ComplexGrid rows_at(std::span<const std::size_t> positions) const;
};

/// H_LS[k] = rx[k] / tx[k]. Throws InvalidArgument on a zero pilot.
CVec ls_estimate(std::span<const cplx> rx_pilot, std::span<const cplx> tx_pilot);

inline constexpr std::size_t kMmseWindow = 64;

/// Frequency-domain MMSE smoothing of an LS estimate. The correlation is
/// estimated from the LS estimate itself: lags 0..W-1 are averaged over
/// the band and assembled into a W x W Hermitian Toeplitz R, giving the
/// filter R (R + I/snr)^-1. Each subcarrier is filtered with the window
/// of W subcarriers around it (clamped at the band edges).
CVec mmse_estimate(std::span<const cplx> h_ls, double snr_linear,
                   std::size_t window = kMmseWindow);

/// Expands per-pilot estimates to every slot symbol. Kronecker: linear
/// interpolation in symbol index between the pilots, nearest pilot beyond
/// them. BlockLeading / OnePilot: the mean of the pilot estimates on every
/// symbol.
CsiEstimate interpolate_csi(const std::map<std::size_t, CVec>& pilot_estimates, PilotKind kind,
                            std::size_t total_symbols,
                            EstimationMethod method = EstimationMethod::LS);

/// LS or MMSE estimate for a received frame given the transmitted pilots.
CsiEstimate estimate_channel(const OfdmFrame& received, const ComplexGrid& tx_pilots,
                             PilotKind kind, EstimationMethod method, double snr_linear);

/// T[i,k] = conj(H) rx / (|H|^2 + sigma2); cells with |H|^2 + sigma2 = 0
/// yield 0.
ComplexGrid equalize(const ComplexGrid& rx, const ComplexGrid& h, double sigma2);

/// Mean |est - truth|^2 over the grid.
double estimation_mse(const ComplexGrid& estimate, const ComplexGrid& truth);

struct EstimationMseRecord {
  double snr_db = 0.0;
  std::string method;
  double mse = 0.0;
};

/// CSV with header `snr_db,method,mse`.
void write_estimation_mse_csv(std::ostream& os, std::span<const EstimationMseRecord> records);

void write_csi(std::ostream& os, const CsiEstimate& csi);
CsiEstimate read_csi(std::istream& is);

}  // namespace semlink

#endif  // SEMLINK_ESTIMATION_HPP
