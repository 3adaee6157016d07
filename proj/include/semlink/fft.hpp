// SPDX-License-Identifier: Apache-2.0

#ifndef SEMLINK_FFT_HPP
#define SEMLINK_FFT_HPP

#include <span>

#include "semlink/complex_grid.hpp"

namespace semlink {

/// Unitary DFT in place: X[k] = L^{-1/2} sum_n x[n] exp(-j 2 pi k n / L).
void fft_unitary(std::span<cplx> data);
/// Unitary inverse DFT in place.
void ifft_unitary(std::span<cplx> data);

}  // namespace semlink

#endif  // SEMLINK_FFT_HPP
