// SPDX-License-Identifier: Apache-2.0
//
// fft.hpp - unnormalized DFT/IDFT of arbitrary length.
//
// fft_u applies  X[m] = sum_n x[n] exp(-j 2 pi m n / N),
// ifft_u applies X[m] = sum_n x[n] exp(+j 2 pi m n / N).
// Neither carries a 1/N or 1/sqrt(N) factor; callers own all scaling.

#pragma once

#include "isacwave/types.hpp"

namespace isacwave {

void fft_u_inplace(Complex* data, std::size_t n);
void ifft_u_inplace(Complex* data, std::size_t n);

CVec fft_u(const CVec& x);
CVec ifft_u(const CVec& x);

} // namespace isacwave
