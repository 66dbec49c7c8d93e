// SPDX-License-Identifier: Apache-2.0
//
// Shared fixtures for the test suites: reproducible random matrices and a
// few brute-force oracles kept independent of the library's fast paths.

#pragma once

#include "isacwave/rng.hpp"
#include "isacwave/types.hpp"
#include "isacwave/waveform.hpp"

#include <cmath>

namespace testutil {

using isacwave::CMat;
using isacwave::Complex;
using isacwave::CVec;

inline CMat random_cmat(int rows, int cols, uint64_t seed) {
    isacwave::SplitMix64 rng(seed);
    CMat m(rows, cols);
    for (int j = 0; j < cols; ++j) {
        for (int i = 0; i < rows; ++i) {
            m(i, j) = Complex(2.0 * rng.next_double() - 1.0, 2.0 * rng.next_double() - 1.0);
        }
    }
    return m;
}

inline CVec random_cvec(int n, uint64_t seed) {
    return random_cmat(n, 1, seed).col(0);
}

inline double max_abs_diff(const CMat& a, const CMat& b) {
    return (a - b).cwiseAbs().maxCoeff();
}

// Direct evaluation of the zero-padded unitary inverse DFT,
// z[n] = (1/sqrt(N)) sum_{i<M} x[i] exp(+j 2 pi i n / N).
inline CMat delay_time_oracle(const CMat& x, int n_fft) {
    CMat z(n_fft, x.cols());
    for (int k = 0; k < x.cols(); ++k) {
        for (int n = 0; n < n_fft; ++n) {
            Complex acc(0.0, 0.0);
            for (int i = 0; i < x.rows(); ++i) {
                const double ang = isacwave::kTwoPi * i * n / static_cast<double>(n_fft);
                acc += x(i, k) * Complex(std::cos(ang), std::sin(ang));
            }
            z(n, k) = acc / std::sqrt(static_cast<double>(n_fft));
        }
    }
    return z;
}

} // namespace testutil
