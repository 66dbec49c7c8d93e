// SPDX-License-Identifier: Apache-2.0

#include "isacwave/fft.hpp"

#include <cmath>
#include <memory>
#include <unordered_map>
#include <vector>

namespace isacwave {

namespace {

bool is_pow2(std::size_t n) {
    return n != 0 && (n & (n - 1)) == 0;
}

// Twiddle tables for one power-of-two size, plus the Bluestein chirp and
// its padded spectrum when the size is not a power of two.
struct Plan {
    std::size_t n = 0;
    std::vector<Complex> twiddles; // e^{-j 2 pi k / n}, k = 0..n/2-1 (pow2 path)

    // Bluestein state (non-pow2 sizes).
    std::size_t conv_n = 0;              // pow2 convolution size >= 2n-1
    std::vector<Complex> chirp;          // e^{-j pi k^2 / n}
    std::vector<Complex> kernel_fft;     // fft_u of conj(chirp) wrapped into conv_n
};

void fill_pow2_twiddles(Plan& p) {
    p.twiddles.resize(p.n / 2);
    for (std::size_t k = 0; k < p.n / 2; ++k) {
        double ang = -kTwoPi * static_cast<double>(k) / static_cast<double>(p.n);
        p.twiddles[k] = Complex(std::cos(ang), std::sin(ang));
    }
}

void pow2_transform(Complex* a, std::size_t n, const Plan& plan, bool inverse) {
    // Bit-reversal permutation.
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) {
            j ^= bit;
        }
        j ^= bit;
        if (i < j) {
            std::swap(a[i], a[j]);
        }
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        std::size_t stride = n / len;
        for (std::size_t i = 0; i < n; i += len) {
            for (std::size_t k = 0; k < len / 2; ++k) {
                Complex w = plan.twiddles[k * stride];
                if (inverse) {
                    w = std::conj(w);
                }
                Complex u = a[i + k];
                Complex v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
            }
        }
    }
}

const Plan& plan_for(std::size_t n);

void fill_bluestein(Plan& p) {
    const std::size_t n = p.n;
    std::size_t cn = 1;
    while (cn < 2 * n - 1) {
        cn <<= 1;
    }
    p.conv_n = cn;
    p.chirp.resize(n);
    const auto two_n = static_cast<long long>(2 * n);
    for (std::size_t k = 0; k < n; ++k) {
        // k^2 reduced mod 2n keeps the phase argument small and exact.
        long long kk = static_cast<long long>(k);
        long long q = (kk * kk) % two_n;
        double ang = -std::numbers::pi * static_cast<double>(q) / static_cast<double>(n);
        p.chirp[k] = Complex(std::cos(ang), std::sin(ang));
    }
    // Kernel b[k] = conj(chirp[|k|]) placed circularly at offsets 0..n-1 and
    // conv_n-(n-1)..conv_n-1.
    std::vector<Complex> b(cn, Complex(0.0, 0.0));
    for (std::size_t k = 0; k < n; ++k) {
        b[k] = std::conj(p.chirp[k]);
        if (k != 0) {
            b[cn - k] = std::conj(p.chirp[k]);
        }
    }
    const Plan& cp = plan_for(cn);
    pow2_transform(b.data(), cn, cp, false);
    p.kernel_fft = std::move(b);
}

const Plan& plan_for(std::size_t n) {
    thread_local std::unordered_map<std::size_t, std::unique_ptr<Plan>> cache;
    auto it = cache.find(n);
    if (it != cache.end()) {
        return *it->second;
    }
    auto plan = std::make_unique<Plan>();
    plan->n = n;
    if (is_pow2(n)) {
        fill_pow2_twiddles(*plan);
    } else {
        fill_bluestein(*plan);
    }
    const Plan& ref = *plan;
    cache.emplace(n, std::move(plan));
    return ref;
}

void bluestein_transform(Complex* data, std::size_t n, const Plan& plan) {
    const std::size_t cn = plan.conv_n;
    const Plan& cp = plan_for(cn);
    std::vector<Complex> a(cn, Complex(0.0, 0.0));
    for (std::size_t k = 0; k < n; ++k) {
        a[k] = data[k] * plan.chirp[k];
    }
    pow2_transform(a.data(), cn, cp, false);
    for (std::size_t k = 0; k < cn; ++k) {
        a[k] *= plan.kernel_fft[k];
    }
    pow2_transform(a.data(), cn, cp, true);
    const double scale = 1.0 / static_cast<double>(cn);
    for (std::size_t k = 0; k < n; ++k) {
        data[k] = a[k] * scale * plan.chirp[k];
    }
}

} // namespace

void fft_u_inplace(Complex* data, std::size_t n) {
    if (n <= 1) {
        return;
    }
    const Plan& plan = plan_for(n);
    if (is_pow2(n)) {
        pow2_transform(data, n, plan, false);
    } else {
        bluestein_transform(data, n, plan);
    }
}

void ifft_u_inplace(Complex* data, std::size_t n) {
    // Unnormalized inverse via conjugation: idft(x) = conj(dft(conj(x))).
    for (std::size_t i = 0; i < n; ++i) {
        data[i] = std::conj(data[i]);
    }
    fft_u_inplace(data, n);
    for (std::size_t i = 0; i < n; ++i) {
        data[i] = std::conj(data[i]);
    }
}

CVec fft_u(const CVec& x) {
    CVec y = x;
    fft_u_inplace(y.data(), static_cast<std::size_t>(y.size()));
    return y;
}

CVec ifft_u(const CVec& x) {
    CVec y = x;
    ifft_u_inplace(y.data(), static_cast<std::size_t>(y.size()));
    return y;
}

} // namespace isacwave
