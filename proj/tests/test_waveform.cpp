// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "isacwave/fft.hpp"
#include "isacwave/waveform.hpp"
#include "test_util.hpp"

#include <cmath>

using namespace isacwave;
using testutil::max_abs_diff;
using testutil::random_cmat;
using testutil::random_cvec;

namespace {

WaveformParams make_params(int m, int k, int n, double alpha = 1.0, double beta = 1.0,
                           int d = 1) {
    WaveformParams p;
    p.M = m;
    p.K = k;
    p.N = n;
    p.D = d;
    p.alpha = alpha;
    p.beta = beta;
    return p;
}

} // namespace

TEST_CASE("unnormalized DFT matches a direct summation oracle") {
    for (int n : {1, 2, 3, 5, 8, 12, 16, 31, 199}) {
        const CVec x = random_cvec(n, 77 + static_cast<uint64_t>(n));
        const CVec fast = fft_u(x);
        for (int m = 0; m < n; ++m) {
            Complex acc(0.0, 0.0);
            for (int i = 0; i < n; ++i) {
                const double ang = -kTwoPi * static_cast<double>((static_cast<long long>(m) * i) % n) /
                                   static_cast<double>(n);
                acc += x(i) * Complex(std::cos(ang), std::sin(ang));
            }
            CHECK(std::abs(fast(m) - acc) < 1e-9 * std::max(1.0, std::abs(acc)));
        }
        // Round trip: ifft_u(fft_u(x)) = N x.
        const CVec back = ifft_u(fast) / static_cast<double>(n);
        CHECK((back - x).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("dft_matrix small cases") {
    const CMat f1 = dft_matrix(1);
    CHECK(std::abs(f1(0, 0) - Complex(1.0, 0.0)) < 1e-15);

    const CMat f2 = dft_matrix(2);
    const double s = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(f2(0, 0) - Complex(s, 0.0)) < 1e-15);
    CHECK(std::abs(f2(0, 1) - Complex(s, 0.0)) < 1e-15);
    CHECK(std::abs(f2(1, 0) - Complex(s, 0.0)) < 1e-15);
    CHECK(std::abs(f2(1, 1) - Complex(-s, 0.0)) < 1e-15);

    const CMat f4 = dft_matrix(4);
    CHECK(max_abs_diff(f4 * f4.adjoint(), CMat::Identity(4, 4)) < 1e-12);
}

TEST_CASE("dft_matrix unitarity up to n = 64") {
    for (int n = 1; n <= 64; ++n) {
        const CMat f = dft_matrix(n);
        CHECK(max_abs_diff(f * f.adjoint(), CMat::Identity(n, n)) < 1e-12);
    }
}

TEST_CASE("ratio_ceil survives inexact binary ratios") {
    CHECK(ratio_ceil(204, 0.3) == 680);
    CHECK(ratio_ceil(204, 0.5) == 408);
    CHECK(ratio_ceil(204, 1.0) == 204);
    CHECK(ratio_ceil(7, 0.4) == 18); // 17.5 rounds up
}

TEST_CASE("build_preprocessor follows the waveform table") {
    SUBCASE("cp-ofdm is the identity pair") {
        const auto p = make_params(4, 3, 8);
        const Preprocessor pre = build_preprocessor(WaveformKind::CpOfdm, p);
        CHECK(max_abs_diff(pre.A, CMat::Identity(3, 3)) == 0.0);
        CHECK(max_abs_diff(pre.B, CMat::Identity(4, 4)) == 0.0);
        CHECK((pre.c - CVec::Ones(4)).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("otfs spreads with F_K^H and F_M") {
        const auto p = make_params(4, 3, 8);
        const Preprocessor pre = build_preprocessor(WaveformKind::Otfs, p);
        CHECK(max_abs_diff(pre.A, dft_matrix(3).adjoint()) < 1e-15);
        CHECK(max_abs_diff(pre.B, dft_matrix(4)) < 1e-15);
    }
    SUBCASE("ftn truncation keeps the leading DFT rows") {
        const auto p = make_params(4, 2, 8, 0.5);
        const Preprocessor pre = build_preprocessor(WaveformKind::FtnSOfdm, p);
        const CMat f8 = dft_matrix(8);
        CHECK(max_abs_diff(pre.B, f8.topRows(4)) < 1e-15);
        CHECK(max_abs_diff(pre.A, CMat::Identity(2, 2)) == 0.0);
    }
    SUBCASE("ftn with alpha = 1 degenerates into dft-s-ofdm bit for bit") {
        const auto p = make_params(6, 2, 8);
        const Preprocessor ftn = build_preprocessor(WaveformKind::FtnSOfdm, p);
        const Preprocessor dft = build_preprocessor(WaveformKind::DftSOfdm, p);
        CHECK(std::memcmp(ftn.A.data(), dft.A.data(),
                          sizeof(Complex) * static_cast<std::size_t>(ftn.A.size())) == 0);
        CHECK(std::memcmp(ftn.B.data(), dft.B.data(),
                          sizeof(Complex) * static_cast<std::size_t>(ftn.B.size())) == 0);
    }
    SUBCASE("dimension-inconsistent parameters are rejected") {
        auto p = make_params(4, 3, 8, 0.5);
        CHECK_THROWS_AS(build_preprocessor(WaveformKind::CpOfdm, p), ConfigError);
        p = make_params(9, 3, 8);
        CHECK_THROWS_AS(build_preprocessor(WaveformKind::CpOfdm, p), ConfigError);
    }
}

TEST_CASE("synthesize_tf") {
    SUBCASE("cp-ofdm passes the group through") {
        const auto p = make_params(4, 3, 8);
        const Preprocessor pre = build_preprocessor(WaveformKind::CpOfdm, p);
        const CMat s = random_cmat(4, 3, 11);
        CHECK(max_abs_diff(synthesize_tf(s, pre), s) == 0.0);
    }
    SUBCASE("dft-s-ofdm of a unit impulse is the first DFT column") {
        const auto p = make_params(2, 1, 4);
        const Preprocessor pre = build_preprocessor(WaveformKind::DftSOfdm, p);
        CMat s(2, 1);
        s << Complex(1, 0), Complex(0, 0);
        const CMat x = synthesize_tf(s, pre);
        const double v = 1.0 / std::sqrt(2.0);
        CHECK(std::abs(x(0, 0) - Complex(v, 0)) < 1e-15);
        CHECK(std::abs(x(1, 0) - Complex(v, 0)) < 1e-15);
    }
    SUBCASE("otfs equals an independent matrix product") {
        const auto p = make_params(2, 2, 4);
        Preprocessor pre = build_preprocessor(WaveformKind::Otfs, p);
        pre.c = random_cvec(2, 5);
        const CMat s = random_cmat(2, 2, 6);
        const CMat expected =
            CMat(pre.c.asDiagonal()) * dft_matrix(2) * s * dft_matrix(2).adjoint();
        CHECK(max_abs_diff(synthesize_tf(s, pre), expected) < 1e-12);
    }
    SUBCASE("shape mismatch is rejected") {
        const auto p = make_params(4, 3, 8);
        const Preprocessor pre = build_preprocessor(WaveformKind::CpOfdm, p);
        CHECK_THROWS_AS(synthesize_tf(random_cmat(5, 3, 1), pre), ConfigError);
    }
}

TEST_CASE("tf_to_delay_time") {
    SUBCASE("a single DC subcarrier yields a constant envelope") {
        const auto p = make_params(1, 1, 4);
        CMat x(1, 1);
        x(0, 0) = Complex(1, 0);
        const CMat z = tf_to_delay_time(x, p);
        for (int n = 0; n < 4; ++n) {
            CHECK(std::abs(z(n, 0) - Complex(0.5, 0.0)) < 1e-15);
        }
    }
    SUBCASE("an impulse across the full band becomes a flat tone") {
        const int n = 8;
        const auto p = make_params(n, 1, n);
        CMat x = CMat::Zero(n, 1);
        x(0, 0) = Complex(1, 0);
        const CMat z = tf_to_delay_time(x, p);
        const Complex want(1.0 / std::sqrt(static_cast<double>(n)), 0.0);
        for (int i = 0; i < n; ++i) {
            CHECK(std::abs(z(i, 0) - want) < 1e-14);
        }
    }
    SUBCASE("matches the direct summation oracle") {
        const auto p = make_params(3, 2, 8);
        const CMat x = random_cmat(3, 2, 21);
        CHECK(max_abs_diff(tf_to_delay_time(x, p), testutil::delay_time_oracle(x, 8)) < 1e-12);
    }
    SUBCASE("Parseval holds under zero padding") {
        const auto p = make_params(5, 3, 16);
        const CMat x = random_cmat(5, 3, 22);
        const CMat z = tf_to_delay_time(x, p);
        CHECK(std::abs(z.norm() - x.norm()) < 1e-12);
    }
}

TEST_CASE("recover_sequences inverts the synthesis") {
    SUBCASE("cp-ofdm recovery is the identity") {
        const auto p = make_params(4, 3, 8);
        const Preprocessor pre = build_preprocessor(WaveformKind::CpOfdm, p);
        const CMat x = random_cmat(4, 3, 31);
        CHECK(max_abs_diff(recover_sequences(x, pre), x) < 1e-12);
    }
    SUBCASE("dft-s-ofdm recovery is the inverse DFT") {
        const auto p = make_params(4, 3, 8);
        const Preprocessor pre = build_preprocessor(WaveformKind::DftSOfdm, p);
        const CMat x = random_cmat(4, 3, 32);
        CHECK(max_abs_diff(recover_sequences(x, pre), dft_matrix(4).adjoint() * x) < 1e-12);
    }
    SUBCASE("ftn round trip at alpha = 0.5") {
        const auto p = make_params(4, 2, 8, 0.5);
        const Preprocessor pre = build_preprocessor(WaveformKind::FtnSOfdm, p);
        const CMat x = random_cmat(4, 2, 33);
        CHECK(max_abs_diff(synthesize_tf(recover_sequences(x, pre), pre), x) < 1e-9);
    }
    SUBCASE("round trip holds for all six members with random nonvanishing c") {
        const double alpha_overall = 0.5;
        int idx = 0;
        for (WaveformKind kind : {WaveformKind::CpOfdm, WaveformKind::DftSOfdm, WaveformKind::Otfs,
                                  WaveformKind::FtnSOfdm, WaveformKind::FtnSOtfs,
                                  WaveformKind::DftnSOtfs}) {
            const bool ftn = kind == WaveformKind::FtnSOfdm || kind == WaveformKind::FtnSOtfs ||
                             kind == WaveformKind::DftnSOtfs;
            const double alpha = ftn ? alpha_overall : 1.0;
            const double beta = kind == WaveformKind::DftnSOtfs ? 0.5 : 1.0;
            const auto p = make_params(8, 4, 16, alpha, beta);
            Preprocessor pre = build_preprocessor(kind, p);
            // Random complex c bounded away from zero.
            CVec c = random_cvec(8, 40 + static_cast<uint64_t>(idx++));
            for (int i = 0; i < c.size(); ++i) {
                c(i) += Complex(c(i).real() >= 0 ? 0.5 : -0.5, 0.0);
            }
            pre.c = c;
            const CMat x = random_cmat(8, 4, 50 + static_cast<uint64_t>(idx));
            const CMat s = recover_sequences(x, pre);
            CHECK(max_abs_diff(synthesize_tf(s, pre), x) < 1e-9);
        }
    }
    SUBCASE("zero FDSS entries are rejected as rank deficiency") {
        const auto p = make_params(4, 3, 8);
        Preprocessor pre = build_preprocessor(WaveformKind::DftSOfdm, p);
        pre.c(2) = Complex(0.0, 0.0);
        CHECK_THROWS_AS(recover_sequences(random_cmat(4, 3, 60), pre), RankError);
    }
    SUBCASE("rank-deficient A is reported against A") {
        const auto p = make_params(4, 3, 8);
        Preprocessor pre = build_preprocessor(WaveformKind::CpOfdm, p);
        pre.A.col(1).setZero();
        try {
            recover_sequences(random_cmat(4, 3, 61), pre);
            FAIL("expected RankError");
        } catch (const RankError& e) {
            CHECK(std::string(e.what()).find("A") != std::string::npos);
        }
    }
}

TEST_CASE("rank conditions hold for all six members with nonvanishing c") {
    for (WaveformKind kind : {WaveformKind::CpOfdm, WaveformKind::DftSOfdm, WaveformKind::Otfs,
                              WaveformKind::FtnSOfdm, WaveformKind::FtnSOtfs,
                              WaveformKind::DftnSOtfs}) {
        const bool ftn = kind == WaveformKind::FtnSOfdm || kind == WaveformKind::FtnSOtfs ||
                         kind == WaveformKind::DftnSOtfs;
        const auto p = make_params(6, 3, 16, ftn ? 0.75 : 1.0,
                                   kind == WaveformKind::DftnSOtfs ? 0.75 : 1.0);
        Preprocessor pre = build_preprocessor(kind, p);
        const CMat x = random_cmat(6, 3, 70);
        CHECK_NOTHROW(recover_sequences(x, pre)); // implies both rank checks passed
    }
}

TEST_CASE("custom kind accepts arbitrary index sets") {
    const auto p = make_params(3, 2, 8, 0.5, 0.5);
    const std::vector<int> rows{1, 4, 5};
    const std::vector<int> cols{0, 3};
    const Preprocessor pre = build_preprocessor(WaveformKind::Custom, p, rows, cols);
    const CMat f6 = dft_matrix(6); // seq_len = ceil(3/0.5)
    const CMat f4_h = dft_matrix(4).adjoint();
    for (int r = 0; r < 3; ++r) {
        CHECK((pre.B.row(r) - f6.row(rows[static_cast<std::size_t>(r)])).cwiseAbs().maxCoeff() <
              1e-15);
    }
    for (int c = 0; c < 2; ++c) {
        CHECK((pre.A.col(c) - f4_h.col(cols[static_cast<std::size_t>(c)])).cwiseAbs().maxCoeff() <
              1e-15);
    }
    // Recovery still works through the non-leading sets.
    const CMat x = random_cmat(3, 2, 77);
    CHECK(max_abs_diff(synthesize_tf(recover_sequences(x, pre), pre), x) < 1e-9);

    CHECK_THROWS_AS(build_preprocessor(WaveformKind::Custom, p, {0, 1, 9}, cols), ConfigError);
    CHECK_THROWS_AS(build_preprocessor(WaveformKind::Custom, p, rows, {0}), ConfigError);
}

TEST_CASE("effective_pulse") {
    const auto p = make_params(4, 1, 16);
    const CVec ones = CVec::Ones(4);
    SUBCASE("u = 0 sums the shaping vector") {
        CHECK(std::abs(effective_pulse(0.0, ones, p) - Complex(4.0 / 4.0, 0.0)) < 1e-14);
    }
    SUBCASE("first null sits at N/M") {
        CHECK(std::abs(effective_pulse(16.0 / 4.0, ones, p)) < 1e-12);
    }
    SUBCASE("two-term sum by hand") {
        const auto p2 = make_params(2, 1, 4);
        const Complex got = effective_pulse(1.0, CVec::Ones(2), p2);
        CHECK(std::abs(got - Complex(0.5, 0.5)) < 1e-14);
    }
}
