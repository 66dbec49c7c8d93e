// SPDX-License-Identifier: Apache-2.0

#include "isacwave/waveform.hpp"

#include "isacwave/fft.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <iostream>

namespace isacwave {

namespace {

// Relative singular-value threshold for the full-rank conditions; matches
// the double-precision conditioning of the truncated DFT factors involved.
constexpr double kRankTol = 1e-10;
constexpr double kCondWarn = 1e8;

std::vector<int> leading_indices(int n) {
    std::vector<int> idx(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        idx[static_cast<std::size_t>(i)] = i;
    }
    return idx;
}

void check_index_set(const std::vector<int>& set, int count, int bound, const char* name) {
    if (static_cast<int>(set.size()) != count) {
        throw ConfigError(std::string(name) + " index set must have " + std::to_string(count) +
                          " entries, got " + std::to_string(set.size()));
    }
    for (int v : set) {
        if (v < 0 || v >= bound) {
            throw ConfigError(std::string(name) + " index " + std::to_string(v) +
                              " outside [0, " + std::to_string(bound) + ")");
        }
    }
}

} // namespace

const char* to_string(WaveformKind kind) {
    switch (kind) {
    case WaveformKind::CpOfdm: return "cp-ofdm";
    case WaveformKind::DftSOfdm: return "dft-s-ofdm";
    case WaveformKind::Otfs: return "otfs";
    case WaveformKind::FtnSOfdm: return "ftn-s-ofdm";
    case WaveformKind::FtnSOtfs: return "ftn-s-otfs";
    case WaveformKind::DftnSOtfs: return "dftn-s-otfs";
    case WaveformKind::Custom: return "custom";
    }
    return "?";
}

WaveformKind waveform_kind_from_string(const std::string& name) {
    for (WaveformKind k : {WaveformKind::CpOfdm, WaveformKind::DftSOfdm, WaveformKind::Otfs,
                           WaveformKind::FtnSOfdm, WaveformKind::FtnSOtfs, WaveformKind::DftnSOtfs,
                           WaveformKind::Custom}) {
        if (name == to_string(k)) {
            return k;
        }
    }
    throw ConfigError("unknown waveform kind: " + name);
}

const char* to_string(ConstraintTag tag) {
    switch (tag) {
    case ConstraintTag::Continuous: return "continuous";
    case ConstraintTag::UnimodularContinuous: return "unimodular-continuous";
    case ConstraintTag::UnimodularDiscrete: return "unimodular-discrete";
    }
    return "?";
}

ConstraintTag constraint_tag_from_string(const std::string& name) {
    for (ConstraintTag t : {ConstraintTag::Continuous, ConstraintTag::UnimodularContinuous,
                            ConstraintTag::UnimodularDiscrete}) {
        if (name == to_string(t)) {
            return t;
        }
    }
    throw ConfigError("unknown constraint mode: " + name);
}

int ratio_ceil(int num, double factor) {
    double v = static_cast<double>(num) / factor;
    return static_cast<int>(std::ceil(v - 1e-9));
}

int WaveformParams::cp_len() const {
    if (n_cp >= 0) {
        return n_cp;
    }
    return static_cast<int>(std::llround(144.0 * static_cast<double>(N) / 2048.0));
}

int WaveformParams::seq_len() const {
    return ratio_ceil(M, alpha);
}

int WaveformParams::group_len() const {
    return ratio_ceil(K, beta);
}

void WaveformParams::validate() const {
    if (!(alpha > 0.0 && alpha <= 1.0)) {
        throw ConfigError("alpha must lie in (0, 1]");
    }
    if (!(beta > 0.0 && beta <= 1.0)) {
        throw ConfigError("beta must lie in (0, 1]");
    }
    if (M < 1 || N < 1 || M > N) {
        throw ConfigError("require 0 < M <= N");
    }
    if (K < 1) {
        throw ConfigError("require K >= 1");
    }
    if (D < 1) {
        throw ConfigError("require D >= 1");
    }
    if (!(delta_f > 0.0)) {
        throw ConfigError("subcarrier spacing must be positive");
    }
    if (seq_len() < M || group_len() < K) {
        throw ConfigError("derived sequence dimensions shrank below (M, K)");
    }
}

void Preprocessor::validate(const WaveformParams& params) const {
    if (A.rows() != params.group_len() || A.cols() != params.K) {
        throw ConfigError("preprocessor A must be group_len x K");
    }
    if (B.rows() != params.M || B.cols() != params.seq_len()) {
        throw ConfigError("preprocessor B must be M x seq_len");
    }
    if (c.size() != params.M) {
        throw ConfigError("FDSS vector must have M entries");
    }
}

CMat dft_matrix(int n) {
    if (n < 1) {
        throw ConfigError("dft_matrix requires n >= 1");
    }
    CMat F(n, n);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (int m = 0; m < n; ++m) {
        for (int i = 0; i < n; ++i) {
            // Reduce i*m mod n before evaluating the phase; keeps large
            // matrices accurate to machine precision.
            long long q = (static_cast<long long>(i) * m) % n;
            double ang = -kTwoPi * static_cast<double>(q) / static_cast<double>(n);
            F(m, i) = Complex(std::cos(ang) * scale, std::sin(ang) * scale);
        }
    }
    return F;
}

Preprocessor build_preprocessor(WaveformKind kind, const WaveformParams& params) {
    return build_preprocessor(kind, params, leading_indices(params.M), leading_indices(params.K));
}

Preprocessor build_preprocessor(WaveformKind kind, const WaveformParams& params,
                                const std::vector<int>& row_set,
                                const std::vector<int>& col_set) {
    params.validate();
    const int ls = params.seq_len();
    const int lg = params.group_len();

    // alpha = 1 under the FTN kinds is permitted: they degenerate into the
    // non-truncated counterparts (same code path, so identical matrices).
    if ((kind == WaveformKind::CpOfdm || kind == WaveformKind::DftSOfdm ||
         kind == WaveformKind::Otfs) &&
        (ls != params.M || lg != params.K)) {
        throw ConfigError(std::string(to_string(kind)) + " requires alpha = beta = 1");
    }
    if (kind != WaveformKind::DftnSOtfs && kind != WaveformKind::Custom && lg != params.K) {
        throw ConfigError(std::string(to_string(kind)) + " requires beta = 1");
    }

    check_index_set(row_set, params.M, ls, "row");
    check_index_set(col_set, params.K, lg, "column");

    Preprocessor pre;
    pre.kind = kind;
    pre.row_set = row_set;
    pre.col_set = col_set;
    pre.c = CVec::Ones(params.M);

    const bool spread_b = kind != WaveformKind::CpOfdm; // all others spread via a DFT
    const bool isfft_a = kind == WaveformKind::Otfs || kind == WaveformKind::FtnSOtfs ||
                         kind == WaveformKind::DftnSOtfs;

    switch (kind) {
    case WaveformKind::CpOfdm:
        pre.A = CMat::Identity(lg, params.K);
        pre.B = CMat::Identity(params.M, ls);
        break;
    case WaveformKind::DftSOfdm:
    case WaveformKind::FtnSOfdm:
        pre.A = CMat::Identity(lg, params.K);
        break;
    case WaveformKind::Otfs:
    case WaveformKind::FtnSOtfs:
    case WaveformKind::DftnSOtfs:
    case WaveformKind::Custom:
        break;
    }

    if (spread_b) {
        const CMat f_ls = dft_matrix(ls);
        pre.B.resize(params.M, ls);
        for (int r = 0; r < params.M; ++r) {
            pre.B.row(r) = f_ls.row(row_set[static_cast<std::size_t>(r)]);
        }
    }
    if (isfft_a || kind == WaveformKind::Custom) {
        const CMat f_lg_h = dft_matrix(lg).adjoint();
        pre.A.resize(lg, params.K);
        for (int cidx = 0; cidx < params.K; ++cidx) {
            pre.A.col(cidx) = f_lg_h.col(col_set[static_cast<std::size_t>(cidx)]);
        }
    }

    pre.validate(params);
    return pre;
}

CMat synthesize_tf(const CMat& S, const Preprocessor& pre) {
    if (S.rows() != pre.B.cols() || S.cols() != pre.A.rows()) {
        throw ConfigError("sequence group shape does not match the preprocessor");
    }
    CMat X = pre.B * S * pre.A;
    X.array().colwise() *= pre.c.array();
    return X;
}

CMat tf_to_delay_time(const CMat& X, const WaveformParams& params) {
    if (X.rows() != params.M || params.M > params.N) {
        throw ConfigError("time-frequency grid must be M x K with M <= N");
    }
    const int n = params.N;
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    CMat Z(n, X.cols());
    CVec buf(n);
    for (int k = 0; k < X.cols(); ++k) {
        buf.setZero();
        buf.head(params.M) = X.col(k);
        ifft_u_inplace(buf.data(), static_cast<std::size_t>(n));
        Z.col(k) = buf * scale;
    }
    return Z;
}

namespace {

struct RankInfo {
    double smin = 0.0;
    double smax = 0.0;
};

RankInfo singular_extremes(const CMat& m) {
    Eigen::JacobiSVD<CMat> svd(m);
    const auto& sv = svd.singularValues();
    RankInfo info;
    info.smax = sv.size() > 0 ? sv(0) : 0.0;
    info.smin = sv.size() > 0 ? sv(sv.size() - 1) : 0.0;
    return info;
}

} // namespace

CMat recover_sequences(const CMat& X, const Preprocessor& pre) {
    const CMat bc = pre.c.asDiagonal() * pre.B;

    const RankInfo ra = singular_extremes(pre.A);
    if (!(ra.smin > kRankTol * ra.smax) || pre.A.rows() < pre.A.cols()) {
        throw RankError("preprocessor A is not full column rank");
    }
    const RankInfo rb = singular_extremes(bc);
    if (!(rb.smin > kRankTol * rb.smax) || bc.cols() < bc.rows()) {
        throw RankError("diag(c)*B is not full row rank");
    }
    if (ra.smax / ra.smin > kCondWarn || rb.smax / rb.smin > kCondWarn) {
        std::cerr << "warning: ill-conditioned preprocessor factors"
                  << " (cond A = " << ra.smax / ra.smin
                  << ", cond diag(c)B = " << rb.smax / rb.smin << ")\n";
    }

    // Normal-equation pseudoinverses; both Gram matrices are Hermitian
    // positive definite once the rank checks pass.
    const CMat gl = (pre.A.adjoint() * pre.A).llt().solve(pre.A.adjoint());
    const CMat gr = ((bc * bc.adjoint()).llt().solve(bc)).adjoint();
    return gr * X * gl;
}

Complex effective_pulse(double u, const CVec& c, const WaveformParams& params) {
    if (c.size() != params.M) {
        throw ConfigError("FDSS vector must have M entries");
    }
    Complex acc(0.0, 0.0);
    for (int t = 0; t < params.M; ++t) {
        const double ang = kTwoPi * static_cast<double>(t) * u / static_cast<double>(params.N);
        acc += c(t) * Complex(std::cos(ang), std::sin(ang));
    }
    return acc / std::sqrt(static_cast<double>(params.N));
}

} // namespace isacwave
