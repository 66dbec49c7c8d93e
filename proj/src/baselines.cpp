// SPDX-License-Identifier: Apache-2.0

#include "isacwave/baselines.hpp"

#include <cmath>
#include <numeric>

namespace isacwave {

std::vector<uint8_t> prbs_gold(const PrbsConfig& cfg) {
    if (cfg.c_init >= (1u << 31)) {
        throw ConfigError("PRBS seed must fit in 31 bits");
    }
    if (cfg.length < 0 || cfg.n_c < 0) {
        throw ConfigError("PRBS length and offset must be nonnegative");
    }
    const std::size_t total = static_cast<std::size_t>(cfg.n_c) +
                              static_cast<std::size_t>(cfg.length) + 31;
    std::vector<uint8_t> x1(total, 0);
    std::vector<uint8_t> x2(total, 0);
    x1[0] = 1;
    for (int i = 0; i < 31; ++i) {
        x2[static_cast<std::size_t>(i)] = static_cast<uint8_t>((cfg.c_init >> i) & 1u);
    }
    for (std::size_t n = 0; n + 31 < total; ++n) {
        x1[n + 31] = static_cast<uint8_t>((x1[n + 3] + x1[n]) & 1u);
        x2[n + 31] = static_cast<uint8_t>((x2[n + 3] + x2[n + 2] + x2[n + 1] + x2[n]) & 1u);
    }
    std::vector<uint8_t> c(static_cast<std::size_t>(cfg.length));
    for (int n = 0; n < cfg.length; ++n) {
        const std::size_t i = static_cast<std::size_t>(n + cfg.n_c);
        c[static_cast<std::size_t>(n)] = static_cast<uint8_t>((x1[i] + x2[i]) & 1u);
    }
    return c;
}

CVec zc_sequence(int n_zc, int root) {
    if (n_zc < 3 || n_zc % 2 == 0) {
        throw ConfigError("ZC length must be odd and >= 3");
    }
    if (root <= 0 || root >= n_zc || std::gcd(root, n_zc) != 1) {
        throw ConfigError("ZC root must satisfy 0 < u < n_zc with gcd(u, n_zc) = 1");
    }
    CVec x(n_zc);
    const auto len = static_cast<long long>(n_zc);
    for (long long n = 0; n < len; ++n) {
        // u n (n+1) reduced mod 2 n_zc keeps the phase argument exact.
        const long long q = (static_cast<long long>(root) * ((n * (n + 1)) % (2 * len))) % (2 * len);
        const double ang = -std::numbers::pi * static_cast<double>(q) / static_cast<double>(len);
        x(static_cast<Eigen::Index>(n)) = Complex(std::cos(ang), std::sin(ang));
    }
    return x;
}

CVec map_pi2_bpsk(const std::vector<uint8_t>& bits) {
    CVec s(static_cast<Eigen::Index>(bits.size()));
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (std::size_t i = 0; i < bits.size(); ++i) {
        const double level = 1.0 - 2.0 * static_cast<double>(bits[i] & 1u);
        Complex v(level * inv_sqrt2, level * inv_sqrt2);
        if (i % 2 == 1) {
            v *= Complex(0.0, 1.0); // exp(j pi/2)
        }
        s(static_cast<Eigen::Index>(i)) = v;
    }
    return s;
}

CVec map_qpsk(const std::vector<uint8_t>& bits) {
    if (bits.size() % 2 != 0) {
        throw ConfigError("QPSK needs an even bit count");
    }
    CVec s(static_cast<Eigen::Index>(bits.size() / 2));
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (std::size_t i = 0; i < bits.size() / 2; ++i) {
        const double re = 1.0 - 2.0 * static_cast<double>(bits[2 * i] & 1u);
        const double im = 1.0 - 2.0 * static_cast<double>(bits[2 * i + 1] & 1u);
        s(static_cast<Eigen::Index>(i)) = Complex(re * inv_sqrt2, im * inv_sqrt2);
    }
    return s;
}

CVec rrc_fdss(const FdssConfig& cfg) {
    if (cfg.M < 2) {
        throw ConfigError("FDSS length must be >= 2");
    }
    if (cfg.roll_off < 0.0 || cfg.roll_off > 1.0) {
        throw ConfigError("roll-off must lie in [0, 1]");
    }
    CVec c(cfg.M);
    const double rho = cfg.roll_off;
    for (int m = 0; m < cfg.M; ++m) {
        // Symmetric normalized frequencies in (-1, 1); the edges stay off
        // +-1 so the shaping never vanishes exactly.
        const double v = (2.0 * m - (cfg.M - 1)) / static_cast<double>(cfg.M);
        const double a = std::abs(v);
        double response = 1.0;
        if (rho > 0.0 && a > 1.0 - rho) {
            response = 0.5 * (1.0 + std::cos(std::numbers::pi * (a - (1.0 - rho)) / rho));
        }
        c(m) = Complex(std::sqrt(response), 0.0);
    }
    return c;
}

namespace {

bool is_prime(int v) {
    if (v < 2) {
        return false;
    }
    for (int d = 2; static_cast<long long>(d) * d <= v; ++d) {
        if (v % d == 0) {
            return false;
        }
    }
    return true;
}

} // namespace

int largest_prime_at_most(int n) {
    for (int v = n; v >= 2; --v) {
        if (is_prime(v)) {
            return v;
        }
    }
    throw ConfigError("no prime available at or below " + std::to_string(n));
}

int smallest_prime_at_least(int n) {
    for (int v = std::max(2, n);; ++v) {
        if (is_prime(v)) {
            return v;
        }
    }
}

const char* to_string(BaselineScheme scheme) {
    switch (scheme) {
    case BaselineScheme::CpOfdmGold: return "cp-ofdm-gold";
    case BaselineScheme::CpOfdmZc: return "cp-ofdm-zc";
    case BaselineScheme::DftSOfdmGold: return "dft-s-ofdm-gold";
    case BaselineScheme::DftSOfdmGoldFdss: return "dft-s-ofdm-gold-fdss";
    }
    return "?";
}

BaselineScheme baseline_scheme_from_string(const std::string& name) {
    for (BaselineScheme s : {BaselineScheme::CpOfdmGold, BaselineScheme::CpOfdmZc,
                             BaselineScheme::DftSOfdmGold, BaselineScheme::DftSOfdmGoldFdss}) {
        if (name == to_string(s)) {
            return s;
        }
    }
    throw ConfigError("unknown baseline scheme: " + name);
}

namespace {

// One Gold-fed group: a fresh PRBS stream per group, symbols filling the
// group matrix column by column.
CMat gold_group(uint64_t seed, int group_index, int rows, int cols, bool qpsk) {
    const uint32_t c_init =
        static_cast<uint32_t>((seed + static_cast<uint64_t>(group_index)) & 0x7FFFFFFFULL);
    const int bits_per_symbol = qpsk ? 2 : 1;
    PrbsConfig prbs{c_init, rows * cols * bits_per_symbol};
    const std::vector<uint8_t> bits = prbs_gold(prbs);

    CMat s(rows, cols);
    for (int j = 0; j < cols; ++j) {
        const std::size_t lo = static_cast<std::size_t>(j) * static_cast<std::size_t>(rows) *
                               static_cast<std::size_t>(bits_per_symbol);
        const std::vector<uint8_t> column_bits(
            bits.begin() + static_cast<std::ptrdiff_t>(lo),
            bits.begin() + static_cast<std::ptrdiff_t>(lo + static_cast<std::size_t>(rows) *
                                                                static_cast<std::size_t>(bits_per_symbol)));
        s.col(j) = qpsk ? map_qpsk(column_bits) : map_pi2_bpsk(column_bits);
    }
    return s;
}

CMat zc_group(int group_index, int rows, int cols, bool column_shifts, ZcLengthMode mode) {
    const int n_zc = mode == ZcLengthMode::Extend ? largest_prime_at_most(rows)
                                                  : smallest_prime_at_least(rows);
    const int root = group_index + 1;
    if (root >= n_zc) {
        throw ConfigError("not enough ZC roots for D groups at this sequence length");
    }
    const CVec base = zc_sequence(n_zc, root);
    CMat s(rows, cols);
    for (int j = 0; j < cols; ++j) {
        // Plain reuse across the group's symbols reproduces the reference
        // sidelobe levels; per-column cyclic shifts decorrelate the symbol
        // sum and land ~3 dB lower cross peaks, so they stay opt-in.
        const int shift =
            column_shifts ? static_cast<int>((static_cast<long long>(j) * n_zc) / cols) : 0;
        for (int n = 0; n < rows; ++n) {
            s(n, j) = base((n + shift) % n_zc); // cyclic extension past n_zc
        }
    }
    return s;
}

} // namespace

Baseline baseline_scheme(BaselineScheme scheme, const WaveformParams& params, uint64_t seed) {
    return baseline_scheme(scheme, params, seed, true, 0.5, false, ZcLengthMode::Extend);
}

Baseline baseline_scheme(BaselineScheme scheme, const WaveformParams& params, uint64_t seed,
                         bool cp_ofdm_qpsk, double rrc_roll_off, bool zc_column_shifts,
                         ZcLengthMode zc_mode) {
    params.validate();
    const int rows = params.seq_len();
    const int cols = params.group_len();
    if (rows < 3) {
        throw ConfigError("baseline schemes need a sequence length of at least 3");
    }

    Baseline out;
    out.set.mode = ConstraintTag::UnimodularContinuous;
    out.set.groups.reserve(static_cast<std::size_t>(params.D));

    switch (scheme) {
    case BaselineScheme::CpOfdmZc:
        out.pre = build_preprocessor(WaveformKind::CpOfdm, params);
        for (int d = 0; d < params.D; ++d) {
            out.set.groups.push_back(zc_group(d, rows, cols, zc_column_shifts, zc_mode));
        }
        break;
    case BaselineScheme::CpOfdmGold:
        out.pre = build_preprocessor(WaveformKind::CpOfdm, params);
        for (int d = 0; d < params.D; ++d) {
            out.set.groups.push_back(gold_group(seed, d, rows, cols, cp_ofdm_qpsk));
        }
        break;
    case BaselineScheme::DftSOfdmGold:
    case BaselineScheme::DftSOfdmGoldFdss:
        out.pre = build_preprocessor(WaveformKind::DftSOfdm, params);
        for (int d = 0; d < params.D; ++d) {
            out.set.groups.push_back(gold_group(seed, d, rows, cols, false));
        }
        if (scheme == BaselineScheme::DftSOfdmGoldFdss) {
            out.pre.c = rrc_fdss({rrc_roll_off, params.M});
        }
        break;
    }
    return out;
}

} // namespace isacwave
