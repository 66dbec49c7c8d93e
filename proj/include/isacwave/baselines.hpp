// SPDX-License-Identifier: Apache-2.0
//
// baselines.hpp - 5G NR comparison schemes: Zadoff-Chu and Gold sequences,
// pi/2-BPSK / QPSK mapping, and the root-raised-cosine spectral shaping
// vector. The PRBS construction is normative (bit-exact).

#pragma once

#include "isacwave/types.hpp"
#include "isacwave/waveform.hpp"

#include <cstdint>
#include <vector>

namespace isacwave {

struct PrbsConfig {
    uint32_t c_init = 0; // 31-bit seed
    int length = 0;      // output bit count
    int n_c = 1600;      // warm-up offset
};

// Length-31 Gold generator:
//   x1(n+31) = x1(n+3) + x1(n)                 (mod 2), x1 = 1,0,0,...
//   x2(n+31) = x2(n+3) + x2(n+2) + x2(n+1) + x2(n), x2 = bits of c_init
//   c(n) = x1(n + Nc) + x2(n + Nc)             (mod 2)
std::vector<uint8_t> prbs_gold(const PrbsConfig& cfg);

// x_u(n) = exp(-j pi u n (n+1) / n_zc); n_zc odd, gcd(u, n_zc) = 1.
CVec zc_sequence(int n_zc, int root);

// s(i) = exp(j pi/2 (i mod 2)) * ((1-2b) + j(1-2b)) / sqrt(2)
CVec map_pi2_bpsk(const std::vector<uint8_t>& bits);

// s(i) = ((1-2b(2i)) + j(1-2b(2i+1))) / sqrt(2); bit count must be even.
CVec map_qpsk(const std::vector<uint8_t>& bits);

struct FdssConfig {
    double roll_off = 0.5; // in [0, 1]
    int M = 0;
};

// Square root of a band-confined raised-cosine response sampled at M
// symmetric points; real, nonnegative, unit peak response.
CVec rrc_fdss(const FdssConfig& cfg);

int largest_prime_at_most(int n);
int smallest_prime_at_least(int n);

// How a prime-length ZC root fills the seq_len rows of a group.
enum class ZcLengthMode {
    Extend,   // largest prime <= seq_len, cyclically extended
    Truncate, // smallest prime >= seq_len, truncated
};

enum class BaselineScheme {
    CpOfdmGold,
    CpOfdmZc,
    DftSOfdmGold,
    DftSOfdmGoldFdss,
};

const char* to_string(BaselineScheme scheme);
BaselineScheme baseline_scheme_from_string(const std::string& name);

struct Baseline {
    SequenceGroupSet set;
    Preprocessor pre;
};

// Deterministic construction of one comparison scheme at the given
// dimensions. `seed` feeds the per-group Gold seeds; the ZC scheme is
// seed-independent (ascending roots, fixed per-column cyclic shifts).
Baseline baseline_scheme(BaselineScheme scheme, const WaveformParams& params, uint64_t seed);

// QPSK for the frequency-domain CP-OFDM mapping by default, and plain reuse
// of the ZC root across a group's columns; both switchable.
Baseline baseline_scheme(BaselineScheme scheme, const WaveformParams& params, uint64_t seed,
                         bool cp_ofdm_qpsk, double rrc_roll_off, bool zc_column_shifts,
                         ZcLengthMode zc_mode = ZcLengthMode::Extend);

} // namespace isacwave
