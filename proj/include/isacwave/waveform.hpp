// SPDX-License-Identifier: Apache-2.0
//
// waveform.hpp - the generalized OFDM waveform family.
//
// A waveform is a pair of preprocessing matrices (A, B) plus a spectral
// shaping vector c. A sequence group S (one complex matrix per group) maps
// to the time-frequency grid X = diag(c) * B * S * A, and an N-point
// unitary inverse DFT of the zero-padded subcarriers yields the delay-time
// signal Z. Six named members are supported, from plain CP-OFDM through
// doubly truncated DFT-spread OTFS; when the rank conditions on A and
// diag(c)*B hold, any target grid X can be reached from some S, which is
// what recover_sequences computes.

#pragma once

#include "isacwave/types.hpp"

#include <optional>
#include <vector>

namespace isacwave {

enum class WaveformKind {
    CpOfdm,
    DftSOfdm,
    Otfs,
    FtnSOfdm,
    FtnSOtfs,
    DftnSOtfs,
    Custom,
};

const char* to_string(WaveformKind kind);
WaveformKind waveform_kind_from_string(const std::string& name);

struct WaveformParams {
    double alpha = 1.0; // frequency-domain compression factor, in (0, 1]
    double beta = 1.0;  // Doppler-domain compression factor, in (0, 1]
    int M = 0;          // occupied subcarriers
    int K = 0;          // OFDM symbols per transmission
    int N = 0;          // IFFT size, M <= N
    int D = 1;          // sequence groups in the set
    double delta_f = 120.0e3; // subcarrier spacing [Hz]
    int n_cp = -1;            // cyclic prefix samples; -1 derives 144*(N/2048)

    int cp_len() const;
    double sample_interval() const { return 1.0 / (static_cast<double>(N) * delta_f); }
    double symbol_interval() const { return static_cast<double>(N + cp_len()) * sample_interval(); }
    int seq_len() const;   // ceil(M / alpha)
    int group_len() const; // ceil(K / beta)

    // Throws ConfigError when any invariant fails.
    void validate() const;
};

// ceil(num / factor), guarded against binary rounding of exact ratios
// (e.g. 204 / 0.3 must give 680, not 681).
int ratio_ceil(int num, double factor);

struct Preprocessor {
    WaveformKind kind = WaveformKind::CpOfdm;
    CMat A; // group_len x K
    CMat B; // M x seq_len
    CVec c; // length M spectral shaping vector
    std::vector<int> row_set; // rows of the seq_len-point DFT kept in B
    std::vector<int> col_set; // columns of the group_len-point IDFT kept in A

    void validate(const WaveformParams& params) const;
};

// Sequence amplitude/phase constraint regimes, owned by the optimizer but
// carried on the group set so downstream consumers can tell how it was made.
enum class ConstraintTag {
    Continuous,
    UnimodularContinuous,
    UnimodularDiscrete,
};

const char* to_string(ConstraintTag tag);
ConstraintTag constraint_tag_from_string(const std::string& name);

struct SequenceGroupSet {
    std::vector<CMat> groups; // D matrices, each seq_len x group_len
    ConstraintTag mode = ConstraintTag::Continuous;
};

// Unitary DFT matrix; entry (m, i) = exp(-j 2 pi i m / n) / sqrt(n).
CMat dft_matrix(int n);

// Table-driven construction of the six named members, with the leading
// index sets {0..M-1} and {0..K-1}. Custom accepts explicit sets.
Preprocessor build_preprocessor(WaveformKind kind, const WaveformParams& params);
Preprocessor build_preprocessor(WaveformKind kind, const WaveformParams& params,
                                const std::vector<int>& row_set,
                                const std::vector<int>& col_set);

// X = diag(c) * B * S * A
CMat synthesize_tf(const CMat& S, const Preprocessor& pre);

// Per column k: z[n] = (1/sqrt(N)) sum_{i<M} x[i] exp(+j 2 pi i n / N).
CMat tf_to_delay_time(const CMat& X, const WaveformParams& params);

// Inverts synthesize_tf through the normal-equation pseudoinverses
//   Gl = (A^H A)^{-1} A^H,  Gr = Bc^H (Bc Bc^H)^{-1},  Bc = diag(c) B,
// so that synthesize_tf(recover_sequences(X)) == X. Throws RankError when
// either factor fails its full-rank condition.
CMat recover_sequences(const CMat& X, const Preprocessor& pre);

// Effective pulse shape g(u) = (1/sqrt(N)) sum_{t<M} c[t] exp(j 2 pi t u / N);
// diagnostic only.
Complex effective_pulse(double u, const CVec& c, const WaveformParams& params);

} // namespace isacwave
