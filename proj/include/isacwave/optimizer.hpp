// SPDX-License-Identifier: Apache-2.0
//
// optimizer.hpp - gradient-based joint design of sequence group sets and
// the spectral shaping vector.
//
// A flat real parameter vector W materializes into (c, amplitudes, phases)
// -> sequence groups -> time-frequency grids -> delay-time signals -> AF
// sidelobe maxima and a PAPR hinge. The loss is differentiated in reverse
// through that whole chain with hand-written adjoints (the transform
// adjoints are the conjugate-transposed transforms); maxima use the
// subgradient at the first achieving bin, and the discrete-phase mode
// passes gradients straight through the quantizer.

#pragma once

#include "isacwave/metrics.hpp"
#include "isacwave/types.hpp"
#include "isacwave/waveform.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace isacwave {

struct ConstraintMode {
    ConstraintTag tag = ConstraintTag::Continuous;
    int b_phases = 4;
    std::vector<double> omega; // sorted candidate phases in [0, 2pi), discrete mode
    bool circular = false;     // measure quantizer distance around the circle

    static ConstraintMode continuous();
    static ConstraintMode unimodular_continuous();
    // Default phase set {pi/B + 2 pi q / B : q = 0..B-1}.
    static ConstraintMode unimodular_discrete(int b_phases);

    void validate() const;
};

// Nearest phase in omega by absolute difference of theta mod 2pi (no
// wraparound unless `circular`); ties break toward the smaller phase.
double quantize_phase(double theta, const ConstraintMode& mode);
RVec quantize_phases(const RVec& theta, const ConstraintMode& mode);

// Flat layout of W: [fdss (M, or 2M when complex) | amplitudes (D*E) |
// phases (D*E)] with E = L_seq * L_grp and the optional blocks present per
// mode. The default shaping block materializes as |w| (real nonnegative);
// the complex variant stores real and imaginary parts in two M-blocks.
struct ParamLayout {
    bool fdss = false;
    bool fdss_complex = false;
    bool amplitudes = false;
    int M = 0, D = 0, L_seq = 0, L_grp = 0;

    int group_elems() const { return L_seq * L_grp; }
    int fdss_offset() const { return 0; }
    int fdss_block() const { return fdss ? (fdss_complex ? 2 * M : M) : 0; }
    int amp_offset() const { return fdss_block(); }
    int phase_offset() const { return amp_offset() + (amplitudes ? D * group_elems() : 0); }
    int size() const { return phase_offset() + D * group_elems(); }

    static ParamLayout make(const ConstraintMode& mode, int m, int d, int l_seq, int l_grp,
                            bool optimize_fdss, bool fdss_complex = false);
};

struct Materialized {
    SequenceGroupSet set;
    CVec c; // effective shaping vector (|w| block when optimized, else fixed)
};

// fixed_c is used when the layout carries no FDSS block.
Materialized materialize(const RVec& w, const ParamLayout& layout, const ConstraintMode& mode,
                         const CVec& fixed_c);

struct LossConfig {
    double omega1 = 0.5;
    double omega2 = 0.5;
    double sigma = 1.0;
    double p_th_db = 2.0;
    int b = 1;                    // mainlobe exclusion, delay bins
    double f_b = -1.0;            // Doppler bound for the APSL region; <0 -> f_d_max
    bool full_doppler = false;    // ignore f_b
    bool db_terms = false;        // AF terms in dB instead of amplitude ratios
    double lse_temperature = 0.0; // >0: log-sum-exp smoothing of the AF maxima

    void validate(int d_count) const;
};

struct LossBreakdown {
    double loss = 0.0;
    double apsl_ratio = 0.0; // hard maxima, even when the loss is smoothed
    double cpsl_ratio = 0.0;
    double apsl_db = kDbFloor;
    double cpsl_db = kDbFloor;
    double papr_db = 0.0;
    double penalty = 0.0;
};

// Forward loss; also accumulates dL/dW into *grad when non-null. Forward
// AF scans fan out across (d1, d2) pairs with a fixed-order reduction, so
// results are identical for any thread count.
LossBreakdown evaluate_loss(const RVec& w, const ParamLayout& layout, const ConstraintMode& mode,
                            const Preprocessor& pre, const LossConfig& cfg,
                            const DopplerGrid& grid, const WaveformParams& params,
                            RVec* grad = nullptr, int threads = 1);

struct AdamConfig {
    double eta = 0.01;
    double rho1 = 0.9;
    double rho2 = 0.999;
    double eps = 1e-8;
};

struct AdamState {
    RVec m1, m2;
    long t = 0;

    static AdamState zeros(int g);
};

// One update with bias-corrected moments; the stability constant sits
// inside the square root: W -= eta * m1_hat / sqrt(m2_hat + eps).
void adam_step(AdamState& state, RVec& w, const RVec& g, const AdamConfig& cfg);

struct OptimizeConfig {
    int iterations = 100;
    AdamConfig adam;
    LossConfig loss;
    ConstraintMode mode;
    bool optimize_fdss = false;
    bool fdss_complex = false;
    uint64_t seed = 1;
    int threads = 1; // forward AF evaluation fan-out
};

struct TraceRow {
    long iter = 0;
    double loss = 0.0;
    double apsl_db = kDbFloor;
    double cpsl_db = kDbFloor;
    double papr_db = 0.0;
};

struct OptimizeOutcome {
    ParamLayout layout;
    RVec best_w, last_w;
    double best_loss = 0.0;
    long best_iter = 0;
    LossBreakdown best_breakdown;
    AdamState adam;
    std::vector<TraceRow> trace; // one row per iteration performed
};

struct ResumeState {
    RVec w;
    AdamState adam; // adam.t carries the iterations already done
};

// Single-candidate run: init, then iterations of materialize -> loss ->
// gradient -> Adam, tracking the best-seen point. With `resume`, continues
// until cfg.iterations total steps.
OptimizeOutcome optimize_single(const Preprocessor& pre, const WaveformParams& params,
                                const DopplerGrid& grid, const OptimizeConfig& cfg,
                                const SequenceGroupSet* init_phases = nullptr,
                                const ResumeState* resume = nullptr);

// Outer traversal over candidate factor sets (cross product).
struct CandidateFactorA {
    CMat A;
    double beta = 1.0;
    std::string label;
};

struct CandidateFactorB {
    CMat B;
    CVec c;
    double alpha = 1.0;
    std::string label;
};

CandidateFactorA candidate_a(WaveformKind kind, const WaveformParams& params);
CandidateFactorB candidate_b(WaveformKind kind, const WaveformParams& params);

struct CandidateOutcome {
    int a_index = 0, b_index = 0;
    std::string label;
    Preprocessor pre;
    OptimizeOutcome result;
};

// Per-candidate seeds derive from (cfg.seed, flat candidate index), so the
// traversal order never changes results.
std::vector<CandidateOutcome> optimize(const std::vector<CandidateFactorA>& a_set,
                                       const std::vector<CandidateFactorB>& b_set,
                                       const WaveformParams& params, const DopplerGrid& grid,
                                       const OptimizeConfig& cfg,
                                       const SequenceGroupSet* init_phases = nullptr);

} // namespace isacwave
