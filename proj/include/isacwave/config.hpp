// SPDX-License-Identifier: Apache-2.0
//
// config.hpp - experiment description loaded from JSON. Unknown keys are
// rejected; every referenced module re-validates its own invariants when
// the derived objects are built.

#pragma once

#include "isacwave/baselines.hpp"
#include "isacwave/metrics.hpp"
#include "isacwave/optimizer.hpp"
#include "isacwave/types.hpp"
#include "isacwave/waveform.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace isacwave {

struct ExperimentConfig {
    std::vector<std::string> waveforms{"ftn-s-ofdm"};
    double alpha = 0.5; // applied to the frequency-truncating kinds
    double beta = 1.0;  // applied to dftn-s-otfs
    int M = 204, K = 4, N = 2048, D = 30;
    double delta_f_hz = 120.0e3;
    int n_cp = -1;

    double f_d_max_hz = 7200.0;
    int J = 9;

    // loss
    double omega1 = 0.5, omega2 = 0.5;
    double sigma = 1.0;
    double p_th_db = 2.0;
    int b = -1;            // <0: round(N/M) for the loss, measured for reports
    double f_b_hz = -1.0;  // <0: f_d_max
    bool full_doppler = false;
    bool db_terms = false;
    double lse_temperature = 0.0;

    // constraint mode
    std::string constraint = "continuous";
    int b_phases = 4;
    bool circular = false;

    // optimizer
    int iterations = 5000;
    double eta = 0.01;
    double rho1 = 0.9, rho2 = 0.999, eps = 1e-8;
    bool optimize_fdss = false;
    bool fdss_complex = false;
    std::string init = "random"; // or "baseline:<scheme>"

    // baselines
    std::string scheme = "cp-ofdm-zc";
    double rrc_roll_off = 0.5;
    bool cp_ofdm_qpsk = true;
    bool zc_column_shifts = false;
    bool zc_truncate = false; // smallest prime >= seq_len, truncated

    // sweep
    std::vector<double> omega1_grid{0.2, 0.5, 0.8};
    std::vector<double> p_th_grid_db{1.0, 2.0, 4.0};
    int restarts = 4;

    bool cross_product = false;
    uint64_t seed = 1;
    std::string out_dir = "out";
    int threads = 1;

    static ExperimentConfig load(const std::string& path);
    static ExperimentConfig from_json_text(const std::string& text);
    std::string to_json_text() const; // canonical echo (print-config)

    // Derived objects (each validates its module's invariants).
    WaveformParams params() const;                   // global alpha/beta
    WaveformParams params_for(WaveformKind kind) const;
    DopplerGrid grid(const WaveformParams& p) const;
    ConstraintMode mode() const;
    LossConfig loss(const WaveformParams& p) const;  // resolves b
    OptimizeConfig optimize_config(const WaveformParams& p) const;

    void validate() const;
};

} // namespace isacwave
