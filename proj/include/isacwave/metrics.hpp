// SPDX-License-Identifier: Apache-2.0
//
// metrics.hpp - PAPR and periodic ambiguity functions over a fractional
// delay/Doppler grid, plus the derived sidelobe metrics.
//
// Conventions: sequence groups are energy-normalized per OFDM symbol before
// any metric is read, so the auto-AF reference peak is exactly K. Sidelobe
// levels are amplitude ratios against that peak, reported as 20*log10;
// PAPR is a power ratio reported as 10*log10.

#pragma once

#include "isacwave/types.hpp"
#include "isacwave/waveform.hpp"

#include <optional>
#include <vector>

namespace isacwave {

struct DopplerGrid {
    double f_d_max = 0.0; // maximum Doppler shift [Hz]
    int J = 0;            // number of grid points, odd so 0 is on the grid

    double step() const { return 2.0 * f_d_max / static_cast<double>(J - 1); }
    double value(int r) const { return -f_d_max + static_cast<double>(r) * step(); }
    int zero_index() const { return (J - 1) / 2; }

    // Validates oddness and the fractional-Doppler requirement
    // step < 1/(K*T_c) against the waveform timing.
    static DopplerGrid make(double f_d_max, int J, const WaveformParams& params);
};

struct AfSurface {
    RMat mag;            // N x J magnitudes |AF(tau, f_d^(r))|
    int d1 = 0, d2 = 0;  // ordered group pair (P, Q)
    double af_ref = 1.0; // auto-AF peak used for normalization (= K)
};

struct MainlobeInfo {
    int b = 0;        // first local-minimum delay index on the f_d = 0 cut
    double f_b = 0.0; // first local-minimum Doppler on the tau = 0 cut [Hz]
    double w1 = 0.0;  // b * M / N
    double w2 = 0.0;  // f_b * K * T_c
};

struct MetricsReport {
    double papr_db = 0.0;
    double apsl_db = 0.0;
    std::optional<double> cpsl_db; // absent when D < 2
    int b = 0;
    double f_b = 0.0;
    double w1 = 0.0;
    double w2 = 0.0;
};

// Scales every column to unit squared norm. Throws DegenerateInputError on
// an all-zero column. PAPR of each column is unchanged.
CMat normalize_energy(const CMat& Z);

// max_n |z_n|^2 / ((1/N) sum_i |z_i|^2), as a linear power ratio.
double papr_ratio(const CVec& z);

// Set-level PAPR: max over all groups and symbols, in dB.
double papr_db_set(const std::vector<CMat>& delay_signals);

// Periodic cross-ambiguity of delay-time signals at integer delay tau and
// Doppler f_d [Hz]:
//   sum_k e^{j2pi f_d k Tc} sum_n Zq(n,k) conj(Zp((n+tau) mod N, k)) e^{j2pi f_d n Ts}.
// Direct summation; reference oracle for the FFT-accelerated path.
Complex af_direct(const CMat& z_p, const CMat& z_q, int tau, double f_d,
                  const WaveformParams& params);

// Full N x J magnitude surface via per-column FFTs; equals af_direct at
// every grid point to ~1e-12 relative.
AfSurface af_surface_fft(const CMat& z_p, const CMat& z_q, const DopplerGrid& grid,
                         const WaveformParams& params, int d1 = 0, int d2 = 0);

// Mainlobe extent of an auto surface: first non-strict local minima along
// the zero-Doppler delay cut and the zero-delay Doppler cut.
MainlobeInfo mainlobe(const AfSurface& auto_surface, const DopplerGrid& grid,
                      const WaveformParams& params);

// Peak auto-AF sidelobe outside tau in [0,b] u [N-b, N-1], over grid
// Dopplers with |f_d| <= f_b (or the whole grid when full_doppler), as dB
// relative to af_ref.
double apsl_db(const std::vector<AfSurface>& auto_surfaces, int b, double f_b,
               const DopplerGrid& grid, bool full_doppler = false);

// Peak cross-AF level over ordered pairs, all delays and all grid Dopplers,
// as dB relative to af_ref. Empty input (D < 2) yields nullopt.
std::optional<double> cpsl_db(const std::vector<AfSurface>& cross_surfaces);

// Per-group FFT workspace for the accelerated AF path. base[k] is the
// unnormalized forward DFT of column k; shifted[r][k] is the DFT of the
// same column under the Doppler-r phase ramp, with the per-symbol phase
// e^{j2pi f_r k Tc} folded in. The optimizer reuses these spectra when
// accumulating adjoints, so layout changes here ripple into optimizer.cpp.
struct GroupSpectra {
    std::vector<CVec> base;                 // K vectors of length N
    std::vector<std::vector<CVec>> shifted; // J x K vectors of length N
};

GroupSpectra af_spectra(const CMat& z, const DopplerGrid& grid, const WaveformParams& params);

// Complex AF(tau, f_r) for tau = 0..N-1 of the ordered pair (P, Q):
//   (1/N) * dft( sum_k shiftedQ[r][k] .* conj(baseP[k]) ).
CVec af_column(const GroupSpectra& p, const GroupSpectra& q, int r,
               const WaveformParams& params);

struct SetMetricsOptions {
    int b = -1;               // <0: measure from group 0's auto surface
    double f_b = -1.0;        // <0: measure (clipped to f_d_max)
    bool full_doppler = false;
    bool keep_surfaces = false; // retain all (d1,d2) surfaces in the result
    int threads = 1;
};

struct SetMetrics {
    MetricsReport report;
    std::vector<AfSurface> surfaces; // populated when keep_surfaces is set
};

// Normalizes every group, computes all auto and ordered cross surfaces and
// reduces them into a MetricsReport. Reduction order is fixed so repeated
// runs are bit-identical regardless of thread count.
SetMetrics evaluate_set(const std::vector<CMat>& delay_signals, const DopplerGrid& grid,
                        const WaveformParams& params, const SetMetricsOptions& options = {});

} // namespace isacwave
