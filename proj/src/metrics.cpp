// SPDX-License-Identifier: Apache-2.0

#include "isacwave/metrics.hpp"

#include "isacwave/fft.hpp"
#include "isacwave/threading.hpp"

#include <algorithm>
#include <cmath>

namespace isacwave {

DopplerGrid DopplerGrid::make(double f_d_max, int J, const WaveformParams& params) {
    if (J < 3 || J % 2 == 0) {
        throw ConfigError("Doppler grid needs an odd J >= 3");
    }
    if (!(f_d_max > 0.0)) {
        throw ConfigError("maximum Doppler shift must be positive");
    }
    DopplerGrid grid{f_d_max, J};
    const double doppler_resolution =
        1.0 / (static_cast<double>(params.K) * params.symbol_interval());
    if (!(grid.step() < doppler_resolution)) {
        throw ConfigError("Doppler step must stay below the Doppler resolution 1/(K*Tc); "
                          "shrink f_d_max or raise J");
    }
    return grid;
}

CMat normalize_energy(const CMat& Z) {
    CMat out = Z;
    for (int k = 0; k < Z.cols(); ++k) {
        const double nrm = Z.col(k).norm();
        if (!(nrm > 0.0)) {
            throw DegenerateInputError("all-zero signal column " + std::to_string(k));
        }
        out.col(k) /= nrm;
    }
    return out;
}

double papr_ratio(const CVec& z) {
    const double energy = z.squaredNorm();
    if (!(energy > 0.0)) {
        throw DegenerateInputError("PAPR of an all-zero column");
    }
    const double peak = z.cwiseAbs2().maxCoeff();
    return peak * static_cast<double>(z.size()) / energy;
}

double papr_db_set(const std::vector<CMat>& delay_signals) {
    double worst = 0.0;
    for (const CMat& z : delay_signals) {
        for (int k = 0; k < z.cols(); ++k) {
            worst = std::max(worst, papr_ratio(z.col(k)));
        }
    }
    return power_db(worst);
}

Complex af_direct(const CMat& z_p, const CMat& z_q, int tau, double f_d,
                  const WaveformParams& params) {
    if (z_p.rows() != z_q.rows() || z_p.cols() != z_q.cols()) {
        throw ConfigError("AF operands must share a shape");
    }
    const int n = static_cast<int>(z_p.rows());
    if (tau < 0 || tau >= n) {
        throw ConfigError("delay index outside [0, N)");
    }
    const double ts = params.sample_interval();
    const double tc = params.symbol_interval();
    Complex total(0.0, 0.0);
    for (int k = 0; k < z_p.cols(); ++k) {
        Complex sym(0.0, 0.0);
        for (int i = 0; i < n; ++i) {
            const double ang = kTwoPi * f_d * static_cast<double>(i) * ts;
            sym += z_q(i, k) * std::conj(z_p((i + tau) % n, k)) *
                   Complex(std::cos(ang), std::sin(ang));
        }
        const double ang_k = kTwoPi * f_d * static_cast<double>(k) * tc;
        total += sym * Complex(std::cos(ang_k), std::sin(ang_k));
    }
    return total;
}

GroupSpectra af_spectra(const CMat& z, const DopplerGrid& grid, const WaveformParams& params) {
    const int n = static_cast<int>(z.rows());
    const int k_count = static_cast<int>(z.cols());
    const double ts = params.sample_interval();
    const double tc = params.symbol_interval();

    GroupSpectra sp;
    sp.base.resize(static_cast<std::size_t>(k_count));
    for (int k = 0; k < k_count; ++k) {
        sp.base[static_cast<std::size_t>(k)] = fft_u(z.col(k));
    }
    sp.shifted.resize(static_cast<std::size_t>(grid.J));
    CVec ramped(n);
    for (int r = 0; r < grid.J; ++r) {
        const double f = grid.value(r);
        auto& per_symbol = sp.shifted[static_cast<std::size_t>(r)];
        per_symbol.resize(static_cast<std::size_t>(k_count));
        CVec ramp(n);
        for (int i = 0; i < n; ++i) {
            const double ang = kTwoPi * f * static_cast<double>(i) * ts;
            ramp(i) = Complex(std::cos(ang), std::sin(ang));
        }
        for (int k = 0; k < k_count; ++k) {
            ramped = z.col(k).cwiseProduct(ramp);
            fft_u_inplace(ramped.data(), static_cast<std::size_t>(n));
            const double ang_k = kTwoPi * f * static_cast<double>(k) * tc;
            per_symbol[static_cast<std::size_t>(k)] =
                ramped * Complex(std::cos(ang_k), std::sin(ang_k));
        }
    }
    return sp;
}

CVec af_column(const GroupSpectra& p, const GroupSpectra& q, int r,
               const WaveformParams& params) {
    const int n = params.N;
    const auto k_count = p.base.size();
    CVec acc = CVec::Zero(n);
    const auto& shifted_q = q.shifted[static_cast<std::size_t>(r)];
    for (std::size_t k = 0; k < k_count; ++k) {
        acc += shifted_q[k].cwiseProduct(p.base[k].conjugate());
    }
    fft_u_inplace(acc.data(), static_cast<std::size_t>(n));
    return acc / static_cast<double>(n);
}

AfSurface af_surface_fft(const CMat& z_p, const CMat& z_q, const DopplerGrid& grid,
                         const WaveformParams& params, int d1, int d2) {
    if (z_p.rows() != z_q.rows() || z_p.cols() != z_q.cols()) {
        throw ConfigError("AF operands must share a shape");
    }
    const GroupSpectra sp_p = af_spectra(z_p, grid, params);
    const GroupSpectra sp_q =
        (&z_p == &z_q) ? GroupSpectra{} : af_spectra(z_q, grid, params);
    const GroupSpectra& q_ref = (&z_p == &z_q) ? sp_p : sp_q;

    AfSurface surface;
    surface.d1 = d1;
    surface.d2 = d2;
    surface.af_ref = static_cast<double>(z_p.cols());
    surface.mag.resize(params.N, grid.J);
    for (int r = 0; r < grid.J; ++r) {
        surface.mag.col(r) = af_column(sp_p, q_ref, r, params).cwiseAbs();
    }
    return surface;
}

MainlobeInfo mainlobe(const AfSurface& auto_surface, const DopplerGrid& grid,
                      const WaveformParams& params) {
    if (params.N < 4) {
        throw ConfigError("mainlobe measurement needs N >= 4");
    }
    if (auto_surface.d1 != auto_surface.d2) {
        throw ConfigError("mainlobe is defined on an auto surface");
    }
    const RMat& mag = auto_surface.mag;
    const int half = params.N / 2;
    const int r0 = grid.zero_index();

    MainlobeInfo info;
    info.b = half; // symmetry point, when no interior minimum exists
    for (int tau = 1; tau < half; ++tau) {
        if (mag(tau, r0) <= mag(tau - 1, r0) && mag(tau, r0) <= mag(tau + 1, r0)) {
            info.b = tau;
            break;
        }
    }
    info.f_b = grid.f_d_max; // clipped when no interior minimum exists
    for (int r = r0 + 1; r + 1 < grid.J; ++r) {
        if (mag(0, r) <= mag(0, r - 1) && mag(0, r) <= mag(0, r + 1)) {
            info.f_b = grid.value(r);
            break;
        }
    }
    info.w1 = static_cast<double>(info.b) * params.M / static_cast<double>(params.N);
    info.w2 = info.f_b * static_cast<double>(params.K) * params.symbol_interval();
    return info;
}

namespace {

// Largest sidelobe ratio of one auto surface outside the mainlobe region.
double auto_peak_ratio(const AfSurface& s, int b, double f_b, const DopplerGrid& grid,
                       bool full_doppler) {
    const int n = static_cast<int>(s.mag.rows());
    if (b < 1) {
        throw ConfigError("mainlobe exclusion b must be >= 1");
    }
    if (2 * b + 2 > n) {
        throw ConfigError("mainlobe exclusion covers every delay bin");
    }
    const double f_limit = f_b * (1.0 + 1e-12);
    double peak = 0.0;
    for (int r = 0; r < grid.J; ++r) {
        if (!full_doppler && std::abs(grid.value(r)) > f_limit) {
            continue;
        }
        for (int tau = b + 1; tau <= n - b - 1; ++tau) {
            peak = std::max(peak, s.mag(tau, r));
        }
    }
    return peak / s.af_ref;
}

double cross_peak_ratio(const AfSurface& s) {
    return s.mag.maxCoeff() / s.af_ref;
}

} // namespace

double apsl_db(const std::vector<AfSurface>& auto_surfaces, int b, double f_b,
               const DopplerGrid& grid, bool full_doppler) {
    double worst = 0.0;
    for (const AfSurface& s : auto_surfaces) {
        worst = std::max(worst, auto_peak_ratio(s, b, f_b, grid, full_doppler));
    }
    return amplitude_db(worst);
}

std::optional<double> cpsl_db(const std::vector<AfSurface>& cross_surfaces) {
    if (cross_surfaces.empty()) {
        return std::nullopt;
    }
    double worst = 0.0;
    for (const AfSurface& s : cross_surfaces) {
        worst = std::max(worst, cross_peak_ratio(s));
    }
    return amplitude_db(worst);
}

SetMetrics evaluate_set(const std::vector<CMat>& delay_signals, const DopplerGrid& grid,
                        const WaveformParams& params, const SetMetricsOptions& options) {
    if (delay_signals.empty()) {
        throw ConfigError("empty sequence group set");
    }
    const int d_count = static_cast<int>(delay_signals.size());
    const double af_ref = static_cast<double>(params.K);

    std::vector<CMat> z;
    z.reserve(delay_signals.size());
    for (const CMat& raw : delay_signals) {
        z.push_back(normalize_energy(raw));
    }

    std::vector<GroupSpectra> spectra(static_cast<std::size_t>(d_count));
    parallel_for(static_cast<std::size_t>(d_count), options.threads, [&](std::size_t d) {
        spectra[d] = af_spectra(z[d], grid, params);
    });

    auto make_surface = [&](int d1, int d2) {
        AfSurface s;
        s.d1 = d1;
        s.d2 = d2;
        s.af_ref = af_ref;
        s.mag.resize(params.N, grid.J);
        for (int r = 0; r < grid.J; ++r) {
            s.mag.col(r) = af_column(spectra[static_cast<std::size_t>(d1)],
                                     spectra[static_cast<std::size_t>(d2)], r, params)
                               .cwiseAbs();
        }
        return s;
    };

    // Group 0's auto surface anchors the mainlobe measurement.
    AfSurface first_auto = make_surface(0, 0);
    const MainlobeInfo lobe = mainlobe(first_auto, grid, params);
    const int b = options.b >= 0 ? options.b : lobe.b;
    const double f_b = options.f_b >= 0.0 ? options.f_b : lobe.f_b;

    struct PairJob {
        int d1 = 0, d2 = 0;
    };
    std::vector<PairJob> jobs;
    for (int d1 = 0; d1 < d_count; ++d1) {
        for (int d2 = 0; d2 < d_count; ++d2) {
            if (d1 == 0 && d2 == 0) {
                continue; // already computed
            }
            jobs.push_back({d1, d2});
        }
    }

    std::vector<double> ratios(jobs.size(), 0.0);
    std::vector<AfSurface> kept;
    if (options.keep_surfaces) {
        kept.resize(jobs.size());
    }
    parallel_for(jobs.size(), options.threads, [&](std::size_t j) {
        const AfSurface s = make_surface(jobs[j].d1, jobs[j].d2);
        ratios[j] = jobs[j].d1 == jobs[j].d2
                        ? auto_peak_ratio(s, b, f_b, grid, options.full_doppler)
                        : cross_peak_ratio(s);
        if (options.keep_surfaces) {
            kept[j] = s;
        }
    });

    double apsl_ratio = auto_peak_ratio(first_auto, b, f_b, grid, options.full_doppler);
    double cpsl_ratio = 0.0;
    for (std::size_t j = 0; j < jobs.size(); ++j) {
        if (jobs[j].d1 == jobs[j].d2) {
            apsl_ratio = std::max(apsl_ratio, ratios[j]);
        } else {
            cpsl_ratio = std::max(cpsl_ratio, ratios[j]);
        }
    }

    // Sidelobes cannot exceed the normalized reference peak (Cauchy-Schwarz
    // on unit-energy columns); a violation means the normalization broke.
    if (apsl_ratio > 1.0 + 1e-9 || cpsl_ratio > 1.0 + 1e-9) {
        throw DegenerateInputError("sidelobe level exceeds the normalized reference peak");
    }

    SetMetrics out;
    out.report.papr_db = papr_db_set(z);
    out.report.apsl_db = amplitude_db(apsl_ratio);
    if (d_count >= 2) {
        out.report.cpsl_db = amplitude_db(cpsl_ratio);
    }
    out.report.b = b;
    out.report.f_b = f_b;
    out.report.w1 = static_cast<double>(b) * params.M / static_cast<double>(params.N);
    out.report.w2 = f_b * static_cast<double>(params.K) * params.symbol_interval();
    if (options.keep_surfaces) {
        out.surfaces.reserve(jobs.size() + 1);
        out.surfaces.push_back(std::move(first_auto));
        for (auto& s : kept) {
            out.surfaces.push_back(std::move(s));
        }
    }
    return out;
}

} // namespace isacwave
