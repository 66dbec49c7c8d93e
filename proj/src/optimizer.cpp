// SPDX-License-Identifier: Apache-2.0

#include "isacwave/optimizer.hpp"

#include "isacwave/fft.hpp"
#include "isacwave/rng.hpp"
#include "isacwave/threading.hpp"

#include <algorithm>
#include <cmath>

namespace isacwave {

namespace {

constexpr double kDb10 = 10.0 / std::numbers::ln10; // d(10*log10 x)/dx = kDb10 / x
constexpr double kDb20 = 20.0 / std::numbers::ln10;

} // namespace

// --------------------------------------------------------------------------
// Constraint modes and the phase quantizer

ConstraintMode ConstraintMode::continuous() {
    return ConstraintMode{ConstraintTag::Continuous, 4, {}, false};
}

ConstraintMode ConstraintMode::unimodular_continuous() {
    return ConstraintMode{ConstraintTag::UnimodularContinuous, 4, {}, false};
}

ConstraintMode ConstraintMode::unimodular_discrete(int b_phases) {
    ConstraintMode mode{ConstraintTag::UnimodularDiscrete, b_phases, {}, false};
    mode.omega.reserve(static_cast<std::size_t>(b_phases));
    for (int q = 0; q < b_phases; ++q) {
        mode.omega.push_back(std::numbers::pi / b_phases + kTwoPi * q / b_phases);
    }
    return mode;
}

void ConstraintMode::validate() const {
    if (tag != ConstraintTag::UnimodularDiscrete) {
        return;
    }
    if (b_phases < 2) {
        throw ConfigError("discrete mode needs at least two candidate phases");
    }
    if (static_cast<int>(omega.size()) != b_phases) {
        throw ConfigError("phase set size must equal B");
    }
    for (std::size_t i = 0; i < omega.size(); ++i) {
        if (omega[i] < 0.0 || omega[i] >= kTwoPi) {
            throw ConfigError("candidate phases must lie in [0, 2pi)");
        }
        if (i > 0 && !(omega[i] > omega[i - 1])) {
            throw ConfigError("candidate phases must be strictly increasing");
        }
    }
}

double quantize_phase(double theta, const ConstraintMode& mode) {
    double wrapped = std::fmod(theta, kTwoPi);
    if (wrapped < 0.0) {
        wrapped += kTwoPi;
    }
    double best = mode.omega.front();
    double best_dist = std::numeric_limits<double>::infinity();
    for (double phi : mode.omega) {
        double dist = std::abs(wrapped - phi);
        if (mode.circular) {
            dist = std::min(dist, kTwoPi - dist);
        }
        if (dist < best_dist) { // strict: ties keep the smaller phase
            best_dist = dist;
            best = phi;
        }
    }
    return best;
}

RVec quantize_phases(const RVec& theta, const ConstraintMode& mode) {
    mode.validate();
    if (mode.omega.empty()) {
        throw ConfigError("quantizer needs a nonempty phase set");
    }
    RVec out(theta.size());
    for (Eigen::Index i = 0; i < theta.size(); ++i) {
        out(i) = quantize_phase(theta(i), mode);
    }
    return out;
}

// --------------------------------------------------------------------------
// Parameter layout and materialization

ParamLayout ParamLayout::make(const ConstraintMode& mode, int m, int d, int l_seq, int l_grp,
                              bool optimize_fdss, bool fdss_complex) {
    if (m < 1 || d < 1 || l_seq < 1 || l_grp < 1) {
        throw ConfigError("parameter layout needs positive dimensions");
    }
    ParamLayout layout;
    layout.fdss = optimize_fdss;
    layout.fdss_complex = optimize_fdss && fdss_complex;
    layout.amplitudes = mode.tag == ConstraintTag::Continuous;
    layout.M = m;
    layout.D = d;
    layout.L_seq = l_seq;
    layout.L_grp = l_grp;
    return layout;
}

namespace {

struct MaterializedFull {
    Materialized out;
    RVec theta_used; // D*E materialized phases (after quantization)
};

MaterializedFull materialize_full(const RVec& w, const ParamLayout& layout,
                                  const ConstraintMode& mode, const CVec& fixed_c) {
    if (w.size() != layout.size()) {
        throw ConfigError("parameter vector length does not match the layout");
    }
    MaterializedFull full;
    full.out.set.mode = mode.tag;
    if (layout.fdss) {
        full.out.c.resize(layout.M);
        for (int m = 0; m < layout.M; ++m) {
            full.out.c(m) =
                layout.fdss_complex
                    ? Complex(w(layout.fdss_offset() + m), w(layout.fdss_offset() + layout.M + m))
                    : Complex(std::abs(w(layout.fdss_offset() + m)), 0.0);
        }
    } else {
        if (fixed_c.size() != layout.M) {
            throw ConfigError("fixed FDSS vector must have M entries");
        }
        full.out.c = fixed_c;
    }

    const int elems = layout.group_elems();
    full.theta_used.resize(layout.D * elems);
    full.out.set.groups.reserve(static_cast<std::size_t>(layout.D));
    for (int d = 0; d < layout.D; ++d) {
        CMat s(layout.L_seq, layout.L_grp);
        for (int e = 0; e < elems; ++e) {
            const int flat = d * elems + e;
            double theta = w(layout.phase_offset() + flat);
            if (mode.tag == ConstraintTag::UnimodularDiscrete) {
                theta = quantize_phase(theta, mode);
            }
            full.theta_used(flat) = theta;
            const double amp = layout.amplitudes ? w(layout.amp_offset() + flat) : 1.0;
            s(e % layout.L_seq, e / layout.L_seq) = std::polar(amp, theta);
        }
        full.out.set.groups.push_back(std::move(s));
    }
    return full;
}

} // namespace

Materialized materialize(const RVec& w, const ParamLayout& layout, const ConstraintMode& mode,
                         const CVec& fixed_c) {
    mode.validate();
    return materialize_full(w, layout, mode, fixed_c).out;
}

// --------------------------------------------------------------------------
// Loss forward and reverse

void LossConfig::validate(int d_count) const {
    if (omega1 < 0.0 || omega1 > 1.0 || omega2 < 0.0 || omega2 > 1.0 ||
        std::abs(omega1 + omega2 - 1.0) > 1e-12) {
        throw ConfigError("loss weights must lie in [0, 1] and sum to 1");
    }
    if (!(sigma > 0.0)) {
        throw ConfigError("penalty factor must be positive");
    }
    if (b < 1) {
        throw ConfigError("mainlobe exclusion b must be >= 1");
    }
    if (d_count < 2 && omega2 > 0.0) {
        throw ConfigError("cross-AF weight requires at least two sequence groups");
    }
    if (lse_temperature < 0.0) {
        throw ConfigError("smoothing temperature must be nonnegative");
    }
    if (lse_temperature > 0.0 && db_terms) {
        throw ConfigError("log-sum-exp smoothing is only defined for ratio-valued terms");
    }
}

namespace {

struct ForwardState {
    MaterializedFull mat;
    std::vector<CMat> y;     // B * S * A per group (before shaping)
    std::vector<CMat> z_raw; // N x K delay-time signals
    std::vector<CMat> z;     // unit-energy columns
    std::vector<RVec> nu;    // per-column norms
    std::vector<GroupSpectra> spectra;
};

struct AfBin {
    int d1 = -1, d2 = -1, r = -1, tau = -1;
    Complex af;
    double ratio = 0.0;
};

struct PaprBin {
    int d = -1, k = -1, n = -1;
    double ratio = 0.0;
};

CVec doppler_ramp(double f, int n, double ts) {
    CVec ramp(n);
    for (int i = 0; i < n; ++i) {
        const double ang = kTwoPi * f * static_cast<double>(i) * ts;
        ramp(i) = Complex(std::cos(ang), std::sin(ang));
    }
    return ramp;
}

// Adjoint of one AF column for the ordered pair (d1, d2) at Doppler r:
// af = (1/N) dft(sum_k shiftedQ[r][k] .* conj(baseP[k])).
void backprop_af_column(const ForwardState& fs, int d1, int d2, int r, const CVec& af_bar,
                        const DopplerGrid& grid, const WaveformParams& params,
                        std::vector<CMat>& z_bar) {
    const int n = params.N;
    const double ts = params.sample_interval();
    const double tc = params.symbol_interval();
    const double f = grid.value(r);

    const CVec y_bar = ifft_u(af_bar) / static_cast<double>(n);
    const CVec ramp_conj = doppler_ramp(f, n, ts).conjugate();
    const auto& sp_p = fs.spectra[static_cast<std::size_t>(d1)];
    const auto& sp_q = fs.spectra[static_cast<std::size_t>(d2)];
    const int k_count = static_cast<int>(sp_p.base.size());
    for (int k = 0; k < k_count; ++k) {
        const CVec& yhat = sp_q.shifted[static_cast<std::size_t>(r)][static_cast<std::size_t>(k)];
        const CVec& vhat = sp_p.base[static_cast<std::size_t>(k)];

        // Q side: yhat = dft(zq .* ramp) * symphase.
        const double ang_k = kTwoPi * f * static_cast<double>(k) * tc;
        const Complex symphase_conj(std::cos(ang_k), -std::sin(ang_k));
        CVec yhat_bar = y_bar.cwiseProduct(vhat) * symphase_conj;
        ifft_u_inplace(yhat_bar.data(), static_cast<std::size_t>(n));
        z_bar[static_cast<std::size_t>(d2)].col(k) += yhat_bar.cwiseProduct(ramp_conj);

        // P side enters conjugated.
        CVec vhat_bar = y_bar.conjugate().cwiseProduct(yhat);
        ifft_u_inplace(vhat_bar.data(), static_cast<std::size_t>(n));
        z_bar[static_cast<std::size_t>(d1)].col(k) += vhat_bar;
    }
}

// Scale-free PAPR gradient, attached directly to the raw (pre-normalization)
// column: ratio = N |z_n*|^2 / sum_i |z_i|^2.
void backprop_papr(const CVec& raw_col, int n_star, double upstream, CVec& raw_bar_col) {
    const int n = static_cast<int>(raw_col.size());
    const double energy = raw_col.squaredNorm();
    const double t_star = std::norm(raw_col(n_star));
    const double scale = upstream * 2.0 * static_cast<double>(n) / (energy * energy);
    raw_bar_col += scale * (-t_star) * raw_col;
    raw_bar_col(n_star) += scale * energy * raw_col(n_star);
}

} // namespace

LossBreakdown evaluate_loss(const RVec& w, const ParamLayout& layout, const ConstraintMode& mode,
                            const Preprocessor& pre, const LossConfig& cfg,
                            const DopplerGrid& grid, const WaveformParams& params,
                            RVec* grad, int threads) {
    mode.validate();
    cfg.validate(layout.D);
    if (pre.B.rows() != layout.M || pre.B.cols() != layout.L_seq ||
        pre.A.rows() != layout.L_grp || pre.A.cols() != params.K ||
        layout.M != params.M || layout.D != params.D) {
        throw ConfigError("preprocessor factors do not match the parameter layout");
    }
    const int n = params.N;
    const int d_count = layout.D;
    const int k_count = params.K;
    const double af_ref = static_cast<double>(k_count);
    if (2 * cfg.b + 2 > n) {
        throw ConfigError("mainlobe exclusion covers every delay bin");
    }

    // ---- forward ----
    ForwardState fs;
    fs.mat = materialize_full(w, layout, mode, pre.c);
    const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
    fs.y.resize(static_cast<std::size_t>(d_count));
    fs.z_raw.resize(static_cast<std::size_t>(d_count));
    fs.z.resize(static_cast<std::size_t>(d_count));
    fs.nu.resize(static_cast<std::size_t>(d_count));
    fs.spectra.resize(static_cast<std::size_t>(d_count));
    std::vector<std::string> group_errors(static_cast<std::size_t>(d_count));
    parallel_for(static_cast<std::size_t>(d_count), threads, [&](std::size_t sd) {
        fs.y[sd] = pre.B * fs.mat.out.set.groups[sd] * pre.A;
        CMat x = fs.y[sd];
        x.array().colwise() *= fs.mat.out.c.array();
        CMat z_raw(n, k_count);
        CVec buf(n);
        for (int k = 0; k < k_count; ++k) {
            buf.setZero();
            buf.head(layout.M) = x.col(k);
            ifft_u_inplace(buf.data(), static_cast<std::size_t>(n));
            z_raw.col(k) = buf * inv_sqrt_n;
        }
        fs.z_raw[sd] = std::move(z_raw);
        fs.nu[sd].resize(k_count);
        fs.z[sd].resize(n, k_count);
        for (int k = 0; k < k_count; ++k) {
            const double nu = fs.z_raw[sd].col(k).norm();
            if (!(nu > 0.0)) {
                group_errors[sd] = "materialized signal has an all-zero column";
                return;
            }
            fs.nu[sd](k) = nu;
            fs.z[sd].col(k) = fs.z_raw[sd].col(k) / nu;
        }
        fs.spectra[sd] = af_spectra(fs.z[sd], grid, params);
    });
    for (const std::string& err : group_errors) {
        if (!err.empty()) {
            throw DegenerateInputError(err);
        }
    }

    // PAPR peak over groups and symbols, evaluated on the raw columns (the
    // ratio is scale-free, so this matches the normalized signal).
    PaprBin papr;
    for (int d = 0; d < d_count; ++d) {
        for (int k = 0; k < k_count; ++k) {
            const CVec col = fs.z_raw[static_cast<std::size_t>(d)].col(k);
            int n_star = 0;
            double peak = std::norm(col(0));
            for (int i = 1; i < n; ++i) {
                const double t = std::norm(col(i));
                if (t > peak) {
                    peak = t;
                    n_star = i;
                }
            }
            const double ratio = peak * static_cast<double>(n) / col.squaredNorm();
            if (ratio > papr.ratio) {
                papr = {d, k, n_star, ratio};
            }
        }
    }
    const double papr_db = kDb10 * std::log(papr.ratio);

    // Doppler bins admitted into the APSL region.
    const double f_limit = (cfg.f_b < 0.0 ? grid.f_d_max : cfg.f_b) * (1.0 + 1e-12);
    std::vector<int> apsl_rs;
    for (int r = 0; r < grid.J; ++r) {
        if (cfg.full_doppler || std::abs(grid.value(r)) <= f_limit) {
            apsl_rs.push_back(r);
        }
    }
    if (apsl_rs.empty()) {
        throw ConfigError("APSL Doppler restriction excludes the whole grid");
    }

    auto column = [&](int d1, int d2, int r) {
        return af_column(fs.spectra[static_cast<std::size_t>(d1)],
                         fs.spectra[static_cast<std::size_t>(d2)], r, params);
    };

    // Hard maxima with first-achiever ties. Jobs scan lexicographically and
    // the slot merge keeps job order, so any thread count reproduces the
    // serial argmax bit for bit.
    AfBin apsl_bin;
    {
        std::vector<AfBin> per_group(static_cast<std::size_t>(d_count));
        parallel_for(static_cast<std::size_t>(d_count), threads, [&](std::size_t sd) {
            const int d = static_cast<int>(sd);
            AfBin local;
            for (int r : apsl_rs) {
                const CVec af = column(d, d, r);
                for (int tau = cfg.b + 1; tau <= n - cfg.b - 1; ++tau) {
                    const double ratio = std::abs(af(tau)) / af_ref;
                    if (ratio > local.ratio) {
                        local = {d, d, r, tau, af(tau), ratio};
                    }
                }
            }
            per_group[sd] = local;
        });
        for (const AfBin& bin : per_group) {
            if (bin.ratio > apsl_bin.ratio) {
                apsl_bin = bin;
            }
        }
    }
    AfBin cpsl_bin;
    const bool want_cpsl = d_count >= 2;
    std::vector<std::pair<int, int>> cross_pairs;
    if (want_cpsl) {
        for (int d1 = 0; d1 < d_count; ++d1) {
            for (int d2 = 0; d2 < d_count; ++d2) {
                if (d1 != d2) {
                    cross_pairs.emplace_back(d1, d2);
                }
            }
        }
        std::vector<AfBin> per_pair(cross_pairs.size());
        parallel_for(cross_pairs.size(), threads, [&](std::size_t j) {
            const auto [d1, d2] = cross_pairs[j];
            AfBin local;
            for (int r = 0; r < grid.J; ++r) {
                const CVec af = column(d1, d2, r);
                for (int tau = 0; tau < n; ++tau) {
                    const double ratio = std::abs(af(tau)) / af_ref;
                    if (ratio > local.ratio) {
                        local = {d1, d2, r, tau, af(tau), ratio};
                    }
                }
            }
            per_pair[j] = local;
        });
        for (const AfBin& bin : per_pair) {
            if (bin.ratio > cpsl_bin.ratio) {
                cpsl_bin = bin;
            }
        }
    }

    // Optional log-sum-exp smoothing of the two AF maxima.
    const double temp = cfg.lse_temperature;
    double apsl_lse_denom = 0.0, cpsl_lse_denom = 0.0;
    if (temp > 0.0) {
        std::vector<double> apsl_parts(static_cast<std::size_t>(d_count), 0.0);
        parallel_for(static_cast<std::size_t>(d_count), threads, [&](std::size_t sd) {
            const int d = static_cast<int>(sd);
            double acc = 0.0;
            for (int r : apsl_rs) {
                const CVec af = column(d, d, r);
                for (int tau = cfg.b + 1; tau <= n - cfg.b - 1; ++tau) {
                    acc += std::exp((std::abs(af(tau)) / af_ref - apsl_bin.ratio) / temp);
                }
            }
            apsl_parts[sd] = acc;
        });
        for (double part : apsl_parts) {
            apsl_lse_denom += part;
        }
        if (want_cpsl) {
            std::vector<double> cpsl_parts(cross_pairs.size(), 0.0);
            parallel_for(cross_pairs.size(), threads, [&](std::size_t j) {
                const auto [d1, d2] = cross_pairs[j];
                double acc = 0.0;
                for (int r = 0; r < grid.J; ++r) {
                    const CVec af = column(d1, d2, r);
                    for (int tau = 0; tau < n; ++tau) {
                        acc += std::exp((std::abs(af(tau)) / af_ref - cpsl_bin.ratio) / temp);
                    }
                }
                cpsl_parts[j] = acc;
            });
            for (double part : cpsl_parts) {
                cpsl_lse_denom += part;
            }
        }
    }

    LossBreakdown bd;
    bd.apsl_ratio = apsl_bin.ratio;
    bd.cpsl_ratio = cpsl_bin.ratio;
    bd.apsl_db = amplitude_db(apsl_bin.ratio);
    bd.cpsl_db = amplitude_db(cpsl_bin.ratio);
    bd.papr_db = papr_db;
    bd.penalty = cfg.sigma * std::max(papr_db - cfg.p_th_db, 0.0);

    const double apsl_term =
        temp > 0.0 ? apsl_bin.ratio + temp * std::log(apsl_lse_denom)
                   : (cfg.db_terms ? bd.apsl_db : bd.apsl_ratio);
    const double cpsl_term =
        !want_cpsl ? 0.0
                   : (temp > 0.0 ? cpsl_bin.ratio + temp * std::log(cpsl_lse_denom)
                                 : (cfg.db_terms ? bd.cpsl_db : bd.cpsl_ratio));
    bd.loss = cfg.omega1 * apsl_term + cfg.omega2 * cpsl_term + bd.penalty;

    if (grad == nullptr) {
        return bd;
    }

    // ---- reverse ----
    std::vector<CMat> z_bar(static_cast<std::size_t>(d_count));
    std::vector<CMat> z_raw_bar(static_cast<std::size_t>(d_count));
    for (int d = 0; d < d_count; ++d) {
        z_bar[static_cast<std::size_t>(d)] = CMat::Zero(n, k_count);
        z_raw_bar[static_cast<std::size_t>(d)] = CMat::Zero(n, k_count);
    }

    // Upstream weight on |af| for one bin of a term.
    auto af_mag_weight = [&](double term_weight, double ratio) {
        if (cfg.db_terms) {
            return ratio > 0.0 ? term_weight * kDb20 / (ratio * af_ref) : 0.0;
        }
        return term_weight / af_ref;
    };

    if (temp > 0.0) {
        // Every region bin contributes with its softmax weight.
        for (int d = 0; d < d_count && cfg.omega1 > 0.0; ++d) {
            for (int r : apsl_rs) {
                const CVec af = column(d, d, r);
                CVec af_bar = CVec::Zero(n);
                bool any = false;
                for (int tau = cfg.b + 1; tau <= n - cfg.b - 1; ++tau) {
                    const double mag = std::abs(af(tau));
                    if (mag <= 0.0) {
                        continue;
                    }
                    const double soft =
                        std::exp((mag / af_ref - apsl_bin.ratio) / temp) / apsl_lse_denom;
                    af_bar(tau) = cfg.omega1 * soft / af_ref * af(tau) / mag;
                    any = true;
                }
                if (any) {
                    backprop_af_column(fs, d, d, r, af_bar, grid, params, z_bar);
                }
            }
        }
        if (want_cpsl && cfg.omega2 > 0.0) {
            for (int d1 = 0; d1 < d_count; ++d1) {
                for (int d2 = 0; d2 < d_count; ++d2) {
                    if (d1 == d2) {
                        continue;
                    }
                    for (int r = 0; r < grid.J; ++r) {
                        const CVec af = column(d1, d2, r);
                        CVec af_bar = CVec::Zero(n);
                        bool any = false;
                        for (int tau = 0; tau < n; ++tau) {
                            const double mag = std::abs(af(tau));
                            if (mag <= 0.0) {
                                continue;
                            }
                            const double soft =
                                std::exp((mag / af_ref - cpsl_bin.ratio) / temp) / cpsl_lse_denom;
                            af_bar(tau) = cfg.omega2 * soft / af_ref * af(tau) / mag;
                            any = true;
                        }
                        if (any) {
                            backprop_af_column(fs, d1, d2, r, af_bar, grid, params, z_bar);
                        }
                    }
                }
            }
        }
    } else {
        if (cfg.omega1 > 0.0 && apsl_bin.tau >= 0 && std::abs(apsl_bin.af) > 0.0) {
            CVec af_bar = CVec::Zero(n);
            af_bar(apsl_bin.tau) = af_mag_weight(cfg.omega1, apsl_bin.ratio) * apsl_bin.af /
                                   std::abs(apsl_bin.af);
            backprop_af_column(fs, apsl_bin.d1, apsl_bin.d2, apsl_bin.r, af_bar, grid, params,
                               z_bar);
        }
        if (want_cpsl && cfg.omega2 > 0.0 && cpsl_bin.tau >= 0 && std::abs(cpsl_bin.af) > 0.0) {
            CVec af_bar = CVec::Zero(n);
            af_bar(cpsl_bin.tau) = af_mag_weight(cfg.omega2, cpsl_bin.ratio) * cpsl_bin.af /
                                   std::abs(cpsl_bin.af);
            backprop_af_column(fs, cpsl_bin.d1, cpsl_bin.d2, cpsl_bin.r, af_bar, grid, params,
                               z_bar);
        }
    }

    // Hinge subgradient: active only strictly above the threshold.
    if (papr_db > cfg.p_th_db) {
        const double upstream = cfg.sigma * kDb10 / papr.ratio;
        CVec col_bar = z_raw_bar[static_cast<std::size_t>(papr.d)].col(papr.k);
        backprop_papr(fs.z_raw[static_cast<std::size_t>(papr.d)].col(papr.k), papr.n,
                      upstream, col_bar);
        z_raw_bar[static_cast<std::size_t>(papr.d)].col(papr.k) = col_bar;
    }

    // Normalization adjoint, then the zero-padded inverse transform adjoint.
    grad->setZero(layout.size());
    CVec c_bar = CVec::Zero(layout.M);
    for (int d = 0; d < d_count; ++d) {
        const std::size_t sd = static_cast<std::size_t>(d);
        CMat x_bar(layout.M, k_count);
        for (int k = 0; k < k_count; ++k) {
            const double nu = fs.nu[sd](k);
            const Complex inner = z_bar[sd].col(k).dot(fs.z[sd].col(k)); // conj(z_bar) . z
            CVec raw_bar = (z_bar[sd].col(k) - inner.real() * fs.z[sd].col(k)) / nu;
            raw_bar += z_raw_bar[sd].col(k);
            fft_u_inplace(raw_bar.data(), static_cast<std::size_t>(n));
            x_bar.col(k) = raw_bar.head(layout.M) * inv_sqrt_n;
        }
        if (layout.fdss) {
            c_bar += (x_bar.cwiseProduct(fs.y[sd].conjugate())).rowwise().sum();
        }
        CMat y_bar = x_bar;
        y_bar.array().colwise() *= fs.mat.out.c.conjugate().array();
        const CMat s_bar = pre.B.adjoint() * y_bar * pre.A.adjoint();

        const int elems = layout.group_elems();
        for (int e = 0; e < elems; ++e) {
            const int flat = d * elems + e;
            const Complex sb = s_bar(e % layout.L_seq, e / layout.L_seq);
            const double theta = fs.mat.theta_used(flat);
            const Complex s_val = fs.mat.out.set.groups[sd](e % layout.L_seq, e / layout.L_seq);
            if (layout.amplitudes) {
                (*grad)(layout.amp_offset() + flat) =
                    (std::conj(sb) * std::polar(1.0, theta)).real();
            }
            // STE in discrete mode: the quantizer's slope is taken as 1.
            (*grad)(layout.phase_offset() + flat) = -(std::conj(sb) * s_val).imag();
        }
    }
    if (layout.fdss) {
        for (int m = 0; m < layout.M; ++m) {
            if (layout.fdss_complex) {
                (*grad)(layout.fdss_offset() + m) = c_bar(m).real();
                (*grad)(layout.fdss_offset() + layout.M + m) = c_bar(m).imag();
            } else {
                const double wm = w(layout.fdss_offset() + m);
                const double sign = wm > 0.0 ? 1.0 : (wm < 0.0 ? -1.0 : 0.0);
                (*grad)(layout.fdss_offset() + m) = c_bar(m).real() * sign;
            }
        }
    }
    return bd;
}

// --------------------------------------------------------------------------
// Adam

AdamState AdamState::zeros(int g) {
    AdamState s;
    s.m1 = RVec::Zero(g);
    s.m2 = RVec::Zero(g);
    s.t = 0;
    return s;
}

void adam_step(AdamState& state, RVec& w, const RVec& g, const AdamConfig& cfg) {
    if (state.m1.size() != g.size() || w.size() != g.size()) {
        throw ConfigError("Adam state and gradient sizes disagree");
    }
    state.t += 1;
    state.m1 = cfg.rho1 * state.m1 + (1.0 - cfg.rho1) * g;
    state.m2 = cfg.rho2 * state.m2 + (1.0 - cfg.rho2) * g.cwiseProduct(g);
    const double c1 = 1.0 - std::pow(cfg.rho1, static_cast<double>(state.t));
    const double c2 = 1.0 - std::pow(cfg.rho2, static_cast<double>(state.t));
    const RVec m1_hat = state.m1 / c1;
    const RVec m2_hat = state.m2 / c2;
    w -= cfg.eta * (m1_hat.array() / (m2_hat.array() + cfg.eps).sqrt()).matrix();
}

// --------------------------------------------------------------------------
// Optimization loop

OptimizeOutcome optimize_single(const Preprocessor& pre, const WaveformParams& params,
                                const DopplerGrid& grid, const OptimizeConfig& cfg,
                                const SequenceGroupSet* init_phases,
                                const ResumeState* resume) {
    cfg.mode.validate();
    if (cfg.iterations < 1) {
        throw ConfigError("need at least one iteration");
    }
    const ParamLayout layout =
        ParamLayout::make(cfg.mode, params.M, params.D, static_cast<int>(pre.B.cols()),
                          static_cast<int>(pre.A.rows()), cfg.optimize_fdss, cfg.fdss_complex);
    cfg.loss.validate(layout.D);

    OptimizeOutcome outcome;
    outcome.layout = layout;

    RVec w;
    AdamState adam = AdamState::zeros(layout.size());
    long t0 = 0;
    if (resume != nullptr) {
        if (resume->w.size() != layout.size()) {
            throw ConfigError("checkpoint parameter size does not match this configuration");
        }
        w = resume->w;
        adam = resume->adam;
        t0 = adam.t;
        if (t0 >= cfg.iterations) {
            throw ConfigError("checkpoint already reached the requested iteration count");
        }
    } else {
        w.resize(layout.size());
        if (layout.fdss) {
            // Unit shaping: ones in the (real) block, zeros in the
            // imaginary block of the complex variant.
            w.segment(layout.fdss_offset(), layout.fdss_block()).setZero();
            w.segment(layout.fdss_offset(), layout.M).setOnes();
        }
        if (layout.amplitudes) {
            w.segment(layout.amp_offset(), layout.D * layout.group_elems()).setOnes();
        }
        const int elems = layout.group_elems();
        if (init_phases != nullptr) {
            if (static_cast<int>(init_phases->groups.size()) != layout.D) {
                throw ConfigError("phase-init set has the wrong group count");
            }
            for (int d = 0; d < layout.D; ++d) {
                const CMat& s = init_phases->groups[static_cast<std::size_t>(d)];
                if (s.rows() != layout.L_seq || s.cols() != layout.L_grp) {
                    throw ConfigError("phase-init set has the wrong group shape");
                }
                for (int e = 0; e < elems; ++e) {
                    double theta = std::arg(s(e % layout.L_seq, e / layout.L_seq));
                    if (theta < 0.0) {
                        theta += kTwoPi;
                    }
                    w(layout.phase_offset() + d * elems + e) = theta;
                }
            }
        } else {
            SplitMix64 rng(cfg.seed);
            for (int i = 0; i < layout.D * elems; ++i) {
                w(layout.phase_offset() + i) = rng.next_double() * kTwoPi;
            }
        }
    }

    RVec g(layout.size());
    bool have_best = false;
    for (long step = t0 + 1; step <= cfg.iterations; ++step) {
        const LossBreakdown bd =
            evaluate_loss(w, layout, cfg.mode, pre, cfg.loss, grid, params, &g, cfg.threads);
        outcome.trace.push_back({step, bd.loss, bd.apsl_db, bd.cpsl_db, bd.papr_db});
        if (!have_best || bd.loss < outcome.best_loss) {
            have_best = true;
            outcome.best_loss = bd.loss;
            outcome.best_iter = step;
            outcome.best_w = w;
            outcome.best_breakdown = bd;
        }
        adam_step(adam, w, g, cfg.adam);
    }
    outcome.last_w = w;
    outcome.adam = std::move(adam);
    return outcome;
}

CandidateFactorA candidate_a(WaveformKind kind, const WaveformParams& params) {
    // Only K and beta shape this factor; neutralize alpha so e.g. the
    // CP-OFDM A can pair with a truncating B.
    WaveformParams local = params;
    local.alpha = 1.0;
    if (kind != WaveformKind::DftnSOtfs && kind != WaveformKind::Custom) {
        local.beta = 1.0;
    }
    const Preprocessor pre = build_preprocessor(kind, local);
    return CandidateFactorA{pre.A, local.beta, to_string(kind)};
}

CandidateFactorB candidate_b(WaveformKind kind, const WaveformParams& params) {
    WaveformParams local = params;
    local.beta = 1.0;
    const bool ftn = kind == WaveformKind::FtnSOfdm || kind == WaveformKind::FtnSOtfs ||
                     kind == WaveformKind::DftnSOtfs || kind == WaveformKind::Custom;
    if (!ftn) {
        local.alpha = 1.0;
    }
    const Preprocessor pre = build_preprocessor(kind, local);
    return CandidateFactorB{pre.B, pre.c, local.alpha, to_string(kind)};
}

std::vector<CandidateOutcome> optimize(const std::vector<CandidateFactorA>& a_set,
                                       const std::vector<CandidateFactorB>& b_set,
                                       const WaveformParams& params, const DopplerGrid& grid,
                                       const OptimizeConfig& cfg,
                                       const SequenceGroupSet* init_phases) {
    if (a_set.empty() || b_set.empty()) {
        throw ConfigError("candidate factor sets must be nonempty");
    }
    std::vector<CandidateOutcome> out;
    out.reserve(a_set.size() * b_set.size());
    int flat = 0;
    for (std::size_t ai = 0; ai < a_set.size(); ++ai) {
        for (std::size_t bi = 0; bi < b_set.size(); ++bi, ++flat) {
            Preprocessor pre;
            pre.kind = WaveformKind::Custom;
            pre.A = a_set[ai].A;
            pre.B = b_set[bi].B;
            pre.c = b_set[bi].c.size() == params.M ? b_set[bi].c : CVec::Ones(params.M);

            WaveformParams combo = params;
            combo.alpha = b_set[bi].alpha;
            combo.beta = a_set[ai].beta;

            OptimizeConfig local = cfg;
            local.seed = derive_seed(cfg.seed, static_cast<uint64_t>(flat));

            CandidateOutcome co;
            co.a_index = static_cast<int>(ai);
            co.b_index = static_cast<int>(bi);
            co.label = "a:" + a_set[ai].label + "|b:" + b_set[bi].label;
            co.pre = pre;
            co.result = optimize_single(pre, combo, grid, local, init_phases);
            out.push_back(std::move(co));
        }
    }
    return out;
}

} // namespace isacwave
