// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite: one line per criterion. Criteria 1-8 and 11 gate the
// exit code; 9 runs by default but is an optional gate, and 10 (the full
// headline optimization, hours of wall clock) only runs with --full.

#include "isacwave/baselines.hpp"
#include "isacwave/metrics.hpp"
#include "isacwave/optimizer.hpp"
#include "isacwave/pareto.hpp"
#include "isacwave/rng.hpp"
#include "isacwave/waveform.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

using namespace isacwave;

namespace {

int g_mandatory_failures = 0;

void report(int criterion, bool pass, const std::string& detail, bool gating = true) {
    std::printf("[%s] criterion %2d: %s\n", pass ? "PASS" : (gating ? "FAIL" : "FAIL*"),
                criterion, detail.c_str());
    std::fflush(stdout);
    if (!pass && gating) {
        ++g_mandatory_failures;
    }
}

void skip(int criterion, const std::string& detail) {
    std::printf("[SKIP] criterion %2d: %s\n", criterion, detail.c_str());
    std::fflush(stdout);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

CMat random_cmat(int rows, int cols, uint64_t seed) {
    SplitMix64 rng(seed);
    CMat m(rows, cols);
    for (int j = 0; j < cols; ++j) {
        for (int i = 0; i < rows; ++i) {
            m(i, j) = Complex(2.0 * rng.next_double() - 1.0, 2.0 * rng.next_double() - 1.0);
        }
    }
    return m;
}

WaveformParams desk_params(int m, int k, int n, int d, double alpha = 1.0, double beta = 1.0) {
    WaveformParams p;
    p.M = m;
    p.K = k;
    p.N = n;
    p.D = d;
    p.alpha = alpha;
    p.beta = beta;
    p.delta_f = 120.0e3;
    return p;
}

DopplerGrid fractional_grid(const WaveformParams& p, int j, double fill = 0.8) {
    const double res = 1.0 / (p.K * p.symbol_interval());
    return DopplerGrid::make(0.5 * fill * (j - 1) * res, j, p);
}

// ----- criterion 1 ---------------------------------------------------------

void criterion_af_oracle() {
    const auto t0 = std::chrono::steady_clock::now();
    const int n_choices[] = {16, 32, 64};
    const int k_choices[] = {1, 2, 4};
    const int j_choices[] = {3, 5};
    SplitMix64 pick(2024);
    double worst = 0.0;
    for (int inst = 0; inst < 50; ++inst) {
        const int n = n_choices[pick.next_u64() % 3];
        const int k = k_choices[pick.next_u64() % 3];
        const int j = j_choices[pick.next_u64() % 2];
        const auto p = desk_params(n / 2, k, n, 2);
        const DopplerGrid grid = fractional_grid(p, j);
        const CMat zp = normalize_energy(random_cmat(n, k, 1000 + inst));
        const CMat zq = normalize_energy(random_cmat(n, k, 2000 + inst));
        const AfSurface s = af_surface_fft(zp, zq, grid, p);
        for (int r = 0; r < j; ++r) {
            for (int tau = 0; tau < n; ++tau) {
                const Complex direct = af_direct(zp, zq, tau, grid.value(r), p);
                const double err =
                    std::abs(s.mag(tau, r) - std::abs(direct)) / std::max(1e-300, std::abs(direct));
                worst = std::max(worst, std::min(err, std::abs(s.mag(tau, r) - std::abs(direct))));
            }
        }
    }
    const double dt = seconds_since(t0);
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "AF fft path vs direct oracle, 50 instances: max rel err %.2e, %.1f s",
                  worst, dt);
    report(1, worst < 1e-9 && dt < 10.0, buf);
}

// ----- criterion 2 ---------------------------------------------------------

void criterion_roundtrip() {
    double worst = 0.0;
    int idx = 0;
    for (WaveformKind kind : {WaveformKind::CpOfdm, WaveformKind::DftSOfdm, WaveformKind::Otfs,
                              WaveformKind::FtnSOfdm, WaveformKind::FtnSOtfs,
                              WaveformKind::DftnSOtfs}) {
        const bool ftn = kind == WaveformKind::FtnSOfdm || kind == WaveformKind::FtnSOtfs ||
                         kind == WaveformKind::DftnSOtfs;
        const double alpha = ftn ? 0.5 : 1.0;
        const double beta = kind == WaveformKind::DftnSOtfs ? 0.5 : 1.0;
        const auto p = desk_params(8, 4, 16, 1, alpha, beta);
        Preprocessor pre = build_preprocessor(kind, p);
        CVec c = random_cmat(8, 1, 91 + idx).col(0);
        for (int i = 0; i < 8; ++i) {
            c(i) += Complex(c(i).real() >= 0 ? 0.5 : -0.5, 0.0);
        }
        pre.c = c;
        const CMat x = random_cmat(8, 4, 191 + idx);
        const CMat back = synthesize_tf(recover_sequences(x, pre), pre);
        worst = std::max(worst, (back - x).cwiseAbs().maxCoeff());
        ++idx;
    }
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "sequence recovery round trip, six members, random c: max err %.2e", worst);
    report(2, worst < 1e-9, buf);
}

// ----- criterion 3 ---------------------------------------------------------

void criterion_gradient() {
    const auto p = desk_params(8, 2, 32, 2, 0.5);
    const DopplerGrid grid = fractional_grid(p, 3);
    const Preprocessor pre = build_preprocessor(WaveformKind::FtnSOfdm, p);
    const ConstraintMode mode = ConstraintMode::continuous();
    const ParamLayout layout = ParamLayout::make(mode, 8, 2, 16, 2, true);
    LossConfig cfg;
    cfg.b = 4;
    cfg.p_th_db = 2.0;

    SplitMix64 rng(505);
    RVec w(layout.size());
    if (layout.fdss) {
        for (int m = 0; m < layout.M; ++m) {
            w(layout.fdss_offset() + m) = 0.5 + rng.next_double();
        }
    }
    const int count = layout.D * layout.group_elems();
    for (int i = 0; i < count; ++i) {
        w(layout.amp_offset() + i) = 0.5 + rng.next_double();
    }
    for (int i = 0; i < count; ++i) {
        w(layout.phase_offset() + i) = rng.next_double() * kTwoPi;
    }

    RVec g(layout.size());
    evaluate_loss(w, layout, mode, pre, cfg, grid, p, &g);
    auto loss_at = [&](const RVec& v) {
        return evaluate_loss(v, layout, mode, pre, cfg, grid, p).loss;
    };

    int tested = 0, skipped = 0;
    double worst = 0.0;
    for (int c = 0; c < 20; ++c) {
        const int i = static_cast<int>(rng.next_u64() % static_cast<uint64_t>(layout.size()));
        auto central = [&](double h) {
            RVec wp = w, wm = w;
            wp(i) += h;
            wm(i) -= h;
            return (loss_at(wp) - loss_at(wm)) / (2.0 * h);
        };
        const double fd_a = central(1e-6);
        const double fd_b = central(5e-6);
        if (std::abs(fd_a - fd_b) / std::max({std::abs(fd_a), std::abs(fd_b), 1e-7}) > 1e-3) {
            ++skipped;
            std::printf("    criterion 3: coordinate %d sits on an argmax tie, excluded\n", i);
            continue;
        }
        ++tested;
        worst = std::max(worst, std::abs(fd_a - g(i)) /
                                    std::max({std::abs(fd_a), std::abs(g(i)), 1e-7}));
    }
    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "reverse-mode vs central differences: %d coords tested (%d tie-excluded), "
                  "max rel err %.2e",
                  tested, skipped, worst);
    report(3, worst < 1e-4 && tested >= 10, buf);
}

// ----- criterion 4 ---------------------------------------------------------

void criterion_adam() {
    AdamConfig cfg;
    cfg.eta = 0.1;
    AdamState st = AdamState::zeros(1);
    RVec w = RVec::Zero(1);
    adam_step(st, w, RVec::Ones(1), cfg);
    const bool hand = std::abs(w(0) - (-0.099999999)) < 1e-9;

    AdamState st2 = AdamState::zeros(4);
    RVec w2(4);
    w2 << 1.0, -2.0, 0.125, 9.75;
    RVec w2_copy = w2;
    for (int i = 0; i < 25; ++i) {
        adam_step(st2, w2, RVec::Zero(4), cfg);
    }
    const bool frozen = std::memcmp(w2.data(), w2_copy.data(), 4 * sizeof(double)) == 0;

    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "Adam hand trace W'=%.12f (target -0.099999999), zero-grad runs %s",
                  w(0), frozen ? "bit-identical" : "drifted");
    report(4, hand && frozen, buf);
}

// ----- criterion 5 ---------------------------------------------------------

void criterion_quantizer() {
    const ConstraintMode mode = ConstraintMode::unimodular_discrete(4);
    SplitMix64 rng(99);
    bool idempotent = true;
    for (int i = 0; i < 100000; ++i) {
        const double theta = (rng.next_double() * 6.0 - 3.0) * kTwoPi;
        const double q1 = quantize_phase(theta, mode);
        if (quantize_phase(q1, mode) != q1) {
            idempotent = false;
            break;
        }
    }
    const bool fixed_point = quantize_phase(std::numbers::pi / 4, mode) == mode.omega[0];
    const bool no_wrap = quantize_phase(0.0, mode) == mode.omega[0];
    const bool tie = quantize_phase(std::numbers::pi, mode) == mode.omega[1];
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "quantizer idempotent on 1e5 phases: %s; pi/4->pi/4 %s, 0->pi/4 %s, "
                  "pi->3pi/4 %s",
                  idempotent ? "yes" : "no", fixed_point ? "ok" : "BAD",
                  no_wrap ? "ok" : "BAD", tie ? "ok" : "BAD");
    report(5, idempotent && fixed_point && no_wrap && tie, buf);
}

// ----- criterion 6 ---------------------------------------------------------

void criterion_zc() {
    double worst = 0.0;
    for (int n_zc : {7, 31, 199}) {
        auto p = desk_params(n_zc, 1, n_zc, 1);
        CMat z(n_zc, 1);
        z.col(0) = zc_sequence(n_zc, 1);
        z = normalize_energy(z);
        const double ref = std::abs(af_direct(z, z, 0, 0.0, p));
        for (int tau = 1; tau < n_zc; ++tau) {
            worst = std::max(worst, std::abs(af_direct(z, z, tau, 0.0, p)) / ref);
        }
    }
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "ZC periodic autocorrelation sidelobes (lengths 7/31/199): max rel %.2e",
                  worst);
    report(6, worst < 1e-9, buf);
}

// ----- criterion 7 ---------------------------------------------------------

void criterion_mainlobe() {
    // Dirichlet null: all-ones CP-OFDM grid.
    const auto p = desk_params(4, 1, 16, 1);
    const DopplerGrid grid = fractional_grid(p, 3);
    const CMat z = normalize_energy(tf_to_delay_time(CMat::Ones(4, 1), p));
    const MainlobeInfo lobe = mainlobe(af_surface_fft(z, z, grid, p), grid, p);
    const bool dirichlet = lobe.b == 4 && lobe.w1 == 1.0;

    // Shipped-roll-off RRC shaping at the full dimensions.
    WaveformParams pv = desk_params(204, 4, 2048, 1);
    const DopplerGrid gv = DopplerGrid::make(7200.0, 9, pv);
    const Baseline base = baseline_scheme(BaselineScheme::DftSOfdmGoldFdss, pv, 1);
    const CMat zv = normalize_energy(
        tf_to_delay_time(synthesize_tf(base.set.groups[0], base.pre), pv));
    const MainlobeInfo lv = mainlobe(af_surface_fft(zv, zv, gv, pv), gv, pv);
    const bool shaped = lv.w1 >= 1.3 && lv.w1 <= 1.5;

    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "mainlobe: Dirichlet b=%d W1=%.3f (want 4/1.0); RRC-shaped W1=%.3f "
                  "(want 1.3..1.5)",
                  lobe.b, lobe.w1, lv.w1);
    report(7, dirichlet && shaped, buf);
}

// ----- criterion 8 ---------------------------------------------------------

void criterion_smoke() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto p = desk_params(32, 2, 256, 4, 0.5);
    const DopplerGrid grid = fractional_grid(p, 5);
    const Preprocessor pre = build_preprocessor(WaveformKind::FtnSOfdm, p);
    OptimizeConfig cfg;
    cfg.iterations = 300;
    cfg.mode = ConstraintMode::unimodular_continuous();
    cfg.loss.b = 8; // N/M
    cfg.loss.p_th_db = 2.0;
    cfg.loss.db_terms = true; // shipped desk-scale loss settings
    cfg.loss.sigma = 5.0;
    cfg.adam.eta = 0.05;
    cfg.seed = 1;
    const OptimizeOutcome out = optimize_single(pre, p, grid, cfg);

    bool monotone = true;
    double best = out.trace.front().loss;
    for (const TraceRow& row : out.trace) {
        if (row.loss < best) {
            best = row.loss;
        } else if (best > out.best_loss && row.iter == out.trace.back().iter) {
            // best-so-far sequence is non-increasing by construction; the
            // final check below compares against the recorded best.
        }
        monotone = monotone && best <= out.trace.front().loss + 1e-15;
    }
    const double gain = out.trace.front().apsl_db - out.best_breakdown.apsl_db;
    const bool hinge_ok = out.best_breakdown.papr_db <= cfg.loss.p_th_db + 0.1;
    const double dt = seconds_since(t0);
    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "smoke run: APSL %.2f -> %.2f dB (gain %.2f, want >= 3), best PAPR %.2f dB "
                  "(cap %.1f), %.1f s",
                  out.trace.front().apsl_db, out.best_breakdown.apsl_db, gain,
                  out.best_breakdown.papr_db, cfg.loss.p_th_db + 0.1, dt);
    report(8, monotone && gain >= 3.0 && hinge_ok && dt < 300.0 &&
                  best == out.best_loss,
           buf);
}

// ----- criterion 9 (optional gate) -----------------------------------------

void criterion_baseline_anchors() {
    const auto t0 = std::chrono::steady_clock::now();
    WaveformParams p = desk_params(204, 4, 2048, 30);
    const DopplerGrid grid = DopplerGrid::make(7200.0, 9, p);
    const Baseline base = baseline_scheme(BaselineScheme::CpOfdmZc, p, 1);
    std::vector<CMat> z;
    for (const CMat& s : base.set.groups) {
        z.push_back(tf_to_delay_time(synthesize_tf(s, base.pre), p));
    }
    SetMetricsOptions opt;
    opt.threads = 4;
    const SetMetrics m = evaluate_set(z, grid, p, opt);
    const double apsl = m.report.apsl_db;
    const double cpsl = m.report.cpsl_db.value_or(0.0);
    const double papr = m.report.papr_db;
    const bool ok = std::abs(apsl - (-13.5)) <= 1.0 && std::abs(cpsl - (-17.4)) <= 1.0 &&
                    std::abs(papr - 5.6) <= 1.0;
    char buf[220];
    std::snprintf(buf, sizeof(buf),
                  "(optional gate) CP-OFDM+ZC at full scale: APSL %.2f (-13.5+-1), CPSL %.2f "
                  "(-17.4+-1), PAPR %.2f (5.6+-1) dB, %.0f s",
                  apsl, cpsl, papr, seconds_since(t0));
    report(9, ok, buf, /*gating=*/false);
}

// ----- criterion 10 (long-running, off by default) --------------------------

void criterion_headline(bool full) {
    if (!full) {
        skip(10, "(optional gate) full-scale headline optimization; run with --full "
                 "(hours of wall clock)");
        return;
    }
    const auto t0 = std::chrono::steady_clock::now();
    WaveformParams p = desk_params(204, 4, 2048, 30, 0.5);
    const DopplerGrid grid = DopplerGrid::make(7200.0, 9, p);
    const Preprocessor pre = build_preprocessor(WaveformKind::FtnSOfdm, p);
    // Mirrors configs/fullscale.json.
    OptimizeConfig cfg;
    cfg.iterations = 5000;
    cfg.mode = ConstraintMode::continuous();
    cfg.loss.b = 10;
    cfg.loss.p_th_db = 2.0;
    cfg.loss.db_terms = true;
    cfg.adam.eta = 0.02;
    cfg.threads = 2;

    // The run "reaches" the targets if any iterate satisfies all three at
    // once; every trace row carries the true hard metrics of its iterate.
    // Report the best PAPR-feasible iterate seen.
    double best_apsl = 0.0, best_cpsl = 0.0, best_papr = 0.0;
    bool reached = false, have = false;
    for (uint64_t restart = 0; restart < 4 && !reached; ++restart) {
        OptimizeConfig local = cfg;
        local.seed = derive_seed(1, restart);
        const OptimizeOutcome out = optimize_single(pre, p, grid, local);
        for (const TraceRow& row : out.trace) {
            reached = reached || (row.apsl_db <= -19.6 && row.cpsl_db <= -23.2 &&
                                  row.papr_db <= 2.0);
            if (row.papr_db <= 2.0 &&
                (!have || row.apsl_db + row.cpsl_db < best_apsl + best_cpsl)) {
                best_apsl = row.apsl_db;
                best_cpsl = row.cpsl_db;
                best_papr = row.papr_db;
                have = true;
            }
        }
        std::printf("    criterion 10: restart %llu best loss %.6f, best feasible "
                    "APSL/CPSL so far %.2f/%.2f\n",
                    static_cast<unsigned long long>(restart), out.best_loss, best_apsl,
                    best_cpsl);
        std::fflush(stdout);
    }
    char buf[220];
    std::snprintf(buf, sizeof(buf),
                  "(optional gate) headline: best feasible iterate APSL %.2f (<= -19.6), "
                  "CPSL %.2f (<= -23.2), PAPR %.2f (<= 2.0) dB, %.0f s",
                  best_apsl, best_cpsl, best_papr, seconds_since(t0));
    report(10, reached, buf, /*gating=*/false);
}

// ----- criterion 11 --------------------------------------------------------

void criterion_pareto_sweep() {
    const auto p = desk_params(32, 2, 256, 4, 0.5);
    const DopplerGrid grid = fractional_grid(p, 5);
    const Preprocessor pre = build_preprocessor(WaveformKind::FtnSOfdm, p);

    OptimizeConfig ocfg;
    ocfg.iterations = 220;
    ocfg.mode = ConstraintMode::continuous();
    ocfg.loss.b = 8;
    ocfg.loss.db_terms = true;
    ocfg.loss.sigma = 5.0;
    ocfg.adam.eta = 0.05;
    ocfg.seed = 1;

    // One sweep per threshold level with identical restart seeding, so the
    // nested-feasible-set comparison is start-for-start fair.
    const std::vector<double> p_th_levels{4.0, 2.0, 1.0};
    std::vector<TradeoffPoint> winners;
    std::vector<double> best_apsl_per_level;
    for (double p_th : p_th_levels) {
        SweepConfig scfg;
        scfg.omega1_grid = {0.2, 0.5, 0.8};
        scfg.p_th_grid_db = {p_th};
        scfg.restarts = 2;
        scfg.optimize = ocfg;
        scfg.threads = 4;
        const auto points = sweep(scfg, pre, p, grid);
        double best_apsl = 0.0;
        bool first = true;
        for (const TradeoffPoint& q : points) {
            if (q.cell_best) {
                winners.push_back(q);
                if (first || q.apsl_db < best_apsl) {
                    best_apsl = q.apsl_db;
                    first = false;
                }
            }
        }
        best_apsl_per_level.push_back(best_apsl);
    }

    // Non-domination flags vs an independent quadratic oracle.
    const auto kept = pareto_filter_indices(winners);
    std::vector<bool> flagged(winners.size(), false);
    for (std::size_t i : kept) {
        flagged[i] = true;
    }
    bool oracle_ok = true;
    for (std::size_t i = 0; i < winners.size() && oracle_ok; ++i) {
        bool dominated = false;
        for (std::size_t j = 0; j < winners.size() && !dominated; ++j) {
            if (j == i) {
                continue;
            }
            const bool no_worse = winners[j].papr_db <= winners[i].papr_db &&
                                  winners[j].apsl_db <= winners[i].apsl_db &&
                                  winners[j].cpsl_db <= winners[i].cpsl_db;
            const bool better = winners[j].papr_db < winners[i].papr_db ||
                                winners[j].apsl_db < winners[i].apsl_db ||
                                winners[j].cpsl_db < winners[i].cpsl_db;
            dominated = no_worse && better;
        }
        oracle_ok = flagged[i] == !dominated;
    }

    // Turning point on the p_th = 2 dB level (three omega1 cells).
    std::vector<TradeoffPoint> level;
    for (const TradeoffPoint& q : winners) {
        if (q.p_th_db == 2.0) {
            level.push_back(q);
        }
    }
    bool turning_ok = false;
    double turning_slope_err = -1.0;
    if (level.size() >= 3) {
        const std::size_t idx = turning_point_index(level);
        // Independent slope evaluation on the cpsl-sorted level: central
        // differences inside, one-sided at the ends. The reported point
        // must achieve the minimal |slope + 1|.
        std::vector<TradeoffPoint> sorted = level;
        std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
            return a.cpsl_db < b.cpsl_db;
        });
        auto slope_err = [&](std::size_t i) {
            const std::size_t lo = i == 0 ? 0 : i - 1;
            const std::size_t hi = i + 1 == sorted.size() ? i : i + 1;
            const double dc = sorted[hi].cpsl_db - sorted[lo].cpsl_db;
            if (dc == 0.0) {
                return 1e300;
            }
            return std::abs((sorted[hi].apsl_db - sorted[lo].apsl_db) / dc + 1.0);
        };
        double min_err = 1e300;
        double reported_err = 1e300;
        for (std::size_t i = 0; i < sorted.size(); ++i) {
            const double err = slope_err(i);
            min_err = std::min(min_err, err);
            if (sorted[i].apsl_db == level[idx].apsl_db &&
                sorted[i].cpsl_db == level[idx].cpsl_db) {
                reported_err = err;
            }
        }
        turning_slope_err = reported_err;
        turning_ok = reported_err <= min_err + 1e-12;
    }

    // Tightening the threshold never improves the best APSL.
    bool tighten_ok = true;
    for (std::size_t i = 1; i < best_apsl_per_level.size(); ++i) {
        tighten_ok = tighten_ok && best_apsl_per_level[i] >= best_apsl_per_level[i - 1] - 1e-12;
    }

    char buf[260];
    std::snprintf(buf, sizeof(buf),
                  "sweep: domination oracle %s; turning point on p_th=2 level (|slope+1|=%.3f) "
                  "%s; best APSL per p_th {4,2,1} dB = {%.2f, %.2f, %.2f} monotone %s",
                  oracle_ok ? "ok" : "BAD", turning_slope_err, turning_ok ? "ok" : "BAD",
                  best_apsl_per_level[0], best_apsl_per_level[1], best_apsl_per_level[2],
                  tighten_ok ? "yes" : "NO");
    report(11, oracle_ok && turning_ok && tighten_ok, buf);
}

} // namespace

int main(int argc, char** argv) {
    bool full = false;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--full") == 0) {
            full = true;
        }
    }
    criterion_af_oracle();
    criterion_roundtrip();
    criterion_gradient();
    criterion_adam();
    criterion_quantizer();
    criterion_zc();
    criterion_mainlobe();
    criterion_smoke();
    criterion_baseline_anchors();
    criterion_headline(full);
    criterion_pareto_sweep();

    if (g_mandatory_failures == 0) {
        std::printf("acceptance: all mandatory criteria passed\n");
        return 0;
    }
    std::printf("acceptance: %d mandatory criteria failed\n", g_mandatory_failures);
    return 1;
}
