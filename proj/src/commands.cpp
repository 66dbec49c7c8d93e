// SPDX-License-Identifier: Apache-2.0

#include "isacwave/commands.hpp"

#include "isacwave/io.hpp"
#include "isacwave/rng.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

namespace isacwave {

namespace {

namespace fs = std::filesystem;

void ensure_out_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw ConfigError("cannot create output directory " + dir + ": " + ec.message());
    }
}

std::string pair_stem(int d1, int d2) {
    return "af_" + std::to_string(d1) + "_" + std::to_string(d2);
}

// Delay-time signals of one materialized sequence group set.
std::vector<CMat> delay_signals(const SequenceGroupSet& set, const Preprocessor& pre,
                                const WaveformParams& params) {
    std::vector<CMat> z;
    z.reserve(set.groups.size());
    for (const CMat& s : set.groups) {
        z.push_back(tf_to_delay_time(synthesize_tf(s, pre), params));
    }
    return z;
}

struct EvaluatedSource {
    std::vector<CMat> z;
    WaveformParams params;
    DopplerGrid grid;
    std::string label;
};

EvaluatedSource source_from_scheme(const ExperimentConfig& cfg, const std::string& name) {
    const BaselineScheme scheme = baseline_scheme_from_string(name);
    const WaveformParams params = cfg.params_for(WaveformKind::CpOfdm); // alpha = beta = 1
    const Baseline base =
        baseline_scheme(scheme, params, cfg.seed, cfg.cp_ofdm_qpsk, cfg.rrc_roll_off,
                        cfg.zc_column_shifts,
                        cfg.zc_truncate ? ZcLengthMode::Truncate : ZcLengthMode::Extend);
    EvaluatedSource src{delay_signals(base.set, base.pre, params), params, cfg.grid(params),
                        name};
    return src;
}

EvaluatedSource source_from_checkpoint(const ExperimentConfig& cfg, const std::string& path) {
    const Checkpoint ckpt = read_checkpoint(path);
    ConstraintMode mode;
    switch (ckpt.mode_tag) {
    case ConstraintTag::Continuous:
        mode = ConstraintMode::continuous();
        break;
    case ConstraintTag::UnimodularContinuous:
        mode = ConstraintMode::unimodular_continuous();
        break;
    case ConstraintTag::UnimodularDiscrete:
        mode = ConstraintMode::unimodular_discrete(ckpt.b_phases);
        break;
    }
    mode.circular = ckpt.circular;
    const ParamLayout layout =
        ParamLayout::make(mode, ckpt.params.M, ckpt.params.D, static_cast<int>(ckpt.B.cols()),
                          static_cast<int>(ckpt.A.rows()), ckpt.optimize_fdss,
                          ckpt.fdss_complex);
    const Materialized mat = materialize(ckpt.best_w, layout, mode, ckpt.c);

    Preprocessor pre;
    pre.kind = ckpt.kind;
    pre.A = ckpt.A;
    pre.B = ckpt.B;
    pre.c = layout.fdss ? mat.c : ckpt.c;

    const DopplerGrid grid = DopplerGrid::make(ckpt.f_d_max, ckpt.J, ckpt.params);
    // Ignore the current config dimensions: the checkpoint is
    // self-describing. The config still supplies b/f_b overrides.
    (void)cfg;
    return EvaluatedSource{delay_signals(mat.set, pre, ckpt.params), ckpt.params, grid,
                           ckpt.label};
}

MetricsReport evaluate_and_write(const ExperimentConfig& cfg, const EvaluatedSource& src,
                                 const std::string& report_name, bool dump_af,
                                 std::vector<std::string>& files) {
    SetMetricsOptions opt;
    opt.b = cfg.b;
    opt.f_b = cfg.f_b_hz;
    opt.full_doppler = cfg.full_doppler;
    opt.keep_surfaces = dump_af;
    opt.threads = cfg.threads;
    const SetMetrics metrics = evaluate_set(src.z, src.grid, src.params, opt);

    write_metrics_report(cfg.out_dir + "/" + report_name, metrics.report);
    files.push_back(report_name);
    if (dump_af) {
        for (const AfSurface& s : metrics.surfaces) {
            const std::string stem = pair_stem(s.d1, s.d2);
            write_rarray(cfg.out_dir + "/" + stem + ".bin", s.mag);
            std::ofstream side(cfg.out_dir + "/" + stem + ".json");
            side << af_sidecar_json(s, src.grid);
            files.push_back(stem + ".bin");
            files.push_back(stem + ".json");
        }
    }
    return metrics.report;
}

} // namespace

void cmd_metrics(const ExperimentConfig& cfg, const std::string& source, bool dump_af) {
    ensure_out_dir(cfg.out_dir);
    const EvaluatedSource src = fs::exists(source) ? source_from_checkpoint(cfg, source)
                                                   : source_from_scheme(cfg, source);
    std::vector<std::string> files;
    const MetricsReport report = evaluate_and_write(cfg, src, "report.json", dump_af, files);
    write_manifest(cfg.out_dir, files);
    std::cout << "metrics[" << src.label << "]: papr_db=" << report.papr_db
              << " apsl_db=" << report.apsl_db;
    if (report.cpsl_db) {
        std::cout << " cpsl_db=" << *report.cpsl_db;
    }
    std::cout << " w1=" << report.w1 << "\n";
}

void cmd_optimize(const ExperimentConfig& cfg, const std::string& resume_path) {
    ensure_out_dir(cfg.out_dir);
    std::vector<std::string> files;

    struct Candidate {
        std::string label;
        Preprocessor pre;
        WaveformParams params;
        WaveformKind kind = WaveformKind::Custom;
        uint64_t seed = 0;
    };
    std::vector<Candidate> candidates;

    if (cfg.cross_product) {
        std::vector<CandidateFactorA> as;
        std::vector<CandidateFactorB> bs;
        for (const std::string& name : cfg.waveforms) {
            const WaveformKind kind = waveform_kind_from_string(name);
            as.push_back(candidate_a(kind, cfg.params_for(kind)));
            bs.push_back(candidate_b(kind, cfg.params_for(kind)));
        }
        int flat = 0;
        for (std::size_t ai = 0; ai < as.size(); ++ai) {
            for (std::size_t bi = 0; bi < bs.size(); ++bi, ++flat) {
                Candidate c;
                c.label = "a-" + as[ai].label + "_b-" + bs[bi].label;
                c.pre.kind = WaveformKind::Custom;
                c.pre.A = as[ai].A;
                c.pre.B = bs[bi].B;
                c.pre.c = bs[bi].c;
                c.params = cfg.params();
                c.params.alpha = bs[bi].alpha;
                c.params.beta = as[ai].beta;
                c.seed = derive_seed(cfg.seed, static_cast<uint64_t>(flat));
                candidates.push_back(std::move(c));
            }
        }
    } else {
        int flat = 0;
        for (const std::string& name : cfg.waveforms) {
            const WaveformKind kind = waveform_kind_from_string(name);
            Candidate c;
            c.label = name;
            c.kind = kind;
            c.params = cfg.params_for(kind);
            c.pre = build_preprocessor(kind, c.params);
            c.seed = derive_seed(cfg.seed, static_cast<uint64_t>(flat++));
            candidates.push_back(std::move(c));
        }
    }

    if (!resume_path.empty() && candidates.size() != 1) {
        throw ConfigError("resume requires a single-candidate configuration");
    }

    for (const Candidate& cand : candidates) {
        const DopplerGrid grid = cfg.grid(cand.params);
        OptimizeConfig ocfg = cfg.optimize_config(cand.params);
        ocfg.seed = cand.seed;

        SequenceGroupSet init_set;
        const SequenceGroupSet* init = nullptr;
        if (cfg.init.rfind("baseline:", 0) == 0) {
            const Baseline base =
                baseline_scheme(baseline_scheme_from_string(cfg.init.substr(9)), cand.params,
                                cfg.seed, cfg.cp_ofdm_qpsk, cfg.rrc_roll_off,
                                cfg.zc_column_shifts,
                                cfg.zc_truncate ? ZcLengthMode::Truncate : ZcLengthMode::Extend);
            init_set = base.set;
            init = &init_set;
        }

        OptimizeOutcome out;
        if (!resume_path.empty()) {
            const Checkpoint ckpt = read_checkpoint(resume_path);
            ResumeState rs{ckpt.w, AdamState{ckpt.m1, ckpt.m2, ckpt.t}};
            out = optimize_single(cand.pre, cand.params, grid, ocfg, init, &rs);
        } else {
            out = optimize_single(cand.pre, cand.params, grid, ocfg, init);
        }

        // Artifacts: trace, checkpoint, metrics of the best point.
        const std::string trace_name = "trace_" + cand.label + ".csv";
        write_trace_csv(cfg.out_dir + "/" + trace_name, out.trace);
        files.push_back(trace_name);

        Checkpoint ckpt;
        ckpt.label = cand.label;
        ckpt.kind = cand.kind;
        ckpt.mode_tag = ocfg.mode.tag;
        ckpt.b_phases = ocfg.mode.b_phases;
        ckpt.circular = ocfg.mode.circular;
        ckpt.optimize_fdss = ocfg.optimize_fdss;
        ckpt.fdss_complex = ocfg.fdss_complex;
        ckpt.params = cand.params;
        ckpt.f_d_max = grid.f_d_max;
        ckpt.J = grid.J;
        ckpt.seed = ocfg.seed;
        ckpt.t = out.adam.t;
        ckpt.A = cand.pre.A;
        ckpt.B = cand.pre.B;
        ckpt.c = cand.pre.c;
        ckpt.w = out.last_w;
        ckpt.best_w = out.best_w;
        ckpt.m1 = out.adam.m1;
        ckpt.m2 = out.adam.m2;
        const std::string ckpt_name = "checkpoint_" + cand.label + ".ckpt";
        write_checkpoint(cfg.out_dir + "/" + ckpt_name, ckpt);
        files.push_back(ckpt_name);

        const Materialized best =
            materialize(out.best_w, out.layout, ocfg.mode, cand.pre.c);
        Preprocessor best_pre = cand.pre;
        if (ocfg.optimize_fdss) {
            best_pre.c = best.c;
        }
        SetMetricsOptions mopt;
        mopt.b = ocfg.loss.b;
        mopt.f_b = ocfg.loss.f_b;
        mopt.full_doppler = ocfg.loss.full_doppler;
        mopt.threads = cfg.threads;
        const SetMetrics metrics =
            evaluate_set(delay_signals(best.set, best_pre, cand.params), grid, cand.params, mopt);
        const std::string report_name = "report_" + cand.label + ".json";
        write_metrics_report(cfg.out_dir + "/" + report_name, metrics.report);
        files.push_back(report_name);

        std::cout << "optimize[" << cand.label << "]: best loss " << out.best_loss
                  << " at iteration " << out.best_iter << " (papr_db=" << metrics.report.papr_db
                  << ", apsl_db=" << metrics.report.apsl_db << ")\n";
    }
    write_manifest(cfg.out_dir, files);
}

void cmd_pareto(const ExperimentConfig& cfg) {
    ensure_out_dir(cfg.out_dir);
    const WaveformKind kind = waveform_kind_from_string(cfg.waveforms.front());
    const WaveformParams params = cfg.params_for(kind);
    const DopplerGrid grid = cfg.grid(params);
    const Preprocessor pre = build_preprocessor(kind, params);

    SweepConfig sweep_cfg;
    sweep_cfg.omega1_grid = cfg.omega1_grid;
    sweep_cfg.p_th_grid_db = cfg.p_th_grid_db;
    sweep_cfg.restarts = cfg.restarts;
    sweep_cfg.optimize = cfg.optimize_config(params);
    sweep_cfg.threads = cfg.threads;
    const std::vector<TradeoffPoint> points = sweep(sweep_cfg, pre, params, grid);

    // Non-domination across the cell winners.
    std::vector<TradeoffPoint> winners;
    std::vector<std::size_t> winner_rows;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (points[i].cell_best) {
            winners.push_back(points[i]);
            winner_rows.push_back(i);
        }
    }
    std::vector<bool> is_pareto(points.size(), false);
    for (std::size_t idx : pareto_filter_indices(winners)) {
        is_pareto[winner_rows[idx]] = true;
    }

    // Turning point per PAPR-threshold level, where at least three cell
    // winners exist.
    std::vector<bool> is_turning(points.size(), false);
    for (double p_th : cfg.p_th_grid_db) {
        std::vector<TradeoffPoint> level;
        std::vector<std::size_t> level_rows;
        for (std::size_t i = 0; i < points.size(); ++i) {
            if (points[i].cell_best && points[i].p_th_db == p_th) {
                level.push_back(points[i]);
                level_rows.push_back(i);
            }
        }
        if (level.size() >= 3) {
            is_turning[level_rows[turning_point_index(level)]] = true;
        }
    }

    std::vector<FrontRow> rows;
    rows.reserve(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        rows.push_back({points[i], is_pareto[i], is_turning[i]});
    }
    write_front_csv(cfg.out_dir + "/front.csv", rows);
    write_manifest(cfg.out_dir, {"front.csv"});
    std::cout << "pareto: " << points.size() << " points, "
              << pareto_filter(winners).size() << " non-dominated\n";
}

void cmd_print_config(const ExperimentConfig& cfg, std::ostream& out) {
    out << cfg.to_json_text();
}

} // namespace isacwave
