// SPDX-License-Identifier: Apache-2.0
//
// isacwave - batch front-end for waveform/sequence metrics, optimization
// and tradeoff sweeps. Exit codes: 0 success, 2 configuration error,
// 3 numeric failure (rank or degenerate input).

#include "isacwave/commands.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

namespace {

struct CommonFlags {
    std::string config_path;
    std::optional<uint64_t> seed;
    std::optional<int> threads;
    std::optional<std::string> out_dir;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path, "experiment configuration (JSON)")
        ->required();
    cmd->add_option("--seed", flags.seed, "override the master seed");
    cmd->add_option("--threads", flags.threads, "worker threads for independent jobs");
    cmd->add_option("--out", flags.out_dir, "output directory");
}

isacwave::ExperimentConfig load_config(const CommonFlags& flags) {
    isacwave::ExperimentConfig cfg = isacwave::ExperimentConfig::load(flags.config_path);
    if (flags.seed) {
        cfg.seed = *flags.seed;
    }
    if (flags.threads) {
        cfg.threads = *flags.threads;
    }
    if (flags.out_dir) {
        cfg.out_dir = *flags.out_dir;
    }
    cfg.validate();
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"generalized OFDM waveform set: metrics, optimization, tradeoff sweeps"};
    app.require_subcommand(1);

    CommonFlags metrics_flags, optimize_flags, pareto_flags, dump_flags, print_flags;
    std::string scheme_or_ckpt;
    std::string resume_path;
    bool dump_af = false;

    CLI::App* metrics = app.add_subcommand("metrics", "PAPR/APSL/CPSL report for a scheme "
                                                      "or checkpoint");
    add_common(metrics, metrics_flags);
    metrics->add_option("--scheme", scheme_or_ckpt,
                        "baseline scheme name or checkpoint path (default: config baseline)");
    metrics->add_flag("--dump-af", dump_af, "also export every AF surface");

    CLI::App* optimize = app.add_subcommand("optimize", "run the gradient optimization");
    add_common(optimize, optimize_flags);
    optimize->add_option("--resume", resume_path, "continue from a checkpoint");

    CLI::App* pareto = app.add_subcommand("pareto", "weight/threshold sweep of the tradeoff");
    add_common(pareto, pareto_flags);

    CLI::App* dump = app.add_subcommand("dump-af", "metrics plus all AF surfaces");
    add_common(dump, dump_flags);
    std::string dump_source;
    dump->add_option("--scheme", dump_source,
                     "baseline scheme name or checkpoint path (default: config baseline)");

    CLI::App* print = app.add_subcommand("print-config", "echo the parsed configuration");
    add_common(print, print_flags);

    CLI11_PARSE(app, argc, argv);

    try {
        if (metrics->parsed()) {
            auto cfg = load_config(metrics_flags);
            cmd_metrics(cfg, scheme_or_ckpt.empty() ? cfg.scheme : scheme_or_ckpt, dump_af);
        } else if (optimize->parsed()) {
            cmd_optimize(load_config(optimize_flags), resume_path);
        } else if (pareto->parsed()) {
            cmd_pareto(load_config(pareto_flags));
        } else if (dump->parsed()) {
            auto cfg = load_config(dump_flags);
            cmd_metrics(cfg, dump_source.empty() ? cfg.scheme : dump_source, true);
        } else if (print->parsed()) {
            cmd_print_config(load_config(print_flags), std::cout);
        }
    } catch (const isacwave::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const isacwave::RankError& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return 3;
    } catch (const isacwave::DegenerateInputError& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
