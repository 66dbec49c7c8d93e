// SPDX-License-Identifier: Apache-2.0
//
// commands.hpp - the batch front-end behind the CLI binary. Each command
// reads an ExperimentConfig, runs the corresponding pipeline and writes
// deterministic artifacts (reports, traces, checkpoints, surfaces, a
// manifest) under the output directory.

#pragma once

#include "isacwave/config.hpp"

#include <ostream>
#include <string>

namespace isacwave {

// Metrics for a named baseline scheme, or for the best point of a stored
// checkpoint when `source` names an existing checkpoint file. Writes
// report.json (+ af_<d1>_<d2>.{bin,json} with dump_af) and manifest.json.
void cmd_metrics(const ExperimentConfig& cfg, const std::string& source, bool dump_af);

// Runs the optimization for every configured candidate; per candidate
// writes trace_<label>.csv, checkpoint_<label>.ckpt and report_<label>.json
// (metrics of the best point). `resume_path`, when nonempty, continues a
// single-candidate run from its checkpoint.
void cmd_optimize(const ExperimentConfig& cfg, const std::string& resume_path = "");

// Weight/threshold sweep tracing the tradeoff front; writes front.csv.
void cmd_pareto(const ExperimentConfig& cfg);

void cmd_print_config(const ExperimentConfig& cfg, std::ostream& out);

} // namespace isacwave
