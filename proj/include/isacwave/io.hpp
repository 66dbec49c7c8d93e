// SPDX-License-Identifier: Apache-2.0
//
// io.hpp - on-disk formats.
//
// Arrays: 16-byte header of two little-endian uint64 dims (rows, cols),
// then row-major complex entries, each a pair of little-endian doubles
// (re, im). Real grids reuse the container with zero imaginary parts.
// Reports and sidecars are JSON with fixed field names; all dB values and
// other reals are serialized with 4 decimal places so repeated runs emit
// byte-identical files. Checkpoints carry a JSON header plus raw arrays.

#pragma once

#include "isacwave/metrics.hpp"
#include "isacwave/optimizer.hpp"
#include "isacwave/pareto.hpp"
#include "isacwave/types.hpp"

#include <string>
#include <vector>

namespace isacwave {

void write_carray(const std::string& path, const CMat& m);
CMat read_carray(const std::string& path);

void write_rarray(const std::string& path, const RMat& m);
RMat read_rarray(const std::string& path);

std::string metrics_report_json(const MetricsReport& report);
void write_metrics_report(const std::string& path, const MetricsReport& report);
MetricsReport read_metrics_report(const std::string& path);

// Sidecar metadata for one exported AF surface.
std::string af_sidecar_json(const AfSurface& surface, const DopplerGrid& grid);

void write_trace_csv(const std::string& path, const std::vector<TraceRow>& rows);

struct FrontRow {
    TradeoffPoint point;
    bool is_pareto = false;
    bool is_turning_point = false;
};

void write_front_csv(const std::string& path, const std::vector<FrontRow>& rows);

// Self-describing optimizer state: enough to resume a run or evaluate its
// best point without the original configuration.
struct Checkpoint {
    std::string label;
    WaveformKind kind = WaveformKind::Custom;
    ConstraintTag mode_tag = ConstraintTag::Continuous;
    int b_phases = 4;
    bool circular = false;
    bool optimize_fdss = false;
    bool fdss_complex = false;
    WaveformParams params;
    double f_d_max = 0.0;
    int J = 0;
    uint64_t seed = 0;
    long t = 0;
    CMat A, B; // preprocessor factors
    CVec c;
    RVec w, best_w, m1, m2;
};

void write_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint read_checkpoint(const std::string& path);

void write_manifest(const std::string& dir, std::vector<std::string> files);

} // namespace isacwave
