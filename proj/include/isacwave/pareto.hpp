// SPDX-License-Identifier: Apache-2.0
//
// pareto.hpp - approximating the jointly achievable (PAPR, APSL, CPSL)
// tradeoff surface by sweeping loss weights and PAPR thresholds, filtering
// non-dominated points, and locating the APSL-CPSL turning point (the
// front point whose slope is nearest -1).

#pragma once

#include "isacwave/optimizer.hpp"
#include "isacwave/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace isacwave {

struct TradeoffPoint {
    double papr_db = 0.0;
    double apsl_db = 0.0;
    double cpsl_db = 0.0;
    // provenance
    double omega1 = 0.5;
    double p_th_db = 2.0;
    uint64_t seed = 0;
    std::string waveform;
    bool cell_best = false; // winner among this cell's restarts
};

struct SweepConfig {
    std::vector<double> omega1_grid;
    std::vector<double> p_th_grid_db;
    int restarts = 4;
    OptimizeConfig optimize; // template; omega/p_th/seed filled per cell
    int threads = 1;
};

// One optimized point per (omega1, p_th) cell and restart; the best restart
// of each cell (by scalarized loss) carries cell_best. Per-cell seeds derive
// from (optimize.seed, cell index, restart), so parallel sweeps reproduce.
std::vector<TradeoffPoint> sweep(const SweepConfig& cfg, const Preprocessor& pre,
                                 const WaveformParams& params, const DopplerGrid& grid);

// Non-dominated subset under minimization of (papr_db, apsl_db, cpsl_db),
// ordered by apsl_db (stable).
std::vector<TradeoffPoint> pareto_filter(const std::vector<TradeoffPoint>& points);
std::vector<std::size_t> pareto_filter_indices(const std::vector<TradeoffPoint>& points);

// Index (into the input) of the point whose central-difference slope
// d(apsl)/d(cpsl) is nearest -1; endpoints use one-sided differences, ties
// go to the first point in cpsl order. Needs >= 3 points.
std::size_t turning_point_index(const std::vector<TradeoffPoint>& front_at_fixed_papr);

} // namespace isacwave
