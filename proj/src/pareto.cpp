// SPDX-License-Identifier: Apache-2.0

#include "isacwave/pareto.hpp"

#include "isacwave/rng.hpp"
#include "isacwave/threading.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace isacwave {

namespace {

bool dominates(const TradeoffPoint& a, const TradeoffPoint& b) {
    const bool no_worse = a.papr_db <= b.papr_db && a.apsl_db <= b.apsl_db &&
                          a.cpsl_db <= b.cpsl_db;
    const bool better = a.papr_db < b.papr_db || a.apsl_db < b.apsl_db ||
                        a.cpsl_db < b.cpsl_db;
    return no_worse && better;
}

} // namespace

std::vector<TradeoffPoint> sweep(const SweepConfig& cfg, const Preprocessor& pre,
                                 const WaveformParams& params, const DopplerGrid& grid) {
    if (cfg.omega1_grid.empty() || cfg.p_th_grid_db.empty()) {
        throw ConfigError("sweep grids must be nonempty");
    }
    if (cfg.restarts < 1) {
        throw ConfigError("sweep needs at least one restart per cell");
    }

    struct Job {
        std::size_t cell = 0;
        int restart = 0;
        double omega1 = 0.0;
        double p_th_db = 0.0;
    };
    std::vector<Job> jobs;
    std::size_t cell = 0;
    for (double omega1 : cfg.omega1_grid) {
        for (double p_th : cfg.p_th_grid_db) {
            for (int r = 0; r < cfg.restarts; ++r) {
                jobs.push_back({cell, r, omega1, p_th});
            }
            ++cell;
        }
    }

    struct JobResult {
        TradeoffPoint point;
        double loss = 0.0;
    };
    std::vector<JobResult> results(jobs.size());
    parallel_for(jobs.size(), cfg.threads, [&](std::size_t j) {
        const Job& job = jobs[j];
        OptimizeConfig local = cfg.optimize;
        if (cfg.threads > 1) {
            local.threads = 1; // cells already run in parallel
        }
        local.loss.omega1 = job.omega1;
        local.loss.omega2 = 1.0 - job.omega1;
        local.loss.p_th_db = job.p_th_db;
        local.seed = derive_seed(cfg.optimize.seed, job.cell,
                                 static_cast<uint64_t>(job.restart));
        const OptimizeOutcome out = optimize_single(pre, params, grid, local);

        TradeoffPoint p;
        p.papr_db = out.best_breakdown.papr_db;
        p.apsl_db = out.best_breakdown.apsl_db;
        p.cpsl_db = out.best_breakdown.cpsl_db;
        p.omega1 = job.omega1;
        p.p_th_db = job.p_th_db;
        p.seed = local.seed;
        p.waveform = to_string(pre.kind);
        results[j] = {p, out.best_loss};
    });

    // Flag each cell's winner; reduction order is fixed by job order.
    std::vector<std::size_t> best_job(cell, jobs.size());
    for (std::size_t j = 0; j < jobs.size(); ++j) {
        std::size_t& best = best_job[jobs[j].cell];
        if (best == jobs.size() || results[j].loss < results[best].loss) {
            best = j;
        }
    }
    std::vector<TradeoffPoint> points;
    points.reserve(jobs.size());
    for (std::size_t j = 0; j < jobs.size(); ++j) {
        TradeoffPoint p = results[j].point;
        p.cell_best = best_job[jobs[j].cell] == j;
        points.push_back(std::move(p));
    }
    return points;
}

std::vector<std::size_t> pareto_filter_indices(const std::vector<TradeoffPoint>& points) {
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < points.size(); ++i) {
        bool dominated = false;
        for (std::size_t j = 0; j < points.size() && !dominated; ++j) {
            dominated = j != i && dominates(points[j], points[i]);
        }
        if (!dominated) {
            keep.push_back(i);
        }
    }
    std::stable_sort(keep.begin(), keep.end(), [&](std::size_t a, std::size_t b) {
        return points[a].apsl_db < points[b].apsl_db;
    });
    return keep;
}

std::vector<TradeoffPoint> pareto_filter(const std::vector<TradeoffPoint>& points) {
    std::vector<TradeoffPoint> out;
    for (std::size_t i : pareto_filter_indices(points)) {
        out.push_back(points[i]);
    }
    return out;
}

std::size_t turning_point_index(const std::vector<TradeoffPoint>& front) {
    if (front.size() < 3) {
        throw ConfigError("turning point needs at least three front points");
    }
    std::vector<std::size_t> order(front.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return front[a].cpsl_db < front[b].cpsl_db;
    });

    // Interior points (central differences) are considered before the
    // endpoints (one-sided differences), so exact ties resolve to the first
    // interior point in cpsl order; a corner beats the flanks of its own L.
    std::vector<std::size_t> visit;
    for (std::size_t i = 1; i + 1 < order.size(); ++i) {
        visit.push_back(i);
    }
    visit.push_back(0);
    visit.push_back(order.size() - 1);

    std::size_t best = order[0];
    double best_score = std::numeric_limits<double>::infinity();
    for (std::size_t i : visit) {
        const std::size_t lo = i == 0 ? 0 : i - 1;
        const std::size_t hi = i + 1 == order.size() ? i : i + 1;
        const double dc = front[order[hi]].cpsl_db - front[order[lo]].cpsl_db;
        if (dc == 0.0) {
            continue;
        }
        const double slope = (front[order[hi]].apsl_db - front[order[lo]].apsl_db) / dc;
        const double score = std::abs(slope + 1.0);
        if (score < best_score) {
            best_score = score;
            best = order[i];
        }
    }
    return best;
}

} // namespace isacwave
