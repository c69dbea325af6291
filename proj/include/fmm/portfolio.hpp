#pragma once

#include <optional>
#include <vector>

#include "fmm/engine.hpp"

namespace fmm {

struct Aggregate {
    double geo_mean = 0;  // shifted geometric mean
    double min = 0;
    double median = 0;  // lower-middle element for even counts
    double max = 0;
};

// (prod (v_i + shift))^(1/n) - shift, plus order statistics.
// Throws std::invalid_argument on an empty list.
Aggregate aggregate(std::vector<double> values, double shift = 1e-4);

struct PortfolioPlan {
    std::vector<uint64_t> seeds = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
    int workers = 8;
    SearchLimits per_search{.time_limit_sec = 7200.0};
    std::optional<double> wall_clock_limit_sec;
    // Cancel peers on the first definitive (Sat/Unsat) result. Turn off to
    // run every seed to completion, e.g. to measure per-seed variability.
    bool race_to_first = true;
};

struct SeedRun {
    uint64_t seed = 0;
    Status status = Status::Unknown;
    SearchStats stats;
    bool completed = false;  // reached Sat or Unsat
    bool cancelled = false;  // stopped by a peer win or the global budget
};

struct PortfolioReport {
    SolveOutcome winner;  // Unknown status when no seed completed
    std::optional<uint64_t> winning_seed;
    std::vector<SeedRun> runs;  // in plan order
    bool exhaustive = false;
    // Aggregates over completed runs only.
    std::optional<Aggregate> time_agg;
    std::optional<Aggregate> branch_agg;
};

// Races independent seeded searches; the first definitive result wins and
// (when racing) cancels the rest. Degrades to serial execution at workers=1.
PortfolioReport run_portfolio(const ConstraintModel& model, const PortfolioPlan& plan);

}  // namespace fmm
