#include "fmm/portfolio.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace fmm {

Aggregate aggregate(std::vector<double> values, double shift) {
    if (values.empty()) throw std::invalid_argument("aggregate of an empty list");
    if (shift < 0) throw std::invalid_argument("shift must be non-negative");
    std::sort(values.begin(), values.end());
    Aggregate a;
    a.min = values.front();
    a.max = values.back();
    a.median = values[(values.size() - 1) / 2];
    double log_sum = 0;
    bool zero = false;
    for (double v : values) {
        const double sv = v + shift;
        if (sv <= 0) {
            zero = true;
            break;
        }
        log_sum += std::log(sv);
    }
    a.geo_mean = zero ? -shift : std::exp(log_sum / static_cast<double>(values.size())) - shift;
    return a;
}

PortfolioReport run_portfolio(const ConstraintModel& model, const PortfolioPlan& plan) {
    if (plan.seeds.empty()) throw std::invalid_argument("portfolio needs at least one seed");
    if (plan.workers < 1) throw std::invalid_argument("portfolio needs at least one worker");

    const size_t n = plan.seeds.size();
    PortfolioReport report;
    report.exhaustive = model.exhaustive;
    report.runs.resize(n);
    for (size_t i = 0; i < n; ++i) report.runs[i].seed = plan.seeds[i];

    std::atomic<bool> cancel{false};
    std::atomic<size_t> next{0};
    std::mutex winner_mutex;
    bool have_winner = false;

    const auto t0 = std::chrono::steady_clock::now();
    auto remaining_global = [&]() -> std::optional<double> {
        if (!plan.wall_clock_limit_sec) return std::nullopt;
        const double used = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return *plan.wall_clock_limit_sec - used;
    };

    auto worker = [&]() {
        for (;;) {
            const size_t idx = next.fetch_add(1);
            if (idx >= n) return;
            SeedRun& run = report.runs[idx];

            SearchLimits limits = plan.per_search;
            if (auto rem = remaining_global()) {
                if (*rem <= 0) {
                    run.status = Status::Unknown;
                    run.cancelled = true;
                    continue;
                }
                limits.time_limit_sec =
                    limits.time_limit_sec ? std::min(*limits.time_limit_sec, *rem) : *rem;
            }

            const SolveOutcome out = search(model, run.seed, limits, &cancel);
            run.status = out.status;
            run.stats = out.stats;
            run.completed = out.status != Status::Unknown;
            if (!run.completed && cancel.load()) run.cancelled = true;

            if (run.completed) {
                std::lock_guard<std::mutex> lock(winner_mutex);
                if (!have_winner) {
                    have_winner = true;
                    report.winner = out;
                    report.winning_seed = run.seed;
                    if (plan.race_to_first) cancel.store(true);
                }
            }
        }
    };

    const int nthreads = std::min<size_t>(plan.workers, n);
    if (nthreads <= 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        threads.reserve(nthreads);
        for (int i = 0; i < nthreads; ++i) threads.emplace_back(worker);
        for (auto& th : threads) th.join();
    }

    if (!have_winner) {
        report.winner.status = Status::Unknown;
        report.winner.exhaustive = model.exhaustive;
    }

    std::vector<double> times, branches;
    for (const SeedRun& run : report.runs)
        if (run.completed) {
            times.push_back(run.stats.time_sec);
            branches.push_back(static_cast<double>(run.stats.branches));
        }
    if (!times.empty()) {
        report.time_agg = aggregate(times);
        report.branch_agg = aggregate(branches);
    }
    return report;
}

}  // namespace fmm
