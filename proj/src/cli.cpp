#include "fmm/cli.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"

#include "fmm/emit.hpp"
#include "fmm/version.hpp"

namespace fmm::cli {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::string fixed3(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

std::string sci2(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2e", v);
    return buf;
}

std::string stat_cell(const std::optional<Aggregate>& agg, bool scientific) {
    if (!agg) return "T.O. (N/A, N/A, N/A)";
    auto fmt = scientific ? sci2 : fixed3;
    return fmt(agg->geo_mean) + " (" + fmt(agg->min) + ", " + fmt(agg->median) + ", " +
           fmt(agg->max) + ")";
}

std::string iso8601_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

std::string render_report(const std::vector<SeedRun>& runs) {
    std::ostringstream os;
    os << "seed      status  completed      time (sec)        branches           fails\n";
    for (const SeedRun& r : runs) {
        char line[160];
        std::snprintf(line, sizeof(line), "%4llu  %10s  %9s  %14.3f  %14llu  %14llu%s\n",
                      static_cast<unsigned long long>(r.seed), status_name(r.status),
                      r.completed ? "yes" : "no", r.stats.time_sec,
                      static_cast<unsigned long long>(r.stats.branches),
                      static_cast<unsigned long long>(r.stats.fails),
                      r.cancelled ? "  (cancelled)" : "");
        os << line;
    }

    std::vector<double> times, branches;
    for (const SeedRun& r : runs)
        if (r.completed) {
            times.push_back(r.stats.time_sec);
            branches.push_back(static_cast<double>(r.stats.branches));
        }
    std::optional<Aggregate> ta, ba;
    if (!times.empty()) {
        ta = aggregate(times);
        ba = aggregate(branches);
    }
    os << "metric      geo mean (min, med, max)\n";
    os << "time (sec)  " << stat_cell(ta, false) << "\n";
    os << "branches    " << stat_cell(ba, true) << "\n";
    return os.str();
}

namespace {

struct SolveArgs {
    int n = 0, m = 0, p = 0, rank = 0;
    bool sym = false;
    bool valid = false;
    int k1 = 0, k2 = 0;
    std::vector<int> cyclic;
    std::vector<uint64_t> seeds;
    int workers = 8;
    double time_limit = 7200.0;
    std::string out = "results";
    bool all_seeds = false;
};

json aggregate_to_json(const std::optional<Aggregate>& a) {
    if (!a) return nullptr;
    return {{"geo_mean", a->geo_mean}, {"min", a->min}, {"median", a->median}, {"max", a->max}};
}

json config_to_json(const ModelConfig& cfg, const ConstraintModel& model) {
    json j;
    j["sym"] = cfg.use_symmetry;
    j["valid"] = cfg.use_valid;
    j["k1"] = cfg.sparsity ? json(model.effective_k1) : json(nullptr);
    j["k2"] = cfg.sparsity ? json(model.effective_k2) : json(nullptr);
    j["cyclic_s"] = cfg.cyclic ? json(cfg.cyclic->s) : json(nullptr);
    j["cyclic_t"] = cfg.cyclic ? json(cfg.cyclic->t) : json(nullptr);
    return j;
}

json seed_run_to_json(const SeedRun& r) {
    return {{"seed", r.seed},
            {"status", status_name(r.status)},
            {"completed", r.completed},
            {"cancelled", r.cancelled},
            {"time_sec", r.stats.time_sec},
            {"branches", r.stats.branches},
            {"fails", r.stats.fails},
            {"max_depth", r.stats.max_depth},
            {"restarts", r.stats.restarts}};
}

int do_solve(const SolveArgs& args, bool prove_mode) {
    if ((args.k1 > 0) != (args.k2 > 0)) {
        std::cerr << "error: --k1 and --k2 must be given together\n";
        return kExitUsage;
    }
    if (!args.cyclic.empty() && args.cyclic.size() != 2) {
        std::cerr << "error: --cyclic takes exactly two values S T\n";
        return kExitUsage;
    }
    if (prove_mode && (args.k1 > 0 || !args.cyclic.empty())) {
        std::cerr << "error: prove requires an exhaustive model; sparsity (--k1/--k2) and "
                     "--cyclic restrict the search space and are not allowed\n";
        return kExitUsage;
    }

    ModelConfig cfg;
    cfg.use_symmetry = args.sym;
    cfg.use_valid = args.valid;
    if (args.k1 > 0) cfg.sparsity = SparsityCaps{args.k1, args.k2};
    if (args.cyclic.size() == 2) cfg.cyclic = CyclicShape{args.cyclic[0], args.cyclic[1]};

    std::optional<ConstraintModel> model;
    try {
        model.emplace(build_model(Dims(args.n, args.m, args.p), args.rank, cfg));
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    if (model->k1_clamped)
        std::cerr << "note: k1 clamped to its upper bound " << model->effective_k1 << "\n";
    if (model->k2_clamped)
        std::cerr << "note: k2 clamped to its upper bound " << model->effective_k2 << "\n";

    PortfolioPlan plan;
    if (!args.seeds.empty()) plan.seeds = args.seeds;
    plan.workers = args.workers;
    plan.per_search.time_limit_sec = args.time_limit;
    plan.race_to_first = !args.all_seeds;

    std::cout << "model: (" << args.n << "," << args.m << "," << args.p << ") rank " << args.rank
              << ", " << model->var_count() << " vars, " << model->constraints.size()
              << " constraints, " << (model->exhaustive ? "exhaustive" : "restricted") << "\n";

    const PortfolioReport report = run_portfolio(*model, plan);
    std::cout << render_report(report.runs);

    std::error_code ec;
    fs::create_directories(args.out, ec);
    if (ec) {
        std::cerr << "error: cannot create output directory " << args.out << ": " << ec.message()
                  << "\n";
        return kExitUsage;
    }

    const std::string stem = std::to_string(args.n) + "x" + std::to_string(args.m) + "x" +
                             std::to_string(args.p) + "_r" + std::to_string(args.rank);
    std::string solution_file;

    if (report.winner.status == Status::Sat) {
        SolutionDocument doc;
        doc.factors = *report.winner.solution;
        doc.field = cfg.field;
        doc.verified = verify_decomposition(doc.factors, model->tensor).ok();
        doc.provenance["tool"] = std::string("fmm ") + kVersion;
        doc.provenance["config"] = config_to_json(cfg, *model);
        doc.provenance["seed"] = *report.winning_seed;
        for (const SeedRun& r : report.runs)
            if (r.seed == *report.winning_seed) doc.provenance["stats"] = seed_run_to_json(r);
        doc.provenance["created_at"] = iso8601_now();

        solution_file = (fs::path(args.out) / ("solution_" + stem + ".json")).string();
        std::ofstream f(solution_file);
        f << to_json(doc);
    }

    json index;
    index["schema_version"] = 1;
    index["dims"] = {{"n", args.n}, {"m", args.m}, {"p", args.p}};
    index["rank"] = args.rank;
    index["config"] = config_to_json(cfg, *model);
    index["plan"] = {{"seeds", plan.seeds},
                     {"workers", plan.workers},
                     {"time_limit_sec", args.time_limit},
                     {"race", plan.race_to_first}};
    index["outcome"] = {
        {"status", status_name(report.winner.status)},
        {"exhaustive", report.exhaustive},
        {"winning_seed", report.winning_seed ? json(*report.winning_seed) : json(nullptr)}};
    json per_seed = json::array();
    for (const SeedRun& r : report.runs) per_seed.push_back(seed_run_to_json(r));
    index["per_seed"] = per_seed;
    index["aggregates"] = {{"time_sec", aggregate_to_json(report.time_agg)},
                           {"branches", aggregate_to_json(report.branch_agg)}};
    index["solution_file"] = solution_file.empty() ? json(nullptr) : json(solution_file);
    {
        std::ofstream f(fs::path(args.out) / "index.json");
        f << index.dump(2) << "\n";
    }

    switch (report.winner.status) {
        case Status::Sat: {
            SolutionDocument doc;
            doc.factors = *report.winner.solution;
            std::cout << "verified rank-" << args.rank << " decomposition found (seed "
                      << *report.winning_seed << "):\n"
                      << to_readable(doc) << "solution written to " << solution_file << "\n";
            return kExitSat;
        }
        case Status::Unsat:
            if (report.exhaustive) {
                std::cout << "unsatisfiable: no rank-" << args.rank
                          << " decomposition exists over {-1,0,1} (exhaustive proof)\n";
                return kExitUnsatExhaustive;
            }
            std::cout << "unsatisfiable under restriction: the restricted search space has no "
                         "solution; this is not a rank infeasibility proof\n";
            return kExitUnsatRestricted;
        default:
            std::cout << "unknown: budget exhausted before any seed completed\n";
            return kExitUnknown;
    }
}

int load_or_exit(const std::string& file, LoadResult& out) {
    std::ifstream f(file);
    if (!f) {
        std::cerr << "error: cannot open " << file << "\n";
        return kExitUsage;
    }
    std::stringstream ss;
    ss << f.rdbuf();
    try {
        out = from_json(ss.str());
    } catch (const ParseError& e) {
        std::cerr << "error: " << file << ": " << e.what() << "\n";
        return kExitUsage;
    }
    return -1;
}

void print_violations(const LoadResult& lr) {
    std::cout << "verification FAILED: " << lr.violations.size() << " violated equation(s)\n";
    size_t shown = 0;
    for (const Violation& v : lr.violations) {
        std::cout << "  T[" << v.i << "," << v.j << "," << v.k << "] expected " << v.expected
                  << ", got " << v.got << "\n";
        if (++shown == 20 && lr.violations.size() > 20) {
            std::cout << "  ... (" << lr.violations.size() - 20 << " more)\n";
            break;
        }
    }
}

int do_verify(const std::string& file) {
    LoadResult lr;
    if (int rc = load_or_exit(file, lr); rc >= 0) return rc;
    if (!lr.verified_on_load) {
        print_violations(lr);
        return kExitVerifyFail;
    }
    const auto& d = lr.doc.factors.dims;
    std::cout << "OK: verified rank-" << lr.doc.factors.rank << " decomposition for (" << d.n
              << "," << d.m << "," << d.p << ")\n";
    return kExitSat;
}

int do_canonical(const std::string& file) {
    LoadResult lr;
    if (int rc = load_or_exit(file, lr); rc >= 0) return rc;
    SolutionDocument doc = lr.doc;
    doc.factors = canonicalize(doc.factors);
    doc.verified = verify_decomposition(doc.factors, build_target_tensor(doc.factors.dims)).ok();
    doc.provenance["canonicalized"] = true;
    if (has_duplicate_uv_columns(doc.factors))
        std::cerr << "warning: duplicate [u;v] columns; the strict column order is not unique\n";
    std::cout << to_json(doc);
    if (!lr.verified_on_load) {
        std::cerr << "warning: input does not verify; canonical form of a non-solution\n";
        return kExitVerifyFail;
    }
    return kExitSat;
}

int do_show(const std::string& file) {
    LoadResult lr;
    if (int rc = load_or_exit(file, lr); rc >= 0) return rc;
    if (!lr.verified_on_load) {
        print_violations(lr);
        return kExitVerifyFail;
    }
    std::cout << to_readable(lr.doc);
    return kExitSat;
}

int do_stats(const std::string& dir) {
    const fs::path index_path = fs::path(dir) / "index.json";
    std::ifstream f(index_path);
    if (!f) {
        std::cerr << "error: no index.json in " << dir << "\n";
        return kExitUsage;
    }
    json index;
    try {
        index = json::parse(f);
    } catch (const nlohmann::json::parse_error& e) {
        std::cerr << "error: " << index_path.string() << ": " << e.what() << "\n";
        return kExitUsage;
    }
    std::vector<SeedRun> runs;
    for (const auto& r : index.at("per_seed")) {
        SeedRun run;
        run.seed = r.at("seed").get<uint64_t>();
        const std::string st = r.at("status").get<std::string>();
        run.status = st == "sat" ? Status::Sat : st == "unsat" ? Status::Unsat : Status::Unknown;
        run.completed = r.at("completed").get<bool>();
        run.cancelled = r.at("cancelled").get<bool>();
        run.stats.time_sec = r.at("time_sec").get<double>();
        run.stats.branches = r.at("branches").get<uint64_t>();
        run.stats.fails = r.at("fails").get<uint64_t>();
        run.stats.max_depth = r.at("max_depth").get<int>();
        run.stats.restarts = r.at("restarts").get<uint64_t>();
        runs.push_back(run);
    }
    std::cout << "run: dims (" << index.at("dims").at("n").get<int>() << ","
              << index.at("dims").at("m").get<int>() << "," << index.at("dims").at("p").get<int>()
              << ") rank " << index.at("rank").get<int>() << ", outcome "
              << index.at("outcome").at("status").get<std::string>() << "\n";
    std::cout << render_report(runs);
    return kExitSat;
}

void add_solve_options(CLI::App* sub, SolveArgs& args) {
    sub->add_option("N", args.n, "rows of A")->required();
    sub->add_option("M", args.m, "cols of A / rows of B")->required();
    sub->add_option("P", args.p, "cols of B")->required();
    sub->add_option("R", args.rank, "rank (number of multiplications)")->required();
    sub->add_flag("--sym", args.sym, "add symmetry-breaking constraints (lex + sign)");
    sub->add_flag("--valid", args.valid, "add valid inequalities (requires R <= N*M*P)");
    sub->add_option("--k1", args.k1, "sparsity cap on [U;V] column support");
    sub->add_option("--k2", args.k2, "sparsity cap on W row support");
    sub->add_option("--cyclic", args.cyclic, "cyclic parametrization S T (square dims, R = S+3T)")
        ->expected(2);
    sub->add_option("--seeds", args.seeds, "explicit seed list (default 0..9)")
        ->expected(-1);
    sub->add_option("--workers", args.workers, "max concurrent searches (default 8)");
    sub->add_option("--time-limit", args.time_limit, "per-seed time limit in seconds (default 7200)");
    sub->add_option("--out", args.out, "output directory (default ./results)");
    sub->add_flag("--all-seeds", args.all_seeds,
                  "run every seed to completion instead of racing to the first result");
}

}  // namespace

int run(int argc, const char* const* argv) {
    CLI::App app{std::string("fmm ") + kVersion +
                 " - search for fast matrix multiplication algorithms over {-1,0,1}"};
    app.require_subcommand(1);

    SolveArgs solve_args, prove_args;
    std::string file, dir;

    CLI::App* solve = app.add_subcommand("solve", "search for a rank-R decomposition");
    add_solve_options(solve, solve_args);

    CLI::App* prove =
        app.add_subcommand("prove", "prove rank-R infeasibility (requires an exhaustive model)");
    add_solve_options(prove, prove_args);

    CLI::App* verify = app.add_subcommand("verify", "re-verify a solution file");
    verify->add_option("FILE", file, "solution JSON file")->required();

    CLI::App* canonical = app.add_subcommand("canonical", "print the canonical form of a solution");
    canonical->add_option("FILE", file, "solution JSON file")->required();

    CLI::App* show = app.add_subcommand("show", "print a solution in readable form");
    show->add_option("FILE", file, "solution JSON file")->required();

    CLI::App* stats = app.add_subcommand("stats", "render the aggregate report of a results dir");
    stats->add_option("DIR", dir, "directory containing index.json")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (app.got_subcommand(solve)) return do_solve(solve_args, false);
        if (app.got_subcommand(prove)) return do_solve(prove_args, true);
        if (app.got_subcommand(verify)) return do_verify(file);
        if (app.got_subcommand(canonical)) return do_canonical(file);
        if (app.got_subcommand(show)) return do_show(file);
        if (app.got_subcommand(stats)) return do_stats(dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}

}  // namespace fmm::cli
