#pragma once

#include <atomic>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "fmm/model.hpp"
#include "fmm/verify.hpp"

namespace fmm {

// 3-bit domain masks over the ternary value set, ordered -1 < 0 < +1.
namespace dom {
constexpr uint8_t NEG = 1, ZERO = 2, POS = 4, ALL = 7;
constexpr uint8_t bit(int v) { return static_cast<uint8_t>(1u << (v + 1)); }
int min_of(uint8_t mask);
int max_of(uint8_t mask);
int size_of(uint8_t mask);
}  // namespace dom

// Per-variable domains plus the trail and constraint queue needed to
// propagate and backtrack. One instance per search; never shared.
class DomainState {
public:
    explicit DomainState(const ConstraintModel& m);

    uint8_t mask(int var) const { return mask_[var]; }
    bool fixed(int var) const { return dom::size_of(mask_[var]) == 1; }
    int value(int var) const { return dom::min_of(mask_[var]); }  // meaningful when fixed
    int unfixed_count() const;
    std::vector<int> values() const;  // requires all fixed

    size_t trail_size() const { return trail_.size(); }
    void undo_to(size_t mark);

    // Remove `bits` from the domain; false when the domain would empty.
    bool remove_bits(const ConstraintModel& m, int var, uint8_t bits);
    bool assign(const ConstraintModel& m, int var, int val);

    void enqueue_all(const ConstraintModel& m);

private:
    friend struct PropagateResult;
    friend PropagateResult propagate(DomainState& st, const ConstraintModel& m);

    std::vector<uint8_t> mask_;
    std::vector<std::pair<int32_t, uint8_t>> trail_;
    std::vector<int32_t> queue_;
    size_t qhead_ = 0;
    std::vector<uint8_t> in_queue_;

    void enqueue(int cid);
    void wake(const ConstraintModel& m, int var);
    void reset_queue();
};

struct PropagateResult {
    bool fixpoint = true;
    int conflict_constraint = -1;  // id of the first failing constraint
};

// Runs all queued propagators to mutual fixpoint.
PropagateResult propagate(DomainState& st, const ConstraintModel& m);

struct SearchLimits {
    std::optional<double> time_limit_sec;
    std::optional<uint64_t> node_limit;
    bool enable_restarts = false;
    uint64_t restart_base = 512;  // failures, scaled by the Luby sequence
};

struct SearchStats {
    uint64_t branches = 0;  // decision nodes entered
    uint64_t fails = 0;     // conflicts
    int max_depth = 0;
    double time_sec = 0.0;
    uint64_t restarts = 0;
};

enum class Status { Sat, Unsat, Unknown };

const char* status_name(Status s);

struct SolveOutcome {
    Status status = Status::Unknown;
    std::optional<FactorMatrices> solution;  // present iff Sat, re-verified
    SearchStats stats;
    bool exhaustive = false;  // meaningful when Unsat; copied from the model
};

// Seed-dependent variable order used to break min-domain ties: the column
// order is shuffled per seed, then (column, W before U before V, row).
std::vector<int> make_tie_rank(const ConstraintModel& m, std::mt19937_64& rng);

// Min-domain variable choice under the tie order; -1 when all vars fixed.
int select_branch(const DomainState& st, const ConstraintModel& m,
                  const std::vector<int>& tie_rank);

struct Branch {
    int var = -1;
    std::array<int, 3> value_order{0, -1, 1};
};

Branch select_branch(const DomainState& st, const ConstraintModel& m, std::mt19937_64& rng);

// Depth-first search with chronological backtracking. Sat solutions are
// re-verified against the target tensor before being returned; exhausting
// the tree yields Unsat; budgets and cancellation yield Unknown.
SolveOutcome search(const ConstraintModel& model, uint64_t seed, const SearchLimits& limits = {},
                    const std::atomic<bool>* cancel = nullptr);

struct BruteForceResult {
    Status status = Status::Unsat;
    uint64_t solution_count = 0;
    std::optional<FactorMatrices> witness;
};

// Independent oracle: enumerates every ternary assignment and checks the
// constraint families directly, with no propagation. Refuses models with
// more than 16 variables or with restrictions (sparsity, cyclic).
BruteForceResult brute_force_solve(Dims dims, int rank, const ModelConfig& config);

}  // namespace fmm
