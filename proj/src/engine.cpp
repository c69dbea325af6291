#include "fmm/engine.hpp"

#include <algorithm>
#include <chrono>
#include <climits>
#include <cstdlib>
#include <numeric>
#include <stdexcept>

namespace fmm {

namespace dom {

namespace {
constexpr int8_t kMin[8] = {2, -1, 0, -1, 1, -1, 0, -1};
constexpr int8_t kMax[8] = {-2, -1, 0, 0, 1, 1, 1, 1};
constexpr int8_t kSize[8] = {0, 1, 1, 2, 1, 2, 2, 3};
}  // namespace

int min_of(uint8_t mask) { return kMin[mask]; }
int max_of(uint8_t mask) { return kMax[mask]; }
int size_of(uint8_t mask) { return kSize[mask]; }

}  // namespace dom

namespace {

using dom::ALL;
using dom::NEG;
using dom::POS;
using dom::ZERO;

// Mask of ternary values inside [lo, hi].
uint8_t interval_mask(int lo, int hi) {
    uint8_t out = 0;
    for (int v = std::max(lo, -1); v <= std::min(hi, 1); ++v) out |= dom::bit(v);
    return out;
}

// Masks of values strictly greater / strictly less than x (x in -1..1).
constexpr uint8_t kGtMask[3] = {ZERO | POS, POS, 0};
constexpr uint8_t kLtMask[3] = {0, NEG, NEG | ZERO};
constexpr uint8_t kGeMask[3] = {ALL, ZERO | POS, POS};
constexpr uint8_t kLeMask[3] = {NEG, NEG | ZERO, ALL};

// Product-value sets. PROD3 assumes the three variables are distinct.
struct ProdTables {
    uint8_t prod3[8][8][8];
    uint8_t dmin[8][8];  // bounds of |a - b|
    uint8_t dmax[8][8];
    uint8_t dmax_given[3][8];  // max |a - b| with a fixed (index a+1)

    ProdTables() {
        for (uint8_t ma = 0; ma < 8; ++ma)
            for (uint8_t mb = 0; mb < 8; ++mb) {
                int lo = 3, hi = -1;
                for (int a = -1; a <= 1; ++a) {
                    if (!(ma & dom::bit(a))) continue;
                    for (int b = -1; b <= 1; ++b) {
                        if (!(mb & dom::bit(b))) continue;
                        const int d = std::abs(a - b);
                        lo = std::min(lo, d);
                        hi = std::max(hi, d);
                    }
                }
                dmin[ma][mb] = static_cast<uint8_t>(lo == 3 ? 0 : lo);
                dmax[ma][mb] = static_cast<uint8_t>(hi == -1 ? 0 : hi);
                for (uint8_t mc = 0; mc < 8; ++mc) {
                    uint8_t set = 0;
                    for (int a = -1; a <= 1; ++a)
                        for (int b = -1; b <= 1; ++b)
                            for (int c = -1; c <= 1; ++c)
                                if ((ma & dom::bit(a)) && (mb & dom::bit(b)) &&
                                    (mc & dom::bit(c)))
                                    set |= dom::bit(a * b * c);
                    prod3[ma][mb][mc] = set;
                }
            }
        for (int a = -1; a <= 1; ++a)
            for (uint8_t mb = 0; mb < 8; ++mb) {
                int hi = 0;
                for (int b = -1; b <= 1; ++b)
                    if (mb & dom::bit(b)) hi = std::max(hi, std::abs(a - b));
                dmax_given[a + 1][mb] = static_cast<uint8_t>(hi);
            }
    }
};

const ProdTables kTables;

// Product-value set of one trilinear term, honoring repeated variables.
uint8_t term_products(uint8_t mx, uint8_t my, uint8_t mz, const BrentEq::Term& t) {
    if (t.x != t.y && t.x != t.z && t.y != t.z) return kTables.prod3[mx][my][mz];
    uint8_t out = 0;
    for (int a = -1; a <= 1; ++a) {
        if (!(mx & dom::bit(a))) continue;
        for (int b = -1; b <= 1; ++b) {
            if (!(my & dom::bit(b))) continue;
            if (t.x == t.y && b != a) continue;
            for (int c = -1; c <= 1; ++c) {
                if (!(mz & dom::bit(c))) continue;
                if (t.x == t.z && c != a) continue;
                if (t.y == t.z && c != b) continue;
                out |= dom::bit(a * b * c);
            }
        }
    }
    return out;
}

uint8_t term_products(const DomainState& st, const BrentEq::Term& t) {
    return term_products(st.mask(t.x), st.mask(t.y), st.mask(t.z), t);
}

// Products achievable when `var` (one of the term's variables) equals a.
uint8_t term_products_with(const DomainState& st, const BrentEq::Term& t, int var, int a) {
    const uint8_t s = dom::bit(a);
    return term_products(t.x == var ? s : st.mask(t.x), t.y == var ? s : st.mask(t.y),
                         t.z == var ? s : st.mask(t.z), t);
}

bool prop_brent(DomainState& st, const ConstraintModel& m, const BrentEq& c) {
    thread_local std::vector<uint8_t> pm;
    const size_t nterms = c.terms.size();
    pm.resize(nterms);

    int sum_min = 0, sum_max = 0;
    for (size_t r = 0; r < nterms; ++r) {
        pm[r] = term_products(st, c.terms[r]);
        sum_min += dom::min_of(pm[r]);
        sum_max += dom::max_of(pm[r]);
    }
    if (c.rhs < sum_min || c.rhs > sum_max) return false;
    if (sum_min == sum_max) return true;  // every term pinned and the sum matches

    for (size_t r = 0; r < nterms; ++r) {
        const int tmin = dom::min_of(pm[r]), tmax = dom::max_of(pm[r]);
        const int lo = c.rhs - (sum_max - tmax);
        const int hi = c.rhs - (sum_min - tmin);
        if (lo <= tmin && hi >= tmax) continue;  // term unconstrained by the residual
        const uint8_t allowed = interval_mask(lo, hi) & pm[r];
        if (allowed == 0) return false;
        if (allowed == pm[r]) continue;

        const BrentEq::Term& t = c.terms[r];
        const int32_t tv[3] = {t.x, t.y, t.z};
        for (int pos = 0; pos < 3; ++pos) {
            if ((pos >= 1 && tv[pos] == tv[0]) || (pos == 2 && tv[pos] == tv[1])) continue;
            const int var = tv[pos];
            const uint8_t cur = st.mask(var);
            uint8_t keep = 0;
            for (int a = -1; a <= 1; ++a) {
                if (!(cur & dom::bit(a))) continue;
                if (term_products_with(st, t, var, a) & allowed) keep |= dom::bit(a);
            }
            if (keep == cur) continue;
            if (keep == 0 || !st.remove_bits(m, var, static_cast<uint8_t>(cur & ~keep)))
                return false;
        }
    }
    return true;
}

bool prop_abs_sum(DomainState& st, const ConstraintModel& m, const AbsSum& c) {
    int lb = 0, ub = 0;
    const size_t n = c.vars.size();
    for (size_t i = 0; i < n; ++i) {
        const uint8_t mk = st.mask(c.vars[i]);
        if (!(mk & ZERO)) lb += c.mult[i];
        if (mk & (NEG | POS)) ub += c.mult[i];
    }
    if (c.at_least) {
        if (ub < c.bound) return false;
        for (size_t i = 0; i < n; ++i) {
            const uint8_t mk = st.mask(c.vars[i]);
            if ((mk & ZERO) && (mk & (NEG | POS)) && ub - c.mult[i] < c.bound)
                if (!st.remove_bits(m, c.vars[i], ZERO)) return false;
        }
    } else {
        if (lb > c.bound) return false;
        for (size_t i = 0; i < n; ++i) {
            const uint8_t mk = st.mask(c.vars[i]);
            if ((mk & ZERO) && (mk & (NEG | POS)) && lb + c.mult[i] > c.bound)
                if (!st.remove_bits(m, c.vars[i], NEG | POS)) return false;
        }
    }
    return true;
}

bool prop_abs_prod_sum(DomainState& st, const ConstraintModel& m, const AbsProdSum& c) {
    int ub = 0;
    for (const auto& p : c.pairs) {
        const bool can_nz = (st.mask(p.x) & (NEG | POS)) && (st.mask(p.y) & (NEG | POS));
        ub += can_nz;
    }
    if (ub < c.bound) return false;
    if (ub > c.bound) return true;
    // Tight: every pair that can be nonzero must be nonzero.
    for (const auto& p : c.pairs) {
        const uint8_t mx = st.mask(p.x), my = st.mask(p.y);
        if (!((mx & (NEG | POS)) && (my & (NEG | POS)))) continue;
        if ((mx & ZERO) && !st.remove_bits(m, p.x, ZERO)) return false;
        if (p.y != p.x && (st.mask(p.y) & ZERO) && !st.remove_bits(m, p.y, ZERO)) return false;
    }
    return true;
}

bool prop_pair_diff_sum(DomainState& st, const ConstraintModel& m, const PairDiffSum& c) {
    thread_local std::vector<uint8_t> lo_cache, hi_cache;
    const size_t n = c.pairs.size();
    lo_cache.resize(n);
    hi_cache.resize(n);
    int sum_max = 0, sum_min = 0;
    for (size_t r = 0; r < n; ++r) {
        const uint8_t mx = st.mask(c.pairs[r].x), my = st.mask(c.pairs[r].y);
        lo_cache[r] = kTables.dmin[mx][my];
        hi_cache[r] = kTables.dmax[mx][my];
        sum_min += lo_cache[r];
        sum_max += hi_cache[r];
    }
    if (sum_max < c.bound) return false;
    for (size_t r = 0; r < n; ++r) {
        const int need = c.bound - (sum_max - hi_cache[r]);
        if (need <= lo_cache[r]) continue;  // this term is not forced beyond its minimum
        const auto& p = c.pairs[r];
        for (int side = 0; side < 2; ++side) {
            const int var = side == 0 ? p.x : p.y;
            const int other = side == 0 ? p.y : p.x;
            const uint8_t cur = st.mask(var);
            uint8_t keep = 0;
            for (int a = -1; a <= 1; ++a) {
                if (!(cur & dom::bit(a))) continue;
                if (kTables.dmax_given[a + 1][st.mask(other)] >= need) keep |= dom::bit(a);
            }
            if (keep == cur) continue;
            if (keep == 0 || !st.remove_bits(m, var, static_cast<uint8_t>(cur & ~keep)))
                return false;
        }
    }
    return true;
}

// Scan for the first row that can be nonzero and forbid +1 there; rows that
// collapse to fixed zero advance the scan.
bool prop_sign(DomainState& st, const ConstraintModel& m, const SignColumn& c) {
    for (int32_t v : c.vars) {
        uint8_t mk = st.mask(v);
        if (mk == ZERO) continue;
        if (mk & POS) {
            if (!st.remove_bits(m, v, POS)) return false;
            mk = st.mask(v);
        }
        if (mk == ZERO) continue;
        break;
    }
    return true;
}

// Can positions j.. of (lo, hi) still realize lo <_lex hi on the suffix?
bool suffix_can_be_less(const DomainState& st, const LexLess& c, size_t j) {
    for (size_t l = j; l < c.lo.size(); ++l) {
        const uint8_t a = st.mask(c.lo[l]), b = st.mask(c.hi[l]);
        if (dom::min_of(a) < dom::max_of(b)) return true;
        if (!(a & b)) return false;  // cannot be equal here, so lo > hi is forced
    }
    return false;
}

bool prop_lex(DomainState& st, const ConstraintModel& m, const LexLess& c) {
    const size_t L = c.lo.size();
    size_t i = 0;
    for (;;) {
        while (i < L) {
            const uint8_t a = st.mask(c.lo[i]), b = st.mask(c.hi[i]);
            if (a == b && dom::size_of(a) == 1)
                ++i;
            else
                break;
        }
        if (i == L) return false;  // vectors forced equal; strictness fails

        const bool strict_here = !suffix_can_be_less(st, c, i + 1);
        for (;;) {
            const uint8_t a = st.mask(c.lo[i]), b = st.mask(c.hi[i]);
            const int bmax = dom::max_of(b), amin = dom::min_of(a);
            const uint8_t ra = a & (strict_here ? kGeMask[bmax + 1] : kGtMask[bmax + 1]);
            const uint8_t rb = b & (strict_here ? kLeMask[amin + 1] : kLtMask[amin + 1]);
            if (!ra && !rb) break;
            if (ra && !st.remove_bits(m, c.lo[i], ra)) return false;
            if (rb && !st.remove_bits(m, c.hi[i], rb)) return false;
        }
        const uint8_t a = st.mask(c.lo[i]), b = st.mask(c.hi[i]);
        if (a == b && dom::size_of(a) == 1) {
            ++i;  // pinned equal; strictness moves to the suffix
            continue;
        }
        return true;
    }
}

}  // namespace

DomainState::DomainState(const ConstraintModel& m)
    : mask_(m.var_count(), ALL), in_queue_(m.constraints.size(), 0) {}

int DomainState::unfixed_count() const {
    int n = 0;
    for (uint8_t mk : mask_) n += dom::size_of(mk) > 1;
    return n;
}

std::vector<int> DomainState::values() const {
    std::vector<int> out(mask_.size());
    for (size_t v = 0; v < mask_.size(); ++v) out[v] = dom::min_of(mask_[v]);
    return out;
}

void DomainState::undo_to(size_t mark) {
    while (trail_.size() > mark) {
        const auto [var, old] = trail_.back();
        trail_.pop_back();
        mask_[var] = old;
    }
    reset_queue();
}

void DomainState::enqueue(int cid) {
    if (!in_queue_[cid]) {
        in_queue_[cid] = 1;
        queue_.push_back(cid);
    }
}

void DomainState::wake(const ConstraintModel& m, int var) {
    for (int32_t cid : m.watchers[var]) enqueue(cid);
}

void DomainState::reset_queue() {
    for (size_t q = qhead_; q < queue_.size(); ++q) in_queue_[queue_[q]] = 0;
    queue_.clear();
    qhead_ = 0;
}

bool DomainState::remove_bits(const ConstraintModel& m, int var, uint8_t bits) {
    const uint8_t cur = mask_[var];
    const uint8_t next = cur & static_cast<uint8_t>(~bits);
    if (next == cur) return true;
    trail_.emplace_back(var, cur);
    mask_[var] = next;
    if (next == 0) return false;
    wake(m, var);
    return true;
}

bool DomainState::assign(const ConstraintModel& m, int var, int val) {
    return remove_bits(m, var, static_cast<uint8_t>(ALL & ~dom::bit(val)));
}

void DomainState::enqueue_all(const ConstraintModel& m) {
    for (size_t cid = 0; cid < m.constraints.size(); ++cid) enqueue(static_cast<int>(cid));
}

PropagateResult propagate(DomainState& st, const ConstraintModel& m) {
    while (st.qhead_ < st.queue_.size()) {
        const int cid = st.queue_[st.qhead_++];
        st.in_queue_[cid] = 0;
        const bool ok = std::visit(
            [&](const auto& body) {
                using T = std::decay_t<decltype(body)>;
                if constexpr (std::is_same_v<T, BrentEq>) return prop_brent(st, m, body);
                else if constexpr (std::is_same_v<T, LexLess>) return prop_lex(st, m, body);
                else if constexpr (std::is_same_v<T, SignColumn>) return prop_sign(st, m, body);
                else if constexpr (std::is_same_v<T, AbsSum>) return prop_abs_sum(st, m, body);
                else if constexpr (std::is_same_v<T, AbsProdSum>)
                    return prop_abs_prod_sum(st, m, body);
                else
                    return prop_pair_diff_sum(st, m, body);
            },
            m.constraints[cid].body);
        if (!ok) {
            st.reset_queue();
            return {false, cid};
        }
    }
    st.queue_.clear();
    st.qhead_ = 0;
    return {true, -1};
}

const char* status_name(Status s) {
    switch (s) {
        case Status::Sat: return "sat";
        case Status::Unsat: return "unsat";
        default: return "unknown";
    }
}

std::vector<int> make_tie_rank(const ConstraintModel& m, std::mt19937_64& rng) {
    std::vector<int> sigma(std::max(m.rank, 1));
    std::iota(sigma.begin(), sigma.end(), 0);
    std::shuffle(sigma.begin(), sigma.end(), rng);

    std::vector<int> ids(m.var_count());
    std::iota(ids.begin(), ids.end(), 0);
    std::sort(ids.begin(), ids.end(), [&](int a, int b) {
        const auto& ma = m.vars.meta(a);
        const auto& mb = m.vars.meta(b);
        return std::tuple(sigma[ma.col], ma.mat_order, ma.row) <
               std::tuple(sigma[mb.col], mb.mat_order, mb.row);
    });
    std::vector<int> rank(m.var_count());
    for (size_t pos = 0; pos < ids.size(); ++pos) rank[ids[pos]] = static_cast<int>(pos);
    return rank;
}

int select_branch(const DomainState& st, const ConstraintModel& m,
                  const std::vector<int>& tie_rank) {
    int best = -1, best_size = 4, best_rank = INT_MAX;
    for (int v = 0; v < m.var_count(); ++v) {
        const int sz = dom::size_of(st.mask(v));
        if (sz <= 1) continue;
        if (sz < best_size || (sz == best_size && tie_rank[v] < best_rank)) {
            best = v;
            best_size = sz;
            best_rank = tie_rank[v];
        }
    }
    return best;
}

Branch select_branch(const DomainState& st, const ConstraintModel& m, std::mt19937_64& rng) {
    return {select_branch(st, m, make_tie_rank(m, rng)), {0, -1, 1}};
}

namespace {

uint64_t luby(uint64_t i) {
    // 1 1 2 1 1 2 4 1 1 2 1 1 2 4 8 ...
    for (uint64_t k = 1; k < 64; ++k)
        if (i == (1ULL << k) - 1) return 1ULL << (k - 1);
    uint64_t k = 1;
    while ((1ULL << k) - 1 < i) ++k;
    return luby(i - (1ULL << (k - 1)) + 1);
}

constexpr int kValueOrder[3] = {0, -1, 1};

struct Frame {
    int var;
    uint8_t saved;
    size_t mark;
    uint8_t tried;
};

struct Searcher {
    const ConstraintModel& model;
    const SearchLimits& limits;
    const std::atomic<bool>* cancel;
    std::mt19937_64 rng;
    SearchStats stats;
    std::optional<FactorMatrices> solution;
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

    enum class RunResult { Sat, Unsat, Unknown, Restart };

    double elapsed() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }

    bool stop_requested() {
        if (cancel && cancel->load(std::memory_order_relaxed)) return true;
        if (limits.node_limit && stats.branches >= *limits.node_limit) return true;
        if (limits.time_limit_sec && (stats.branches & 1023) == 0 &&
            elapsed() >= *limits.time_limit_sec)
            return true;
        return false;
    }

    static int next_value(Frame& f) {
        for (int v : kValueOrder) {
            const uint8_t b = dom::bit(v);
            if ((f.saved & b) && !(f.tried & b)) {
                f.tried |= b;
                return v;
            }
        }
        return 2;  // exhausted
    }

    RunResult run(uint64_t fail_budget, std::vector<Frame>& frames) {
        DomainState st(model);
        st.enqueue_all(model);
        const std::vector<int> tie_rank = make_tie_rank(model, rng);
        frames.clear();

        if (!propagate(st, model).fixpoint) {
            ++stats.fails;
            return RunResult::Unsat;
        }
        uint64_t fails_this_run = 0;

        for (;;) {
            if (stop_requested()) return RunResult::Unknown;

            const int var = select_branch(st, model, tie_rank);
            if (var < 0) {
                FactorMatrices f = model.extract(st.values());
                if (!verify_decomposition(f, model.tensor).ok())
                    throw std::logic_error("search produced a non-verifying assignment");
                solution = std::move(f);
                return RunResult::Sat;
            }

            frames.push_back({var, st.mask(var), st.trail_size(), 0});
            stats.max_depth = std::max(stats.max_depth, static_cast<int>(frames.size()));
            st.assign(model, var, next_value(frames.back()));
            ++stats.branches;

            while (!propagate(st, model).fixpoint) {
                ++stats.fails;
                ++fails_this_run;
                if (fails_this_run >= fail_budget && !frames.empty()) return RunResult::Restart;
                for (;;) {
                    if (frames.empty()) return RunResult::Unsat;
                    Frame& f = frames.back();
                    st.undo_to(f.mark);
                    const int v = next_value(f);
                    if (v != 2) {
                        if (stop_requested()) return RunResult::Unknown;
                        st.assign(model, f.var, v);
                        ++stats.branches;
                        break;
                    }
                    frames.pop_back();
                }
            }
        }
    }

    SolveOutcome solve() {
        SolveOutcome out;
        std::vector<Frame> frames;
        uint64_t restart_index = 1;
        for (;;) {
            const uint64_t budget =
                limits.enable_restarts ? luby(restart_index) * limits.restart_base : UINT64_MAX;
            const RunResult r = run(budget, frames);
            if (r == RunResult::Restart) {
                ++stats.restarts;
                ++restart_index;
                continue;
            }
            out.status = r == RunResult::Sat    ? Status::Sat
                         : r == RunResult::Unsat ? Status::Unsat
                                                 : Status::Unknown;
            break;
        }
        stats.time_sec = elapsed();
        out.stats = stats;
        out.solution = std::move(solution);
        out.exhaustive = model.exhaustive;
        return out;
    }
};

}  // namespace

SolveOutcome search(const ConstraintModel& model, uint64_t seed, const SearchLimits& limits,
                    const std::atomic<bool>* cancel) {
    if (limits.time_limit_sec && *limits.time_limit_sec < 0)
        throw std::invalid_argument("time limit must be non-negative");
    Searcher s{model, limits, cancel, std::mt19937_64(seed)};
    return s.solve();
}

namespace {

// Direct checks over a full assignment, used only by the brute-force oracle.
// Deliberately written without any propagator machinery.
struct DirectChecker {
    const VarTable& vars;
    const TargetTensor& tensor;
    const std::vector<std::pair<int, int>> pairs;
    const std::vector<int>& val;

    int u(int i, int r) const { return val[vars.u(i, r)]; }
    int v(int j, int r) const { return val[vars.v(j, r)]; }
    int w(int k, int r) const { return val[vars.w(k, r)]; }

    bool brent_ok() const {
        const Dims& d = vars.dims();
        for (int i = 0; i < d.u_rows(); ++i)
            for (int j = 0; j < d.v_rows(); ++j)
                for (int k = 0; k < d.w_rows(); ++k) {
                    int sum = 0;
                    for (int r = 0; r < vars.rank(); ++r) sum += u(i, r) * v(j, r) * w(k, r);
                    if (sum != tensor.at(i + 1, j + 1, k + 1)) return false;
                }
        return true;
    }

    bool symmetry_ok() const {
        const Dims& d = vars.dims();
        const int R = vars.rank();
        for (int r = 0; r + 1 < R; ++r) {
            // strict lex on [u;v] columns
            int cmp = 0;
            for (int i = 0; i < d.u_rows() && cmp == 0; ++i) cmp = u(i, r) - u(i, r + 1);
            for (int j = 0; j < d.v_rows() && cmp == 0; ++j) cmp = v(j, r) - v(j, r + 1);
            if (cmp >= 0) return false;
        }
        for (int r = 0; r < R; ++r) {
            for (int i = 0; i < d.u_rows(); ++i) {
                if (u(i, r) == 0) continue;
                if (u(i, r) == 1) return false;
                break;
            }
            for (int k = 0; k < d.w_rows(); ++k) {
                if (w(k, r) == 0) continue;
                if (w(k, r) == 1) return false;
                break;
            }
        }
        return true;
    }

    bool valid_ok() const {
        const Dims& d = vars.dims();
        const int R = vars.rank();
        for (int r = 0; r < R; ++r) {
            int s = 0;
            for (int k = 0; k < d.w_rows(); ++k) s += std::abs(w(k, r));
            if (s < 1) return false;
        }
        for (int k = 0; k < d.w_rows(); ++k) {
            int s = 0;
            for (int r = 0; r < R; ++r) s += std::abs(w(k, r));
            if (s < d.m) return false;
        }
        for (int k = 0; k < d.w_rows(); ++k)
            for (int k2 = k + 1; k2 < d.w_rows(); ++k2) {
                int s = 0;
                for (int r = 0; r < R; ++r) s += std::abs(w(k, r) - w(k2, r));
                if (s < 2) return false;
            }
        for (int i = 0; i < d.u_rows(); ++i) {
            int s = 0;
            for (int r = 0; r < R; ++r) s += std::abs(u(i, r));
            if (s < 1) return false;
        }
        for (int j = 0; j < d.v_rows(); ++j) {
            int s = 0;
            for (int r = 0; r < R; ++r) s += std::abs(v(j, r));
            if (s < 1) return false;
        }
        for (auto [i, j] : pairs) {
            int s = 0;
            for (int r = 0; r < R; ++r) s += std::abs(u(i - 1, r) * v(j - 1, r));
            if (s < 1) return false;
        }
        return true;
    }
};

}  // namespace

BruteForceResult brute_force_solve(Dims dims, int rank, const ModelConfig& config) {
    if (config.sparsity || config.cyclic)
        throw ConfigError("the brute-force oracle accepts no sparsity or cyclic restrictions");
    if (!config.field.is_ternary()) throw ConfigError("brute force supports the ternary field only");
    if (rank < 0) throw ConfigError("rank must be >= 0");
    if (config.use_valid && rank > dims.n * dims.m * dims.p)
        throw ConfigError("valid inequalities refused for rank > n*m*p");

    const int nvars = (dims.u_rows() + dims.v_rows() + dims.w_rows()) * rank;
    if (nvars > 16)
        throw ConfigError("brute force refuses models with more than 16 variables, got " +
                          std::to_string(nvars));

    const VarTable vars = VarTable::plain(dims, rank);
    const TargetTensor tensor = build_target_tensor(dims);
    std::vector<int> val(nvars, -1);
    const DirectChecker chk{vars, tensor, valid_pairs(dims), val};

    BruteForceResult res;
    for (;;) {
        bool ok = chk.brent_ok();
        if (ok && config.use_symmetry) ok = chk.symmetry_ok();
        if (ok && config.use_valid) ok = chk.valid_ok();
        if (ok) {
            ++res.solution_count;
            if (!res.witness) {
                FactorMatrices f = FactorMatrices::zeros(dims, rank);
                for (int i = 0; i < dims.u_rows(); ++i)
                    for (int r = 0; r < rank; ++r) f.u.at(i, r) = chk.u(i, r);
                for (int j = 0; j < dims.v_rows(); ++j)
                    for (int r = 0; r < rank; ++r) f.v.at(j, r) = chk.v(j, r);
                for (int k = 0; k < dims.w_rows(); ++k)
                    for (int r = 0; r < rank; ++r) f.w.at(k, r) = chk.w(k, r);
                res.witness = std::move(f);
            }
        }
        int pos = 0;
        while (pos < nvars) {
            if (val[pos] < 1) {
                ++val[pos];
                break;
            }
            val[pos] = -1;
            ++pos;
        }
        if (pos == nvars) break;
    }
    res.status = res.solution_count > 0 ? Status::Sat : Status::Unsat;
    return res;
}

}  // namespace fmm
