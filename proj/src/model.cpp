#include "fmm/model.hpp"

#include <algorithm>
#include <map>

namespace fmm {

void Field::validate() const {
    if (values.empty()) throw ConfigError("field must not be empty");
    if (std::find(values.begin(), values.end(), 0) == values.end())
        throw ConfigError("field must contain 0");
    for (int x : values)
        if (std::find(values.begin(), values.end(), -x) == values.end())
            throw ConfigError("field must be closed under negation");
}

bool Field::is_ternary() const {
    std::vector<int> v = values;
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v == std::vector<int>{-1, 0, 1};
}

const char* family_name(Family f) {
    switch (f) {
        case Family::Brent: return "brent";
        case Family::Lex: return "lex";
        case Family::SignU: return "sign-u";
        case Family::SignW: return "sign-w";
        case Family::WColNonzero: return "w-col-nonzero";
        case Family::WRowWeight: return "w-row-weight";
        case Family::WRowDiff: return "w-row-diff";
        case Family::URowNonzero: return "u-row-nonzero";
        case Family::VRowNonzero: return "v-row-nonzero";
        case Family::PairProduct: return "pair-product";
        case Family::SparsityUV: return "sparsity-uv";
        case Family::SparsityW: return "sparsity-w";
        default: return "?";
    }
}

VarTable VarTable::plain(Dims dims, int rank) {
    VarTable vt;
    vt.dims_ = dims;
    vt.rank_ = rank;
    vt.var_count_ = (dims.u_rows() + dims.v_rows() + dims.w_rows()) * rank;
    vt.meta_.resize(vt.var_count_);
    for (int i = 0; i < dims.u_rows(); ++i)
        for (int r = 0; r < rank; ++r) vt.meta_[vt.u(i, r)] = {r, 1, i};
    for (int j = 0; j < dims.v_rows(); ++j)
        for (int r = 0; r < rank; ++r) vt.meta_[vt.v(j, r)] = {r, 2, j};
    for (int k = 0; k < dims.w_rows(); ++k)
        for (int r = 0; r < rank; ++r) vt.meta_[vt.w(k, r)] = {r, 0, k};
    return vt;
}

VarTable VarTable::cyclic(Dims dims, int s, int t) {
    if (!dims.square()) throw ConfigError("cyclic parametrization requires n = m = p");
    if (s < 0 || t < 0) throw ConfigError("cyclic shape needs s, t >= 0");
    VarTable vt;
    vt.dims_ = dims;
    vt.rank_ = s + 3 * t;
    vt.cyclic_ = true;
    vt.s_ = s;
    vt.t_ = t;
    const int q = dims.n * dims.n;
    vt.var_count_ = q * (s + 3 * t);
    vt.meta_.resize(vt.var_count_);
    for (int block = 0; block < 4; ++block) {
        const int width = block == 0 ? s : t;
        for (int row = 0; row < q; ++row)
            for (int c = 0; c < width; ++c) {
                // Key by the column the block occupies inside the assembled U.
                const int ucol = block == 0 ? c : s + (block - 1) * t + c;
                vt.meta_[vt.block_var(block, row, c)] = {ucol, 1, row};
            }
    }
    return vt;
}

int VarTable::block_var(int block, int row, int col) const {
    const int q = dims_.n * dims_.n;
    const int base = block == 0 ? 0 : q * (s_ + (block - 1) * t_);
    return base + row * (block == 0 ? s_ : t_) + col;
}

namespace {
// Slot order of blocks A,B,C,D inside each factor matrix.
constexpr int kUSlots[4] = {0, 1, 2, 3};  // U = [A B C D]
constexpr int kVSlots[4] = {0, 2, 3, 1};  // V = [A D B C]: B sits in slot 2, C in 3, D in 1
constexpr int kWSlots[4] = {0, 3, 1, 2};  // W = [A C D B]: B in slot 3, C in 1, D in 2

int cyclic_lookup(const VarTable& vt, const int slots[4], int row, int r) {
    const int s = vt.s(), t = vt.t();
    // Which slot does column r fall into, and which block lives there?
    int slot, off;
    if (r < s) {
        slot = 0;
        off = r;
    } else {
        slot = 1 + (r - s) / t;
        off = (r - s) % t;
    }
    for (int block = 0; block < 4; ++block)
        if (slots[block] == slot) return vt.block_var(block, row, off);
    return -1;  // unreachable
}
}  // namespace

int VarTable::u(int i, int r) const {
    if (!cyclic_) return i * rank_ + r;
    return cyclic_lookup(*this, kUSlots, i, r);
}

int VarTable::v(int j, int r) const {
    if (!cyclic_) return (dims_.u_rows() + j) * rank_ + r;
    return cyclic_lookup(*this, kVSlots, j, r);
}

int VarTable::w(int k, int r) const {
    if (!cyclic_) return (dims_.u_rows() + dims_.v_rows() + k) * rank_ + r;
    return cyclic_lookup(*this, kWSlots, k, r);
}

std::vector<Constraint> brent_family(const VarTable& vars, const TargetTensor& t) {
    std::vector<Constraint> out;
    const Dims& d = vars.dims();
    out.reserve(static_cast<size_t>(d.u_rows()) * d.v_rows() * d.w_rows());
    for (int i = 0; i < d.u_rows(); ++i)
        for (int j = 0; j < d.v_rows(); ++j)
            for (int k = 0; k < d.w_rows(); ++k) {
                BrentEq eq;
                eq.i = i + 1;
                eq.j = j + 1;
                eq.k = k + 1;
                eq.rhs = static_cast<int8_t>(t.at(i + 1, j + 1, k + 1));
                eq.terms.resize(vars.rank());
                for (int r = 0; r < vars.rank(); ++r)
                    eq.terms[r] = {vars.u(i, r), vars.v(j, r), vars.w(k, r)};
                out.push_back({Family::Brent, std::move(eq)});
            }
    return out;
}

std::vector<Constraint> lex_family(const VarTable& vars) {
    std::vector<Constraint> out;
    const Dims& d = vars.dims();
    for (int r = 0; r + 1 < vars.rank(); ++r) {
        LexLess c;
        for (int i = 0; i < d.u_rows(); ++i) c.lo.push_back(vars.u(i, r));
        for (int j = 0; j < d.v_rows(); ++j) c.lo.push_back(vars.v(j, r));
        for (int i = 0; i < d.u_rows(); ++i) c.hi.push_back(vars.u(i, r + 1));
        for (int j = 0; j < d.v_rows(); ++j) c.hi.push_back(vars.v(j, r + 1));
        out.push_back({Family::Lex, std::move(c)});
    }
    return out;
}

std::vector<Constraint> sign_family_u(const VarTable& vars) {
    std::vector<Constraint> out;
    for (int r = 0; r < vars.rank(); ++r) {
        SignColumn c;
        for (int i = 0; i < vars.dims().u_rows(); ++i) c.vars.push_back(vars.u(i, r));
        out.push_back({Family::SignU, std::move(c)});
    }
    return out;
}

std::vector<Constraint> sign_family_w(const VarTable& vars) {
    std::vector<Constraint> out;
    for (int r = 0; r < vars.rank(); ++r) {
        SignColumn c;
        for (int k = 0; k < vars.dims().w_rows(); ++k) c.vars.push_back(vars.w(k, r));
        out.push_back({Family::SignW, std::move(c)});
    }
    return out;
}

namespace {
// Collapse aliased slots into (var, multiplicity) pairs.
AbsSum make_abs_sum(std::vector<int32_t> slots, int bound, bool at_least) {
    std::map<int32_t, int8_t> mult;
    for (int32_t v : slots) mult[v] = static_cast<int8_t>(mult[v] + 1);
    AbsSum c;
    c.bound = bound;
    c.at_least = at_least;
    for (auto [v, m] : mult) {
        c.vars.push_back(v);
        c.mult.push_back(m);
    }
    return c;
}
}  // namespace

std::vector<Constraint> valid_family(const VarTable& vars, const TargetTensor& t) {
    const Dims& d = vars.dims();
    const int rank = vars.rank();
    if (rank > d.n * d.m * d.p)
        throw ConfigError(
            "valid inequalities are only sound for rank <= n*m*p (the w-col-nonzero family "
            "assumes every multiplication term is used); they were refused for rank " +
            std::to_string(rank));

    std::vector<Constraint> out;
    // Every multiplication term is used by some output.
    for (int r = 0; r < rank; ++r) {
        std::vector<int32_t> slots;
        for (int k = 0; k < d.w_rows(); ++k) slots.push_back(vars.w(k, r));
        out.push_back({Family::WColNonzero, make_abs_sum(std::move(slots), 1, true)});
    }
    // A dot product of size-m vectors needs at least m multiplications.
    for (int k = 0; k < d.w_rows(); ++k) {
        std::vector<int32_t> slots;
        for (int r = 0; r < rank; ++r) slots.push_back(vars.w(k, r));
        out.push_back({Family::WRowWeight, make_abs_sum(std::move(slots), d.m, true)});
    }
    // Distinct outputs differ in at least two multiplication terms.
    for (int k = 0; k < d.w_rows(); ++k)
        for (int k2 = k + 1; k2 < d.w_rows(); ++k2) {
            PairDiffSum c;
            c.bound = 2;
            for (int r = 0; r < rank; ++r) c.pairs.push_back({vars.w(k, r), vars.w(k2, r)});
            out.push_back({Family::WRowDiff, std::move(c)});
        }
    // Every input entry appears in some multiplication term.
    for (int i = 0; i < d.u_rows(); ++i) {
        std::vector<int32_t> slots;
        for (int r = 0; r < rank; ++r) slots.push_back(vars.u(i, r));
        out.push_back({Family::URowNonzero, make_abs_sum(std::move(slots), 1, true)});
    }
    for (int j = 0; j < d.v_rows(); ++j) {
        std::vector<int32_t> slots;
        for (int r = 0; r < rank; ++r) slots.push_back(vars.v(j, r));
        out.push_back({Family::VRowNonzero, make_abs_sum(std::move(slots), 1, true)});
    }
    // Every product a_i*b_j that feeds some output appears in some term.
    for (auto [i, j] : valid_pairs(d)) {
        AbsProdSum c;
        c.bound = 1;
        for (int r = 0; r < rank; ++r) c.pairs.push_back({vars.u(i - 1, r), vars.v(j - 1, r)});
        out.push_back({Family::PairProduct, std::move(c)});
    }
    return out;
}

std::vector<Constraint> sparsity_family(const VarTable& vars, int k1, int k2) {
    if (k1 < 1 || k2 < 1) throw ConfigError("sparsity caps must be >= 1");
    const Dims& d = vars.dims();
    std::vector<Constraint> out;
    for (int r = 0; r < vars.rank(); ++r) {
        std::vector<int32_t> slots;
        for (int i = 0; i < d.u_rows(); ++i) slots.push_back(vars.u(i, r));
        for (int j = 0; j < d.v_rows(); ++j) slots.push_back(vars.v(j, r));
        out.push_back({Family::SparsityUV, make_abs_sum(std::move(slots), k1, false)});
    }
    for (int k = 0; k < d.w_rows(); ++k) {
        std::vector<int32_t> slots;
        for (int r = 0; r < vars.rank(); ++r) slots.push_back(vars.w(k, r));
        out.push_back({Family::SparsityW, make_abs_sum(std::move(slots), k2, false)});
    }
    return out;
}

std::vector<Constraint> cyclic_block_lex_family(const VarTable& vars) {
    std::vector<Constraint> out;
    if (!vars.is_cyclic()) return out;
    const int q = vars.dims().n * vars.dims().n;
    for (int block = 1; block <= 3; ++block) {  // B, C, D
        for (int c = 0; c + 1 < vars.t(); ++c) {
            LexLess lex;
            for (int row = 0; row < q; ++row) lex.lo.push_back(vars.block_var(block, row, c));
            for (int row = 0; row < q; ++row) lex.hi.push_back(vars.block_var(block, row, c + 1));
            out.push_back({Family::Lex, std::move(lex)});
        }
    }
    return out;
}

int ConstraintModel::family_count(Family f) const {
    int n = 0;
    for (const auto& c : constraints) n += (c.family == f);
    return n;
}

FactorMatrices ConstraintModel::extract(const std::vector<int>& values) const {
    FactorMatrices f = FactorMatrices::zeros(dims, rank);
    for (int i = 0; i < dims.u_rows(); ++i)
        for (int r = 0; r < rank; ++r) f.u.at(i, r) = values[vars.u(i, r)];
    for (int j = 0; j < dims.v_rows(); ++j)
        for (int r = 0; r < rank; ++r) f.v.at(j, r) = values[vars.v(j, r)];
    for (int k = 0; k < dims.w_rows(); ++k)
        for (int r = 0; r < rank; ++r) f.w.at(k, r) = values[vars.w(k, r)];
    return f;
}

namespace {
void append_vars_of(const Constraint& c, std::vector<int32_t>& out) {
    std::visit(
        [&](const auto& body) {
            using T = std::decay_t<decltype(body)>;
            if constexpr (std::is_same_v<T, BrentEq>) {
                for (const auto& t : body.terms) {
                    out.push_back(t.x);
                    out.push_back(t.y);
                    out.push_back(t.z);
                }
            } else if constexpr (std::is_same_v<T, LexLess>) {
                out.insert(out.end(), body.lo.begin(), body.lo.end());
                out.insert(out.end(), body.hi.begin(), body.hi.end());
            } else if constexpr (std::is_same_v<T, SignColumn>) {
                out.insert(out.end(), body.vars.begin(), body.vars.end());
            } else if constexpr (std::is_same_v<T, AbsSum>) {
                out.insert(out.end(), body.vars.begin(), body.vars.end());
            } else {
                for (const auto& p : body.pairs) {
                    out.push_back(p.x);
                    out.push_back(p.y);
                }
            }
        },
        c.body);
}
}  // namespace

ConstraintModel build_model(Dims dims, int rank, const ModelConfig& config) {
    if (rank < 0) throw ConfigError("rank must be >= 0");
    config.field.validate();
    if (!config.field.is_ternary())
        throw ConfigError("only the ternary field {-1,0,1} is supported by the search engine");
    if (config.cyclic) {
        if (!dims.square()) throw ConfigError("cyclic parametrization requires n = m = p");
        if (config.cyclic->s + 3 * config.cyclic->t != rank)
            throw ConfigError("cyclic shape violates s + 3t = rank: " +
                              std::to_string(config.cyclic->s) + " + 3*" +
                              std::to_string(config.cyclic->t) +
                              " != " + std::to_string(rank));
    }

    ConstraintModel m{dims,
                      rank,
                      config,
                      config.cyclic ? VarTable::cyclic(dims, config.cyclic->s, config.cyclic->t)
                                    : VarTable::plain(dims, rank),
                      build_target_tensor(dims),
                      {},
                      /*exhaustive=*/!config.sparsity && !config.cyclic,
                      0,
                      0,
                      false,
                      false,
                      {}};

    auto add = [&](std::vector<Constraint> cs) {
        for (auto& c : cs) m.constraints.push_back(std::move(c));
    };

    add(brent_family(m.vars, m.tensor));
    if (config.use_symmetry && !config.cyclic) {
        add(lex_family(m.vars));
        add(sign_family_u(m.vars));
        add(sign_family_w(m.vars));
    }
    if (config.cyclic && config.cyclic_block_lex) add(cyclic_block_lex_family(m.vars));
    if (config.use_valid) add(valid_family(m.vars, m.tensor));
    if (config.sparsity) {
        const int k1_max = dims.u_rows() + dims.v_rows();
        const int k2_max = rank;
        m.effective_k1 = std::min(config.sparsity->k1, k1_max);
        m.effective_k2 = std::min(config.sparsity->k2, k2_max);
        m.k1_clamped = m.effective_k1 != config.sparsity->k1;
        m.k2_clamped = m.effective_k2 != config.sparsity->k2;
        add(sparsity_family(m.vars, m.effective_k1, m.effective_k2));
    }

    m.watchers.assign(m.var_count(), {});
    std::vector<int32_t> touched;
    for (size_t cid = 0; cid < m.constraints.size(); ++cid) {
        touched.clear();
        append_vars_of(m.constraints[cid], touched);
        std::sort(touched.begin(), touched.end());
        touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
        for (int32_t v : touched) m.watchers[v].push_back(static_cast<int32_t>(cid));
    }
    return m;
}

}  // namespace fmm
