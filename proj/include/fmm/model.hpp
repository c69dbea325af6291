#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "fmm/tensor.hpp"
#include "fmm/verify.hpp"

namespace fmm {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Allowed coefficient set. Must contain 0 and be closed under negation.
// The search engine supports the ternary field only; other sets are accepted
// as data (documents, verification) but rejected at model build time.
struct Field {
    std::vector<int> values;

    static Field ternary() { return Field{{-1, 0, 1}}; }
    void validate() const;
    bool is_ternary() const;

    bool operator==(const Field&) const = default;
};

struct SparsityCaps {
    int k1 = 0;  // max nonzeros over a [U;V] column
    int k2 = 0;  // max nonzeros over a W row
};

struct CyclicShape {
    int s = 0;  // width of the shared block A
    int t = 0;  // width of each of B, C, D; rank = s + 3t
};

struct ModelConfig {
    bool use_symmetry = false;
    bool use_valid = false;
    std::optional<SparsityCaps> sparsity;
    std::optional<CyclicShape> cyclic;
    // Experimental: lex-order the columns inside each of the B, C, D blocks
    // of the cyclic parametrization. Off by default.
    bool cyclic_block_lex = false;
    Field field = Field::ternary();
};

enum class Mat : uint8_t { U, V, W };

// Maps factor-matrix slots (matrix, row, column) to solver variable ids.
// In the cyclic parametrization U = [A B C D], V = [A D B C], W = [A C D B],
// several slots resolve to the same block variable.
class VarTable {
public:
    static VarTable plain(Dims dims, int rank);
    static VarTable cyclic(Dims dims, int s, int t);

    const Dims& dims() const { return dims_; }
    int rank() const { return rank_; }
    bool is_cyclic() const { return cyclic_; }
    int s() const { return s_; }
    int t() const { return t_; }
    int var_count() const { return var_count_; }

    // 0-based row and column indices.
    int u(int i, int r) const;
    int v(int j, int r) const;
    int w(int k, int r) const;
    // Block variables of the cyclic parametrization; block 0..3 = A,B,C,D.
    int block_var(int block, int row, int col) const;

    // Static branching order key: (column, W<U<V, row) for plain variables;
    // block variables use their column position inside the assembled U.
    struct VarMeta {
        int col = 0;
        int mat_order = 0;  // W=0, U=1, V=2
        int row = 0;
    };
    const VarMeta& meta(int var) const { return meta_[var]; }

private:
    Dims dims_;
    int rank_ = 0;
    bool cyclic_ = false;
    int s_ = 0, t_ = 0;
    int var_count_ = 0;
    std::vector<VarMeta> meta_;
};

enum class Family : uint8_t {
    Brent,
    Lex,
    SignU,
    SignW,
    WColNonzero,   // sum_k |w_{k,r}| >= 1
    WRowWeight,    // sum_r |w_{k,r}| >= m
    WRowDiff,      // sum_r |w_{k,r} - w_{k',r}| >= 2
    URowNonzero,   // sum_r |u_{i,r}| >= 1
    VRowNonzero,   // sum_r |v_{j,r}| >= 1
    PairProduct,   // sum_r |u_{i,r} * v_{j,r}| >= 1
    SparsityUV,    // sum_i |u_{i,r}| + sum_j |v_{j,r}| <= k1
    SparsityW,     // sum_r |w_{k,r}| <= k2
    kCount
};

const char* family_name(Family f);

// sum_r x_r * y_r * z_r = rhs. Terms may repeat a variable (cyclic mode).
struct BrentEq {
    struct Term {
        int32_t x, y, z;
    };
    std::vector<Term> terms;
    int8_t rhs = 0;
    int i = 0, j = 0, k = 0;  // 1-based tensor indices, for diagnostics
};

// lo <_lex hi, strictly, under value order -1 < 0 < 1.
struct LexLess {
    std::vector<int32_t> lo, hi;
};

// First nonzero entry of the listed column (in order) must be -1.
struct SignColumn {
    std::vector<int32_t> vars;
};

// sum mult_i * |x_i| >= bound (at_least) or <= bound. Multiplicities cover
// slots that alias the same block variable.
struct AbsSum {
    std::vector<int32_t> vars;
    std::vector<int8_t> mult;
    int bound = 0;
    bool at_least = true;
};

// sum_r |x_r * y_r| >= bound.
struct AbsProdSum {
    struct Pair {
        int32_t x, y;
    };
    std::vector<Pair> pairs;
    int bound = 1;
};

// sum_r |x_r - y_r| >= bound.
struct PairDiffSum {
    struct Pair {
        int32_t x, y;
    };
    std::vector<Pair> pairs;
    int bound = 2;
};

struct Constraint {
    Family family;
    std::variant<BrentEq, LexLess, SignColumn, AbsSum, AbsProdSum, PairDiffSum> body;
};

struct ConstraintModel {
    Dims dims;
    int rank = 0;
    ModelConfig config;
    VarTable vars;
    TargetTensor tensor;
    std::vector<Constraint> constraints;
    // True iff no search-space restriction (sparsity, cyclic) is active;
    // only then does Unsat prove rank infeasibility.
    bool exhaustive = true;
    // Effective sparsity caps after clamping to their upper bounds.
    int effective_k1 = 0, effective_k2 = 0;
    bool k1_clamped = false, k2_clamped = false;

    // Constraint ids watching each variable.
    std::vector<std::vector<int32_t>> watchers;

    int family_count(Family f) const;
    int var_count() const { return vars.var_count(); }

    FactorMatrices extract(const std::vector<int>& values) const;
};

// Family builders. All columns/rows they reference resolve through the
// variable table, so they work unchanged under the cyclic parametrization.
std::vector<Constraint> brent_family(const VarTable& vars, const TargetTensor& t);
std::vector<Constraint> lex_family(const VarTable& vars);
std::vector<Constraint> sign_family_u(const VarTable& vars);
std::vector<Constraint> sign_family_w(const VarTable& vars);
std::vector<Constraint> valid_family(const VarTable& vars, const TargetTensor& t);
std::vector<Constraint> sparsity_family(const VarTable& vars, int k1, int k2);
std::vector<Constraint> cyclic_block_lex_family(const VarTable& vars);

ConstraintModel build_model(Dims dims, int rank, const ModelConfig& config);

}  // namespace fmm
