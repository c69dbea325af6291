#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fmm/tensor.hpp"

namespace fmm {

// Small dense integer matrix, row-major, 0-based accessors.
struct IntMat {
    int rows = 0;
    int cols = 0;
    std::vector<int> a;

    IntMat() = default;
    IntMat(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, 0) {}
    IntMat(std::initializer_list<std::initializer_list<int>> init);

    int& at(int r, int c) { return a[static_cast<size_t>(r) * cols + c]; }
    int at(int r, int c) const { return a[static_cast<size_t>(r) * cols + c]; }

    std::vector<int> col(int c) const;
    void negate_col(int c);

    bool operator==(const IntMat&) const = default;
};

// Candidate or solution triple (U, V, W) for a rank-R decomposition.
struct FactorMatrices {
    Dims dims;
    int rank = 0;
    IntMat u;  // (n*m) x R
    IntMat v;  // (m*p) x R
    IntMat w;  // (n*p) x R

    static FactorMatrices zeros(Dims dims, int rank);

    bool operator==(const FactorMatrices&) const = default;
};

// One failed trilinear equation: indices are 1-based.
struct Violation {
    int i = 0, j = 0, k = 0;
    int expected = 0;
    int got = 0;

    bool operator==(const Violation&) const = default;
};

struct VerifyResult {
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
};

// Exact integer check of sum_r U[i,r]*V[j,r]*W[k,r] = T[i,j,k] for all
// (i,j,k); collects every violation. Throws on shape mismatch.
VerifyResult verify_decomposition(const FactorMatrices& f, const TargetTensor& t);

struct ProductCheckResult {
    bool pass = true;
    // Witness inputs when a trial failed, row-major.
    std::vector<long long> a, b;
};

// Functional check: multiply random integer matrices through the m_r terms
// and compare with the naive product, all in exact integer arithmetic.
ProductCheckResult randomized_product_check(const FactorMatrices& f, int trials, int value_bound,
                                            uint64_t seed);

// Canonical representative under column permutations and paired sign flips
// (sign product of the three column signs stays +1): leading nonzero of each
// U column made -1 (flipping U,V), then of each W column (flipping W,V),
// then columns sorted by the concatenated [u;v;w] key under -1 < 0 < 1.
FactorMatrices canonicalize(const FactorMatrices& f);

// True when two columns share the same [u;v] part (lex-strict cannot hold).
bool has_duplicate_uv_columns(const FactorMatrices& f);

// True iff the factors have the block layout U=[A B C D], V=[A D B C],
// W=[A C D B] with A of width s and B, C, D of width t, checked by direct
// slicing in that fixed column order. Requires square dims and s + 3t = R.
bool check_cyclic(const FactorMatrices& f, int s, int t);

}  // namespace fmm
