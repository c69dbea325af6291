#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace fmm {

// Matrix dimensions: A is n x m, B is m x p, C = A*B is n x p.
struct Dims {
    int n = 0;
    int m = 0;
    int p = 0;

    Dims() = default;
    Dims(int n_, int m_, int p_);

    int u_rows() const { return n * m; }
    int v_rows() const { return m * p; }
    int w_rows() const { return n * p; }
    bool square() const { return n == m && m == p; }

    bool operator==(const Dims&) const = default;
};

// 1-based row-major index of a matrix entry: (row-1)*mat_cols + col.
// Throws std::invalid_argument on out-of-range row/col.
int flat_index(int row, int col, int mat_cols);

// The multiplication tensor T: entry (i,j,k) is 1 iff the product a_i*b_j
// contributes to output c_k. Immutable once built; safe to share across
// threads. Public indices are 1-based.
class TargetTensor {
public:
    explicit TargetTensor(Dims dims);

    const Dims& dims() const { return dims_; }
    uint8_t at(int i, int j, int k) const;
    int ones_count() const;

private:
    Dims dims_;
    std::vector<uint8_t> cells_;

    size_t offset(int i, int j, int k) const;
};

TargetTensor build_target_tensor(Dims dims);

// All (i,j) pairs with T[i,j,k] = 1 for some k, sorted; cardinality n*m*p.
std::vector<std::pair<int, int>> valid_pairs(Dims dims);

}  // namespace fmm
