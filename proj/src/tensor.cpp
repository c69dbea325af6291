#include "fmm/tensor.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace fmm {

Dims::Dims(int n_, int m_, int p_) : n(n_), m(m_), p(p_) {
    if (n < 1 || m < 1 || p < 1)
        throw std::invalid_argument("dims must be positive, got (" + std::to_string(n) + "," +
                                    std::to_string(m) + "," + std::to_string(p) + ")");
}

int flat_index(int row, int col, int mat_cols) {
    if (mat_cols < 1) throw std::invalid_argument("mat_cols must be positive");
    if (row < 1) throw std::invalid_argument("row index must be >= 1");
    if (col < 1 || col > mat_cols)
        throw std::invalid_argument("col index " + std::to_string(col) + " outside 1.." +
                                    std::to_string(mat_cols));
    return (row - 1) * mat_cols + col;
}

TargetTensor::TargetTensor(Dims dims)
    : dims_(dims), cells_(static_cast<size_t>(dims.u_rows()) * dims.v_rows() * dims.w_rows(), 0) {
    // T[i,j,k] = 1 iff i = idx(ra,ca), j = idx(rb,cb), k = idx(ra,cb) with ca = rb.
    for (int ra = 1; ra <= dims_.n; ++ra)
        for (int ca = 1; ca <= dims_.m; ++ca)
            for (int cb = 1; cb <= dims_.p; ++cb) {
                const int i = flat_index(ra, ca, dims_.m);
                const int j = flat_index(ca, cb, dims_.p);
                const int k = flat_index(ra, cb, dims_.p);
                cells_[offset(i, j, k)] = 1;
            }
}

size_t TargetTensor::offset(int i, int j, int k) const {
    if (i < 1 || i > dims_.u_rows() || j < 1 || j > dims_.v_rows() || k < 1 || k > dims_.w_rows())
        throw std::invalid_argument("tensor index out of range");
    return (static_cast<size_t>(i - 1) * dims_.v_rows() + (j - 1)) * dims_.w_rows() + (k - 1);
}

uint8_t TargetTensor::at(int i, int j, int k) const { return cells_[offset(i, j, k)]; }

int TargetTensor::ones_count() const {
    int c = 0;
    for (uint8_t x : cells_) c += x;
    return c;
}

TargetTensor build_target_tensor(Dims dims) { return TargetTensor(dims); }

std::vector<std::pair<int, int>> valid_pairs(Dims dims) {
    std::vector<std::pair<int, int>> out;
    out.reserve(static_cast<size_t>(dims.n) * dims.m * dims.p);
    for (int ra = 1; ra <= dims.n; ++ra)
        for (int ca = 1; ca <= dims.m; ++ca)
            for (int cb = 1; cb <= dims.p; ++cb)
                out.emplace_back(flat_index(ra, ca, dims.m), flat_index(ca, cb, dims.p));
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace fmm
