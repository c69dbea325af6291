#include "fmm/verify.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <stdexcept>

namespace fmm {

IntMat::IntMat(std::initializer_list<std::initializer_list<int>> init) {
    rows = static_cast<int>(init.size());
    cols = rows == 0 ? 0 : static_cast<int>(init.begin()->size());
    a.reserve(static_cast<size_t>(rows) * cols);
    for (const auto& row : init) {
        if (static_cast<int>(row.size()) != cols)
            throw std::invalid_argument("ragged matrix initializer");
        a.insert(a.end(), row.begin(), row.end());
    }
}

std::vector<int> IntMat::col(int c) const {
    std::vector<int> out(rows);
    for (int r = 0; r < rows; ++r) out[r] = at(r, c);
    return out;
}

void IntMat::negate_col(int c) {
    for (int r = 0; r < rows; ++r) at(r, c) = -at(r, c);
}

FactorMatrices FactorMatrices::zeros(Dims dims, int rank) {
    FactorMatrices f;
    f.dims = dims;
    f.rank = rank;
    f.u = IntMat(dims.u_rows(), rank);
    f.v = IntMat(dims.v_rows(), rank);
    f.w = IntMat(dims.w_rows(), rank);
    return f;
}

namespace {

void check_shapes(const FactorMatrices& f, const Dims& d) {
    if (f.dims != d) throw std::invalid_argument("factor dims do not match tensor dims");
    if (f.u.rows != d.u_rows() || f.v.rows != d.v_rows() || f.w.rows != d.w_rows() ||
        f.u.cols != f.rank || f.v.cols != f.rank || f.w.cols != f.rank)
        throw std::invalid_argument("factor matrix shapes do not match dims/rank");
}

int first_nonzero(const std::vector<int>& col) {
    for (int x : col)
        if (x != 0) return x;
    return 0;
}

}  // namespace

VerifyResult verify_decomposition(const FactorMatrices& f, const TargetTensor& t) {
    check_shapes(f, t.dims());
    VerifyResult res;
    const Dims& d = t.dims();
    for (int i = 1; i <= d.u_rows(); ++i)
        for (int j = 1; j <= d.v_rows(); ++j)
            for (int k = 1; k <= d.w_rows(); ++k) {
                int sum = 0;
                for (int r = 0; r < f.rank; ++r)
                    sum += f.u.at(i - 1, r) * f.v.at(j - 1, r) * f.w.at(k - 1, r);
                const int want = t.at(i, j, k);
                if (sum != want) res.violations.push_back({i, j, k, want, sum});
            }
    return res;
}

ProductCheckResult randomized_product_check(const FactorMatrices& f, int trials, int value_bound,
                                            uint64_t seed) {
    if (trials < 1 || value_bound < 1)
        throw std::invalid_argument("trials and value_bound must be positive");
    const Dims d = f.dims;
    check_shapes(f, d);

    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<long long> pick(-value_bound, value_bound);

    std::vector<long long> a(static_cast<size_t>(d.n) * d.m);
    std::vector<long long> b(static_cast<size_t>(d.m) * d.p);
    for (int trial = 0; trial < trials; ++trial) {
        for (auto& x : a) x = pick(rng);
        for (auto& x : b) x = pick(rng);

        // m_r = (U column r . vec(A)) * (V column r . vec(B))
        std::vector<long long> mterm(f.rank);
        for (int r = 0; r < f.rank; ++r) {
            long long ua = 0, vb = 0;
            for (int i = 0; i < d.u_rows(); ++i) ua += f.u.at(i, r) * a[i];
            for (int j = 0; j < d.v_rows(); ++j) vb += f.v.at(j, r) * b[j];
            mterm[r] = ua * vb;
        }

        for (int ra = 1; ra <= d.n; ++ra)
            for (int cb = 1; cb <= d.p; ++cb) {
                long long naive = 0;
                for (int ca = 1; ca <= d.m; ++ca)
                    naive += a[(ra - 1) * d.m + (ca - 1)] * b[(ca - 1) * d.p + (cb - 1)];
                const int k = flat_index(ra, cb, d.p);
                long long got = 0;
                for (int r = 0; r < f.rank; ++r) got += f.w.at(k - 1, r) * mterm[r];
                if (got != naive) return {false, a, b};
            }
    }
    return {true, {}, {}};
}

FactorMatrices canonicalize(const FactorMatrices& f) {
    FactorMatrices g = f;
    for (int r = 0; r < g.rank; ++r) {
        if (first_nonzero(g.u.col(r)) > 0) {
            g.u.negate_col(r);
            g.v.negate_col(r);
        }
        if (first_nonzero(g.w.col(r)) > 0) {
            g.w.negate_col(r);
            g.v.negate_col(r);
        }
    }

    // Sort columns by the full [u;v;w] key so duplicate [u;v] parts still get
    // a deterministic order.
    std::vector<int> order(g.rank);
    std::iota(order.begin(), order.end(), 0);
    auto key = [&](int r) {
        std::vector<int> k = g.u.col(r);
        const auto vc = g.v.col(r), wc = g.w.col(r);
        k.insert(k.end(), vc.begin(), vc.end());
        k.insert(k.end(), wc.begin(), wc.end());
        return k;
    };
    std::stable_sort(order.begin(), order.end(), [&](int x, int y) { return key(x) < key(y); });

    FactorMatrices out = FactorMatrices::zeros(g.dims, g.rank);
    for (int r = 0; r < g.rank; ++r) {
        for (int i = 0; i < g.u.rows; ++i) out.u.at(i, r) = g.u.at(i, order[r]);
        for (int j = 0; j < g.v.rows; ++j) out.v.at(j, r) = g.v.at(j, order[r]);
        for (int k = 0; k < g.w.rows; ++k) out.w.at(k, r) = g.w.at(k, order[r]);
    }
    return out;
}

bool has_duplicate_uv_columns(const FactorMatrices& f) {
    std::vector<std::vector<int>> keys;
    keys.reserve(f.rank);
    for (int r = 0; r < f.rank; ++r) {
        std::vector<int> k = f.u.col(r);
        const auto vc = f.v.col(r);
        k.insert(k.end(), vc.begin(), vc.end());
        keys.push_back(std::move(k));
    }
    std::sort(keys.begin(), keys.end());
    return std::adjacent_find(keys.begin(), keys.end()) != keys.end();
}

bool check_cyclic(const FactorMatrices& f, int s, int t) {
    if (!f.dims.square()) throw std::invalid_argument("cyclic structure requires square dims");
    if (s < 0 || t < 0 || s + 3 * t != f.rank)
        throw std::invalid_argument("cyclic shape needs s + 3t = rank with s, t >= 0");

    // Column index of each block slice inside U, V, W.
    // U = [A B C D], V = [A D B C], W = [A C D B].
    auto block_cols = [&](int which /*0=A,1=B,2=C,3=D*/, int pos /*slot 0..3*/) {
        (void)which;
        return pos == 0 ? 0 : s + (pos - 1) * t;
    };
    auto slice_eq = [&](const IntMat& x, int xc, const IntMat& y, int yc, int width) {
        for (int c = 0; c < width; ++c)
            if (x.col(xc + c) != y.col(yc + c)) return false;
        return true;
    };

    // A occupies slot 0 everywhere.
    if (!slice_eq(f.u, 0, f.v, 0, s) || !slice_eq(f.u, 0, f.w, 0, s)) return false;
    // B: U slot 1, V slot 2, W slot 3.
    if (!slice_eq(f.u, block_cols(1, 1), f.v, block_cols(1, 2), t)) return false;
    if (!slice_eq(f.u, block_cols(1, 1), f.w, block_cols(1, 3), t)) return false;
    // C: U slot 2, V slot 3, W slot 1.
    if (!slice_eq(f.u, block_cols(2, 2), f.v, block_cols(2, 3), t)) return false;
    if (!slice_eq(f.u, block_cols(2, 2), f.w, block_cols(2, 1), t)) return false;
    // D: U slot 3, V slot 1, W slot 2.
    if (!slice_eq(f.u, block_cols(3, 3), f.v, block_cols(3, 1), t)) return false;
    if (!slice_eq(f.u, block_cols(3, 3), f.w, block_cols(3, 2), t)) return false;
    return true;
}

}  // namespace fmm
