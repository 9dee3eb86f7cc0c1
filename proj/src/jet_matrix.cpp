#include "embjet/jet_matrix.hpp"

#include <algorithm>
#include <cmath>

namespace embjet {

JetMatrix::JetMatrix(int rows, int cols, const Jet& fill)
    : rows_(rows), cols_(cols), e_(static_cast<size_t>(rows) * cols, fill) {}

JetMatrix JetMatrix::identity(int n, int nvars, int order, Mode mode) {
    JetMatrix m(n, n, Jet(nvars, order, mode));
    for (int i = 0; i < n; ++i)
        m.at(i, i) = Jet::constant(nvars, order, Scalar::one(mode));
    return m;
}

int JetMatrix::min_order() const {
    int k = e_.empty() ? 0 : e_[0].order();
    for (auto& j : e_) k = std::min(k, j.order());
    return k;
}

JetMatrix JetMatrix::transposed() const {
    JetMatrix t(cols_, rows_, e_.empty() ? Jet() : e_[0]);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) t.at(j, i) = at(i, j);
    return t;
}

JetMatrix JetMatrix::operator*(const JetMatrix& o) const {
    if (cols_ != o.rows_) throw ContextError("matrix product shape mismatch");
    JetMatrix r(rows_, o.cols_, Jet(nvars(), std::min(min_order(), o.min_order()), mode()));
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < o.cols_; ++j) {
            Jet s(nvars(), std::min(min_order(), o.min_order()), mode());
            for (int k = 0; k < cols_; ++k) s += at(i, k) * o.at(k, j);
            r.at(i, j) = s;
        }
    return r;
}

std::vector<Jet> JetMatrix::apply(const std::vector<Jet>& v) const {
    if (static_cast<int>(v.size()) != cols_)
        throw ContextError("matrix-vector shape mismatch");
    std::vector<Jet> out;
    out.reserve(rows_);
    for (int i = 0; i < rows_; ++i) {
        Jet s(nvars(), min_order(), mode());
        for (int k = 0; k < cols_; ++k) s += at(i, k) * v[k];
        out.push_back(s);
    }
    return out;
}

ScalarLU::ScalarLU(const std::vector<std::vector<Scalar>>& A, Mode mode)
    : n_(static_cast<int>(A.size())), mode_(mode), det_(Scalar::one(mode)), lu_(A) {
    perm_.resize(n_);
    for (int i = 0; i < n_; ++i) perm_[i] = i;
    double scale = 1.0;
    for (auto& row : lu_)
        for (auto& v : row) scale = std::max(scale, v.abs());
    auto negligible = [&](const Scalar& s) {
        return mode == Mode::exact ? s.is_zero() : s.abs() <= 1e-13 * scale;
    };
    for (int c = 0; c < n_; ++c) {
        int best = -1;
        double best_abs = 0.0;
        for (int r = c; r < n_; ++r) {
            double v = lu_[r][c].abs();
            if (!negligible(lu_[r][c]) && (best < 0 || v > best_abs)) {
                best = r;
                best_abs = v;
            }
        }
        if (best < 0) {
            singular_ = true;
            det_ = Scalar::zero(mode);
            return;
        }
        if (best != c) {
            std::swap(lu_[best], lu_[c]);
            std::swap(perm_[best], perm_[c]);
            det_ = -det_;
        }
        det_ *= lu_[c][c];
        Scalar inv = Scalar::one(mode) / lu_[c][c];
        for (int r = c + 1; r < n_; ++r) {
            Scalar f = lu_[r][c] * inv;
            lu_[r][c] = f;
            for (int j = c + 1; j < n_; ++j) lu_[r][j] -= f * lu_[c][j];
        }
    }
}

std::vector<Scalar> ScalarLU::solve(std::vector<Scalar> b) const {
    if (singular_) throw DivisionError("singular constant matrix");
    std::vector<Scalar> y(n_, Scalar::zero(mode_));
    for (int i = 0; i < n_; ++i) y[i] = b[perm_[i]];
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < i; ++j) y[i] -= lu_[i][j] * y[j];
    for (int i = n_ - 1; i >= 0; --i) {
        for (int j = i + 1; j < n_; ++j) y[i] -= lu_[i][j] * y[j];
        y[i] = y[i] / lu_[i][i];
    }
    return y;
}

std::vector<Jet> jet_linear_solve(const JetMatrix& M, const std::vector<Jet>& rhs) {
    if (M.rows() != M.cols()) throw ContextError("jet_linear_solve needs a square matrix");
    int n = M.rows();
    if (static_cast<int>(rhs.size()) != n) throw ContextError("rhs size mismatch");
    int nv = M.nvars();
    Mode mode = M.mode();
    int K = M.min_order();
    for (auto& r : rhs) K = std::min(K, r.order());

    std::vector<std::vector<Scalar>> M0(n, std::vector<Scalar>(n, Scalar::zero(mode)));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) M0[i][j] = M.at(i, j).constant_term();
    ScalarLU lu(M0, mode);
    if (lu.singular())
        throw CharacteristicError("characteristic/degenerate at base point: det(M) vanishes",
                                  lu.det().to_double());

    std::vector<Jet> x(n, Jet(nv, K, mode));
    for (int d = 0; d <= K; ++d) {
        // residual r = rhs - M x, correct below degree d by induction
        std::vector<Jet> res(n, Jet(nv, K, mode));
        for (int i = 0; i < n; ++i) {
            Jet s = rhs[i].truncated(K);
            for (int j = 0; j < n; ++j) s -= M.at(i, j).truncated(K) * x[j];
            res[i] = s.homogeneous_part(d);
        }
        // solve M0 * x_d = res_d monomial by monomial
        std::map<MultiIndex, std::vector<Scalar>> cols;
        for (int i = 0; i < n; ++i)
            for (auto& [mi, c] : res[i].terms()) {
                auto it = cols.find(mi);
                if (it == cols.end())
                    it = cols.emplace(mi, std::vector<Scalar>(n, Scalar::zero(mode))).first;
                it->second[i] = c;
            }
        for (auto& [mi, b] : cols) {
            auto sol = lu.solve(b);
            for (int i = 0; i < n; ++i)
                if (!sol[i].is_zero()) {
                    Jet add(nv, K, mode);
                    add.set_coeff(mi, sol[i]);
                    x[i] += add;
                }
        }
    }
    return x;
}

Jet jet_det(const JetMatrix& M) {
    if (M.rows() != M.cols()) throw ContextError("determinant of a non-square matrix");
    int n = M.rows();
    int nv = M.nvars();
    Mode mode = M.mode();
    int K = M.min_order();
    if (n == 0) return Jet::constant(1, 0, Scalar::one(mode));
    // minors over the first popcount(S) rows and the column subset S
    std::vector<Jet> minor(1u << n, Jet(nv, K, mode));
    minor[0] = Jet::constant(nv, K, Scalar::one(mode));
    for (unsigned S = 1; S < (1u << n); ++S) {
        int r = __builtin_popcount(S) - 1;
        Jet acc(nv, K, mode);
        int pos = 0;
        for (int c = 0; c < n; ++c) {
            if (!(S & (1u << c))) continue;
            Jet term = M.at(r, c) * minor[S & ~(1u << c)];
            acc += ((r + pos) % 2 == 0) ? term : -term;
            ++pos;
        }
        minor[S] = acc;
    }
    return minor[(1u << n) - 1];
}

JetMatrix jet_inverse(const JetMatrix& M) {
    if (M.rows() != M.cols()) throw ContextError("inverse of a non-square matrix");
    int n = M.rows();
    JetMatrix inv(n, n, Jet(M.nvars(), M.min_order(), M.mode()));
    for (int j = 0; j < n; ++j) {
        std::vector<Jet> e(n, Jet(M.nvars(), M.min_order(), M.mode()));
        e[j] = Jet::constant(M.nvars(), M.min_order(), Scalar::one(M.mode()));
        auto col = jet_linear_solve(M, e);
        for (int i = 0; i < n; ++i) inv.at(i, j) = col[i];
    }
    return inv;
}

} // namespace embjet
