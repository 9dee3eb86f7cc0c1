#ifndef EMBJET_JET_MATRIX_HPP
#define EMBJET_JET_MATRIX_HPP

#include <vector>

#include "embjet/jet.hpp"

namespace embjet {

// Rectangular matrix of jets sharing one (nvars, mode) context.
class JetMatrix {
public:
    JetMatrix() : rows_(0), cols_(0) {}
    JetMatrix(int rows, int cols, const Jet& fill);
    static JetMatrix identity(int n, int nvars, int order, Mode mode);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    Jet& at(int i, int j) { return e_[i * cols_ + j]; }
    const Jet& at(int i, int j) const { return e_[i * cols_ + j]; }

    int nvars() const { return e_.empty() ? 0 : e_[0].nvars(); }
    Mode mode() const { return e_.empty() ? Mode::exact : e_[0].mode(); }
    int min_order() const;

    JetMatrix transposed() const;
    JetMatrix operator*(const JetMatrix& o) const;
    std::vector<Jet> apply(const std::vector<Jet>& v) const;

private:
    int rows_, cols_;
    std::vector<Jet> e_;
};

// Solve M x = rhs order by order.  Throws CharacteristicError when the
// constant part of M is singular at the base point.
std::vector<Jet> jet_linear_solve(const JetMatrix& M, const std::vector<Jet>& rhs);

// Determinant by Laplace expansion with column-subset memoization.
Jet jet_det(const JetMatrix& M);

JetMatrix jet_inverse(const JetMatrix& M);

// Constant (degree-zero) linear algebra over Scalars, shared by the
// order-by-order solver and the frame constructions.
struct ScalarLU {
    // factorization of an n x n scalar matrix with partial pivoting
    ScalarLU(const std::vector<std::vector<Scalar>>& A, Mode mode);
    bool singular() const { return singular_; }
    Scalar det() const { return det_; }
    std::vector<Scalar> solve(std::vector<Scalar> b) const;

private:
    int n_;
    Mode mode_;
    bool singular_ = false;
    Scalar det_;
    std::vector<std::vector<Scalar>> lu_;
    std::vector<int> perm_;
};

} // namespace embjet

#endif
