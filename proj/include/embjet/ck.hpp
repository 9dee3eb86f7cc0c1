#ifndef EMBJET_CK_HPP
#define EMBJET_CK_HPP

#include <functional>

#include "embjet/jet_matrix.hpp"

namespace embjet {

// First-order system resolved in the last variable:
//   d/dx_n f = rhs(f),   f|_{x_n = 0} = initial.
// rhs must be built from jet operations and must not itself differentiate
// in x_n, so its x_n^m coefficient only involves f's coefficients up to m.
struct FirstOrderProblem {
    int nvars = 0;
    int unknowns = 0;
    int order = 0;
    std::function<std::vector<Jet>(const std::vector<Jet>&)> rhs;
    std::vector<Jet> initial;   // jets in nvars-1 variables
};

std::vector<Jet> solve_first_order(const FirstOrderProblem& p);

// Second-order system whose normal second derivative is defined implicitly:
//   matrix(u) * d2u/dx_n^2 = rhs(u),
//   u|_{x_n=0} = u0,  d/dx_n u|_{x_n=0} = u1.
// matrix and rhs may use u, its first derivatives and tangential second
// derivatives; the constant term of det(matrix) on the data certifies the
// problem as non-characteristic.
struct SecondOrderProblem {
    int nvars = 0;
    int dim = 0;      // number of unknown components
    int order = 0;
    std::function<JetMatrix(const std::vector<Jet>&)> matrix;
    std::function<std::vector<Jet>(const std::vector<Jet>&)> rhs;
    std::vector<Jet> u0, u1;    // jets in nvars-1 variables
};

std::vector<Jet> solve_second_order(const SecondOrderProblem& p);

// Prolong data given on {x_n = 0}: jets in n-1 variables become jets in n
// variables multiplied by x_n^power.
Jet prolong(const Jet& data, int nvars, int order, int power = 0);

} // namespace embjet

#endif
