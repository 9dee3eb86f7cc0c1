#ifndef EMBJET_JET_HPP
#define EMBJET_JET_HPP

#include <map>
#include <vector>

#include "embjet/multi_index.hpp"
#include "embjet/scalar.hpp"

namespace embjet {

// Sparse multivariate power series truncated at a total degree.  Immutable
// in spirit: every operation returns a fresh value.  Only nonzero
// coefficients of total degree <= order() are stored.
class Jet {
public:
    Jet() : nvars_(1), order_(0), mode_(Mode::exact) {}
    Jet(int nvars, int order, Mode mode);

    static Jet constant(int nvars, int order, const Scalar& c);
    static Jet variable(int var, int nvars, int order, Mode mode);

    int nvars() const { return nvars_; }
    int order() const { return order_; }
    Mode mode() const { return mode_; }
    const std::map<MultiIndex, Scalar>& terms() const { return terms_; }

    Scalar coeff(const MultiIndex& mi) const;
    Scalar constant_term() const { return coeff(MultiIndex(nvars_)); }
    // Drops zero values and terms beyond the truncation order.
    void set_coeff(const MultiIndex& mi, const Scalar& c);

    bool is_zero() const { return terms_.empty(); }
    // Smallest total degree of a stored term; order()+1 when zero.
    int valuation() const;
    double max_abs_coeff() const;

    Jet operator-() const;
    Jet operator+(const Jet& o) const;
    Jet operator-(const Jet& o) const;
    Jet operator*(const Jet& o) const;
    Jet& operator+=(const Jet& o) { return *this = *this + o; }
    Jet& operator-=(const Jet& o) { return *this = *this - o; }

    Jet scale(const Scalar& c) const;
    Jet truncated(int new_order) const;
    Jet with_order(int new_order) const;   // raise or lower the cap

    bool operator==(const Jet& o) const;

    Scalar eval(const std::vector<Scalar>& point) const;
    double eval_double(const std::vector<double>& point) const;

    Jet homogeneous_part(int degree) const;

private:
    void check_compatible(const Jet& o) const;

    int nvars_;
    int order_;
    Mode mode_;
    std::map<MultiIndex, Scalar> terms_;
};

// --- calculus -------------------------------------------------------------

Jet differentiate(const Jet& a, int var);
// Inverse of differentiate along one variable (zero constant of integration).
Jet antiderivative(const Jet& a, int var);

// Taylor composition outer(inners...); every inner must have zero constant
// term so the truncation is well defined.
Jet compose(const Jet& outer, const std::vector<Jet>& inners);
// Same substitution but tolerating nonzero constant terms: the stored terms
// of `outer` are treated as the whole function (polynomial semantics).
Jet substitute(const Jet& outer, const std::vector<Jet>& inners);

enum class UnaryFn { sqrt, reciprocal };
Jet analytic_unary(const Jet& a, UnaryFn fn);
Jet sqrt_jet(const Jet& a);
Jet reciprocal(const Jet& a);

// Jet of the same polynomial about new_base.  Exact mode requires the
// caller to accept that the stored terms define the function.
Jet recenter(const Jet& a, const std::vector<Scalar>& new_base,
             bool accept_truncation = false);

// Exact division p = d * q; throws DivisionError when no q exists to the
// requested order.  d may have zero constant term (unlike reciprocal).
Jet divide_exact(const Jet& p, const Jet& d);

// --- structural helpers ---------------------------------------------------

// Append extra trailing variables (coefficients unchanged).
Jet lift(const Jet& a, int new_nvars);
// Remove the trailing variable; terms depending on it must be absent.
Jet drop_last_var(const Jet& a);
// Restriction x_var = 0 (keeps nvars).
Jet restrict_var(const Jet& a, int var);
// Coefficient of x_var^m as a jet with zero x_var-exponent, order reduced by m.
Jet coeff_in_var(const Jet& a, int var, int m);
// Multiply by the monomial x_var^m, raising the truncation order by m.
Jet mul_monomial(const Jet& a, int var, int m);

Jet to_float(const Jet& a);

// Truncated series of c * fn(lambda * x_var), fn in {sin, cos, exp}.
Jet sin_jet(const Scalar& lambda, int var, int nvars, int order);
Jet cos_jet(const Scalar& lambda, int var, int nvars, int order);
Jet exp_jet(const Scalar& lambda, int var, int nvars, int order);

} // namespace embjet

#endif
