#include "embjet/jet.hpp"

#include <algorithm>
#include <cmath>

namespace embjet {

std::vector<MultiIndex> monomials_up_to(int nvars, int max_degree) {
    std::vector<MultiIndex> out;
    MultiIndex cur(nvars);
    // depth-first enumeration, then graded-lex sort
    std::vector<int> stack;
    auto rec = [&](auto&& self, int var, int remaining) -> void {
        if (var == nvars) {
            out.push_back(cur);
            return;
        }
        for (int k = 0; k <= remaining; ++k) {
            cur[var] = k;
            self(self, var + 1, remaining - k);
        }
        cur[var] = 0;
    };
    rec(rec, 0, max_degree);
    std::sort(out.begin(), out.end());
    return out;
}

Jet::Jet(int nvars, int order, Mode mode)
    : nvars_(nvars), order_(order), mode_(mode) {
    if (nvars < 1) throw ContextError("jet needs at least one variable");
    if (order < 0) throw ContextError("negative truncation order");
}

Jet Jet::constant(int nvars, int order, const Scalar& c) {
    Jet j(nvars, order, c.mode());
    j.set_coeff(MultiIndex(nvars), c);
    return j;
}

Jet Jet::variable(int var, int nvars, int order, Mode mode) {
    Jet j(nvars, order, mode);
    if (var < 0 || var >= nvars) throw ContextError("variable index out of range");
    if (order >= 1) {
        MultiIndex mi(nvars);
        mi[var] = 1;
        j.set_coeff(mi, Scalar::one(mode));
    }
    return j;
}

Scalar Jet::coeff(const MultiIndex& mi) const {
    auto it = terms_.find(mi);
    return it == terms_.end() ? Scalar::zero(mode_) : it->second;
}

void Jet::set_coeff(const MultiIndex& mi, const Scalar& c) {
    if (mi.nvars() != nvars_) throw ContextError("multi-index length mismatch");
    if (c.mode() != mode_) throw ModeError("coefficient mode mismatch");
    if (mi.total_degree() > order_ || c.is_zero())
        terms_.erase(mi);
    else
        terms_[mi] = c;
}

int Jet::valuation() const {
    if (terms_.empty()) return order_ + 1;
    return terms_.begin()->first.total_degree();   // graded order
}

double Jet::max_abs_coeff() const {
    double m = 0.0;
    for (auto& [mi, c] : terms_) m = std::max(m, c.abs());
    return m;
}

void Jet::check_compatible(const Jet& o) const {
    if (nvars_ != o.nvars_)
        throw ContextError("jets with different variable counts");
    if (mode_ != o.mode_)
        throw ModeError("jets with different coefficient modes");
}

Jet Jet::operator-() const {
    Jet r(*this);
    for (auto& [mi, c] : r.terms_) c = -c;
    return r;
}

Jet Jet::operator+(const Jet& o) const {
    check_compatible(o);
    Jet r(nvars_, std::min(order_, o.order_), mode_);
    for (auto& [mi, c] : terms_)
        if (mi.total_degree() <= r.order_) r.terms_[mi] = c;
    for (auto& [mi, c] : o.terms_) {
        if (mi.total_degree() > r.order_) continue;
        auto it = r.terms_.find(mi);
        if (it == r.terms_.end()) r.terms_[mi] = c;
        else {
            it->second += c;
            if (it->second.is_zero()) r.terms_.erase(it);
        }
    }
    return r;
}

Jet Jet::operator-(const Jet& o) const { return *this + (-o); }

Jet Jet::operator*(const Jet& o) const {
    check_compatible(o);
    Jet r(nvars_, std::min(order_, o.order_), mode_);
    for (auto& [ma, ca] : terms_) {
        int da = ma.total_degree();
        if (da > r.order_) continue;
        for (auto& [mb, cb] : o.terms_) {
            if (da + mb.total_degree() > r.order_) continue;
            MultiIndex mi = ma + mb;
            auto it = r.terms_.find(mi);
            if (it == r.terms_.end()) r.terms_[mi] = ca * cb;
            else {
                it->second += ca * cb;
                if (it->second.is_zero()) r.terms_.erase(it);
            }
        }
    }
    return r;
}

Jet Jet::scale(const Scalar& c) const {
    if (c.mode() != mode_) throw ModeError("scale mode mismatch");
    Jet r(nvars_, order_, mode_);
    if (c.is_zero()) return r;
    for (auto& [mi, v] : terms_) r.terms_[mi] = v * c;
    return r;
}

Jet Jet::truncated(int new_order) const {
    if (new_order >= order_) {
        Jet r(*this);
        r.order_ = new_order;   // no information above order_ anyway
        return r;
    }
    Jet r(nvars_, new_order, mode_);
    for (auto& [mi, c] : terms_)
        if (mi.total_degree() <= new_order) r.terms_[mi] = c;
    return r;
}

Jet Jet::with_order(int new_order) const { return truncated(new_order); }

bool Jet::operator==(const Jet& o) const {
    if (nvars_ != o.nvars_ || mode_ != o.mode_) return false;
    if (terms_.size() != o.terms_.size()) return false;
    for (auto& [mi, c] : terms_) {
        auto it = o.terms_.find(mi);
        if (it == o.terms_.end() || !(it->second == c)) return false;
    }
    return true;
}

Scalar Jet::eval(const std::vector<Scalar>& point) const {
    if (static_cast<int>(point.size()) != nvars_)
        throw ContextError("evaluation point dimension mismatch");
    Scalar acc = Scalar::zero(mode_);
    for (auto& [mi, c] : terms_) {
        Scalar t = c;
        for (int i = 0; i < nvars_; ++i)
            for (int k = 0; k < mi[i]; ++k) t *= point[i];
        acc += t;
    }
    return acc;
}

double Jet::eval_double(const std::vector<double>& point) const {
    double acc = 0.0;
    for (auto& [mi, c] : terms_) {
        double t = c.to_double();
        for (int i = 0; i < nvars_; ++i)
            for (int k = 0; k < mi[i]; ++k) t *= point[i];
        acc += t;
    }
    return acc;
}

Jet Jet::homogeneous_part(int degree) const {
    Jet r(nvars_, order_, mode_);
    for (auto& [mi, c] : terms_)
        if (mi.total_degree() == degree) r.terms_[mi] = c;
    return r;
}

// --- calculus -------------------------------------------------------------

Jet differentiate(const Jet& a, int var) {
    if (var < 0 || var >= a.nvars()) throw ContextError("derivative variable out of range");
    Jet r(a.nvars(), std::max(a.order() - 1, 0), a.mode());
    for (auto& [mi, c] : a.terms()) {
        if (mi[var] == 0) continue;
        MultiIndex d = mi;
        d[var] -= 1;
        r.set_coeff(d, c * (a.mode() == Mode::exact ? Scalar::rational(mi[var])
                                                    : Scalar::real(mi[var])));
    }
    return r;
}

Jet antiderivative(const Jet& a, int var) {
    if (var < 0 || var >= a.nvars()) throw ContextError("antiderivative variable out of range");
    Jet r(a.nvars(), a.order() + 1, a.mode());
    for (auto& [mi, c] : a.terms()) {
        MultiIndex d = mi;
        d[var] += 1;
        Scalar k = a.mode() == Mode::exact ? Scalar::rational(1, d[var])
                                           : Scalar::real(1.0 / d[var]);
        r.set_coeff(d, c * k);
    }
    return r;
}

static Jet substitute_impl(const Jet& outer, const std::vector<Jet>& inners,
                           bool require_zero_constant) {
    if (static_cast<int>(inners.size()) != outer.nvars())
        throw ContextError("compose: inner count must equal outer nvars");
    if (inners.empty()) throw ContextError("compose: no inners");
    int nv = inners[0].nvars();
    Mode mode = outer.mode();
    int K = outer.order();
    for (auto& in : inners) {
        if (in.nvars() != nv) throw ContextError("compose: inner nvars mismatch");
        if (in.mode() != mode) throw ModeError("compose: inner mode mismatch");
        K = std::min(K, in.order());
        if (require_zero_constant && !in.constant_term().is_zero())
            throw ContextError("compose: inner jet has nonzero constant term");
    }
    // powers cache per variable
    std::vector<int> max_exp(outer.nvars(), 0);
    for (auto& [mi, c] : outer.terms())
        for (int i = 0; i < outer.nvars(); ++i)
            max_exp[i] = std::max(max_exp[i], mi[i]);
    std::vector<std::vector<Jet>> pw(outer.nvars());
    for (int i = 0; i < outer.nvars(); ++i) {
        pw[i].push_back(Jet::constant(nv, K, Scalar::one(mode)));
        for (int k = 1; k <= max_exp[i]; ++k)
            pw[i].push_back(pw[i].back() * inners[i].truncated(K));
    }
    Jet r(nv, K, mode);
    for (auto& [mi, c] : outer.terms()) {
        Jet t = Jet::constant(nv, K, c);
        for (int i = 0; i < outer.nvars(); ++i)
            if (mi[i] > 0) t = t * pw[i][mi[i]];
        r += t;
    }
    return r;
}

Jet compose(const Jet& outer, const std::vector<Jet>& inners) {
    return substitute_impl(outer, inners, true);
}

Jet substitute(const Jet& outer, const std::vector<Jet>& inners) {
    return substitute_impl(outer, inners, false);
}

Jet reciprocal(const Jet& a) {
    Scalar a0 = a.constant_term();
    if (a0.is_zero())
        throw DivisionError("reciprocal of a jet with zero constant term");
    int K = a.order();
    Jet b = Jet::constant(a.nvars(), K, Scalar::one(a.mode()) / a0);
    Scalar inv0 = Scalar::one(a.mode()) / a0;
    for (int d = 1; d <= K; ++d) {
        // a*b = 1 at degree d:  a0*b_d = -sum_{i=1..d} a_i b_{d-i}
        Jet s(a.nvars(), K, a.mode());
        for (int i = 1; i <= d; ++i)
            s += a.homogeneous_part(i) * b.homogeneous_part(d - i);
        b += (-s.homogeneous_part(d)).scale(inv0);
    }
    return b;
}

Jet sqrt_jet(const Jet& a) {
    Scalar a0 = a.constant_term();
    if (a0.is_zero())
        throw SqrtError("sqrt of a jet with zero constant term");
    auto r0 = a0.sqrt();
    if (!r0)
        throw SqrtError(a.mode() == Mode::exact
                            ? "exact-mode sqrt needs a rational square constant term"
                            : "sqrt of negative constant term");
    int K = a.order();
    Jet b = Jet::constant(a.nvars(), K, *r0);
    Scalar half_inv = Scalar::one(a.mode()) / (*r0 + *r0);
    for (int d = 1; d <= K; ++d) {
        // b*b = a at degree d:  2 b0 b_d = a_d - sum_{i=1..d-1} b_i b_{d-i}
        Jet s = a.homogeneous_part(d);
        for (int i = 1; i < d; ++i)
            s -= b.homogeneous_part(i) * b.homogeneous_part(d - i);
        b += s.homogeneous_part(d).scale(half_inv);
    }
    return b;
}

Jet analytic_unary(const Jet& a, UnaryFn fn) {
    return fn == UnaryFn::sqrt ? sqrt_jet(a) : reciprocal(a);
}

Jet recenter(const Jet& a, const std::vector<Scalar>& new_base,
             bool accept_truncation) {
    if (static_cast<int>(new_base.size()) != a.nvars())
        throw ContextError("recenter: base point dimension mismatch");
    if (a.mode() == Mode::exact && !accept_truncation)
        throw Error("exact-mode recenter of a truncated jet requires the acceptance flag");
    std::vector<Jet> inners;
    for (int i = 0; i < a.nvars(); ++i) {
        Jet v = Jet::variable(i, a.nvars(), a.order(), a.mode());
        inners.push_back(v + Jet::constant(a.nvars(), a.order(), new_base[i]));
    }
    return substitute(a, inners);
}

// Exact division set up as a dense linear system over the coefficient field.
// Dimensions are tiny at desk scale (monomial counts in <= 4 variables).
Jet divide_exact(const Jet& p, const Jet& d) {
    if (p.nvars() != d.nvars()) throw ContextError("divide: nvars mismatch");
    if (p.mode() != d.mode()) throw ModeError("divide: mode mismatch");
    if (d.is_zero()) throw DivisionError("division by the zero jet");
    int K = std::min(p.order(), d.order());
    int val = d.valuation();
    int Kq = K - val;
    if (p.is_zero()) return Jet(p.nvars(), std::max(Kq, 0), p.mode());
    if (p.valuation() < val)
        throw DivisionError("dividend valuation below divisor valuation");
    if (Kq < 0) throw DivisionError("truncation order too low for division");

    auto unknowns = monomials_up_to(p.nvars(), Kq);
    auto eqs = monomials_up_to(p.nvars(), K);
    int nu = static_cast<int>(unknowns.size());
    int ne = static_cast<int>(eqs.size());
    std::map<MultiIndex, int> eq_index;
    for (int i = 0; i < ne; ++i) eq_index[eqs[i]] = i;

    Mode mode = p.mode();
    std::vector<std::vector<Scalar>> A(ne, std::vector<Scalar>(nu + 1, Scalar::zero(mode)));
    for (int j = 0; j < nu; ++j)
        for (auto& [mi, c] : d.terms()) {
            MultiIndex s = unknowns[j] + mi;
            if (s.total_degree() <= K) A[eq_index[s]][j] += c;
        }
    for (auto& [mi, c] : p.terms())
        if (mi.total_degree() <= K) A[eq_index[mi]][nu] = c;

    // Gaussian elimination with column-major pivoting; the system is
    // overdetermined and must be consistent for exact divisibility.
    double scale = std::max(1.0, std::max(p.max_abs_coeff(), d.max_abs_coeff()));
    auto negligible = [&](const Scalar& s) {
        if (mode == Mode::exact) return s.is_zero();
        return s.abs() <= 1e-10 * scale;
    };
    std::vector<int> pivot_row(nu, -1);
    int row = 0;
    for (int col = 0; col < nu && row < ne; ++col) {
        int best = -1;
        double best_abs = 0.0;
        for (int r = row; r < ne; ++r) {
            if (negligible(A[r][col])) continue;
            double v = A[r][col].abs();
            if (best < 0 || v > best_abs) { best = r; best_abs = v; }
        }
        if (best < 0) continue;
        std::swap(A[row], A[best]);
        Scalar inv = Scalar::one(mode) / A[row][col];
        for (int j = col; j <= nu; ++j) A[row][j] *= inv;
        for (int r = 0; r < ne; ++r) {
            if (r == row || A[r][col].is_zero()) continue;
            Scalar f = A[r][col];
            for (int j = col; j <= nu; ++j) A[r][j] -= f * A[row][j];
        }
        pivot_row[col] = row;
        ++row;
    }
    // consistency: rows without pivot must have zero rhs
    for (int r = row; r < ne; ++r)
        if (!negligible(A[r][nu]))
            throw DivisionError("jet is not divisible to the requested order");
    Jet q(p.nvars(), Kq, mode);
    for (int col = 0; col < nu; ++col)
        if (pivot_row[col] >= 0) {
            Scalar v = A[pivot_row[col]][nu];
            if (mode == Mode::floating && negligible(v)) continue;
            q.set_coeff(unknowns[col], v);
        }
    return q;
}

// --- structural helpers ---------------------------------------------------

Jet lift(const Jet& a, int new_nvars) {
    if (new_nvars < a.nvars()) throw ContextError("lift cannot drop variables");
    Jet r(new_nvars, a.order(), a.mode());
    for (auto& [mi, c] : a.terms()) {
        MultiIndex m(new_nvars);
        for (int i = 0; i < a.nvars(); ++i) m[i] = mi[i];
        r.set_coeff(m, c);
    }
    return r;
}

Jet drop_last_var(const Jet& a) {
    if (a.nvars() < 2) throw ContextError("cannot drop the only variable");
    Jet r(a.nvars() - 1, a.order(), a.mode());
    for (auto& [mi, c] : a.terms()) {
        if (mi[a.nvars() - 1] != 0)
            throw ContextError("drop_last_var: jet depends on the trailing variable");
        MultiIndex m(a.nvars() - 1);
        for (int i = 0; i + 1 < a.nvars(); ++i) m[i] = mi[i];
        r.set_coeff(m, c);
    }
    return r;
}

Jet restrict_var(const Jet& a, int var) {
    Jet r(a.nvars(), a.order(), a.mode());
    for (auto& [mi, c] : a.terms())
        if (mi[var] == 0) r.set_coeff(mi, c);
    return r;
}

Jet coeff_in_var(const Jet& a, int var, int m) {
    Jet r(a.nvars(), std::max(a.order() - m, 0), a.mode());
    for (auto& [mi, c] : a.terms()) {
        if (mi[var] != m) continue;
        MultiIndex d = mi;
        d[var] = 0;
        r.set_coeff(d, c);
    }
    return r;
}

Jet mul_monomial(const Jet& a, int var, int m) {
    Jet r(a.nvars(), a.order() + m, a.mode());
    for (auto& [mi, c] : a.terms()) {
        MultiIndex d = mi;
        d[var] += m;
        r.set_coeff(d, c);
    }
    return r;
}

Jet to_float(const Jet& a) {
    if (a.mode() == Mode::floating) return a;
    Jet r(a.nvars(), a.order(), Mode::floating);
    for (auto& [mi, c] : a.terms()) r.set_coeff(mi, c.to_float());
    return r;
}

static Jet series_1d(const Scalar& lambda, int var, int nvars, int order,
                     int parity_mod, int parity_rem, bool alternating) {
    Mode mode = lambda.mode();
    Jet r(nvars, order, mode);
    Scalar lam_pow = Scalar::one(mode);
    mpz_class fact = 1;
    int sign_state = 0;
    for (int k = 0; k <= order; ++k) {
        if (k > 0) {
            lam_pow *= lambda;
            fact *= k;
        }
        if (parity_mod == 0 || k % parity_mod == parity_rem) {
            Scalar c = lam_pow;
            if (mode == Mode::exact)
                c = c * Scalar::rational(mpq_class(1, fact));
            else
                c = c * Scalar::real(1.0 / fact.get_d());
            if (alternating && (sign_state % 2 == 1)) c = -c;
            ++sign_state;
            MultiIndex mi(nvars);
            mi[var] = k;
            r.set_coeff(mi, c);
        }
    }
    return r;
}

Jet sin_jet(const Scalar& lambda, int var, int nvars, int order) {
    return series_1d(lambda, var, nvars, order, 2, 1, true);
}

Jet cos_jet(const Scalar& lambda, int var, int nvars, int order) {
    return series_1d(lambda, var, nvars, order, 2, 0, true);
}

Jet exp_jet(const Scalar& lambda, int var, int nvars, int order) {
    return series_1d(lambda, var, nvars, order, 0, 0, false);
}

} // namespace embjet
