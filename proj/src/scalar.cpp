#include "embjet/scalar.hpp"

#include <cmath>
#include <cstdio>

namespace embjet {

Scalar Scalar::rational(long num, long den) {
    if (den == 0) throw DivisionError("rational with zero denominator");
    Scalar s;
    s.mode_ = Mode::exact;
    s.q_ = mpq_class(num, den);
    s.q_.canonicalize();
    return s;
}

Scalar Scalar::rational(const mpq_class& q) {
    Scalar s;
    s.mode_ = Mode::exact;
    s.q_ = q;
    s.q_.canonicalize();
    return s;
}

Scalar Scalar::real(double d) {
    Scalar s;
    s.mode_ = Mode::floating;
    s.d_ = d;
    return s;
}

bool Scalar::is_zero() const {
    return mode_ == Mode::exact ? sgn(q_) == 0 : d_ == 0.0;
}

bool Scalar::is_negative() const {
    return mode_ == Mode::exact ? sgn(q_) < 0 : d_ < 0.0;
}

const mpq_class& Scalar::rat() const {
    if (mode_ != Mode::exact) throw ModeError("rat() on a float scalar");
    return q_;
}

double Scalar::to_double() const {
    return mode_ == Mode::exact ? q_.get_d() : d_;
}

Scalar Scalar::operator-() const {
    Scalar s(*this);
    if (mode_ == Mode::exact) s.q_ = -q_; else s.d_ = -d_;
    return s;
}

Scalar Scalar::operator+(const Scalar& o) const {
    check_same_mode(o);
    return mode_ == Mode::exact ? rational(q_ + o.q_) : real(d_ + o.d_);
}

Scalar Scalar::operator-(const Scalar& o) const {
    check_same_mode(o);
    return mode_ == Mode::exact ? rational(q_ - o.q_) : real(d_ - o.d_);
}

Scalar Scalar::operator*(const Scalar& o) const {
    check_same_mode(o);
    return mode_ == Mode::exact ? rational(q_ * o.q_) : real(d_ * o.d_);
}

Scalar Scalar::operator/(const Scalar& o) const {
    check_same_mode(o);
    if (o.is_zero()) throw DivisionError("scalar division by zero");
    return mode_ == Mode::exact ? rational(q_ / o.q_) : real(d_ / o.d_);
}

bool Scalar::operator==(const Scalar& o) const {
    check_same_mode(o);
    return mode_ == Mode::exact ? q_ == o.q_ : d_ == o.d_;
}

double Scalar::abs() const {
    return std::fabs(to_double());
}

std::optional<Scalar> Scalar::sqrt() const {
    if (mode_ == Mode::floating) {
        if (d_ < 0.0) return std::nullopt;
        return real(std::sqrt(d_));
    }
    if (sgn(q_) < 0) return std::nullopt;
    mpz_class num = q_.get_num(), den = q_.get_den();
    mpz_class rn, rd;
    mpz_sqrt(rn.get_mpz_t(), num.get_mpz_t());
    mpz_sqrt(rd.get_mpz_t(), den.get_mpz_t());
    if (rn * rn != num || rd * rd != den) return std::nullopt;
    return rational(mpq_class(rn, rd));
}

std::string Scalar::str() const {
    if (mode_ == Mode::exact) return q_.get_str();
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", d_);
    return buf;
}

} // namespace embjet
