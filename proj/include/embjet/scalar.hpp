#ifndef EMBJET_SCALAR_HPP
#define EMBJET_SCALAR_HPP

#include <gmpxx.h>

#include <optional>
#include <string>

#include "embjet/errors.hpp"

namespace embjet {

enum class Mode { exact, floating };

inline const char* mode_name(Mode m) {
    return m == Mode::exact ? "exact" : "float";
}

// Dual-mode coefficient: arbitrary-precision rational or 64-bit float.
// Arithmetic between the two modes is a ModeError, never a silent promotion.
class Scalar {
public:
    Scalar() : mode_(Mode::exact), q_(0), d_(0.0) {}

    static Scalar rational(long num, long den = 1);
    static Scalar rational(const mpq_class& q);
    static Scalar real(double d);
    static Scalar zero(Mode m) { return m == Mode::exact ? rational(0) : real(0.0); }
    static Scalar one(Mode m) { return m == Mode::exact ? rational(1) : real(1.0); }

    Mode mode() const { return mode_; }
    bool is_zero() const;
    bool is_negative() const;

    const mpq_class& rat() const;
    double to_double() const;
    Scalar to_float() const { return real(to_double()); }

    Scalar operator-() const;
    Scalar operator+(const Scalar& o) const;
    Scalar operator-(const Scalar& o) const;
    Scalar operator*(const Scalar& o) const;
    Scalar operator/(const Scalar& o) const;   // DivisionError on zero divisor
    Scalar& operator+=(const Scalar& o) { return *this = *this + o; }
    Scalar& operator-=(const Scalar& o) { return *this = *this - o; }
    Scalar& operator*=(const Scalar& o) { return *this = *this * o; }

    bool operator==(const Scalar& o) const;
    bool operator!=(const Scalar& o) const { return !(*this == o); }

    double abs() const;

    // Exact mode: engages only when the value is the square of a rational.
    std::optional<Scalar> sqrt() const;

    std::string str() const;

private:
    void check_same_mode(const Scalar& o) const {
        if (mode_ != o.mode_)
            throw ModeError("mixed exact/float scalar arithmetic");
    }

    Mode mode_;
    mpq_class q_;
    double d_;
};

} // namespace embjet

#endif
