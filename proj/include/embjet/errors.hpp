#ifndef EMBJET_ERRORS_HPP
#define EMBJET_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace embjet {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Two jets (or a jet and a scalar) with different nvars / coefficient modes.
struct ContextError : Error {
    using Error::Error;
};

// Mixed exact/float scalar arithmetic.
struct ModeError : Error {
    using Error::Error;
};

// Reciprocal / sqrt / linear solve hit a non-unit leading coefficient.
struct DivisionError : Error {
    using Error::Error;
};

struct SqrtError : Error {
    using Error::Error;
};

// det(M) has zero constant term at the base point.  This is the expected
// failure of the embedding solver at the singular origin.
struct CharacteristicError : Error {
    CharacteristicError(const std::string& what, double leading)
        : Error(what), leading_coefficient(leading) {}
    double leading_coefficient;
};

struct AdmissibilityError : Error {
    AdmissibilityError(const std::string& what, std::vector<std::string> v)
        : Error(what), violations(std::move(v)) {}
    std::vector<std::string> violations;
};

struct SchemaError : Error {
    using Error::Error;
};

} // namespace embjet

#endif
