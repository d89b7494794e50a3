#pragma once

#include <stdexcept>
#include <string>

namespace scatent {

// Base of every error thrown by the library. The CLI maps InvalidParameter
// and ConfigError to exit code 2 and every other Error to exit code 3.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidParameter : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

// Grid does not hold enough of the state's probability mass.
class CoverageError : public Error {
public:
    CoverageError(const std::string& what, double tail_mass)
        : Error(what), tail_mass_(tail_mass) {}
    double tail_mass() const noexcept { return tail_mass_; }

private:
    double tail_mass_;
};

class DegenerateStateError : public Error {
public:
    using Error::Error;
};

class NormalizationError : public Error {
public:
    NormalizationError(const std::string& what, double norm) : Error(what), norm_(norm) {}
    double norm() const noexcept { return norm_; }

private:
    double norm_;
};

class ModeOverlapError : public Error {
public:
    ModeOverlapError(const std::string& what, double overlap) : Error(what), overlap_(overlap) {}
    double overlap() const noexcept { return overlap_; }

private:
    double overlap_;
};

// In-state violates the scattering boundary conditions (particles not
// approaching, relative momentum not positive on the support).
class BoundaryConditionError : public Error {
public:
    using Error::Error;
};

// Argument outside the domain of a function, e.g. amplitudes at q <= 0.
class DomainError : public Error {
public:
    using Error::Error;
};

class NumericError : public Error {
public:
    using Error::Error;
};

}  // namespace scatent
