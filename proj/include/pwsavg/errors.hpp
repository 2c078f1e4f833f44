#pragma once

#include <stdexcept>
#include <string>

namespace pwsavg {

// Base for every error raised by the library. Each subclass maps to a
// distinct CLI exit status (see tools/pwsavg.cpp).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Precondition violated by the caller (index out of range, r <= 0, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

// Malformed or inconsistent configuration / serialized input.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Profile whose running integral does not return to zero after a full turn.
class NonPeriodicProfile : public Error {
public:
    explicit NonPeriodicProfile(double full_turn_integral)
        : Error("profile is not periodic: I_h(2*pi) = " + std::to_string(full_turn_integral)),
          full_turn_integral_(full_turn_integral) {}

    double full_turn_integral() const noexcept { return full_turn_integral_; }

private:
    double full_turn_integral_;
};

class UnsupportedDegree : public Error {
public:
    using Error::Error;
};

// The averaging criterion cannot decide anything (C10 = 0 for n = 2,
// identically zero averaged function, ...).
class MethodNotApplicable : public Error {
public:
    using Error::Error;
};

// A zero of the averaged function with vanishing r-derivative.
class Degeneracy : public Error {
public:
    using Error::Error;
};

// Numerical integration or fixed-point iteration failed.
class IntegrationFailure : public Error {
public:
    using Error::Error;
};

// Trajectory reached the tangency line {x = 0, y = 0}.
class TangencyReached : public IntegrationFailure {
public:
    using IntegrationFailure::IntegrationFailure;
};

}  // namespace pwsavg
