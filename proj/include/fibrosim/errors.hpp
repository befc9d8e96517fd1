#pragma once

#include <stdexcept>
#include <string>

namespace fibrosim {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
struct DomainError : Error {
    using Error::Error;
};

/// A requested equilibrium or root does not exist for these parameters.
struct NonexistenceError : Error {
    using Error::Error;
};

/// An iterative method failed to converge within its budget.
struct ConvergenceError : Error {
    using Error::Error;
};

/// A fixed-point window too large for the computed contraction constant.
struct NonContractionError : Error {
    using Error::Error;
};

/// A state component left the admissible band during time integration.
struct InstabilityError : Error {
    using Error::Error;
};

/// Explicit time step exceeds the stability limit.
struct CflError : Error {
    using Error::Error;
};

struct ParseError : Error {
    ParseError(const std::string& msg, int line)
        : Error(msg + " (line " + std::to_string(line) + ")"), line_number(line) {}
    explicit ParseError(const std::string& msg) : Error(msg), line_number(-1) {}
    int line_number;
};

}  // namespace fibrosim
