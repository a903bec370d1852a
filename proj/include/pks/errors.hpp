#pragma once

#include <stdexcept>
#include <string>

namespace pks {

// Base class for everything the library throws on purpose.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation (negative density, NaN, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

// Invalid or inconsistent user configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Iterative solver did not reach its tolerance.
class SolverError : public Error {
public:
    SolverError(const std::string& what, double residual)
        : Error(what + " (residual " + std::to_string(residual) + ")"), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

// Mass constraint cannot be met.
class InfeasibleError : public Error {
public:
    using Error::Error;
};

// Numerical blow-up detected during time stepping.
class NumericError : public Error {
public:
    using Error::Error;
};

// Front tracking hit a topology change it cannot handle.
class TopologyError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

} // namespace pks
