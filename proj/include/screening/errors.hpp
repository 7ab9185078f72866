#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace screening {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid distribution or problem parameters.
class ParameterError : public Error {
public:
    using Error::Error;
};

/// A requested moment is infinite for the given parameters.
class MomentError : public Error {
public:
    using Error::Error;
};

/// Operation not defined for this family (e.g. dtheta_cdf on a fixed law).
class UnsupportedOperation : public Error {
public:
    using Error::Error;
};

/// Quadrature, ODE refinement or root-finding failure.
class NumericError : public Error {
public:
    using Error::Error;
};

/// Root finder called on an interval without a sign change.
class BracketError : public NumericError {
public:
    using NumericError::NumericError;
};

/// Iterative scheme exhausted its budget; carries the residual history.
class ConvergenceError : public NumericError {
public:
    ConvergenceError(const std::string& what, std::vector<double> history)
        : NumericError(what), history_(std::move(history)) {}

    [[nodiscard]] const std::vector<double>& residual_history() const noexcept { return history_; }

private:
    std::vector<double> history_;
};

/// No admissible contract exists (empty feasible set of constants).
class InfeasibleError : public Error {
public:
    using Error::Error;
};

/// Caller violated an operation's usage contract (e.g. wrong prior kind).
class UsageError : public Error {
public:
    using Error::Error;
};

/// Malformed configuration; names the offending key.
class ConfigError : public Error {
public:
    ConfigError(std::string key, const std::string& what)
        : Error(what), key_(std::move(key)) {}

    [[nodiscard]] const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

}  // namespace screening
