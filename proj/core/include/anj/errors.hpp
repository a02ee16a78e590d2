#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace anj {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of the function.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A series or iteration did not reach tolerance within its term budget.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// Singular systems, overflow, or results that violate a probability axiom.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// The transition matrix has an absorbing state, so no unique stationary law exists.
class ReducibleChainError : public NumericalError {
public:
    ReducibleChainError(std::size_t state, const std::string& what)
        : NumericalError(what), state_(state) {}

    std::size_t absorbing_state() const noexcept { return state_; }

private:
    std::size_t state_;
};

/// Caller misuse: empty grids, zero block counts, unknown identifiers.
class UsageError : public Error {
public:
    using Error::Error;
};

}  // namespace anj
