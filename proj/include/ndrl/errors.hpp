#pragma once

#include <stdexcept>
#include <string>

namespace ndrl {

// Base class for everything thrown by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Shape/arity mismatch; message names expected and actual.
class DimensionError : public Error {
public:
    using Error::Error;
};

// Invalid configuration value or incompatible option combination.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Operation called in the wrong object state (missing cache, step after done, ...).
class StateError : public Error {
public:
    using Error::Error;
};

class IndexError : public Error {
public:
    using Error::Error;
};

// Value outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

class EmptyBufferError : public Error {
public:
    using Error::Error;
};

// Operation not defined for this variant (e.g. sampling a deterministic head).
class UnsupportedError : public Error {
public:
    using Error::Error;
};

class CheckpointError : public Error {
public:
    using Error::Error;
};

// Search exceeded its node budget.
class BudgetError : public Error {
public:
    using Error::Error;
};

// Non-finite value reached the optimizer; carries the parameter name.
class DivergenceError : public Error {
public:
    explicit DivergenceError(const std::string& param, const std::string& msg)
        : Error(msg), param_name(param) {}
    std::string param_name;
};

}  // namespace ndrl
