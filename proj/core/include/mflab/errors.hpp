#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace mflab {

// Base class for every error thrown by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Argument outside the documented domain (n = 0, torus point outside [0,1), ...).
class DomainError : public Error {
public:
    using Error::Error;
};

// Adaptive quadrature hit its evaluation cap before reaching the requested
// tolerance. Carries the best available value and the achieved error estimate.
class QuadratureError : public Error {
public:
    QuadratureError(const std::string& msg, double partial, double achieved)
        : Error(msg), partial_value(partial), achieved_error(achieved) {}
    double partial_value;
    double achieved_error;
};

// Step variance a = int 4f(1-f) dmu vanishes; the walk MDP hypothesis fails.
class DegenerateVarianceError : public Error {
public:
    using Error::Error;
};

// A field value p_i in {0,1} makes the Hamiltonian's log(p/(1-p)) term infinite.
class InfiniteFieldError : public Error {
public:
    InfiniteFieldError(const std::string& msg, long idx) : Error(msg), index(idx) {}
    long index;
};

// Minimum classification found a first above-tolerance derivative at odd order.
class ClassificationError : public Error {
public:
    ClassificationError(const std::string& msg, std::string table)
        : Error(msg), derivative_table(std::move(table)) {}
    std::string derivative_table;
};

// A tail event has probability exactly zero (threshold beyond the support).
class EventEmptyError : public Error {
public:
    using Error::Error;
};

// A conditioning window contains no support atoms.
class WindowEmptyError : public Error {
public:
    using Error::Error;
};

// Root bracketing failed (no sign change found in / around the given interval).
class BracketError : public Error {
public:
    using Error::Error;
};

// The symmetric-minimizer branch assumed by critical_beta does not apply.
class UnsupportedBranchError : public Error {
public:
    using Error::Error;
};

// Derivative order above the supported cap.
class UnsupportedOrderError : public Error {
public:
    using Error::Error;
};

// Configuration validation failure; lists every violated key.
class ConfigError : public Error {
public:
    ConfigError(const std::string& msg, std::vector<std::string> v)
        : Error(msg), violations(std::move(v)) {}
    std::vector<std::string> violations;
};

}  // namespace mflab
