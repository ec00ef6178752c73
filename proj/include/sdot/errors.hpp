#pragma once

#include <stdexcept>
#include <string>

#include "sdot/types.hpp"

namespace sdot {

/// An integrand returned a non-finite value; carries the offending point.
class IntegrationError : public std::runtime_error {
public:
    IntegrationError(const std::string& what, Vec point)
        : std::runtime_error(what), point_(std::move(point)) {}
    const Vec& point() const { return point_; }

private:
    Vec point_;
};

/// A cost integral against an atom is non-finite; carries the atom index.
class IntegrabilityError : public std::runtime_error {
public:
    IntegrabilityError(const std::string& what, int atom)
        : std::runtime_error(what), atom_(atom) {}
    int atom() const { return atom_; }

private:
    int atom_;
};

class UnsupportedBackend : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Hessian requested at a point where some cell carries almost no mass.
class DegenerateHessian : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Hessian restricted to the zero-sum hyperplane is not negative definite.
class SingularHessian : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A limit-law constructor was called without its validity preconditions.
class AssumptionViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DeltaMethodError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The dual-optimal face behaved inconsistently (e.g. unbounded in gauge).
class FaceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace sdot
