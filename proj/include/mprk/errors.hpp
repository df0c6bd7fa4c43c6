#pragma once

#include <stdexcept>
#include <string>

namespace mprk {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An input object violates one of its documented invariants.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// An argument lies outside the mathematical domain of the operation
/// (pole evaluation, parameter range, negative time step, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Pivot breakdown in the dense solver.
class SingularMatrixError : public Error {
public:
    using Error::Error;
};

/// A time step could not be completed. Carries the failing step index
/// (when raised from a trajectory) and the offending component, if known.
class StepError : public Error {
public:
    explicit StepError(const std::string& msg, long step_index = -1, int component = -1)
        : Error(msg), step_index(step_index), component(component) {}

    long step_index;
    int component;
};

}  // namespace mprk
