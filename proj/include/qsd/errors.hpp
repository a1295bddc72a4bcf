#pragma once

#include <stdexcept>
#include <string>

namespace qsd {

// Base class for every error raised by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// What a validation check rejected. Each kind maps to one named failure mode
// so callers can react to (and tests can assert on) the specific cause.
enum class ValidationKind {
    PriorSum,           // priors do not sum to one
    PriorRange,         // a prior is outside (0, 1]
    NonPsd,             // a state or POVM element has a negative eigenvalue
    TraceViolation,     // a state does not have unit trace
    DimensionMismatch,  // matrix side does not match the declared dimensions
    NotHermitian,       // entries violate A[j][k] == conj(A[k][j])
    Completeness,       // POVM elements do not sum to the identity
    CountMismatch,      // ensemble size and POVM size disagree
    NonFinite,          // NaN or Inf entry
    BadArgument,        // malformed argument (bad label, lambda out of range, ...)
};

const char* to_string(ValidationKind kind);

class ValidationError : public Error {
public:
    ValidationError(ValidationKind kind, const std::string& msg)
        : Error(std::string(to_string(kind)) + ": " + msg), kind_(kind) {}

    ValidationKind kind() const { return kind_; }

private:
    ValidationKind kind_;
};

// Requested dimension exceeds what the dense kernels accept.
class CapacityError : public Error {
public:
    explicit CapacityError(const std::string& msg) : Error(msg) {}
};

// A numerical routine could not meet its accuracy contract. Carries the
// offending residual.
class NumericalError : public Error {
public:
    NumericalError(const std::string& msg, double residual)
        : Error(msg), residual_(residual) {}

    double residual() const { return residual_; }

private:
    double residual_;
};

}  // namespace qsd
