#pragma once

#include <stdexcept>
#include <string>

namespace husimi {

/// Base class for numerical-contract failures (truncation, quadrature, range).
/// Argument validation uses std::invalid_argument instead.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A Fock-space sum was cut off with a tail bound above the requested tolerance.
class TruncationError : public NumericalError {
public:
    TruncationError(const std::string& what, double bound)
        : NumericalError(what + " (tail bound " + std::to_string(bound) + ")"), bound_(bound) {}
    double bound() const noexcept { return bound_; }

private:
    double bound_;
};

/// Refining the quadrature changed the result by more than the declared tolerance.
class QuadratureError : public NumericalError {
public:
    QuadratureError(const std::string& what, double change)
        : NumericalError(what + " (refinement change " + std::to_string(change) + ")"),
          change_(change) {}
    double change() const noexcept { return change_; }

private:
    double change_;
};

/// A Gaussian prefactor to be divided out is below the representable range.
class RangeError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// The operator fails the (K n^alpha)^n growth condition for continuation.
class GrowthError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// An integrand does not decay (e.g. s-transform outside its integrable range).
class NonIntegrableError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Frame parameters sit in a singular zone of a formula (lambda near 1).
class SingularFrameError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Anti-Husimi series requested for a non-polynomial operator without consent.
class NonTerminatingSeriesError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// A sampled grid does not cover the support a convolution needs.
class InsufficientSupportError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// A high-order finite difference is dominated by rounding or sample noise.
class InstabilityError : public NumericalError {
public:
    InstabilityError(const std::string& what, double estimate)
        : NumericalError(what + " (error estimate " + std::to_string(estimate) + ")"),
          estimate_(estimate) {}
    double estimate() const noexcept { return estimate_; }

private:
    double estimate_;
};

}  // namespace husimi
