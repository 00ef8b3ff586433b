#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace pnt {

/// Root of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of the operation (p outside (0,1), bad shape parameter, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Adaptive quadrature ran out of subdivisions. Carries the estimate reached so far.
class IntegrationError : public Error {
public:
    IntegrationError(const std::string& what, double last_estimate, double last_error)
        : Error(what), last_estimate_(last_estimate), last_error_(last_error) {}
    double last_estimate() const noexcept { return last_estimate_; }
    double last_error() const noexcept { return last_error_; }

private:
    double last_estimate_;
    double last_error_;
};

class SingularMatrixError : public Error {
public:
    using Error::Error;
};

class NotPositiveDefiniteError : public Error {
public:
    using Error::Error;
};

/// find_root_monotone was handed an interval that does not bracket a sign change.
class BracketError : public Error {
public:
    using Error::Error;
};

/// A linear system is too close to singular to trust its solution.
class ConditioningError : public Error {
public:
    ConditioningError(const std::string& what, double determinant, double pivot_ratio)
        : Error(what), determinant_(determinant), pivot_ratio_(pivot_ratio) {}
    double determinant() const noexcept { return determinant_; }
    double pivot_ratio() const noexcept { return pivot_ratio_; }

private:
    double determinant_;
    double pivot_ratio_;
};

class InsufficientSampleError : public Error {
public:
    using Error::Error;
};

/// The distribution has no finite second moment.
class UnsupportedMomentError : public Error {
public:
    using Error::Error;
};

/// Zero variance where a spread is required (flat model, constant column).
class DegenerateError : public Error {
public:
    using Error::Error;
};

class OverflowError : public Error {
public:
    using Error::Error;
};

/// Internal cross-check failed (e.g. a model variance that is clearly negative).
class ConsistencyError : public Error {
public:
    using Error::Error;
};

/// Requested correlation lies outside the attainable range for the two marginals.
class InfeasibleCorrelationError : public Error {
public:
    InfeasibleCorrelationError(const std::string& what, double lower, double upper)
        : Error(what), lower_(lower), upper_(upper) {}
    double lower() const noexcept { return lower_; }
    double upper() const noexcept { return upper_; }

private:
    double lower_;
    double upper_;
};

}  // namespace pnt
