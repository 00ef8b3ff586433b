#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace pnt {

inline constexpr double kInvSqrt2Pi = 0.398942280401432677939946059934;
inline constexpr double kSqrt2 = 1.41421356237309504880168872421;

/// Default half-width of the window used for every expectation over the standard normal.
/// Beyond |z| = 8.5 the density is below 1e-16.
inline constexpr double kNormalTruncation = 8.5;

struct QuadratureSpec {
    double abs_tol = 1e-12;
    double rel_tol = 1e-10;
    double normal_truncation = kNormalTruncation;
    int max_subdivisions = 4000;

    /// Throws DomainError unless abs_tol > 0, rel_tol > 0, normal_truncation >= 6.
    void validate() const;
};

double normal_pdf(double z);
double normal_cdf(double z);

/// Inverse of normal_cdf. Throws DomainError unless 0 < p < 1.
double normal_quantile(double p);

/// Regularized lower incomplete gamma P(a, x). x <= 0 gives 0. Throws DomainError unless a > 0.
double reg_inc_gamma(double a, double x);

/// Regularized incomplete beta I_x(a, b), clamped to 0 / 1 outside [0, 1].
/// Throws DomainError unless a, b > 0.
double reg_inc_beta(double a, double b, double x);

using ScalarFunction = std::function<double(double)>;

/// Globally adaptive Gauss-Kronrod (10/21) quadrature of f over [lo, hi].
///
/// Converges when the summed error estimate drops below max(abs_tol, rel_tol * |I|).
/// Throws IntegrationError (carrying the last estimate) after max_subdivisions splits.
double integrate(const ScalarFunction& f, double lo, double hi, const QuadratureSpec& spec = {});

/// Vector-valued integrand: f(x, out) writes `dim` values into out.
using VectorFunction = std::function<void(double, std::span<double>)>;

/// Integrates `dim` integrands sharing the same abscissae. Each evaluation of f is
/// used for every component, so an expensive common factor is computed once per node.
/// The tolerance applies componentwise.
std::vector<double> integrate_many(std::size_t dim, const VectorFunction& f, double lo, double hi,
                                   const QuadratureSpec& spec = {});

/// Root of a monotone g on [lo, hi]; requires g(lo) * g(hi) <= 0.
///
/// Bisection safeguarding a secant step. Stops when |g(x)| <= tol or the bracket is
/// narrower than tol. Throws BracketError when the end values share a sign.
double find_root_monotone(const ScalarFunction& g, double lo, double hi, double tol);

/// Newton iteration on a monotone g with derivative dg, kept inside a shrinking bisection
/// bracket [lo, hi]. Converges when the step or the bracket falls below tol.
/// Throws BracketError when g(lo) and g(hi) share a sign.
double find_root_newton_safeguarded(const ScalarFunction& g, const ScalarFunction& dg, double lo, double hi,
                                    double tol);

}  // namespace pnt
