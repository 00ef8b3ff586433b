#pragma once

#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pnt/numerics.hpp"

namespace pnt {

enum class Family {
    Normal,
    Lognormal,
    Gamma,
    Beta,
    Weibull,
    Uniform,
    Gumbel,
    Logistic,
    StudentT,
    ChiSquared,
    Rayleigh,
    Exponential,
    F,
    Custom,
};

std::string_view family_name(Family f);
/// Case-insensitive; accepts a few aliases ("t", "chi2", "exp", "lnn", ...).
Family parse_family(std::string_view name);

struct Support {
    double lower = -std::numeric_limits<double>::infinity();
    double upper = std::numeric_limits<double>::infinity();

    bool contains(double x) const { return x >= lower && x <= upper; }
};

/// One point of a tabulated quantile function.
struct QuantilePoint {
    double p;
    double x;
};

/// A continuous marginal: CDF, quantile, density, support and the first two moments.
///
/// Parameter conventions (params in order):
///   Normal(mean, std)           Lognormal(log-mean, log-std)   Gamma(shape, scale)
///   Beta(a, b)                  Weibull(scale, shape)          Uniform(lower, upper)
///   Gumbel(location, scale)     Logistic(location, scale)      StudentT(nu)
///   ChiSquared(k)               Rayleigh(sigma)                Exponential(rate)
///   F(d1, d2)
/// Gumbel is the maximum-extreme-value form F(x) = exp(-exp(-(x - a) / b)).
///
/// Immutable after construction. Construction rejects invalid parameters (DomainError)
/// and parameterizations without a finite variance (UnsupportedMomentError).
class TargetDistribution {
public:
    TargetDistribution(Family family, std::vector<double> params);

    /// Custom marginal given as a tabulated quantile function, interpolated with a
    /// monotone cubic. Both p and x must be strictly increasing, p inside (0, 1).
    static TargetDistribution from_quantile_table(std::vector<QuantilePoint> table);

    Family family() const noexcept { return family_; }
    std::span<const double> params() const noexcept { return params_; }
    std::span<const QuantilePoint> quantile_table() const noexcept { return table_; }
    Support support() const noexcept { return support_; }
    double mean() const noexcept { return mean_; }
    double stddev() const noexcept { return stddev_; }

    /// Clamps to 0 / 1 outside the support.
    double cdf(double x) const;
    /// Throws DomainError unless 0 < p < 1.
    double quantile(double p) const;
    double pdf(double x) const;

    /// "beta:2,2" style label; round-trips through parse_distribution.
    std::string label() const;

private:
    TargetDistribution() = default;
    void validate_params() const;
    void compute_support();
    void compute_moments();
    double custom_quantile(double p) const;
    double custom_quantile_slope(double p) const;

    Family family_ = Family::Normal;
    std::vector<double> params_;
    std::vector<QuantilePoint> table_;
    std::vector<double> slopes_;
    Support support_;
    double mean_ = 0.0;
    double stddev_ = 1.0;
};

double cdf(const TargetDistribution& d, double x);
double quantile(const TargetDistribution& d, double p);

struct Moments {
    double mean;
    double stddev;
};

Moments moments(const TargetDistribution& d);

/// Quantile of an arbitrary monotone CDF by bracket expansion from the support and a
/// monotone root solve. Throws DomainError when p is outside (0, 1) or no bracket is found.
double numeric_quantile(const ScalarFunction& cdf, Support support, double p);

/// Parses "family:p1,p2,..." (e.g. "beta:2,2", "exponential:1").
TargetDistribution parse_distribution(std::string_view text);

}  // namespace pnt
