#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pnt {

/// Largest polynomial degree handled anywhere in the library. The normal-PWM matrix is
/// already near singular (det ~ 1e-37) by degree 12, and product moments of degree-19
/// terms reach 19! ~ 1.2e17.
inline constexpr int kMaxDegree = 19;

enum class FitMethod { Pwm, Percentile, Exact };

std::string_view fit_method_name(FitMethod m);
FitMethod parse_fit_method(std::string_view s);

/// Probability interval [lo, hi] over which a model was fitted or is assessed.
struct ProbitRange {
    double lo;
    double hi;

    bool operator==(const ProbitRange&) const = default;
};

/// X ~= sum_k a_k Z^k with Z standard normal.
class PolynomialModel {
public:
    /// Throws DomainError for an empty list, non-finite entries, or degree > kMaxDegree.
    explicit PolynomialModel(std::vector<double> coeffs, FitMethod method = FitMethod::Exact,
                             std::optional<ProbitRange> probit_range = std::nullopt, std::string source = {});

    /// a = (mean, std): the exact model of a normal marginal.
    static PolynomialModel affine(double mean, double stddev);

    int degree() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
    std::span<const double> coeffs() const noexcept { return coeffs_; }
    double coeff(int k) const { return k <= degree() ? coeffs_[static_cast<std::size_t>(k)] : 0.0; }
    FitMethod fit_method() const noexcept { return method_; }
    const std::optional<ProbitRange>& probit_range() const noexcept { return probit_range_; }
    /// Free-form provenance: a distribution label or a sample fingerprint.
    const std::string& source() const noexcept { return source_; }

    /// Same model with every coefficient multiplied by `scale` and `shift` added to a_0.
    PolynomialModel affine_transform(double scale, double shift) const;

    bool operator==(const PolynomialModel&) const = default;

private:
    std::vector<double> coeffs_;
    FitMethod method_;
    std::optional<ProbitRange> probit_range_;
    std::string source_;
};

/// Horner evaluation of the polynomial at z.
double evaluate(const PolynomialModel& m, double z);

/// E[Z^(2s)] = (2s - 1)!!. Throws OverflowError for 2s > 40.
double normal_even_moment(int s);

/// E[Z^k]: zero for odd k.
double normal_raw_moment(int k);

struct ModelMoments {
    double mean;
    double stddev;
};

/// Mean and standard deviation of sum a_k Z^k from the normal raw moments.
/// Throws ConsistencyError when the variance comes out below -1e-12 (relative to E[X^2]).
ModelMoments model_moments(const PolynomialModel& m);

struct MonotonicityReport {
    bool monotone;
    std::vector<double> violation_z;
};

/// Checks dX/dZ >= 0 on [z_lo, z_hi] using a 10^4-point grid plus the sign changes of the
/// derivative located between grid points. Reports z values where the derivative is negative.
MonotonicityReport monotonicity_check(const PolynomialModel& m, double z_lo, double z_hi);

std::vector<double> transform_sample(const PolynomialModel& m, std::span<const double> z);

}  // namespace pnt
