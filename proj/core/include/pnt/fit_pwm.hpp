#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "pnt/distributions.hpp"
#include "pnt/linalg.hpp"
#include "pnt/numerics.hpp"
#include "pnt/poly_model.hpp"

namespace pnt {

/// Degree above which a distribution-based PWM fit is refused without an override.
inline constexpr int kPwmSoftDegreeCap = 12;
/// Default cap for sample-based PWM fits; high-order sample PWMs are noisy.
inline constexpr int kSamplePwmDegreeCap = 9;

enum class PwmProvenance { Analytic, Sample };

/// beta_r = E[F(X)^r X] for r = 0..order.
struct PwmVector {
    int order = 0;
    std::vector<double> beta;
    PwmProvenance provenance = PwmProvenance::Analytic;
    std::size_t sample_size = 0;
    /// Distribution label or sample fingerprint, carried into the fitted model.
    std::string source;
};

/// M[r][k] = integral of Phi(z)^r z^k phi(z) dz, r, k = 0..order.
struct NormalPwmMatrix {
    int order = 0;
    Matrix entries;
    double det = 0.0;
};

/// beta_r = integral over p in (0,1) of F^-1(p) p^r, evaluated as an integral over
/// t = Phi^-1(p) on the truncated normal window so that unbounded quantiles stay tame.
/// Throws IntegrationError naming the offending order when the quadrature fails.
PwmVector pwm_from_distribution(const TargetDistribution& d, int n, const QuadratureSpec& spec = {});

/// Unbiased sample estimator of beta_0..beta_n. Throws InsufficientSampleError when size <= n.
PwmVector pwm_from_sample(std::span<const double> x, int n);

/// Builds the (n+1)x(n+1) normal PWM matrix. Rows are integrated independently and may be
/// spread over `threads` workers (0 = hardware concurrency); the result does not depend on it.
NormalPwmMatrix normal_pwm_matrix(int n, const QuadratureSpec& spec = {}, unsigned threads = 1);

struct PwmFitOptions {
    /// Permit degrees above the soft caps (12 for analytic PWMs, 9 for sample PWMs).
    bool allow_high_degree = false;
    /// Refuse the solve when min|pivot| / max|pivot| falls below this.
    double min_pivot_ratio = 1e-14;
};

struct ConditioningReport {
    double determinant = 0.0;
    double pivot_ratio = 0.0;
    std::vector<double> pivots;
    /// max_r |sum_k M[r][k] a_k - beta_r|
    double residual = 0.0;
};

struct PwmFit {
    PolynomialModel model;
    ConditioningReport conditioning;
};

/// Solves M a = beta. Throws DomainError on an order mismatch and ConditioningError when the
/// degree is above the soft cap (without override) or the pivot ratio is below threshold.
PwmFit fit_pwm(const PwmVector& target, const NormalPwmMatrix& m, const PwmFitOptions& options = {});

/// PWMs of the model itself: beta_r = sum_k a_k M[r][k].
std::vector<double> model_pwm(const PolynomialModel& model, const NormalPwmMatrix& m);

}  // namespace pnt
