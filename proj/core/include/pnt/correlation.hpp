#pragma once

#include <optional>
#include <span>
#include <vector>

#include "pnt/distributions.hpp"
#include "pnt/linalg.hpp"
#include "pnt/poly_model.hpp"
#include "pnt/sampler.hpp"

namespace pnt {

/// Coefficients c_0..c_{min(i,j)} of E[Z1^i Z2^j] as a polynomial in the correlation rho of two
/// standard normals. Mixed parity gives all zeros. Throws DomainError outside 0 <= i, j <= 19.
std::vector<double> bivariate_normal_moment(int i, int j);

/// E[X1 X2] = sum_i b_i rho_z^i for two polynomial models, with the moments used to
/// turn it into a correlation.
struct RhoPolynomial {
    int degree = 0;
    std::vector<double> b;
    double mu1 = 0.0;
    double mu2 = 0.0;
    double sigma1 = 1.0;
    double sigma2 = 1.0;

    /// rho_x implied by rho_z: (sum b_i rho_z^i - mu1 mu2) / (sigma1 sigma2).
    double g(double rho_z) const;
    double g_derivative(double rho_z) const;
};

/// Uses the model-implied moments, so g(0) = 0 holds for the polynomials actually sampled.
RhoPolynomial build_rho_polynomial(const PolynomialModel& m1, const PolynomialModel& m2);

/// Same b_i but with caller-supplied moments (e.g. those of the target distributions).
RhoPolynomial build_rho_polynomial(const PolynomialModel& m1, const PolynomialModel& m2, const Moments& mom1,
                                   const Moments& mom2);

struct RhoBounds {
    double lower;
    double upper;
};

/// g(-1) and g(+1), clamped to [-1, 1]. Throws DegenerateError when sigma1 * sigma2 = 0.
RhoBounds rho_x_bounds(const RhoPolynomial& rp);

/// The rho_z in [-1, 1] with g(rho_z) = rho_x and rho_z * rho_x >= 0.
/// Throws InfeasibleCorrelationError (with the bounds) when rho_x is unattainable.
double solve_rho_z(const RhoPolynomial& rp, double rho_x);

struct BuildRzOptions {
    /// Repair a non positive definite Rz by eigenvalue clipping instead of failing.
    bool nearest_pd = false;
    /// Smallest eigenvalue kept by the repair.
    double min_eigenvalue = 1e-8;
    /// Per-marginal moments to use instead of the model-implied ones.
    std::vector<std::optional<Moments>> moment_overrides;
};

struct EquivalentCorrelation {
    Matrix rz;
    Matrix l;
    bool repaired = false;
};

/// Checks that rx is a symmetric, unit-diagonal, positive definite correlation matrix.
void validate_correlation_matrix(const Matrix& rx, const char* name = "Rx");

/// Entrywise rho_z for every off-diagonal pair and the Cholesky factor of the result.
/// Throws InfeasibleCorrelationError naming (i, j), or NotPositiveDefiniteError.
EquivalentCorrelation build_rz(std::span<const PolynomialModel> models, const Matrix& rx,
                               const BuildRzOptions& options = {});

/// Nearest correlation matrix in the eigenvalue-clipping sense: negative eigenvalues are
/// raised to min_eigenvalue, then the diagonal is rescaled to one.
Matrix clip_to_positive_definite(const Matrix& r, double min_eigenvalue = 1e-8);

VectorModel make_vector_model(std::vector<PolynomialModel> models, const Matrix& rx,
                              const BuildRzOptions& options = {});

}  // namespace pnt
