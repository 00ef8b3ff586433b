#pragma once

#include <optional>
#include <vector>

#include "pnt/distributions.hpp"
#include "pnt/poly_model.hpp"

namespace pnt {

struct NodeCounts {
    int low = 14;   ///< nodes in [alpha, 0.01)
    int mid = 16;   ///< nodes in [0.01, 0.99)
    int high = 15;  ///< nodes in [0.99, 1 - alpha]
};

/// Where to match percentiles. The default is 45 tail-weighted nodes with alpha = 1e-4.
struct NodePlan {
    double alpha = 1e-4;
    NodeCounts counts;
    /// Used verbatim when set; alpha and counts are then ignored.
    std::optional<std::vector<double>> explicit_nodes;

    /// Throws DomainError for alpha outside (0, 0.01), non-positive counts, or explicit nodes
    /// that are not strictly increasing inside (0, 1).
    void validate() const;
};

/// `count` evenly spaced probabilities on the closed interval [lo, hi].
std::vector<double> even_nodes(double lo, double hi, int count);

/// Half-open even grids on [alpha, 0.01) and [0.01, 0.99), closed grid on [0.99, 1 - alpha].
std::vector<double> build_nodes(const NodePlan& plan);

struct PercentileFitReport {
    std::size_t node_count = 0;
    /// x_p - fitted(z_p) at every node.
    std::vector<double> residuals;
    double max_abs_residual = 0.0;
    double rms_residual = 0.0;
};

struct PercentileFit {
    PolynomialModel model;
    PercentileFitReport report;
};

/// Least-squares fit of x_p = sum a_k z_p^k over the plan's nodes, z_p = Phi^-1(p),
/// x_p = F^-1(p). Throws ConditioningError when the design matrix is rank deficient
/// (including fewer nodes than coefficients) and DomainError for degree outside [0, 19].
PercentileFit fit_percentile(const TargetDistribution& d, int degree, const NodePlan& plan = {});

}  // namespace pnt
