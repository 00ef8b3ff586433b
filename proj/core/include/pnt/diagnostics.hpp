#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "pnt/distributions.hpp"
#include "pnt/poly_model.hpp"

namespace pnt {

struct EpsilonPoint {
    double p;
    double x_p;       ///< target quantile F^-1(p)
    double x_p_star;  ///< model value at z_p = Phi^-1(p)
    double eps_percent;
    bool skipped;     ///< |x_p| too close to zero for a relative error
};

/// Percent relative quantile error |x* - x| / |x| * 100 over an even grid in p.
struct FitReport {
    ProbitRange probit_range{};
    std::size_t grid_size = 0;
    double eps_avg = 0.0;
    double eps_min = 0.0;
    double eps_max = 0.0;
    std::size_t skipped_points = 0;
    std::vector<EpsilonPoint> points;
};

/// Evaluates the error at `grid` evenly spaced probabilities spanning `range` (endpoints
/// included). Points with |x_p| < 1e-12 * sigma are skipped and counted. The average is the
/// plain left-to-right sum over kept points divided by their count.
FitReport epsilon_report(const PolynomialModel& m, const TargetDistribution& d, ProbitRange range,
                         std::size_t grid = 10000);

struct DensityBin {
    double lo;
    double hi;
    std::size_t count;
    double empirical;  ///< count / (draws * width)
    double analytic;   ///< target pdf at the bin centre
    double expected;   ///< (F(hi) - F(lo)) / width
};

struct DensityTable {
    std::vector<DensityBin> bins;
    std::size_t draws = 0;
    /// max over bins of |empirical - expected|
    double max_gap = 0.0;
};

/// Histogram of the model applied to `draws` seeded normals next to the target density.
/// Bins split [min, max] of the generated values. Requires draws >= 100 * bins.
DensityTable density_compare(const PolynomialModel& m, const TargetDistribution& d, std::size_t bins,
                             std::size_t draws, std::uint64_t seed);

}  // namespace pnt
