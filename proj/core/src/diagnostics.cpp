#include "pnt/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "pnt/errors.hpp"
#include "pnt/numerics.hpp"
#include "pnt/sampler.hpp"

namespace pnt {

FitReport epsilon_report(const PolynomialModel& m, const TargetDistribution& d, ProbitRange range, std::size_t grid) {
    if (!(range.lo > 0.0 && range.lo < range.hi && range.hi < 1.0))
        throw DomainError("epsilon_report: probit range must satisfy 0 < lo < hi < 1");
    if (grid < 2) throw DomainError("epsilon_report: grid must have at least two points");

    FitReport report;
    report.probit_range = range;
    report.grid_size = grid;
    report.points.reserve(grid);
    const double threshold = 1e-12 * d.stddev();
    const double step = (range.hi - range.lo) / static_cast<double>(grid - 1);
    double sum = 0.0;
    std::size_t kept = 0;
    report.eps_min = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid; ++i) {
        const double p = i + 1 == grid ? range.hi : range.lo + step * static_cast<double>(i);
        const double x = d.quantile(p);
        const double x_star = evaluate(m, normal_quantile(p));
        EpsilonPoint pt{p, x, x_star, 0.0, std::abs(x) < threshold};
        if (pt.skipped) {
            ++report.skipped_points;
        } else {
            pt.eps_percent = std::abs((x_star - x) / x) * 100.0;
            sum += pt.eps_percent;
            ++kept;
            report.eps_min = std::min(report.eps_min, pt.eps_percent);
            report.eps_max = std::max(report.eps_max, pt.eps_percent);
        }
        report.points.push_back(pt);
    }
    if (kept == 0) {
        report.eps_min = 0.0;
        report.eps_avg = 0.0;
    } else {
        report.eps_avg = sum / static_cast<double>(kept);
    }
    return report;
}

DensityTable density_compare(const PolynomialModel& m, const TargetDistribution& d, std::size_t bins,
                             std::size_t draws, std::uint64_t seed) {
    if (bins < 1) throw DomainError("density_compare: need at least one bin");
    if (draws < bins * 100) {
        std::ostringstream os;
        os << "density_compare: " << draws << " draws is too few for " << bins << " bins (need >= 100 per bin)";
        throw DomainError(os.str());
    }
    const auto z = normal_stream(RngSpec{seed, 0}, draws);
    const auto x = transform_sample(m, z);
    const auto [min_it, max_it] = std::minmax_element(x.begin(), x.end());
    double lo = *min_it;
    double hi = *max_it;
    if (!(hi > lo)) {
        // Degenerate model: centre the single occupied bin on the constant value.
        const double half = 0.5 * std::max(1.0, std::abs(lo)) * static_cast<double>(bins);
        lo -= half;
        hi += half;
    }
    const double width = (hi - lo) / static_cast<double>(bins);

    DensityTable table;
    table.draws = draws;
    table.bins.resize(bins);
    for (std::size_t b = 0; b < bins; ++b) {
        auto& bin = table.bins[b];
        bin.lo = lo + width * static_cast<double>(b);
        bin.hi = b + 1 == bins ? hi : lo + width * static_cast<double>(b + 1);
        bin.count = 0;
    }
    for (double v : x) {
        auto b = static_cast<std::size_t>((v - lo) / width);
        if (b >= bins) b = bins - 1;
        ++table.bins[b].count;
    }
    for (auto& bin : table.bins) {
        const double w = bin.hi - bin.lo;
        bin.empirical = static_cast<double>(bin.count) / (static_cast<double>(draws) * w);
        bin.analytic = d.pdf(0.5 * (bin.lo + bin.hi));
        bin.expected = (d.cdf(bin.hi) - d.cdf(bin.lo)) / w;
        table.max_gap = std::max(table.max_gap, std::abs(bin.empirical - bin.expected));
    }
    return table;
}

}  // namespace pnt
