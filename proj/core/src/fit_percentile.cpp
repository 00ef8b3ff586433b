#include "pnt/fit_percentile.hpp"

#include <cmath>
#include <sstream>

#include "pnt/errors.hpp"
#include "pnt/linalg.hpp"
#include "pnt/numerics.hpp"

namespace pnt {
namespace {

std::vector<double> half_open(double lo, double hi, int count) {
    std::vector<double> out(static_cast<std::size_t>(count));
    const double step = (hi - lo) / count;
    for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = lo + step * i;
    return out;
}

}  // namespace

void NodePlan::validate() const {
    if (explicit_nodes) {
        const auto& nodes = *explicit_nodes;
        if (nodes.empty()) throw DomainError("node plan: explicit node list is empty");
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            if (!(nodes[i] > 0.0 && nodes[i] < 1.0))
                throw DomainError("node plan: explicit nodes must lie in (0, 1)");
            if (i > 0 && !(nodes[i] > nodes[i - 1]))
                throw DomainError("node plan: explicit nodes must be strictly increasing");
        }
        return;
    }
    if (!(alpha > 0.0 && alpha < 0.01)) {
        std::ostringstream os;
        os << "node plan: alpha = " << alpha << " must lie in (0, 0.01) so the tail blocks do not overlap";
        throw DomainError(os.str());
    }
    if (counts.low < 1 || counts.mid < 1 || counts.high < 2)
        throw DomainError("node plan: need low >= 1, mid >= 1 and high >= 2 nodes");
}

std::vector<double> even_nodes(double lo, double hi, int count) {
    if (count < 2 || !(lo < hi)) throw DomainError("even_nodes: need count >= 2 and lo < hi");
    std::vector<double> out(static_cast<std::size_t>(count));
    const double step = (hi - lo) / (count - 1);
    for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = lo + step * i;
    out.back() = hi;
    return out;
}

std::vector<double> build_nodes(const NodePlan& plan) {
    plan.validate();
    if (plan.explicit_nodes) return *plan.explicit_nodes;
    std::vector<double> nodes = half_open(plan.alpha, 0.01, plan.counts.low);
    const auto mid = half_open(0.01, 0.99, plan.counts.mid);
    const auto high = even_nodes(0.99, 1.0 - plan.alpha, plan.counts.high);
    nodes.insert(nodes.end(), mid.begin(), mid.end());
    nodes.insert(nodes.end(), high.begin(), high.end());
    return nodes;
}

PercentileFit fit_percentile(const TargetDistribution& d, int degree, const NodePlan& plan) {
    if (degree < 0 || degree > kMaxDegree) {
        std::ostringstream os;
        os << "fit_percentile: degree " << degree << " outside [0, " << kMaxDegree << "]";
        throw DomainError(os.str());
    }
    const auto nodes = build_nodes(plan);
    const std::size_t m = nodes.size();
    const auto k = static_cast<std::size_t>(degree) + 1;
    if (m < k) {
        std::ostringstream os;
        os << "fit_percentile: " << m << " nodes cannot determine " << k << " coefficients";
        throw ConditioningError(os.str(), 0.0, 0.0);
    }

    Matrix design(m, k);
    std::vector<double> x(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double z = normal_quantile(nodes[i]);
        x[i] = d.quantile(nodes[i]);
        double pw = 1.0;
        for (std::size_t j = 0; j < k; ++j) {
            design(i, j) = pw;
            pw *= z;
        }
    }

    std::vector<double> a;
    try {
        a = least_squares(design, x);
    } catch (const SingularMatrixError& e) {
        throw ConditioningError(std::string("fit_percentile: ") + e.what(), 0.0, 0.0);
    }

    PercentileFitReport report;
    report.node_count = m;
    report.residuals.resize(m);
    const auto fitted = design * std::span<const double>(a);
    double ss = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        report.residuals[i] = x[i] - fitted[i];
        report.max_abs_residual = std::max(report.max_abs_residual, std::abs(report.residuals[i]));
        ss += report.residuals[i] * report.residuals[i];
    }
    report.rms_residual = std::sqrt(ss / static_cast<double>(m));

    PolynomialModel model(std::move(a), FitMethod::Percentile, ProbitRange{nodes.front(), nodes.back()}, d.label());
    return {std::move(model), std::move(report)};
}

}  // namespace pnt
