#include "pnt/fit_pwm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

#include "pnt/errors.hpp"

namespace pnt {
namespace {

void check_order(int n, const char* who) {
    if (n < 0 || n > kMaxDegree) {
        std::ostringstream os;
        os << who << ": order " << n << " outside [0, " << kMaxDegree << "]";
        throw DomainError(os.str());
    }
}

// Phi(t) clamped into the open unit interval so the quantile stays defined at the window edges.
double open_unit(double p) {
    constexpr double kTop = 1.0 - std::numeric_limits<double>::epsilon() / 2.0;
    return std::clamp(p, std::numeric_limits<double>::min(), kTop);
}

}  // namespace

PwmVector pwm_from_distribution(const TargetDistribution& d, int n, const QuadratureSpec& spec) {
    check_order(n, "pwm_from_distribution");
    spec.validate();
    const auto dim = static_cast<std::size_t>(n) + 1;
    const double edge = spec.normal_truncation;
    std::vector<double> beta;
    try {
        beta = integrate_many(
            dim,
            [&d](double t, std::span<double> out) {
                const double p = open_unit(normal_cdf(t));
                double w = d.quantile(p) * normal_pdf(t);
                for (auto& o : out) {
                    o = w;
                    w *= p;
                }
            },
            -edge, edge, spec);
    } catch (const IntegrationError& e) {
        std::ostringstream os;
        os << "pwm_from_distribution(" << d.label() << "): the quantile integral did not converge; "
           << "the distribution's tails may be too heavy (" << e.what() << ")";
        throw IntegrationError(os.str(), e.last_estimate(), e.last_error());
    }
    return {n, std::move(beta), PwmProvenance::Analytic, 0, d.label()};
}

PwmVector pwm_from_sample(std::span<const double> x, int n) {
    check_order(n, "pwm_from_sample");
    const std::size_t m = x.size();
    if (m <= static_cast<std::size_t>(n)) {
        std::ostringstream os;
        os << "pwm_from_sample: " << m << " observations cannot determine " << n + 1 << " PWMs";
        throw InsufficientSampleError(os.str());
    }
    std::vector<double> sorted(x.begin(), x.end());
    for (double v : sorted)
        if (!std::isfinite(v)) throw DomainError("pwm_from_sample: sample contains non-finite values");
    std::sort(sorted.begin(), sorted.end());

    std::vector<double> beta(static_cast<std::size_t>(n) + 1, 0.0);
    const double md = static_cast<double>(m);
    for (int r = 0; r <= n; ++r) {
        double sum = 0.0;
        for (std::size_t i = static_cast<std::size_t>(r) + 1; i <= m; ++i) {
            // (i-1)(i-2)...(i-r) / ((m-1)(m-2)...(m-r)) as a product of ratios.
            double w = 1.0;
            const double id = static_cast<double>(i);
            for (int j = 1; j <= r; ++j) w *= (id - j) / (md - j);
            sum += w * sorted[i - 1];
        }
        beta[static_cast<std::size_t>(r)] = sum / md;
    }
    return {n, std::move(beta), PwmProvenance::Sample, m, "sample:" + std::to_string(m)};
}

NormalPwmMatrix normal_pwm_matrix(int n, const QuadratureSpec& spec, unsigned threads) {
    check_order(n, "normal_pwm_matrix");
    spec.validate();
    const auto dim = static_cast<std::size_t>(n) + 1;
    const double edge = spec.normal_truncation;
    Matrix entries(dim, dim);

    auto fill_row = [&](std::size_t r) {
        std::vector<double> row;
        try {
            row = integrate_many(
                dim,
                [r](double z, std::span<double> out) {
                    double w = std::pow(normal_cdf(z), static_cast<double>(r)) * normal_pdf(z);
                    for (auto& o : out) {
                        o = w;
                        w *= z;
                    }
                },
                -edge, edge, spec);
        } catch (const IntegrationError& e) {
            std::ostringstream os;
            os << "normal_pwm_matrix: row r = " << r << " failed: " << e.what();
            throw IntegrationError(os.str(), e.last_estimate(), e.last_error());
        }
        for (std::size_t k = 0; k < dim; ++k) entries(r, k) = row[k];
    };

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(dim));
    if (threads <= 1) {
        for (std::size_t r = 0; r < dim; ++r) fill_row(r);
    } else {
        std::vector<std::exception_ptr> errors(threads);
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back([&, t] {
                try {
                    for (std::size_t r = t; r < dim; r += threads) fill_row(r);
                } catch (...) {
                    errors[t] = std::current_exception();
                }
            });
        }
        for (auto& th : pool) th.join();
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    }
    const double det = determinant(entries);
    return {n, std::move(entries), det};
}

PwmFit fit_pwm(const PwmVector& target, const NormalPwmMatrix& m, const PwmFitOptions& options) {
    if (target.order != m.order || target.beta.size() != m.entries.rows()) {
        std::ostringstream os;
        os << "fit_pwm: PWM order " << target.order << " does not match matrix order " << m.order;
        throw DomainError(os.str());
    }
    const int n = m.order;
    const int cap = target.provenance == PwmProvenance::Sample ? kSamplePwmDegreeCap : kPwmSoftDegreeCap;
    if (n > cap && !options.allow_high_degree) {
        std::ostringstream os;
        os << "fit_pwm: degree " << n << " exceeds the recommended maximum " << cap
           << " for " << (target.provenance == PwmProvenance::Sample ? "sample" : "distribution")
           << " PWMs (det = " << m.det << "); pass an override to force it";
        throw ConditioningError(os.str(), m.det, 0.0);
    }

    const LuFactorization lu(m.entries);
    ConditioningReport report;
    report.determinant = lu.determinant();
    report.pivot_ratio = lu.pivot_ratio();
    report.pivots = lu.pivots();
    if (!(report.pivot_ratio >= options.min_pivot_ratio)) {
        std::ostringstream os;
        os << "fit_pwm: PWM matrix is singular to working precision (det = " << report.determinant
           << ", pivot ratio = " << report.pivot_ratio << ")";
        throw ConditioningError(os.str(), report.determinant, report.pivot_ratio);
    }
    std::vector<double> a = lu.solve(target.beta);
    const auto back = m.entries * std::span<const double>(a);
    for (std::size_t r = 0; r < back.size(); ++r)
        report.residual = std::max(report.residual, std::abs(back[r] - target.beta[r]));

    return {PolynomialModel(std::move(a), FitMethod::Pwm, std::nullopt, target.source), std::move(report)};
}

std::vector<double> model_pwm(const PolynomialModel& model, const NormalPwmMatrix& m) {
    const auto dim = m.entries.rows();
    std::vector<double> a(dim, 0.0);
    const auto c = model.coeffs();
    if (c.size() > dim) throw DomainError("model_pwm: model degree exceeds matrix order");
    std::copy(c.begin(), c.end(), a.begin());
    return m.entries * std::span<const double>(a);
}

}  // namespace pnt
