#include "pnt/poly_model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include "pnt/errors.hpp"
#include "pnt/numerics.hpp"

namespace pnt {

std::string_view fit_method_name(FitMethod m) {
    switch (m) {
        case FitMethod::Pwm: return "pwm";
        case FitMethod::Percentile: return "percentile";
        case FitMethod::Exact: return "exact";
    }
    return "exact";
}

FitMethod parse_fit_method(std::string_view s) {
    std::string n(s);
    std::transform(n.begin(), n.end(), n.begin(), [](unsigned char c) { return std::tolower(c); });
    if (n == "pwm") return FitMethod::Pwm;
    if (n == "percentile") return FitMethod::Percentile;
    if (n == "exact") return FitMethod::Exact;
    throw DomainError("unknown fit method '" + std::string(s) + "'");
}

PolynomialModel::PolynomialModel(std::vector<double> coeffs, FitMethod method, std::optional<ProbitRange> probit_range,
                                 std::string source)
    : coeffs_(std::move(coeffs)), method_(method), probit_range_(probit_range), source_(std::move(source)) {
    if (coeffs_.empty()) throw DomainError("PolynomialModel: at least one coefficient is required");
    if (static_cast<int>(coeffs_.size()) - 1 > kMaxDegree) {
        std::ostringstream os;
        os << "PolynomialModel: degree " << coeffs_.size() - 1 << " exceeds the supported maximum " << kMaxDegree
           << " (the normal-PWM system is numerically singular well before that)";
        throw DomainError(os.str());
    }
    for (double a : coeffs_)
        if (!std::isfinite(a)) throw DomainError("PolynomialModel: coefficients must be finite");
    if (probit_range_ && !(probit_range_->lo > 0.0 && probit_range_->lo <= probit_range_->hi && probit_range_->hi < 1.0))
        throw DomainError("PolynomialModel: probit range must satisfy 0 < lo <= hi < 1");
}

PolynomialModel PolynomialModel::affine(double mean, double stddev) {
    return PolynomialModel({mean, stddev}, FitMethod::Exact);
}

PolynomialModel PolynomialModel::affine_transform(double scale, double shift) const {
    std::vector<double> c(coeffs_);
    for (auto& v : c) v *= scale;
    c[0] += shift;
    return PolynomialModel(std::move(c), method_, probit_range_, source_);
}

double evaluate(const PolynomialModel& m, double z) {
    const auto a = m.coeffs();
    double acc = a.back();
    for (std::size_t k = a.size() - 1; k-- > 0;) acc = acc * z + a[k];
    return acc;
}

double normal_even_moment(int s) {
    if (s < 0) throw DomainError("normal_even_moment: s must be >= 0");
    if (2 * s > 40) throw OverflowError("normal_even_moment: 2s > 40 is outside the supported range");
    double v = 1.0;
    for (int j = 2 * s - 1; j > 1; j -= 2) v *= j;
    return v;
}

double normal_raw_moment(int k) {
    if (k < 0) throw DomainError("normal_raw_moment: k must be >= 0");
    return k % 2 ? 0.0 : normal_even_moment(k / 2);
}

ModelMoments model_moments(const PolynomialModel& m) {
    const auto a = m.coeffs();
    const int n = m.degree();
    double mean = 0.0;
    for (int k = 0; k <= n; k += 2) mean += a[k] * normal_raw_moment(k);
    double second = 0.0;
    for (int j = 0; j <= n; ++j)
        for (int k = j % 2; k <= n; k += 2) second += a[j] * a[k] * normal_raw_moment(j + k);
    double var = second - mean * mean;
    if (var < 0.0) {
        if (var < -1e-12 * std::max(1.0, std::abs(second))) {
            std::ostringstream os;
            os << "model_moments: negative variance " << var;
            throw ConsistencyError(os.str());
        }
        var = 0.0;
    }
    return {mean, std::sqrt(var)};
}

MonotonicityReport monotonicity_check(const PolynomialModel& m, double z_lo, double z_hi) {
    if (!(std::isfinite(z_lo) && std::isfinite(z_hi) && z_lo <= z_hi))
        throw DomainError("monotonicity_check: z range must be finite and ordered");
    const auto a = m.coeffs();
    const int n = m.degree();
    auto derivative = [&](double z) {
        double acc = 0.0;
        for (int k = n; k >= 1; --k) acc = acc * z + k * a[k];
        return acc;
    };
    MonotonicityReport report{true, {}};
    if (n < 1) return report;
    constexpr int kGrid = 10000;
    const double step = (z_hi - z_lo) / (kGrid - 1);
    double prev_z = z_lo;
    double prev_d = derivative(z_lo);
    if (prev_d < 0.0) report.violation_z.push_back(z_lo);
    for (int i = 1; i < kGrid; ++i) {
        const double z = (i == kGrid - 1) ? z_hi : z_lo + step * i;
        const double d = derivative(z);
        if (d < 0.0) report.violation_z.push_back(z);
        // A dip that starts and ends between two grid points: look for the interior minimum of
        // the derivative via its own sign changes (second derivative), cheap on a short interval.
        if (d >= 0.0 && prev_d >= 0.0 && n >= 3) {
            auto second = [&](double x) {
                double acc = 0.0;
                for (int k = n; k >= 2; --k) acc = acc * x + static_cast<double>(k) * (k - 1) * a[k];
                return acc;
            };
            const double s0 = second(prev_z);
            const double s1 = second(z);
            if (s0 < 0.0 && s1 > 0.0) {
                const double zmin = find_root_monotone(second, prev_z, z, 1e-14);
                if (derivative(zmin) < 0.0) report.violation_z.push_back(zmin);
            }
        }
        prev_z = z;
        prev_d = d;
    }
    report.monotone = report.violation_z.empty();
    return report;
}

std::vector<double> transform_sample(const PolynomialModel& m, std::span<const double> z) {
    std::vector<double> out(z.size());
    std::transform(z.begin(), z.end(), out.begin(), [&m](double v) { return evaluate(m, v); });
    return out;
}

}  // namespace pnt
