#include "pnt/distributions.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "pnt/errors.hpp"

namespace pnt {
namespace {

constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

struct FamilyInfo {
    Family family;
    std::string_view name;
    std::size_t arity;
};

constexpr FamilyInfo kFamilies[] = {
    {Family::Normal, "normal", 2},       {Family::Lognormal, "lognormal", 2},
    {Family::Gamma, "gamma", 2},         {Family::Beta, "beta", 2},
    {Family::Weibull, "weibull", 2},     {Family::Uniform, "uniform", 2},
    {Family::Gumbel, "gumbel", 2},       {Family::Logistic, "logistic", 2},
    {Family::StudentT, "studentt", 1},   {Family::ChiSquared, "chisquared", 1},
    {Family::Rayleigh, "rayleigh", 1},   {Family::Exponential, "exponential", 1},
    {Family::F, "f", 2},                 {Family::Custom, "custom", 0},
};

const FamilyInfo& info(Family f) {
    for (const auto& i : kFamilies)
        if (i.family == f) return i;
    throw DomainError("unknown distribution family");
}

std::string lower_case(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

std::string format_double(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

std::string_view family_name(Family f) { return info(f).name; }

Family parse_family(std::string_view name) {
    const std::string n = lower_case(name);
    for (const auto& i : kFamilies)
        if (i.name == n) return i.family;
    if (n == "lnn" || n == "lognorm") return Family::Lognormal;
    if (n == "t" || n == "student") return Family::StudentT;
    if (n == "chi2" || n == "chisq") return Family::ChiSquared;
    if (n == "exp") return Family::Exponential;
    if (n == "norm" || n == "n") return Family::Normal;
    if (n == "unif" || n == "u") return Family::Uniform;
    throw DomainError("unknown distribution family '" + std::string(name) + "'");
}

TargetDistribution::TargetDistribution(Family family, std::vector<double> params)
    : family_(family), params_(std::move(params)) {
    if (family_ == Family::Custom)
        throw DomainError("custom distributions are built with TargetDistribution::from_quantile_table");
    validate_params();
    compute_support();
    compute_moments();
}

TargetDistribution TargetDistribution::from_quantile_table(std::vector<QuantilePoint> table) {
    if (table.size() < 2) throw DomainError("custom quantile table needs at least two points");
    for (std::size_t i = 0; i < table.size(); ++i) {
        const auto& q = table[i];
        if (!(q.p > 0.0 && q.p < 1.0) || !std::isfinite(q.x))
            throw DomainError("custom quantile table: p must lie in (0, 1) and x must be finite");
        if (i > 0 && !(q.p > table[i - 1].p && q.x > table[i - 1].x))
            throw DomainError("custom quantile table: p and x must be strictly increasing");
    }
    TargetDistribution d;
    d.family_ = Family::Custom;
    d.table_ = std::move(table);

    // Fritsch-Carlson monotone slopes.
    const std::size_t n = d.table_.size();
    std::vector<double> secant(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i)
        secant[i] = (d.table_[i + 1].x - d.table_[i].x) / (d.table_[i + 1].p - d.table_[i].p);
    d.slopes_.assign(n, 0.0);
    d.slopes_[0] = secant[0];
    d.slopes_[n - 1] = secant[n - 2];
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double h0 = d.table_[i].p - d.table_[i - 1].p;
        const double h1 = d.table_[i + 1].p - d.table_[i].p;
        const double w0 = 2.0 * h1 + h0;
        const double w1 = h1 + 2.0 * h0;
        d.slopes_[i] = (w0 + w1) / (w0 / secant[i - 1] + w1 / secant[i]);
    }
    d.compute_support();
    d.compute_moments();
    return d;
}

void TargetDistribution::validate_params() const {
    const auto& fi = info(family_);
    if (params_.size() != fi.arity) {
        std::ostringstream os;
        os << fi.name << " expects " << fi.arity << " parameter(s), got " << params_.size();
        throw DomainError(os.str());
    }
    for (double v : params_)
        if (!std::isfinite(v)) throw DomainError(std::string(fi.name) + ": parameters must be finite");
    auto positive = [&](std::size_t i, const char* what) {
        if (!(params_[i] > 0.0)) throw DomainError(std::string(fi.name) + ": " + what + " must be > 0");
    };
    switch (family_) {
        case Family::Normal:
        case Family::Lognormal:
        case Family::Gumbel:
        case Family::Logistic: positive(1, "scale parameter"); break;
        case Family::Gamma:
        case Family::Beta:
        case Family::Weibull:
        case Family::F:
            positive(0, "first parameter");
            positive(1, "second parameter");
            break;
        case Family::Uniform:
            if (!(params_[1] > params_[0])) throw DomainError("uniform: upper must exceed lower");
            break;
        case Family::StudentT:
        case Family::ChiSquared:
        case Family::Rayleigh:
        case Family::Exponential: positive(0, "parameter"); break;
        case Family::Custom: break;
    }
    if (family_ == Family::StudentT && !(params_[0] > 2.0))
        throw UnsupportedMomentError("studentt: nu must exceed 2 for a finite variance");
    if (family_ == Family::F && !(params_[1] > 4.0))
        throw UnsupportedMomentError("f: d2 must exceed 4 for a finite variance");
}

void TargetDistribution::compute_support() {
    constexpr double inf = std::numeric_limits<double>::infinity();
    switch (family_) {
        case Family::Normal:
        case Family::Gumbel:
        case Family::Logistic:
        case Family::StudentT: support_ = {-inf, inf}; break;
        case Family::Lognormal:
        case Family::Gamma:
        case Family::Weibull:
        case Family::ChiSquared:
        case Family::Rayleigh:
        case Family::Exponential:
        case Family::F: support_ = {0.0, inf}; break;
        case Family::Beta: support_ = {0.0, 1.0}; break;
        case Family::Uniform: support_ = {params_[0], params_[1]}; break;
        case Family::Custom: support_ = {table_.front().x, table_.back().x}; break;
    }
}

void TargetDistribution::compute_moments() {
    const double a = params_.empty() ? 0.0 : params_[0];
    const double b = params_.size() > 1 ? params_[1] : 0.0;
    switch (family_) {
        case Family::Normal:
            mean_ = a;
            stddev_ = b;
            break;
        case Family::Lognormal:
            mean_ = std::exp(a + 0.5 * b * b);
            stddev_ = mean_ * std::sqrt(std::expm1(b * b));
            break;
        case Family::Gamma:
            mean_ = a * b;
            stddev_ = std::sqrt(a) * b;
            break;
        case Family::Beta:
            mean_ = a / (a + b);
            stddev_ = std::sqrt(a * b / ((a + b) * (a + b) * (a + b + 1.0)));
            break;
        case Family::Weibull: {
            const double g1 = std::tgamma(1.0 + 1.0 / b);
            const double g2 = std::tgamma(1.0 + 2.0 / b);
            mean_ = a * g1;
            stddev_ = a * std::sqrt(g2 - g1 * g1);
            break;
        }
        case Family::Uniform:
            mean_ = 0.5 * (a + b);
            stddev_ = (b - a) / std::sqrt(12.0);
            break;
        case Family::Gumbel:
            mean_ = a + b * kEulerGamma;
            stddev_ = b * std::numbers::pi / std::sqrt(6.0);
            break;
        case Family::Logistic:
            mean_ = a;
            stddev_ = b * std::numbers::pi / std::sqrt(3.0);
            break;
        case Family::StudentT:
            mean_ = 0.0;
            stddev_ = std::sqrt(a / (a - 2.0));
            break;
        case Family::ChiSquared:
            mean_ = a;
            stddev_ = std::sqrt(2.0 * a);
            break;
        case Family::Rayleigh:
            mean_ = a * std::sqrt(0.5 * std::numbers::pi);
            stddev_ = a * std::sqrt(0.5 * (4.0 - std::numbers::pi));
            break;
        case Family::Exponential:
            mean_ = 1.0 / a;
            stddev_ = 1.0 / a;
            break;
        case Family::F:
            mean_ = b / (b - 2.0);
            stddev_ = std::sqrt(2.0 * b * b * (a + b - 2.0) / (a * (b - 2.0) * (b - 2.0) * (b - 4.0)));
            break;
        case Family::Custom: {
            // E[X^j] = integral of Q(Phi(t))^j phi(t) dt over the truncated normal window.
            const QuadratureSpec spec;
            const auto m = integrate_many(
                2,
                [this](double t, std::span<double> out) {
                    const double x = custom_quantile(normal_cdf(t));
                    const double w = normal_pdf(t);
                    out[0] = x * w;
                    out[1] = x * x * w;
                },
                -spec.normal_truncation, spec.normal_truncation, spec);
            mean_ = m[0];
            stddev_ = std::sqrt(std::max(0.0, m[1] - m[0] * m[0]));
            break;
        }
    }
    if (!std::isfinite(mean_) || !std::isfinite(stddev_))
        throw UnsupportedMomentError(std::string(family_name(family_)) + ": moments are not finite");
    if (!(stddev_ > 0.0)) throw DegenerateError(std::string(family_name(family_)) + ": standard deviation is zero");
}

double TargetDistribution::custom_quantile(double p) const {
    if (p <= table_.front().p) return table_.front().x;
    if (p >= table_.back().p) return table_.back().x;
    const auto it = std::upper_bound(table_.begin(), table_.end(), p,
                                     [](double v, const QuantilePoint& q) { return v < q.p; });
    const std::size_t i = static_cast<std::size_t>(it - table_.begin()) - 1;
    const double h = table_[i + 1].p - table_[i].p;
    const double t = (p - table_[i].p) / h;
    const double t2 = t * t;
    const double t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * table_[i].x + (t3 - 2 * t2 + t) * h * slopes_[i] +
           (-2 * t3 + 3 * t2) * table_[i + 1].x + (t3 - t2) * h * slopes_[i + 1];
}

double TargetDistribution::custom_quantile_slope(double p) const {
    if (p < table_.front().p || p > table_.back().p) return 0.0;
    auto it = std::upper_bound(table_.begin(), table_.end(), p,
                               [](double v, const QuantilePoint& q) { return v < q.p; });
    if (it == table_.end()) --it;
    const std::size_t i = static_cast<std::size_t>(it - table_.begin()) - 1;
    const double h = table_[i + 1].p - table_[i].p;
    const double t = (p - table_[i].p) / h;
    const double t2 = t * t;
    return ((6 * t2 - 6 * t) * table_[i].x + (-6 * t2 + 6 * t) * table_[i + 1].x) / h +
           (3 * t2 - 4 * t + 1) * slopes_[i] + (3 * t2 - 2 * t) * slopes_[i + 1];
}

double TargetDistribution::cdf(double x) const {
    if (std::isnan(x)) throw DomainError("cdf: x is NaN");
    if (x <= support_.lower) return 0.0;
    if (x >= support_.upper) return 1.0;
    const double a = params_.empty() ? 0.0 : params_[0];
    const double b = params_.size() > 1 ? params_[1] : 0.0;
    switch (family_) {
        case Family::Normal: return normal_cdf((x - a) / b);
        case Family::Lognormal: return normal_cdf((std::log(x) - a) / b);
        case Family::Gamma: return reg_inc_gamma(a, x / b);
        case Family::Beta: return reg_inc_beta(a, b, x);
        case Family::Weibull: return -std::expm1(-std::pow(x / a, b));
        case Family::Uniform: return (x - a) / (b - a);
        case Family::Gumbel: return std::exp(-std::exp(-(x - a) / b));
        case Family::Logistic: return 1.0 / (1.0 + std::exp(-(x - a) / b));
        case Family::StudentT: {
            const double tail = 0.5 * reg_inc_beta(0.5 * a, 0.5, a / (a + x * x));
            return x < 0.0 ? tail : 1.0 - tail;
        }
        case Family::ChiSquared: return reg_inc_gamma(0.5 * a, 0.5 * x);
        case Family::Rayleigh: return -std::expm1(-0.5 * (x / a) * (x / a));
        case Family::Exponential: return -std::expm1(-a * x);
        case Family::F: return reg_inc_beta(0.5 * a, 0.5 * b, a * x / (a * x + b));
        case Family::Custom: {
            if (x <= table_.front().x) return 0.0;
            const double p = find_root_monotone([&](double q) { return custom_quantile(q) - x; }, table_.front().p,
                                                table_.back().p, std::numeric_limits<double>::min());
            return p;
        }
    }
    return 0.0;
}

double TargetDistribution::quantile(double p) const {
    if (!(p > 0.0 && p < 1.0)) {
        std::ostringstream os;
        os << family_name(family_) << " quantile: p = " << p << " is outside (0, 1)";
        throw DomainError(os.str());
    }
    const double a = params_.empty() ? 0.0 : params_[0];
    const double b = params_.size() > 1 ? params_[1] : 0.0;
    switch (family_) {
        case Family::Normal: return a + b * normal_quantile(p);
        case Family::Lognormal: return std::exp(a + b * normal_quantile(p));
        case Family::Weibull: return a * std::pow(-std::log1p(-p), 1.0 / b);
        case Family::Uniform: return a + p * (b - a);
        case Family::Gumbel: return a - b * std::log(-std::log(p));
        case Family::Logistic: return a + b * (std::log(p) - std::log1p(-p));
        case Family::Rayleigh: return a * std::sqrt(-2.0 * std::log1p(-p));
        case Family::Exponential: return -std::log1p(-p) / a;
        case Family::Custom: return custom_quantile(p);
        case Family::Gamma:
        case Family::Beta:
        case Family::StudentT:
        case Family::ChiSquared:
        case Family::F: return numeric_quantile([this](double x) { return cdf(x); }, support_, p);
    }
    return 0.0;
}

double TargetDistribution::pdf(double x) const {
    if (std::isnan(x)) throw DomainError("pdf: x is NaN");
    if (x < support_.lower || x > support_.upper) return 0.0;
    const double a = params_.empty() ? 0.0 : params_[0];
    const double b = params_.size() > 1 ? params_[1] : 0.0;
    switch (family_) {
        case Family::Normal: return normal_pdf((x - a) / b) / b;
        case Family::Lognormal: return x > 0.0 ? normal_pdf((std::log(x) - a) / b) / (b * x) : 0.0;
        case Family::Gamma: return x > 0.0 ? boost::math::gamma_p_derivative(a, x / b) / b : (a == 1.0 ? 1.0 / b : 0.0);
        case Family::Beta:
            if (x <= 0.0 || x >= 1.0) return 0.0;
            return boost::math::ibeta_derivative(a, b, x);
        case Family::Weibull: {
            if (x < 0.0) return 0.0;
            const double z = x / a;
            return b / a * std::pow(z, b - 1.0) * std::exp(-std::pow(z, b));
        }
        case Family::Uniform: return 1.0 / (b - a);
        case Family::Gumbel: {
            const double z = (x - a) / b;
            return std::exp(-(z + std::exp(-z))) / b;
        }
        case Family::Logistic: {
            const double e = std::exp(-std::abs(x - a) / b);
            return e / (b * (1.0 + e) * (1.0 + e));
        }
        case Family::StudentT:
            return std::exp(std::lgamma(0.5 * (a + 1.0)) - std::lgamma(0.5 * a) - 0.5 * std::log(a * std::numbers::pi) -
                            0.5 * (a + 1.0) * std::log1p(x * x / a));
        case Family::ChiSquared: return x > 0.0 ? 0.5 * boost::math::gamma_p_derivative(0.5 * a, 0.5 * x) : 0.0;
        case Family::Rayleigh: return x / (a * a) * std::exp(-0.5 * (x / a) * (x / a));
        case Family::Exponential: return a * std::exp(-a * x);
        case Family::F: {
            if (x <= 0.0) return 0.0;
            const double den = a * x + b;
            return boost::math::ibeta_derivative(0.5 * a, 0.5 * b, a * x / den) * a * b / (den * den);
        }
        case Family::Custom: {
            const double slope = custom_quantile_slope(cdf(x));
            return slope > 0.0 ? 1.0 / slope : 0.0;
        }
    }
    return 0.0;
}

std::string TargetDistribution::label() const {
    std::string out(family_name(family_));
    if (family_ == Family::Custom) return out;
    out += ':';
    for (std::size_t i = 0; i < params_.size(); ++i) {
        if (i) out += ',';
        out += format_double(params_[i]);
    }
    return out;
}

double cdf(const TargetDistribution& d, double x) { return d.cdf(x); }
double quantile(const TargetDistribution& d, double p) { return d.quantile(p); }
Moments moments(const TargetDistribution& d) { return {d.mean(), d.stddev()}; }

double numeric_quantile(const ScalarFunction& cdf, Support support, double p) {
    if (!(p > 0.0 && p < 1.0)) {
        std::ostringstream os;
        os << "numeric_quantile: p = " << p << " is outside (0, 1)";
        throw DomainError(os.str());
    }
    if (!(support.lower < support.upper)) throw DomainError("numeric_quantile: empty support");
    double lo;
    double hi;
    if (std::isfinite(support.lower) && std::isfinite(support.upper)) {
        lo = support.lower;
        hi = support.upper;
    } else if (std::isfinite(support.lower)) {
        lo = support.lower;
        double step = std::max(1.0, std::abs(lo));
        hi = lo + step;
        for (int i = 0; cdf(hi) < p; ++i) {
            if (i > 2000) throw DomainError("numeric_quantile: could not bracket the upper end");
            lo = hi;
            step *= 2.0;
            hi = lo + step;
        }
    } else if (std::isfinite(support.upper)) {
        hi = support.upper;
        double step = std::max(1.0, std::abs(hi));
        lo = hi - step;
        for (int i = 0; cdf(lo) > p; ++i) {
            if (i > 2000) throw DomainError("numeric_quantile: could not bracket the lower end");
            hi = lo;
            step *= 2.0;
            lo = hi - step;
        }
    } else {
        lo = -1.0;
        hi = 1.0;
        for (int i = 0; cdf(lo) > p; ++i) {
            if (i > 2000) throw DomainError("numeric_quantile: could not bracket the lower end");
            hi = std::min(hi, lo);
            lo *= 2.0;
        }
        for (int i = 0; cdf(hi) < p; ++i) {
            if (i > 2000) throw DomainError("numeric_quantile: could not bracket the upper end");
            lo = std::max(lo, hi);
            hi *= 2.0;
        }
    }
    // Run to the limit of double resolution; callers use these quantiles inside
    // ill-conditioned solves.
    return find_root_monotone([&](double x) { return cdf(x) - p; }, lo, hi, std::numeric_limits<double>::min());
}

TargetDistribution parse_distribution(std::string_view text) {
    const auto colon = text.find(':');
    const Family family = parse_family(text.substr(0, colon));
    std::vector<double> params;
    if (colon != std::string_view::npos) {
        std::string_view rest = text.substr(colon + 1);
        while (!rest.empty()) {
            const auto comma = rest.find(',');
            std::string item(rest.substr(0, comma));
            std::size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(item, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used == 0 || used != item.size())
                throw DomainError("distribution '" + std::string(text) + "': bad parameter '" + item + "'");
            params.push_back(v);
            if (comma == std::string_view::npos) break;
            rest = rest.substr(comma + 1);
        }
    }
    return TargetDistribution(family, std::move(params));
}

}  // namespace pnt
