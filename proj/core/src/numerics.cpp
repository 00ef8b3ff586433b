#include "pnt/numerics.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "pnt/errors.hpp"

namespace pnt {

void QuadratureSpec::validate() const {
    if (!(abs_tol > 0.0)) throw DomainError("QuadratureSpec: abs_tol must be > 0");
    if (!(rel_tol > 0.0)) throw DomainError("QuadratureSpec: rel_tol must be > 0");
    if (!(normal_truncation >= 6.0)) throw DomainError("QuadratureSpec: normal_truncation must be >= 6");
    if (max_subdivisions < 1) throw DomainError("QuadratureSpec: max_subdivisions must be >= 1");
}

double normal_pdf(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

double normal_cdf(double z) { return 0.5 * std::erfc(-z / kSqrt2); }

namespace {

// Acklam's rational approximation for the lower half, q in (0, 0.5]; result <= 0.
double lower_quantile_seed(double q) {
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                   1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                   6.680131188771972e+01,  -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                   -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                   3.754408661907416e+00};
    if (q < 0.02425) {
        const double t = std::sqrt(-2.0 * std::log(q));
        return (((((c[0] * t + c[1]) * t + c[2]) * t + c[3]) * t + c[4]) * t + c[5]) /
               ((((d[0] * t + d[1]) * t + d[2]) * t + d[3]) * t + 1.0);
    }
    const double u = q - 0.5;
    const double r = u * u;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * u /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        std::ostringstream os;
        os << "normal_quantile: p = " << p << " is outside (0, 1)";
        throw DomainError(os.str());
    }
    if (p == 0.5) return 0.0;
    // 1 - p is exact for p >= 0.5, so the upper half maps onto the lower tail without loss.
    const bool upper = p > 0.5;
    const double q = upper ? 1.0 - p : p;
    double x = lower_quantile_seed(q);
    // Halley refinement on the lower tail, where normal_cdf keeps full relative accuracy.
    for (int iter = 0; iter < 2; ++iter) {
        const double e = normal_cdf(x) - q;
        const double u = e / normal_pdf(x);
        x -= u / (1.0 + 0.5 * x * u);
    }
    return upper ? -x : x;
}

double reg_inc_gamma(double a, double x) {
    if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("reg_inc_gamma: shape a must be finite and > 0");
    if (std::isnan(x)) throw DomainError("reg_inc_gamma: x is NaN");
    if (x <= 0.0) return 0.0;
    if (std::isinf(x)) return 1.0;
    return boost::math::gamma_p(a, x);
}

double reg_inc_beta(double a, double b, double x) {
    if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("reg_inc_beta: shape a must be finite and > 0");
    if (!(b > 0.0) || !std::isfinite(b)) throw DomainError("reg_inc_beta: shape b must be finite and > 0");
    if (std::isnan(x)) throw DomainError("reg_inc_beta: x is NaN");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    return boost::math::ibeta(a, b, x);
}

double find_root_monotone(const ScalarFunction& g, double lo, double hi, double tol) {
    if (!(lo <= hi)) throw DomainError("find_root_monotone: lo must not exceed hi");
    if (!(tol > 0.0)) throw DomainError("find_root_monotone: tol must be > 0");
    double glo = g(lo);
    double ghi = g(hi);
    if (glo == 0.0) return lo;
    if (ghi == 0.0) return hi;
    if (std::isnan(glo) || std::isnan(ghi) || (glo > 0.0) == (ghi > 0.0)) {
        std::ostringstream os;
        os << "find_root_monotone: no sign change on [" << lo << ", " << hi << "], g(lo) = " << glo
           << ", g(hi) = " << ghi;
        throw BracketError(os.str());
    }
    const bool increasing = glo < 0.0;
    // Regula falsi (Illinois variant) inside a bisection safeguard: the secant point is
    // accepted only if it shrinks the bracket at least as well as every other bisection.
    int side = 0;
    double x = 0.5 * (lo + hi);
    for (int iter = 0; iter < 400; ++iter) {
        if (hi - lo <= tol) return 0.5 * (lo + hi);
        double candidate = (lo * ghi - hi * glo) / (ghi - glo);
        const double width = hi - lo;
        if (!(candidate > lo && candidate < hi) || iter % 3 == 2) candidate = lo + 0.5 * width;
        x = candidate;
        const double gx = g(x);
        if (gx == 0.0 || std::abs(gx) <= tol) return x;
        if ((gx < 0.0) == increasing) {
            lo = x;
            glo = gx;
            if (side == -1) ghi *= 0.5;
            side = -1;
        } else {
            hi = x;
            ghi = gx;
            if (side == 1) glo *= 0.5;
            side = 1;
        }
        if (lo == x && hi == x) return x;
        if (std::nextafter(lo, hi) >= hi) return std::abs(glo) < std::abs(ghi) ? lo : hi;
    }
    return x;
}

double find_root_newton_safeguarded(const ScalarFunction& g, const ScalarFunction& dg, double lo, double hi,
                                    double tol) {
    if (!(lo <= hi)) throw DomainError("find_root_newton_safeguarded: lo must not exceed hi");
    if (!(tol > 0.0)) throw DomainError("find_root_newton_safeguarded: tol must be > 0");
    const double glo = g(lo);
    const double ghi = g(hi);
    if (glo == 0.0) return lo;
    if (ghi == 0.0) return hi;
    if (std::isnan(glo) || std::isnan(ghi) || (glo > 0.0) == (ghi > 0.0)) {
        std::ostringstream os;
        os << "find_root_newton_safeguarded: no sign change on [" << lo << ", " << hi << "]";
        throw BracketError(os.str());
    }
    // Orient so that g(neg) < 0 < g(pos).
    double neg = glo < 0.0 ? lo : hi;
    double pos = glo < 0.0 ? hi : lo;
    double x = 0.5 * (lo + hi);
    double step_prev = std::abs(hi - lo);
    double step = step_prev;
    double gx = g(x);
    double dx = dg(x);
    for (int iter = 0; iter < 200; ++iter) {
        const bool newton_leaves = ((x - pos) * dx - gx) * ((x - neg) * dx - gx) > 0.0;
        const bool newton_slow = std::abs(2.0 * gx) > std::abs(step_prev * dx);
        step_prev = step;
        if (newton_leaves || newton_slow || dx == 0.0) {
            step = 0.5 * (pos - neg);
            x = neg + step;
        } else {
            step = gx / dx;
            x -= step;
        }
        if (std::abs(step) <= tol) return x;
        gx = g(x);
        dx = dg(x);
        if (gx == 0.0) return x;
        if (gx < 0.0) neg = x;
        else pos = x;
        if (std::abs(pos - neg) <= tol) return 0.5 * (pos + neg);
    }
    return x;
}

}  // namespace pnt
