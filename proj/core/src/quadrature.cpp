#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>
#include <vector>

#include "pnt/errors.hpp"
#include "pnt/numerics.hpp"

namespace pnt {
namespace {

// 21-point Kronrod abscissae on [0, 1]; odd indices are the embedded 10-point Gauss nodes.
constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0};
constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077958109831074, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
constexpr std::array<double, 5> kWg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

constexpr double kEps = std::numeric_limits<double>::epsilon();

struct Segment {
    double lo;
    double hi;
    std::vector<double> value;
    std::vector<double> error;
    bool roundoff_limited = false;
};

// One Gauss-Kronrod application on [lo, hi], all components at once.
Segment apply_rule(std::size_t dim, const VectorFunction& f, double lo, double hi) {
    const double centre = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    Segment seg{lo, hi, std::vector<double>(dim, 0.0), std::vector<double>(dim, 0.0)};
    std::vector<double> absint(dim, 0.0);
    std::vector<double> fvals(21 * dim);

    auto eval = [&](double x, std::size_t slot) {
        std::span<double> out(fvals.data() + slot * dim, dim);
        f(x, out);
    };
    eval(centre, 0);
    for (std::size_t j = 0; j < 10; ++j) {
        const double dx = half * kXgk[j];
        eval(centre - dx, 1 + 2 * j);
        eval(centre + dx, 2 + 2 * j);
    }
    for (std::size_t c = 0; c < dim; ++c) {
        const double fc = fvals[c];
        double resk = kWgk[10] * fc;
        double resabs = kWgk[10] * std::abs(fc);
        double resg = 0.0;
        for (std::size_t j = 0; j < 10; ++j) {
            const double f1 = fvals[(1 + 2 * j) * dim + c];
            const double f2 = fvals[(2 + 2 * j) * dim + c];
            resk += kWgk[j] * (f1 + f2);
            resabs += kWgk[j] * (std::abs(f1) + std::abs(f2));
            if (j % 2 == 1) resg += kWg[j / 2] * (f1 + f2);
        }
        const double reskh = 0.5 * resk;
        double resasc = kWgk[10] * std::abs(fc - reskh);
        for (std::size_t j = 0; j < 10; ++j) {
            resasc += kWgk[j] * (std::abs(fvals[(1 + 2 * j) * dim + c] - reskh) +
                                 std::abs(fvals[(2 + 2 * j) * dim + c] - reskh));
        }
        resk *= half;
        resg *= half;
        resabs *= std::abs(half);
        resasc *= std::abs(half);
        double err = std::abs(resk - resg);
        if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
        seg.value[c] = resk;
        seg.error[c] = err;
        absint[c] = resabs;
    }
    // A segment is only roundoff limited when every component is.
    bool all_floor = true;
    for (std::size_t c = 0; c < dim; ++c) {
        if (seg.error[c] > 50.0 * kEps * absint[c]) all_floor = false;
    }
    seg.roundoff_limited = all_floor;
    return seg;
}

std::vector<double> adaptive(std::size_t dim, const VectorFunction& f, double lo, double hi,
                             const QuadratureSpec& spec) {
    spec.validate();
    if (dim == 0) return {};
    if (!std::isfinite(lo) || !std::isfinite(hi)) throw DomainError("integrate: limits must be finite");
    if (lo == hi) return std::vector<double>(dim, 0.0);
    double sign = 1.0;
    if (hi < lo) {
        std::swap(lo, hi);
        sign = -1.0;
    }

    std::vector<Segment> segments;
    segments.reserve(static_cast<std::size_t>(spec.max_subdivisions) * 2 + 1);
    segments.push_back(apply_rule(dim, f, lo, hi));

    auto tolerance = [&](double total) { return std::max(spec.abs_tol, spec.rel_tol * std::abs(total)); };
    auto totals = [&](std::vector<double>& value, std::vector<double>& error) {
        value.assign(dim, 0.0);
        error.assign(dim, 0.0);
        for (const auto& s : segments) {
            if (s.value.empty()) continue;
            for (std::size_t c = 0; c < dim; ++c) {
                value[c] += s.value[c];
                error[c] += s.error[c];
            }
        }
    };
    auto priority = [&](const Segment& s, const std::vector<double>& value) {
        double key = 0.0;
        for (std::size_t c = 0; c < dim; ++c) key = std::max(key, s.error[c] / tolerance(value[c]));
        return key;
    };

    std::vector<double> value;
    std::vector<double> error;
    totals(value, error);

    using Entry = std::pair<double, std::size_t>;
    std::priority_queue<Entry> heap;
    heap.emplace(priority(segments[0], value), 0);

    for (int split = 0;; ++split) {
        bool converged = true;
        for (std::size_t c = 0; c < dim; ++c) {
            if (error[c] > tolerance(value[c])) converged = false;
        }
        if (converged) break;
        // Drop segments that can no longer be refined.
        while (!heap.empty() && segments[heap.top().second].roundoff_limited) heap.pop();
        if (heap.empty()) break;  // remaining error is at the roundoff floor
        if (split >= spec.max_subdivisions) {
            std::size_t worst = 0;
            for (std::size_t c = 1; c < dim; ++c) {
                if (error[c] / tolerance(value[c]) > error[worst] / tolerance(value[worst])) worst = c;
            }
            std::ostringstream os;
            os << "integrate: no convergence on [" << lo << ", " << hi << "] after " << spec.max_subdivisions
               << " subdivisions (component " << worst << ", estimate " << value[worst] << ", error "
               << error[worst] << ")";
            throw IntegrationError(os.str(), sign * value[worst], error[worst]);
        }
        const std::size_t idx = heap.top().second;
        heap.pop();
        Segment parent = std::move(segments[idx]);
        const double mid = 0.5 * (parent.lo + parent.hi);
        if (!(mid > parent.lo && mid < parent.hi) ||
            (parent.hi - parent.lo) < 1000.0 * kEps * std::max(std::abs(mid), 1e-300)) {
            parent.roundoff_limited = true;
            segments[idx] = std::move(parent);
            continue;
        }
        Segment left = apply_rule(dim, f, parent.lo, mid);
        Segment right = apply_rule(dim, f, mid, parent.hi);
        for (std::size_t c = 0; c < dim; ++c) {
            value[c] += left.value[c] + right.value[c] - parent.value[c];
            error[c] += left.error[c] + right.error[c] - parent.error[c];
        }
        segments[idx] = std::move(left);
        segments.push_back(std::move(right));
        heap.emplace(priority(segments[idx], value), idx);
        heap.emplace(priority(segments.back(), value), segments.size() - 1);
        // Running sums drift; refresh them periodically.
        if (split % 64 == 63) totals(value, error);
    }
    totals(value, error);
    for (auto& v : value) v *= sign;
    return value;
}

}  // namespace

double integrate(const ScalarFunction& f, double lo, double hi, const QuadratureSpec& spec) {
    const VectorFunction wrapped = [&f](double x, std::span<double> out) { out[0] = f(x); };
    return adaptive(1, wrapped, lo, hi, spec)[0];
}

std::vector<double> integrate_many(std::size_t dim, const VectorFunction& f, double lo, double hi,
                                   const QuadratureSpec& spec) {
    return adaptive(dim, f, lo, hi, spec);
}

}  // namespace pnt
