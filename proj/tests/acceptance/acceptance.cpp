// Executable acceptance criteria. Each criterion prints one PASS/FAIL line followed by
// indented detail lines; the exit status is nonzero when any selected criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "oracles.hpp"
#include "pnt/correlation.hpp"
#include "pnt/diagnostics.hpp"
#include "pnt/errors.hpp"
#include "pnt/fit_percentile.hpp"
#include "pnt/fit_pwm.hpp"
#include "pnt/sampler.hpp"
#include "reference_models.hpp"

using pnt::Family;
using pnt::Matrix;
using pnt::PolynomialModel;
using pnt::TargetDistribution;

namespace {

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

// Collects sub-checks and prints the single verdict line for a criterion.
class Verdict {
public:
    explicit Verdict(int id) : id_(id) {}

    void check(bool ok, const std::string& detail) {
        ok_ = ok_ && ok;
        std::printf("    %s %s\n", ok ? "ok  " : "FAIL", detail.c_str());
    }
    void info(const std::string& detail) { std::printf("    info %s\n", detail.c_str()); }

    bool finish(const std::string& summary) const {
        std::printf("%s criterion %d: %s\n", ok_ ? "PASS" : "FAIL", id_, summary.c_str());
        std::fflush(stdout);
        return ok_;
    }

private:
    int id_;
    bool ok_ = true;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

pnt::NodePlan explicit_plan(std::vector<double> nodes) {
    pnt::NodePlan plan;
    plan.explicit_nodes = std::move(nodes);
    return plan;
}

double horner(const std::vector<double>& b, double x) {
    double s = 0.0;
    for (std::size_t k = b.size(); k-- > 0;) s = s * x + b[k];
    return s;
}

std::vector<double> damped_coeffs(pnt::oracle::SplitMix& rng, int degree) {
    std::vector<double> a(static_cast<std::size_t>(degree) + 1);
    double fact = 1.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (k > 0) fact *= static_cast<double>(k);
        a[k] = rng.uniform(-1, 1) / fact;
    }
    return a;
}

// Exact lognormal relation: rho_x = (e^rho_z - 1) / (e - 1).
double lognormal_rho_z(double rho_x) { return std::log1p(rho_x * (std::exp(1.0) - 1.0)); }

bool criterion_1() {
    Verdict v(1);
    const Stopwatch clock;
    const auto& ref = pnt::reference::kPwmDeterminants;
    for (int n = 1; n <= 12; ++n) {
        const double det = pnt::normal_pwm_matrix(n).det;
        const double expect = ref[static_cast<std::size_t>(n - 1)];
        if (n <= 9) {
            const double rel = std::abs(det - expect) / expect;
            v.check(rel <= 1e-3, fmt("n=%2d det=%.5e published=%.4e rel=%.2e (<= 1e-3)", n, det, expect, rel));
        } else {
            const double ratio = det / expect;
            v.check(ratio >= 0.5 && ratio <= 2.0,
                    fmt("n=%2d det=%.5e published=%.4e ratio=%.4f (within 2x)", n, det, expect, ratio));
        }
    }
    const double t = clock.seconds();
    v.check(t < 10.0, fmt("runtime %.2f s (< 10 s)", t));
    return v.finish("normal PWM matrix determinants n = 1..12");
}

bool criterion_2() {
    Verdict v(2);
    const Stopwatch clock;
    const TargetDistribution d(Family::Beta, {2, 2});
    const auto fit = pnt::fit_pwm(pnt::pwm_from_distribution(d, 11), pnt::normal_pwm_matrix(11));
    double worst = 0.0;
    for (int k = 0; k <= 11; ++k)
        worst = std::max(worst, std::abs(fit.model.coeff(k) - pnt::reference::kBeta22Pwm11[static_cast<std::size_t>(k)]));
    v.check(worst <= 1e-4, fmt("max |a_k - published| = %.3e (<= 1e-4)", worst));
    const auto r = pnt::epsilon_report(fit.model, d, {0.001, 0.999});
    v.check(r.eps_max <= 0.15, fmt("eps_max = %.4f %% (<= 0.15 %%; published 0.095 %%)", r.eps_max));
    v.check(r.eps_avg <= 1e-3, fmt("eps_avg = %.3e %% (<= 1e-3 %%; published 4.1e-4 %%)", r.eps_avg));
    const auto pub = pnt::epsilon_report(PolynomialModel(pnt::reference::kBeta22Pwm11), d, {0.001, 0.999});
    v.info(fmt("published coefficients evaluated here: eps_max = %.4f %%, eps_avg = %.3e %%", pub.eps_max, pub.eps_avg));
    const double t = clock.seconds();
    v.check(t < 30.0, fmt("runtime %.2f s (< 30 s)", t));
    return v.finish("Beta(2,2) PWM degree-11 fit");
}

bool criterion_3() {
    Verdict v(3);
    const TargetDistribution d(Family::Lognormal, {0, 1});
    const auto fit = pnt::fit_percentile(d, 11, explicit_plan(pnt::even_nodes(0.001, 0.999, 17)));
    double worst = 0.0;
    double worst_series = 0.0;
    double fact = 1.0;
    for (int k = 0; k <= 11; ++k) {
        if (k > 0) fact *= k;
        worst = std::max(worst,
                         std::abs(fit.model.coeff(k) - pnt::reference::kLognormalPct11[static_cast<std::size_t>(k)]));
        worst_series = std::max(worst_series, std::abs(fit.model.coeff(k) - 1.0 / fact));
    }
    v.check(worst <= 1e-3, fmt("max |a_k - published| = %.3e (<= 1e-3)", worst));
    v.info(fmt("max |a_k - 1/k!| = %.3e", worst_series));
    const auto r = pnt::epsilon_report(fit.model, d, {0.001, 0.999});
    v.check(r.eps_max <= 0.1, fmt("eps_max = %.4f %% (<= 0.1 %%; published 0.087 %%)", r.eps_max));
    return v.finish("Lognormal(0,1) percentile degree-11 fit on 17 nodes");
}

bool criterion_4() {
    Verdict v(4);
    const PolynomialModel published(pnt::reference::kLognormalPct11);
    const auto fitted = pnt::fit_percentile(TargetDistribution(Family::Lognormal, {0, 1}), 11,
                                            explicit_plan(pnt::even_nodes(0.001, 0.999, 17)))
                            .model;
    const auto rp_pub = pnt::build_rho_polynomial(published, published);
    const auto rp_fit = pnt::build_rho_polynomial(fitted, fitted);
    for (const auto& row : pnt::reference::kLognormalRhoTable) {
        const double exact = lognormal_rho_z(row.rho_x);
        const double a = pnt::solve_rho_z(rp_pub, row.rho_x);
        const double b = pnt::solve_rho_z(rp_fit, row.rho_x);
        v.check(std::abs(a - exact) <= 5e-3 && std::abs(b - exact) <= 5e-3,
                fmt("rho_x=%+.1f exact=%+.4f published-model=%+.4f fitted-model=%+.4f reference=%+.3f", row.rho_x, exact,
                    a, b, row.rho_z));
    }
    return v.finish("rho_z for the lognormal pair within 5e-3 of the exact relation");
}

bool criterion_5() {
    Verdict v(5);
    const Stopwatch clock;
    pnt::oracle::SplitMix rng(5);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const auto a1 = damped_coeffs(rng, 19);
        const auto a2 = damped_coeffs(rng, 19);
        const auto rp = pnt::build_rho_polynomial(PolynomialModel(a1), PolynomialModel(a2));
        const auto expect = pnt::oracle::closed_form_b(a1, a2);
        for (std::size_t i = 0; i < expect.size(); ++i)
            worst = std::max(worst, std::abs(rp.b[i] - expect[i]) / std::abs(expect[i]));
    }
    v.check(worst <= 1e-10, fmt("100 degree-19 pairs, max relative |b_i - closed form| = %.3e (<= 1e-10)", worst));
    const double t = clock.seconds();
    v.check(t < 5.0, fmt("runtime %.2f s (< 5 s)", t));
    return v.finish("general b_i equal the closed forms");
}

bool criterion_6() {
    Verdict v(6);
    pnt::oracle::SplitMix rng(6);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> a1(2 + rng.next() % 5);
        std::vector<double> a2(2 + rng.next() % 5);
        for (double& x : a1) x = rng.uniform(-1, 1);
        for (double& x : a2) x = rng.uniform(-1, 1);
        const auto rp = pnt::build_rho_polynomial(PolynomialModel(a1), PolynomialModel(a2));
        for (double rho : {-0.9, -0.5, 0.0, 0.5, 0.9})
            worst = std::max(worst, std::abs(horner(rp.b, rho) - pnt::oracle::bivariate_expectation(a1, a2, rho)));
    }
    v.check(worst <= 1e-8, fmt("20 pairs x 5 rho_z, max |sum b_i rho^i - quadrature| = %.3e (<= 1e-8)", worst));
    return v.finish("product moment polynomial equals 2D Gauss-Hermite quadrature");
}

bool criterion_7() {
    Verdict v(7);
    const Stopwatch clock;
    const Matrix rx{{1.0, 0.9, 0.5}, {0.9, 1.0, 0.3}, {0.5, 0.3, 1.0}};
    const auto vm = pnt::make_vector_model({PolynomialModel::affine(0, 1), PolynomialModel(pnt::reference::kBeta22Pwm11),
                                            PolynomialModel(pnt::reference::kLognormalPct11)},
                                           rx);
    const std::pair<int, int> pairs[] = {{0, 1}, {0, 2}, {1, 2}};
    const double rz_expect[] = {0.907, 0.655, 0.400};
    for (int k = 0; k < 3; ++k) {
        const auto [i, j] = pairs[k];
        const double rz = vm.rz()(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
        v.check(std::abs(rz - rz_expect[k]) <= 5e-3, fmt("Rz(%d,%d) = %.4f published %.3f (within 5e-3)", i + 1, j + 1, rz, rz_expect[k]));
    }
    const auto x = pnt::generate(vm, 1000000, {20240607, 0}, 0);
    const auto r = pnt::sample_correlation(x);
    for (const auto& [i, j] : pairs) {
        const auto ui = static_cast<std::size_t>(i);
        const auto uj = static_cast<std::size_t>(j);
        v.check(std::abs(r(ui, uj) - rx(ui, uj)) <= 0.01,
                fmt("sample Rx(%d,%d) = %.4f target %.1f (within 0.01)", i + 1, j + 1, r(ui, uj), rx(ui, uj)));
    }
    const double t = clock.seconds();
    v.check(t < 60.0, fmt("runtime %.2f s (< 60 s)", t));
    return v.finish("trivariate Normal/Beta/Lognormal generation, 1e6 vectors");
}

struct SweepRow {
    std::string name;
    Family family;
    std::vector<std::vector<double>> params;
    double alpha;
    double published_percent;
    bool scored;  // unscored rows are reported for information only
};

std::vector<std::vector<double>> corners(double a0, double a1, double b0, double b1) {
    std::vector<std::vector<double>> g;
    for (double a : {a0, 0.5 * (a0 + a1), a1})
        for (double b : {b0, 0.5 * (b0 + b1), b1}) g.push_back({a, b});
    return g;
}

std::vector<SweepRow> sweep_rows() {
    return {
        {"uniform", Family::Uniform, {{0, 1}}, 1e-3, 0.0035, true},
        {"gumbel", Family::Gumbel, {{0, 1}}, 1e-4, 0.013, true},
        {"logistic", Family::Logistic, {{0, 1}}, 1e-4, 6.6e-5, true},
        {"rayleigh", Family::Rayleigh, {{1}}, 1e-4, 0.0063, true},
        {"exponential", Family::Exponential, {{1}}, 1e-4, 0.95, true},
        {"gamma", Family::Gamma, corners(1, 100, 1, 100), 1e-4, 0.92, true},
        {"beta_2_20", Family::Beta, corners(2, 20, 2, 20), 1e-4, 2.3e-4, true},
        {"beta_1_2", Family::Beta, corners(1, 2, 1, 2), 1e-3, 6e-6, true},
        {"weibull", Family::Weibull, corners(1, 100, 1, 100), 1e-4, 0.92, true},
        {"lognormal", Family::Lognormal, corners(0.01, 200, 0.01, 4), 1e-4, 0.060, false},
        {"f", Family::F, corners(4, 100, 4, 100), 1e-4, 0.090, true},
        {"studentt", Family::StudentT, {{1}, {50.5}, {100}}, 1e-4, 0.064, true},
        {"chisquared", Family::ChiSquared, {{2}, {51}, {100}}, 1e-4, 0.94, true},
    };
}

bool criterion_8(const std::string& only_row) {
    Verdict v(8);
    bool any = false;
    for (const auto& row : sweep_rows()) {
        if (!only_row.empty() && row.name != only_row) continue;
        any = true;
        const double bound = 2.0 * row.published_percent;
        for (const auto& p : row.params) {
            std::string label = row.name;
            try {
                const TargetDistribution d(row.family, p);
                label = d.label();
                pnt::NodePlan plan;
                plan.alpha = row.alpha;
                const auto fit = pnt::fit_percentile(d, 19, plan);
                const double eps = pnt::epsilon_report(fit.model, d, {row.alpha, 1.0 - row.alpha}).eps_max;
                const auto line = fmt("%-10s %-24s alpha=%.0e eps_max=%.3e %% bound %.3e %%", row.name.c_str(),
                                      label.c_str(), row.alpha, eps, bound);
                if (row.scored)
                    v.check(eps <= bound, line);
                else
                    v.info(line + " (parameterization differs; not scored)");
            } catch (const pnt::UnsupportedMomentError& e) {
                // Corners without a finite variance are outside the catalog.
                v.info(fmt("%-10s %-24s excluded: %s", row.name.c_str(), label.c_str(), e.what()));
            }
        }
    }
    if (!any) {
        std::fprintf(stderr, "unknown row '%s'\n", only_row.c_str());
        v.check(false, "no such row");
    }
    return v.finish(only_row.empty() ? "degree-19 percentile fits within 2x the published errors"
                                     : "degree-19 percentile fits within 2x the published errors, row " + only_row);
}

bool criterion_9() {
    Verdict v(9);
    pnt::oracle::SplitMix rng(9);

    {
        std::vector<double> x(2000);
        for (double& s : x) s = std::exp(rng.normal() * 0.4);
        const auto m5 = pnt::normal_pwm_matrix(5);
        const auto base = pnt::fit_pwm(pnt::pwm_from_sample(x, 5), m5).model;
        double worst = 0.0;
        for (int trial = 0; trial < 20; ++trial) {
            const double c = rng.uniform(0.1, 10.0);
            const double d = rng.uniform(-5.0, 5.0);
            std::vector<double> y(x.size());
            for (std::size_t i = 0; i < x.size(); ++i) y[i] = c * x[i] + d;
            const auto moved = pnt::fit_pwm(pnt::pwm_from_sample(y, 5), m5).model;
            const double scale = c * std::abs(base.coeff(1)) + std::abs(d);
            for (int k = 0; k <= 5; ++k)
                worst = std::max(worst, std::abs(moved.coeff(k) - (c * base.coeff(k) + (k == 0 ? d : 0.0))) / scale);
        }
        v.check(worst <= 1e-9, fmt("PWM affine equivariance, max scaled deviation %.2e (<= 1e-9)", worst));
    }
    {
        double worst = 0.0;
        for (const auto& d : {TargetDistribution(Family::Exponential, {1}), TargetDistribution(Family::Beta, {2, 5}),
                              TargetDistribution(Family::Gumbel, {0, 1})})
            for (int degree : {3, 7, 11}) {
                const auto nodes = pnt::even_nodes(0.01, 0.99, degree + 1);
                const auto fit = pnt::fit_percentile(d, degree, explicit_plan(nodes));
                for (double p : nodes) {
                    const double x = d.quantile(p);
                    worst = std::max(worst, std::abs(pnt::evaluate(fit.model, pnt::normal_quantile(p)) - x) / std::abs(x));
                }
            }
        v.check(worst <= 1e-9, fmt("percentile interpolation limit, max relative node miss %.2e (<= 1e-9)", worst));
    }
    {
        double worst_g0 = 0.0;
        int decreasing = 0;
        for (int trial = 0; trial < 50; ++trial) {
            auto monotone = [&](int degree) {
                std::vector<double> a(static_cast<std::size_t>(degree) + 1);
                a[0] = rng.uniform(-1, 1);
                a[1] = rng.uniform(0.5, 1.5);
                for (std::size_t k = 2; k < a.size(); ++k) a[k] = rng.uniform(-1, 1) * std::pow(0.1, static_cast<double>(k));
                if (degree >= 3) a[3] = std::abs(a[3]);
                return PolynomialModel(a);
            };
            const auto rp = pnt::build_rho_polynomial(monotone(1 + trial % 11), monotone(1 + (trial * 5) % 11));
            worst_g0 = std::max(worst_g0, std::abs(rp.g(0.0)));
            double prev = rp.g(-1.0);
            for (int s = 1; s <= 200; ++s) {
                const double g = rp.g(-1.0 + s / 100.0);
                if (g < prev - 1e-14) ++decreasing;
                prev = g;
            }
        }
        v.check(worst_g0 <= 1e-12, fmt("g(0) = 0, max |g(0)| %.2e (<= 1e-12)", worst_g0));
        v.check(decreasing == 0, fmt("g nondecreasing on a 201-point grid, %d violations", decreasing));
    }
    {
        const auto vm = pnt::make_vector_model(
            {PolynomialModel(pnt::reference::kBeta22Pwm11), PolynomialModel(pnt::reference::kLognormalPct11),
             PolynomialModel::affine(0, 1)},
            Matrix{{1.0, 0.3, -0.2}, {0.3, 1.0, 0.4}, {-0.2, 0.4, 1.0}});
        const auto base = pnt::generate(vm, 20011, {7, 1}, 1);
        bool same = true;
        for (unsigned t : {0u, 2u, 3u, 5u}) same = same && pnt::generate(vm, 20011, {7, 1}, t) == base;
        v.check(same, "sampler output identical for 1, 2, 3, 5 and hardware threads");
    }
    {
        double worst = 0.0;
        for (int trial = 0; trial < 20; ++trial) {
            const double c = rng.uniform(-100, 100);
            const std::vector<double> x(20 + rng.next() % 500, c);
            const auto b = pnt::pwm_from_sample(x, 9);
            for (int r = 0; r <= 9; ++r)
                worst = std::max(worst, std::abs(b.beta[static_cast<std::size_t>(r)] - c / (r + 1)) / std::abs(c / (r + 1)));
        }
        v.check(worst <= 1e-12, fmt("constant sample beta_r = c/(r+1), max relative deviation %.2e (<= 1e-12)", worst));
    }
    return v.finish("property suites");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance criteria"};
    std::vector<int> selected;
    std::string row;
    app.add_option("--criterion", selected, "Criterion number(s) 1-9; all when omitted")->check(CLI::Range(1, 9));
    app.add_option("--row", row, "Restrict criterion 8 to one family row");
    CLI11_PARSE(app, argc, argv);
    if (selected.empty())
        for (int i = 1; i <= 9; ++i) selected.push_back(i);

    const std::function<bool()> criteria[] = {criterion_1, criterion_2, criterion_3,
                                              criterion_4, criterion_5, criterion_6,
                                              criterion_7, [&] { return criterion_8(row); }, criterion_9};
    bool ok = true;
    for (int id : selected) {
        try {
            ok = criteria[id - 1]() && ok;
        } catch (const std::exception& e) {
            std::printf("FAIL criterion %d: unexpected error: %s\n", id, e.what());
            ok = false;
        }
    }
    return ok ? 0 : 1;
}
