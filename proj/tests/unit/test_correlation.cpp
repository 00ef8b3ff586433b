#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "pnt/correlation.hpp"
#include "pnt/errors.hpp"
#include "reference_models.hpp"

using doctest::Approx;
using pnt::Matrix;
using pnt::PolynomialModel;

namespace {

std::vector<double> damped_coeffs(pnt::oracle::SplitMix& rng, int degree) {
    std::vector<double> a(static_cast<std::size_t>(degree) + 1);
    double fact = 1.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (k > 0) fact *= static_cast<double>(k);
        a[k] = rng.uniform(-1, 1) / fact;
    }
    return a;
}

// Monotone random model: positive linear term dominating small higher terms.
PolynomialModel monotone_model(pnt::oracle::SplitMix& rng, int degree) {
    std::vector<double> a(static_cast<std::size_t>(degree) + 1);
    a[0] = rng.uniform(-1, 1);
    a[1] = rng.uniform(0.5, 1.5);
    for (std::size_t k = 2; k < a.size(); ++k) a[k] = rng.uniform(-1, 1) * std::pow(0.1, static_cast<double>(k));
    if (degree >= 3) a[3] = std::abs(a[3]);
    return PolynomialModel(a);
}

const PolynomialModel kLognormal(pnt::reference::kLognormalPct11);
const PolynomialModel kBeta(pnt::reference::kBeta22Pwm11);

}  // namespace

TEST_CASE("bivariate_normal_moment small cases") {
    CHECK(pnt::bivariate_normal_moment(1, 1) == std::vector<double>{0.0, 1.0});
    CHECK(pnt::bivariate_normal_moment(2, 2) == std::vector<double>{1.0, 0.0, 2.0});
    CHECK(pnt::bivariate_normal_moment(2, 1) == std::vector<double>{0.0, 0.0});
    CHECK(pnt::bivariate_normal_moment(0, 4) == std::vector<double>{3.0});
    CHECK(pnt::bivariate_normal_moment(3, 3) == std::vector<double>{0.0, 9.0, 0.0, 6.0});
    CHECK_THROWS_AS(pnt::bivariate_normal_moment(20, 1), pnt::DomainError);
    CHECK_THROWS_AS(pnt::bivariate_normal_moment(-1, 1), pnt::DomainError);
}

TEST_CASE("bivariate_normal_moment against Gauss-Hermite quadrature") {
    for (int i = 0; i <= 8; ++i) {
        for (int j = 0; j <= 8; ++j) {
            std::vector<double> e1(static_cast<std::size_t>(i) + 1, 0.0);
            std::vector<double> e2(static_cast<std::size_t>(j) + 1, 0.0);
            e1.back() = 1.0;
            e2.back() = 1.0;
            const auto c = pnt::bivariate_normal_moment(i, j);
            for (double rho : {-0.8, -0.3, 0.0, 0.45, 0.9}) {
                double poly = 0.0;
                for (std::size_t k = c.size(); k-- > 0;) poly = poly * rho + c[k];
                const double gh = pnt::oracle::bivariate_expectation(e1, e2, rho, 24);
                CAPTURE(i);
                CAPTURE(j);
                CAPTURE(rho);
                // Cauchy-Schwarz bound on |E[Z1^i Z2^j]| sets the scale of the oracle's roundoff.
                const double scale = std::sqrt(pnt::normal_raw_moment(2 * i) * pnt::normal_raw_moment(2 * j));
                CHECK(std::abs(poly - gh) <= 1e-12 * scale);
            }
        }
    }
}

TEST_CASE("closed-form rows are internally consistent") {
    // Weight of a_k in row i is C(k, i) (k - i - 1)!! and the prefactor is i!.
    for (const auto& row : pnt::oracle::closed_form_rows()) {
        CHECK(static_cast<double>(row.factor) == Approx(std::tgamma(row.power + 1.0)).epsilon(1e-15));
        for (const auto& [k, w] : row.weights) {
            const int d = k - row.power;
            REQUIRE(d % 2 == 0);
            double df = 1.0;
            for (int t = d - 1; t > 1; t -= 2) df *= t;
            const double binom = std::round(std::tgamma(k + 1.0) / (std::tgamma(row.power + 1.0) * std::tgamma(d + 1.0)));
            CHECK(static_cast<double>(w) == Approx(binom * df).epsilon(1e-14));
        }
    }
}

TEST_CASE("build_rho_polynomial examples") {
    const auto id = pnt::build_rho_polynomial(PolynomialModel({0.0, 1.0}), PolynomialModel({0.0, 1.0}));
    CHECK(id.b == std::vector<double>{0.0, 1.0});
    CHECK(id.degree == 1);

    std::vector<double> a19(20, 0.0);
    a19[19] = 1.0;
    const auto top = pnt::build_rho_polynomial(PolynomialModel(a19), PolynomialModel(a19));
    REQUIRE(top.b.size() == 20);
    CHECK(top.b[19] == 121645100408832000.0);

    const auto mixed = pnt::build_rho_polynomial(PolynomialModel({0.0, 1.0, 0.0, 1.0}), PolynomialModel({0.0, 1.0}));
    CHECK(mixed.b[1] == 4.0);
    CHECK(mixed.degree == 1);
}

TEST_CASE("property: general product moments equal the degree-19 closed forms") {
    pnt::oracle::SplitMix rng(19);
    for (int trial = 0; trial < 100; ++trial) {
        const auto a1 = damped_coeffs(rng, 19);
        const auto a2 = damped_coeffs(rng, 19);
        const auto rp = pnt::build_rho_polynomial(PolynomialModel(a1), PolynomialModel(a2));
        const auto expect = pnt::oracle::closed_form_b(a1, a2);
        REQUIRE(rp.b.size() == 20);
        for (std::size_t i = 0; i < 20; ++i) {
            CAPTURE(trial);
            CAPTURE(i);
            CHECK(std::abs(rp.b[i] - expect[i]) <= 1e-10 * std::abs(expect[i]));
        }
    }
}

TEST_CASE("property: product moment polynomial equals brute-force quadrature") {
    pnt::oracle::SplitMix rng(55);
    for (int trial = 0; trial < 20; ++trial) {
        const int d1 = 1 + static_cast<int>(rng.next() % 5);
        const int d2 = 1 + static_cast<int>(rng.next() % 5);
        std::vector<double> a1(static_cast<std::size_t>(d1) + 1);
        std::vector<double> a2(static_cast<std::size_t>(d2) + 1);
        for (double& v : a1) v = rng.uniform(-1, 1);
        for (double& v : a2) v = rng.uniform(-1, 1);
        const auto rp = pnt::build_rho_polynomial(PolynomialModel(a1), PolynomialModel(a2));
        for (double rho : {-0.9, -0.5, 0.0, 0.5, 0.9}) {
            double poly = 0.0;
            for (std::size_t k = rp.b.size(); k-- > 0;) poly = poly * rho + rp.b[k];
            CHECK(std::abs(poly - pnt::oracle::bivariate_expectation(a1, a2, rho)) <= 1e-8);
        }
    }
}

TEST_CASE("property: constant term is the product of means and g(0) vanishes") {
    pnt::oracle::SplitMix rng(8);
    for (int trial = 0; trial < 100; ++trial) {
        const PolynomialModel m1(damped_coeffs(rng, 1 + trial % 19));
        const PolynomialModel m2(damped_coeffs(rng, 1 + (trial * 7) % 19));
        const auto rp = pnt::build_rho_polynomial(m1, m2);
        CHECK(std::abs(rp.b[0] - rp.mu1 * rp.mu2) <= 1e-9 * std::max(std::abs(rp.mu1 * rp.mu2), 1e-300) + 1e-300);
        CHECK(std::abs(rp.g(0.0)) <= 1e-12);
    }
}

TEST_CASE("property: g is nondecreasing on [-1, 1] for monotone models") {
    pnt::oracle::SplitMix rng(4);
    std::vector<std::pair<PolynomialModel, PolynomialModel>> pairs = {
        {kLognormal, kLognormal}, {kBeta, kLognormal}, {kBeta, kBeta}, {PolynomialModel::affine(0, 1), kLognormal}};
    for (int trial = 0; trial < 30; ++trial)
        pairs.emplace_back(monotone_model(rng, 1 + trial % 11), monotone_model(rng, 1 + (trial * 5) % 11));
    for (const auto& [m1, m2] : pairs) {
        const auto rp = pnt::build_rho_polynomial(m1, m2);
        double prev = rp.g(-1.0);
        for (int i = 1; i <= 1000; ++i) {
            const double v = rp.g(-1.0 + 2.0 * i / 1000.0);
            CHECK(v >= prev - 1e-15);
            prev = v;
        }
    }
}

TEST_CASE("rho_x_bounds") {
    const auto id = pnt::build_rho_polynomial(PolynomialModel({0.0, 1.0}), PolynomialModel({0.0, 1.0}));
    auto b = pnt::rho_x_bounds(id);
    CHECK(b.lower == Approx(-1.0).epsilon(1e-15));
    CHECK(b.upper == Approx(1.0).epsilon(1e-15));

    b = pnt::rho_x_bounds(pnt::build_rho_polynomial(kLognormal, kLognormal));
    const double e = std::exp(1.0);
    CHECK(std::abs(b.lower - (1.0 / e - 1.0) / (e - 1.0)) <= 5e-3);
    CHECK(std::abs(b.upper - 1.0) <= 5e-3);

    const auto normal = PolynomialModel::affine(0.0, 1.0);
    const auto mixed = pnt::build_rho_polynomial(normal, kLognormal);
    b = pnt::rho_x_bounds(mixed);
    CHECK(std::abs(b.lower + b.upper) <= 1e-9);
    // At rho = 1 the pair is (Z, X(Z)); the bound is Cov(Z, X) / sigma_X.
    const std::vector<double> a2(pnt::reference::kLognormalPct11);
    const double cov = pnt::oracle::bivariate_expectation({0.0, 1.0}, a2, 0.999999999999, 40);
    CHECK(b.upper == Approx(cov / mixed.sigma2).epsilon(1e-8));

    CHECK_THROWS_AS(pnt::rho_x_bounds(pnt::build_rho_polynomial(PolynomialModel({3.0}), normal)), pnt::DegenerateError);
}

TEST_CASE("solve_rho_z examples") {
    const auto id = pnt::build_rho_polynomial(PolynomialModel({0.0, 1.0}), PolynomialModel({0.0, 1.0}));
    CHECK(pnt::solve_rho_z(id, 0.37) == Approx(0.37).epsilon(1e-14));
    CHECK(pnt::solve_rho_z(id, 0.0) == 0.0);
    CHECK(pnt::solve_rho_z(id, 1.0) == 1.0);

    const auto ln = pnt::build_rho_polynomial(kLognormal, kLognormal);
    for (const auto& row : pnt::reference::kLognormalRhoTable) {
        CAPTURE(row.rho_x);
        const double rz = pnt::solve_rho_z(ln, row.rho_x);
        CHECK(std::abs(rz - row.rho_z) <= 5e-3);
        // exact lognormal relation rho_x = (e^rho_z - 1) / (e - 1)
        CHECK(std::abs(rz - std::log1p(row.rho_x * (std::exp(1.0) - 1.0))) <= 5e-3);
        CHECK(rz * row.rho_x >= 0.0);
    }
}

TEST_CASE("solve_rho_z rejects infeasible targets with the bounds") {
    const auto ln = pnt::build_rho_polynomial(kLognormal, kLognormal);
    try {
        pnt::solve_rho_z(ln, -0.5);
        FAIL("expected InfeasibleCorrelationError");
    } catch (const pnt::InfeasibleCorrelationError& e) {
        CHECK(e.lower() == Approx(-0.3679).epsilon(5e-3));
        CHECK(e.upper() <= 1.0);
    }
    CHECK_THROWS_AS(pnt::solve_rho_z(ln, 1.5), pnt::InfeasibleCorrelationError);
    CHECK_THROWS_AS(pnt::solve_rho_z(ln, NAN), pnt::InfeasibleCorrelationError);
}

TEST_CASE("property: solve_rho_z round trip") {
    const std::vector<std::pair<PolynomialModel, PolynomialModel>> pairs = {
        {kLognormal, kLognormal}, {kBeta, kLognormal}, {PolynomialModel::affine(1, 2), kBeta}};
    for (const auto& [m1, m2] : pairs) {
        const auto rp = pnt::build_rho_polynomial(m1, m2);
        const auto b = pnt::rho_x_bounds(rp);
        for (int i = 0; i < 1000; ++i) {
            const double rho = b.lower + (b.upper - b.lower) * (i + 0.5) / 1000.0;
            const double rz = pnt::solve_rho_z(rp, rho);
            CHECK(std::abs(rp.g(rz) - rho) <= 1e-10);
        }
    }
}

TEST_CASE("property: scaling one marginal leaves rho_z unchanged") {
    pnt::oracle::SplitMix rng(66);
    const auto base = pnt::build_rho_polynomial(kBeta, kLognormal);
    const auto b = pnt::rho_x_bounds(base);
    for (int trial = 0; trial < 50; ++trial) {
        const double c = rng.uniform(0.01, 100.0);
        std::vector<double> scaled(kBeta.coeffs().begin(), kBeta.coeffs().end());
        for (double& v : scaled) v *= c;
        const auto rp = pnt::build_rho_polynomial(PolynomialModel(scaled), kLognormal);
        const double rho = rng.uniform(b.lower * 0.99, b.upper * 0.99);
        CHECK(std::abs(pnt::solve_rho_z(rp, rho) - pnt::solve_rho_z(base, rho)) <= 1e-10);
    }
}

TEST_CASE("target moments can replace the model moments") {
    const pnt::Moments target{std::sqrt(std::exp(1.0)), std::sqrt(std::exp(2.0) - std::exp(1.0))};
    const auto rp = pnt::build_rho_polynomial(kLognormal, kLognormal, target, target);
    CHECK(rp.mu1 == target.mean);
    CHECK(rp.sigma2 == target.stddev);
    CHECK(std::abs(pnt::solve_rho_z(rp, 0.5) - 0.620) <= 5e-3);
}

TEST_CASE("build_rz with normal marginals is the identity map") {
    const Matrix rx{{1.0, 0.3, -0.2}, {0.3, 1.0, 0.5}, {-0.2, 0.5, 1.0}};
    const std::vector<PolynomialModel> models = {PolynomialModel::affine(0, 1), PolynomialModel::affine(5, 2),
                                                 PolynomialModel::affine(-1, 0.1)};
    const auto eq = pnt::build_rz(models, rx);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) CHECK(eq.rz(i, j) == Approx(rx(i, j)).epsilon(1e-14));
    const auto l = pnt::cholesky(rx);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) CHECK(eq.l(i, j) == Approx(l(i, j)).epsilon(1e-13).scale(1.0));
    CHECK_FALSE(eq.repaired);

    const auto ident = pnt::build_rz(std::vector<PolynomialModel>{kBeta, kLognormal, PolynomialModel::affine(0, 1)},
                                     Matrix::identity(3));
    CHECK(ident.rz == Matrix::identity(3));
}

TEST_CASE("build_rz three-marginal example") {
    const Matrix rx{{1.0, 0.9, 0.5}, {0.9, 1.0, 0.3}, {0.5, 0.3, 1.0}};
    const std::vector<PolynomialModel> models = {PolynomialModel::affine(0, 1), kBeta, kLognormal};
    const auto eq = pnt::build_rz(models, rx);
    CHECK(std::abs(eq.rz(0, 1) - 0.907) <= 5e-3);
    CHECK(std::abs(eq.rz(0, 2) - 0.655) <= 5e-3);
    CHECK(std::abs(eq.rz(1, 2) - 0.400) <= 5e-3);
    const auto llt = eq.l * eq.l.transpose();
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) CHECK(std::abs(llt(i, j) - eq.rz(i, j)) <= 1e-12);

    const auto vm = pnt::make_vector_model(models, rx);
    CHECK(vm.dim() == 3);
    CHECK(vm.rz() == eq.rz);
}

TEST_CASE("build_rz errors") {
    const std::vector<PolynomialModel> ln3 = {kLognormal, kLognormal, kLognormal};
    Matrix rx{{1.0, -0.5, 0.1}, {-0.5, 1.0, 0.1}, {0.1, 0.1, 1.0}};
    try {
        pnt::build_rz(ln3, rx);
        FAIL("expected InfeasibleCorrelationError");
    } catch (const pnt::InfeasibleCorrelationError& e) {
        CHECK(std::string(e.what()).find("(0, 1)") != std::string::npos);
    }

    // Each pair is feasible and Rx is positive definite, but the mapped Rz is not.
    const double r = -0.35;
    const Matrix rx_ok{{1.0, r, r}, {r, 1.0, r}, {r, r, 1.0}};
    CHECK_THROWS_AS(pnt::build_rz(ln3, rx_ok), pnt::NotPositiveDefiniteError);
    pnt::BuildRzOptions opts;
    opts.nearest_pd = true;
    const auto repaired = pnt::build_rz(ln3, rx_ok, opts);
    CHECK(repaired.repaired);
    for (std::size_t i = 0; i < 3; ++i) CHECK(repaired.rz(i, i) == Approx(1.0).epsilon(1e-15));
    CHECK_NOTHROW(pnt::cholesky(repaired.rz));

    CHECK_THROWS_AS(pnt::build_rz(ln3, Matrix::identity(2)), pnt::DomainError);
    CHECK_THROWS_AS(pnt::build_rz(ln3, Matrix{{1, 0.2, 0}, {0.3, 1, 0}, {0, 0, 1}}), pnt::DomainError);
    CHECK_THROWS_AS(pnt::build_rz(ln3, Matrix{{2, 0, 0}, {0, 1, 0}, {0, 0, 1}}), pnt::DomainError);
    CHECK_THROWS_AS(pnt::build_rz(ln3, Matrix{{1, 0.9, -0.9}, {0.9, 1, 0.9}, {-0.9, 0.9, 1}}),
                    pnt::NotPositiveDefiniteError);
}

TEST_CASE("clip_to_positive_definite") {
    const Matrix bad{{1.0, 0.9, -0.9}, {0.9, 1.0, 0.9}, {-0.9, 0.9, 1.0}};
    const auto fixed = pnt::clip_to_positive_definite(bad, 1e-6);
    CHECK(pnt::is_symmetric(fixed, 1e-15));
    for (std::size_t i = 0; i < 3; ++i) CHECK(fixed(i, i) == Approx(1.0).epsilon(1e-15));
    CHECK_NOTHROW(pnt::cholesky(fixed));
    // a positive definite input passes through unchanged
    const Matrix good{{1.0, 0.5}, {0.5, 1.0}};
    const auto same = pnt::clip_to_positive_definite(good);
    CHECK(same(0, 1) == Approx(0.5).epsilon(1e-12));
}
