#include "pnt/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "pnt/errors.hpp"
#include "pnt/numerics.hpp"

namespace pnt {
namespace {

__extension__ typedef unsigned __int128 uint128;

uint128 factorial(int n) {
    uint128 v = 1;
    for (int k = 2; k <= n; ++k) v *= static_cast<uint128>(k);
    return v;
}

uint128 double_factorial(int n) {
    uint128 v = 1;
    for (int k = n; k > 1; k -= 2) v *= static_cast<uint128>(k);
    return v;
}

// (2s)! / 2^s = (2s-1)!! * s!, and (2s+1)! / 2^s = (2s+1)!! * s!; both exact integers.
uint128 halved_factorial(int i) {
    const int s = i / 2;
    return double_factorial(i % 2 ? i : i - 1) * factorial(s);
}

// Neumaier compensated sum of terms taken in ascending magnitude.
double compensated_sum(std::vector<double>& terms) {
    std::sort(terms.begin(), terms.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
    double sum = 0.0;
    double carry = 0.0;
    for (double t : terms) {
        const double next = sum + t;
        if (std::abs(sum) >= std::abs(t)) carry += (sum - next) + t;
        else carry += (t - next) + sum;
        sum = next;
    }
    return sum + carry;
}

double horner(std::span<const double> c, double x) {
    double acc = 0.0;
    for (std::size_t k = c.size(); k-- > 0;) acc = acc * x + c[k];
    return acc;
}

std::vector<std::vector<std::vector<double>>> build_moment_table() {
    std::vector<std::vector<std::vector<double>>> table(kMaxDegree + 1);
    for (int i = 0; i <= kMaxDegree; ++i) {
        table[static_cast<std::size_t>(i)].resize(kMaxDegree + 1);
        for (int j = 0; j <= kMaxDegree; ++j) table[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
            bivariate_normal_moment(i, j);
    }
    return table;
}

const std::vector<double>& cached_moment(int i, int j) {
    static const auto table = build_moment_table();
    return table[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
}

RhoPolynomial assemble(const PolynomialModel& m1, const PolynomialModel& m2) {
    const int n = std::max(m1.degree(), m2.degree());
    std::vector<std::vector<double>> terms(static_cast<std::size_t>(2 * n + 1));
    for (int j = 0; j <= m1.degree(); ++j) {
        const double aj = m1.coeff(j);
        if (aj == 0.0) continue;
        for (int k = j % 2; k <= m2.degree(); k += 2) {
            const double ak = m2.coeff(k);
            if (ak == 0.0) continue;
            const auto& c = cached_moment(j, k);
            for (std::size_t i = 0; i < c.size(); ++i)
                if (c[i] != 0.0) terms[i].push_back(aj * ak * c[i]);
        }
    }
    RhoPolynomial rp;
    // Only powers up to min(deg1, deg2) can be nonzero.
    rp.degree = std::min(m1.degree(), m2.degree());
    rp.b.assign(static_cast<std::size_t>(rp.degree) + 1, 0.0);
    for (std::size_t i = 0; i < rp.b.size(); ++i) rp.b[i] = compensated_sum(terms[i]);
    return rp;
}

}  // namespace

std::vector<double> bivariate_normal_moment(int i, int j) {
    if (i < 0 || j < 0 || i > kMaxDegree || j > kMaxDegree) {
        std::ostringstream os;
        os << "bivariate_normal_moment: orders (" << i << ", " << j << ") outside [0, " << kMaxDegree << "]";
        throw DomainError(os.str());
    }
    std::vector<double> coeffs(static_cast<std::size_t>(std::min(i, j)) + 1, 0.0);
    if ((i + j) % 2) return coeffs;
    const int s = i / 2;
    const int t = j / 2;
    const bool odd = i % 2 == 1;
    // even-even: (2s)!(2t)!/2^(s+t) * sum_q (2 rho)^(2q) / ((s-q)!(t-q)!(2q)!)
    // odd-odd:   rho (2s+1)!(2t+1)!/2^(s+t) * sum_q (2 rho)^(2q) / ((s-q)!(t-q)!(2q+1)!)
    const uint128 lead = halved_factorial(i) * halved_factorial(j);
    for (int q = 0; q <= std::min(s, t); ++q) {
        const int power = odd ? 2 * q + 1 : 2 * q;
        const uint128 numerator = lead << (2 * q);
        const uint128 denominator = factorial(s - q) * factorial(t - q) * factorial(power);
        coeffs[static_cast<std::size_t>(power)] = static_cast<double>(numerator / denominator);
    }
    return coeffs;
}

double RhoPolynomial::g(double rho_z) const {
    std::vector<double> c(b);
    c[0] -= mu1 * mu2;
    return horner(c, rho_z) / (sigma1 * sigma2);
}

double RhoPolynomial::g_derivative(double rho_z) const {
    double acc = 0.0;
    for (std::size_t k = b.size(); k-- > 1;) acc = acc * rho_z + static_cast<double>(k) * b[k];
    return acc / (sigma1 * sigma2);
}

RhoPolynomial build_rho_polynomial(const PolynomialModel& m1, const PolynomialModel& m2) {
    const auto mom1 = model_moments(m1);
    const auto mom2 = model_moments(m2);
    return build_rho_polynomial(m1, m2, Moments{mom1.mean, mom1.stddev}, Moments{mom2.mean, mom2.stddev});
}

RhoPolynomial build_rho_polynomial(const PolynomialModel& m1, const PolynomialModel& m2, const Moments& mom1,
                                   const Moments& mom2) {
    RhoPolynomial rp = assemble(m1, m2);
    rp.mu1 = mom1.mean;
    rp.mu2 = mom2.mean;
    rp.sigma1 = mom1.stddev;
    rp.sigma2 = mom2.stddev;
    return rp;
}

RhoBounds rho_x_bounds(const RhoPolynomial& rp) {
    if (!(rp.sigma1 * rp.sigma2 > 0.0)) throw DegenerateError("rho_x_bounds: a marginal has zero standard deviation");
    return {std::clamp(rp.g(-1.0), -1.0, 1.0), std::clamp(rp.g(1.0), -1.0, 1.0)};
}

double solve_rho_z(const RhoPolynomial& rp, double rho_x) {
    constexpr double kSlack = 1e-9;
    const auto bounds = rho_x_bounds(rp);
    if (!std::isfinite(rho_x) || rho_x < bounds.lower - kSlack || rho_x > bounds.upper + kSlack) {
        std::ostringstream os;
        os << "correlation " << rho_x << " is infeasible for these marginals; attainable range is [" << bounds.lower
           << ", " << bounds.upper << "]";
        throw InfeasibleCorrelationError(os.str(), bounds.lower, bounds.upper);
    }
    if (rho_x == 0.0) return 0.0;
    const auto target = [&](double r) { return rp.g(r) - rho_x; };
    const auto slope = [&](double r) { return rp.g_derivative(r); };
    // Only the half interval sharing rho_x's sign is admissible.
    const double lo = rho_x > 0.0 ? 0.0 : -1.0;
    const double hi = rho_x > 0.0 ? 1.0 : 0.0;
    if (rho_x > 0.0 && target(hi) <= 0.0) return 1.0;
    if (rho_x < 0.0 && target(lo) >= 0.0) return -1.0;
    return find_root_newton_safeguarded(target, slope, lo, hi, 1e-15);
}

void validate_correlation_matrix(const Matrix& rx, const char* name) {
    if (!rx.square() || rx.rows() == 0) throw DomainError(std::string(name) + " must be a non-empty square matrix");
    for (std::size_t i = 0; i < rx.rows(); ++i) {
        if (rx(i, i) != 1.0) {
            std::ostringstream os;
            os << name << "[" << i << "][" << i << "] = " << rx(i, i) << " but the diagonal must be 1";
            throw DomainError(os.str());
        }
        for (std::size_t j = 0; j < rx.cols(); ++j) {
            if (!(std::abs(rx(i, j)) <= 1.0)) {
                std::ostringstream os;
                os << name << "[" << i << "][" << j << "] = " << rx(i, j) << " is not a correlation";
                throw DomainError(os.str());
            }
            if (rx(i, j) != rx(j, i)) {
                std::ostringstream os;
                os << name << " is not symmetric at (" << i << ", " << j << ")";
                throw DomainError(os.str());
            }
        }
    }
    try {
        (void)cholesky(rx);
    } catch (const NotPositiveDefiniteError& e) {
        throw NotPositiveDefiniteError(std::string(name) + " is not positive definite: " + e.what());
    }
}

Matrix clip_to_positive_definite(const Matrix& r, double min_eigenvalue) {
    const auto n = static_cast<Eigen::Index>(r.rows());
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            m(i, j) = 0.5 * (r(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) +
                             r(static_cast<std::size_t>(j), static_cast<std::size_t>(i)));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
    Eigen::VectorXd values = eig.eigenvalues().cwiseMax(min_eigenvalue);
    Eigen::MatrixXd fixed = eig.eigenvectors() * values.asDiagonal() * eig.eigenvectors().transpose();
    Matrix out(r.rows(), r.cols());
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            out(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) =
                i == j ? 1.0 : fixed(i, j) / std::sqrt(fixed(i, i) * fixed(j, j));
    for (std::size_t i = 0; i < out.rows(); ++i)
        for (std::size_t j = 0; j < i; ++j) out(j, i) = out(i, j);
    return out;
}

EquivalentCorrelation build_rz(std::span<const PolynomialModel> models, const Matrix& rx,
                               const BuildRzOptions& options) {
    const std::size_t m = models.size();
    if (rx.rows() != m || rx.cols() != m) {
        std::ostringstream os;
        os << "build_rz: Rx is " << rx.rows() << "x" << rx.cols() << " but there are " << m << " marginals";
        throw DomainError(os.str());
    }
    if (!options.moment_overrides.empty() && options.moment_overrides.size() != m)
        throw DomainError("build_rz: moment_overrides must be empty or have one entry per marginal");
    validate_correlation_matrix(rx);

    auto moments_of = [&](std::size_t i) {
        if (!options.moment_overrides.empty() && options.moment_overrides[i]) return *options.moment_overrides[i];
        const auto mm = model_moments(models[i]);
        return Moments{mm.mean, mm.stddev};
    };

    Matrix rz = Matrix::identity(m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
            const auto rp = build_rho_polynomial(models[i], models[j], moments_of(i), moments_of(j));
            double value;
            try {
                value = solve_rho_z(rp, rx(i, j));
            } catch (const InfeasibleCorrelationError& e) {
                std::ostringstream os;
                os << "Rx entry (" << i << ", " << j << "): " << e.what();
                throw InfeasibleCorrelationError(os.str(), e.lower(), e.upper());
            }
            rz(i, j) = value;
            rz(j, i) = value;
        }
    }

    EquivalentCorrelation out{rz, Matrix(), false};
    try {
        out.l = cholesky(rz);
    } catch (const NotPositiveDefiniteError& e) {
        if (!options.nearest_pd)
            throw NotPositiveDefiniteError(std::string("equivalent normal correlation matrix Rz is not positive "
                                                       "definite (rerun with nearest-PD repair to clip it): ") +
                                           e.what());
        out.rz = clip_to_positive_definite(rz, options.min_eigenvalue);
        out.l = cholesky(out.rz);
        out.repaired = true;
    }
    return out;
}

VectorModel make_vector_model(std::vector<PolynomialModel> models, const Matrix& rx, const BuildRzOptions& options) {
    auto eq = build_rz(models, rx, options);
    return VectorModel(std::move(models), rx, std::move(eq.rz), std::move(eq.l));
}

}  // namespace pnt
