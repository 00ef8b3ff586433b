#include "pnt/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "pnt/errors.hpp"

namespace pnt {

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) throw DomainError("Matrix: ragged initializer");
        data_.insert(data_.end(), r.begin(), r.end());
    }
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

std::vector<double> Matrix::operator*(std::span<const double> x) const {
    if (x.size() != cols_) throw DomainError("Matrix * vector: size mismatch");
    std::vector<double> y(rows_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < cols_; ++j) s += (*this)(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

Matrix Matrix::operator*(const Matrix& rhs) const {
    if (cols_ != rhs.rows_) throw DomainError("Matrix * Matrix: size mismatch");
    Matrix out(rows_, rhs.cols_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t k = 0; k < cols_; ++k) {
            const double a = (*this)(i, k);
            if (a == 0.0) continue;
            for (std::size_t j = 0; j < rhs.cols_; ++j) out(i, j) += a * rhs(k, j);
        }
    return out;
}

bool is_symmetric(const Matrix& a, double tol) {
    if (!a.square()) return false;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (std::abs(a(i, j) - a(j, i)) > tol) return false;
    return true;
}

LuFactorization::LuFactorization(const Matrix& a) : lu_(a), perm_(a.rows()) {
    if (!a.square()) throw DomainError("LU factorization requires a square matrix");
    const std::size_t n = a.rows();
    for (std::size_t i = 0; i < n; ++i) perm_[i] = i;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        double best = std::abs(lu_(k, k));
        for (std::size_t i = k + 1; i < n; ++i) {
            if (std::abs(lu_(i, k)) > best) {
                best = std::abs(lu_(i, k));
                p = i;
            }
        }
        if (best == 0.0 || !std::isfinite(best)) {
            std::ostringstream os;
            os << "matrix is singular: no usable pivot in column " << k;
            throw SingularMatrixError(os.str());
        }
        if (p != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(lu_(k, j), lu_(p, j));
            std::swap(perm_[k], perm_[p]);
            sign_ = -sign_;
        }
        const double pivot = lu_(k, k);
        for (std::size_t i = k + 1; i < n; ++i) {
            const double factor = lu_(i, k) / pivot;
            lu_(i, k) = factor;
            if (factor == 0.0) continue;
            for (std::size_t j = k + 1; j < n; ++j) lu_(i, j) -= factor * lu_(k, j);
        }
    }
}

double LuFactorization::determinant() const {
    double det = sign_;
    for (std::size_t i = 0; i < size(); ++i) det *= lu_(i, i);
    return det;
}

std::vector<double> LuFactorization::pivots() const {
    std::vector<double> p(size());
    for (std::size_t i = 0; i < size(); ++i) p[i] = lu_(i, i);
    return p;
}

double LuFactorization::pivot_ratio() const {
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (std::size_t i = 0; i < size(); ++i) {
        lo = std::min(lo, std::abs(lu_(i, i)));
        hi = std::max(hi, std::abs(lu_(i, i)));
    }
    return hi > 0.0 ? lo / hi : 0.0;
}

std::vector<double> LuFactorization::solve(std::span<const double> y) const {
    const std::size_t n = size();
    if (y.size() != n) throw DomainError("LU solve: right-hand side has the wrong length");
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = y[perm_[i]];
        for (std::size_t j = 0; j < i; ++j) s -= lu_(i, j) * x[j];
        x[i] = s;
    }
    for (std::size_t ii = n; ii-- > 0;) {
        double s = x[ii];
        for (std::size_t j = ii + 1; j < n; ++j) s -= lu_(ii, j) * x[j];
        x[ii] = s / lu_(ii, ii);
    }
    return x;
}

std::vector<double> solve_linear(const Matrix& a, std::span<const double> y) { return LuFactorization(a).solve(y); }

double determinant(const Matrix& a) {
    try {
        return LuFactorization(a).determinant();
    } catch (const SingularMatrixError&) {
        return 0.0;
    }
}

Matrix cholesky(const Matrix& a) {
    if (!a.square()) throw NotPositiveDefiniteError("cholesky: matrix is not square");
    const std::size_t n = a.rows();
    double scale = 0.0;
    for (double v : a.data()) scale = std::max(scale, std::abs(v));
    if (!is_symmetric(a, 1e-12 * std::max(scale, 1.0)))
        throw NotPositiveDefiniteError("cholesky: matrix is not symmetric");
    Matrix l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double d = a(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
        if (!(d > 0.0)) {
            std::ostringstream os;
            os << "cholesky: matrix is not positive definite (leading minor " << j + 1 << " has pivot " << d << ")";
            throw NotPositiveDefiniteError(os.str());
        }
        const double ljj = std::sqrt(d);
        l(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            l(i, j) = s / ljj;
        }
    }
    return l;
}

std::vector<double> least_squares(const Matrix& a, std::span<const double> y) {
    const std::size_t m = a.rows();
    const std::size_t k = a.cols();
    if (y.size() != m) throw DomainError("least_squares: right-hand side has the wrong length");
    if (m < k) throw SingularMatrixError("least_squares: fewer rows than unknowns");

    Matrix r = a;
    std::vector<double> scale(k, 0.0);
    for (std::size_t j = 0; j < k; ++j) {
        for (std::size_t i = 0; i < m; ++i) scale[j] = std::max(scale[j], std::abs(r(i, j)));
        if (scale[j] == 0.0) {
            std::ostringstream os;
            os << "least_squares: column " << j << " is identically zero";
            throw SingularMatrixError(os.str());
        }
        for (std::size_t i = 0; i < m; ++i) r(i, j) /= scale[j];
    }
    std::vector<double> b(y.begin(), y.end());

    // Householder QR applied in place; Q^T b accumulated alongside.
    std::vector<double> v(m);
    for (std::size_t j = 0; j < k; ++j) {
        double norm = 0.0;
        for (std::size_t i = j; i < m; ++i) norm = std::hypot(norm, r(i, j));
        if (norm == 0.0) continue;
        const double alpha = r(j, j) > 0.0 ? -norm : norm;
        for (std::size_t i = j; i < m; ++i) v[i] = r(i, j);
        v[j] -= alpha;
        double vnorm2 = 0.0;
        for (std::size_t i = j; i < m; ++i) vnorm2 += v[i] * v[i];
        if (vnorm2 == 0.0) continue;
        for (std::size_t c = j; c < k; ++c) {
            double dot = 0.0;
            for (std::size_t i = j; i < m; ++i) dot += v[i] * r(i, c);
            const double f = 2.0 * dot / vnorm2;
            for (std::size_t i = j; i < m; ++i) r(i, c) -= f * v[i];
        }
        double dot = 0.0;
        for (std::size_t i = j; i < m; ++i) dot += v[i] * b[i];
        const double f = 2.0 * dot / vnorm2;
        for (std::size_t i = j; i < m; ++i) b[i] -= f * v[i];
    }

    double rmax = 0.0;
    for (std::size_t j = 0; j < k; ++j) rmax = std::max(rmax, std::abs(r(j, j)));
    const double threshold = static_cast<double>(m) * std::numeric_limits<double>::epsilon() * rmax;
    for (std::size_t j = 0; j < k; ++j) {
        if (!(std::abs(r(j, j)) > threshold)) {
            std::ostringstream os;
            os << "least_squares: design matrix is rank deficient (|R[" << j << "," << j << "]| = " << std::abs(r(j, j))
               << ")";
            throw SingularMatrixError(os.str());
        }
    }
    std::vector<double> x(k);
    for (std::size_t jj = k; jj-- > 0;) {
        double s = b[jj];
        for (std::size_t c = jj + 1; c < k; ++c) s -= r(jj, c) * x[c];
        x[jj] = s / r(jj, jj);
    }
    for (std::size_t j = 0; j < k; ++j) x[j] /= scale[j];
    return x;
}

}  // namespace pnt
