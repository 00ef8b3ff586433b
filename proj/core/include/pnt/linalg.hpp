#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace pnt {

/// Dense row-major matrix of doubles.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    static Matrix identity(std::size_t n);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool square() const noexcept { return rows_ == cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> data() const noexcept { return data_; }

    Matrix transpose() const;
    std::vector<double> operator*(std::span<const double> x) const;
    Matrix operator*(const Matrix& rhs) const;

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// LU factorization with partial pivoting, P*A = L*U packed into one matrix.
class LuFactorization {
public:
    /// Throws SingularMatrixError when a pivot is exactly zero.
    explicit LuFactorization(const Matrix& a);

    std::size_t size() const noexcept { return lu_.rows(); }
    double determinant() const;
    /// min |u_ii| / max |u_ii|; a cheap conditioning indicator.
    double pivot_ratio() const;
    std::vector<double> pivots() const;
    std::vector<double> solve(std::span<const double> y) const;

private:
    Matrix lu_;
    std::vector<std::size_t> perm_;
    int sign_ = 1;
};

std::vector<double> solve_linear(const Matrix& a, std::span<const double> y);
double determinant(const Matrix& a);

/// Lower-triangular L with L * L^T = a. Throws NotPositiveDefiniteError.
Matrix cholesky(const Matrix& a);

/// Minimizes ||A x - y||_2 via Householder QR on max-abs scaled columns.
/// Throws SingularMatrixError when A is rank deficient to working precision.
std::vector<double> least_squares(const Matrix& a, std::span<const double> y);

bool is_symmetric(const Matrix& a, double tol = 0.0);

}  // namespace pnt
