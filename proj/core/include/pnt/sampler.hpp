#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "pnt/linalg.hpp"
#include "pnt/poly_model.hpp"

namespace pnt {

/// Identifies a reproducible random stream. Equal specs give bit-identical output.
struct RngSpec {
    std::uint64_t seed = 0;
    std::uint32_t stream_id = 0;
};

/// Philox4x32-10 counter-based generator. Every draw is a pure function of
/// (seed, stream, row, column), so any row range can be produced independently.
class CounterRng {
public:
    explicit CounterRng(const RngSpec& spec) noexcept : spec_(spec) {}

    /// Raw 128-bit block for the given counter words.
    std::array<std::uint32_t, 4> block(std::uint64_t row, std::uint32_t column_block) const noexcept;

    /// Uniform in the open interval (0, 1), 53-bit resolution.
    double uniform(std::uint64_t row, std::uint32_t column) const noexcept;

    /// Standard normal by inversion of the uniform.
    double normal(std::uint64_t row, std::uint32_t column) const;

    const RngSpec& spec() const noexcept { return spec_; }

private:
    RngSpec spec_;
};

/// Philox4x32 with 10 rounds, exposed for known-answer testing.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key) noexcept;

/// First `count` standard normals of the stream (column 0 of consecutive rows).
std::vector<double> normal_stream(const RngSpec& rng, std::size_t count);

/// Marginal models plus the target and normal-space correlation matrices.
///
/// Invariants checked at construction: sizes agree, Rz symmetric with unit diagonal,
/// L lower triangular with L * L^T = Rz within 1e-12.
class VectorModel {
public:
    VectorModel(std::vector<PolynomialModel> models, Matrix rx, Matrix rz, Matrix l);

    std::size_t dim() const noexcept { return models_.size(); }
    const std::vector<PolynomialModel>& models() const noexcept { return models_; }
    const Matrix& rx() const noexcept { return rx_; }
    const Matrix& rz() const noexcept { return rz_; }
    const Matrix& l() const noexcept { return l_; }

private:
    std::vector<PolynomialModel> models_;
    Matrix rx_;
    Matrix rz_;
    Matrix l_;
};

/// count x dim matrix; row i is (poly_1(Z_1), ..., poly_m(Z_m)) with Z = L U and U the
/// independent normals of row i. Rows are split into contiguous blocks across `threads`
/// workers (0 = hardware concurrency); output does not depend on the thread count.
Matrix generate(const VectorModel& vm, std::size_t count, const RngSpec& rng, unsigned threads = 1);

/// Pearson correlation matrix of the columns. Throws DegenerateError for fewer than two rows
/// or a constant column.
Matrix sample_correlation(const Matrix& samples);

struct ColumnSummary {
    double mean;
    double stddev;
};

std::vector<ColumnSummary> column_summary(const Matrix& samples);

}  // namespace pnt
