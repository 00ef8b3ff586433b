#include "pnt/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <sstream>
#include <thread>

#include "pnt/errors.hpp"
#include "pnt/numerics.hpp"

namespace pnt {
namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

inline double to_open_unit(std::uint32_t hi, std::uint32_t lo) {
    const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 32 | lo) >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key) noexcept {
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            key[0] += kPhiloxW0;
            key[1] += kPhiloxW1;
        }
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kPhiloxM0, ctr[0], hi0, lo0);
        mulhilo(kPhiloxM1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
}

std::array<std::uint32_t, 4> CounterRng::block(std::uint64_t row, std::uint32_t column_block) const noexcept {
    return philox4x32_10({static_cast<std::uint32_t>(row), static_cast<std::uint32_t>(row >> 32), column_block,
                          spec_.stream_id},
                         {static_cast<std::uint32_t>(spec_.seed), static_cast<std::uint32_t>(spec_.seed >> 32)});
}

double CounterRng::uniform(std::uint64_t row, std::uint32_t column) const noexcept {
    const auto b = block(row, column / 2);
    return column % 2 ? to_open_unit(b[2], b[3]) : to_open_unit(b[0], b[1]);
}

double CounterRng::normal(std::uint64_t row, std::uint32_t column) const { return normal_quantile(uniform(row, column)); }

std::vector<double> normal_stream(const RngSpec& rng, std::size_t count) {
    const CounterRng gen(rng);
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i) out[i] = gen.normal(i, 0);
    return out;
}

VectorModel::VectorModel(std::vector<PolynomialModel> models, Matrix rx, Matrix rz, Matrix l)
    : models_(std::move(models)), rx_(std::move(rx)), rz_(std::move(rz)), l_(std::move(l)) {
    const std::size_t m = models_.size();
    if (m == 0) throw DomainError("VectorModel: at least one marginal is required");
    for (const Matrix* mat : {&rx_, &rz_, &l_})
        if (mat->rows() != m || mat->cols() != m) throw DomainError("VectorModel: matrix dimensions must match the marginals");
    for (std::size_t i = 0; i < m; ++i) {
        if (rz_(i, i) != 1.0) throw DomainError("VectorModel: Rz must have a unit diagonal");
        for (std::size_t j = 0; j < m; ++j) {
            if (rz_(i, j) != rz_(j, i)) throw DomainError("VectorModel: Rz must be symmetric");
            if (j > i && l_(i, j) != 0.0) throw DomainError("VectorModel: L must be lower triangular");
            double s = 0.0;
            for (std::size_t k = 0; k < m; ++k) s += l_(i, k) * l_(j, k);
            if (std::abs(s - rz_(i, j)) > 1e-12) {
                std::ostringstream os;
                os << "VectorModel: L * L^T differs from Rz at (" << i << ", " << j << ") by " << s - rz_(i, j);
                throw DomainError(os.str());
            }
        }
    }
}

Matrix generate(const VectorModel& vm, std::size_t count, const RngSpec& rng, unsigned threads) {
    if (count == 0) throw DomainError("generate: count must be >= 1");
    const std::size_t m = vm.dim();
    Matrix out(count, m);
    const CounterRng gen(rng);
    const Matrix& l = vm.l();

    auto fill = [&](std::size_t begin, std::size_t end) {
        std::vector<double> u(m);
        for (std::size_t row = begin; row < end; ++row) {
            for (std::size_t j = 0; j < m; ++j) u[j] = gen.normal(row, static_cast<std::uint32_t>(j));
            auto dst = out.row(row);
            for (std::size_t i = 0; i < m; ++i) {
                double z = 0.0;
                for (std::size_t k = 0; k <= i; ++k) z += l(i, k) * u[k];
                dst[i] = evaluate(vm.models()[i], z);
            }
        }
    };

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
    if (threads <= 1) {
        fill(0, count);
        return out;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    const std::size_t chunk = (count + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
        const std::size_t begin = std::min(count, t * chunk);
        const std::size_t end = std::min(count, begin + chunk);
        pool.emplace_back([&, t, begin, end] {
            try {
                fill(begin, end);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

std::vector<ColumnSummary> column_summary(const Matrix& samples) {
    const std::size_t n = samples.rows();
    const std::size_t m = samples.cols();
    if (n < 2) throw DegenerateError("column_summary: need at least two rows");
    std::vector<ColumnSummary> out(m, {0.0, 0.0});
    for (std::size_t j = 0; j < m; ++j) {
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) mean += samples(i, j);
        mean /= static_cast<double>(n);
        double ss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = samples(i, j) - mean;
            ss += d * d;
        }
        out[j] = {mean, std::sqrt(ss / static_cast<double>(n - 1))};
    }
    return out;
}

Matrix sample_correlation(const Matrix& samples) {
    const std::size_t n = samples.rows();
    const std::size_t m = samples.cols();
    if (n < 2) throw DegenerateError("sample_correlation: need at least two rows");
    std::vector<double> mean(m, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) mean[j] += samples(i, j);
    for (auto& v : mean) v /= static_cast<double>(n);

    Matrix cov(m, m);
    std::vector<double> d(m);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) d[j] = samples(i, j) - mean[j];
        for (std::size_t a = 0; a < m; ++a)
            for (std::size_t b = 0; b <= a; ++b) cov(a, b) += d[a] * d[b];
    }
    for (std::size_t j = 0; j < m; ++j) {
        if (!(cov(j, j) > 0.0)) {
            std::ostringstream os;
            os << "sample_correlation: column " << j << " has zero variance";
            throw DegenerateError(os.str());
        }
    }
    Matrix r(m, m);
    for (std::size_t a = 0; a < m; ++a) {
        r(a, a) = 1.0;
        for (std::size_t b = 0; b < a; ++b) {
            const double v = std::clamp(cov(a, b) / std::sqrt(cov(a, a) * cov(b, b)), -1.0, 1.0);
            r(a, b) = v;
            r(b, a) = v;
        }
    }
    return r;
}

}  // namespace pnt
