#include "fastsketch/transforms.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <utility>

namespace fastsketch {

namespace {

// Plain real arithmetic; std::complex operator* falls back to a NaN-recovering libcall.
inline Complex mul(Complex a, Complex b) noexcept {
    return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

inline Complex mul_conj(Complex a, Complex w) noexcept {
    return {a.real() * w.real() + a.imag() * w.imag(), a.imag() * w.real() - a.real() * w.imag()};
}

}  // namespace

FftPlan::FftPlan(std::size_t n) : n_(n) {
    require_power_of_two(n, "FftPlan");
    twiddles_.resize(n / 2);
    for (std::size_t j = 0; j < n / 2; ++j) {
        const double angle = -2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n);
        twiddles_[j] = {std::cos(angle), std::sin(angle)};
    }
    unsigned bits = 0;
    while ((std::size_t{1} << bits) < n) ++bits;
    bitrev_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::uint32_t r = 0;
        for (unsigned b = 0; b < bits; ++b) {
            if (i & (std::size_t{1} << b)) r |= std::uint32_t{1} << (bits - 1 - b);
        }
        bitrev_[i] = r;
    }
}

std::shared_ptr<const FftPlan> FftPlan::get(std::size_t n) {
    static std::mutex mutex;
    static std::map<std::size_t, std::shared_ptr<const FftPlan>> cache;
    require_power_of_two(n, "FftPlan::get");
    std::lock_guard<std::mutex> lock(mutex);
    auto& slot = cache[n];
    if (!slot) slot = std::make_shared<const FftPlan>(n);
    return slot;
}

void FftPlan::butterflies(std::span<Complex> data, bool conjugate) const {
    for (std::size_t i = 0; i < n_; ++i) {
        const std::size_t r = bitrev_[i];
        if (i < r) std::swap(data[i], data[r]);
    }
    for (std::size_t len = 2; len <= n_; len <<= 1) {
        const std::size_t half = len / 2;
        const std::size_t stride = n_ / len;
        for (std::size_t start = 0; start < n_; start += len) {
            Complex* lo = data.data() + start;
            Complex* hi = lo + half;
            for (std::size_t j = 0; j < half; ++j) {
                const Complex w = twiddles_[j * stride];
                const Complex t = conjugate ? mul_conj(hi[j], w) : mul(hi[j], w);
                hi[j] = lo[j] - t;
                lo[j] += t;
            }
        }
    }
}

void FftPlan::execute(std::span<Complex> data, Direction dir) const {
    require_dimension(data.size(), n_, "FftPlan::execute");
    butterflies(data, dir == Direction::inverse);
    if (dir == Direction::inverse) {
        const double inv = 1.0 / static_cast<double>(n_);
        for (Complex& v : data) v *= inv;
    }
}

void FftPlan::execute_adjoint(std::span<Complex> data) const {
    require_dimension(data.size(), n_, "FftPlan::execute_adjoint");
    butterflies(data, true);
}

void dft_inplace(std::span<Complex> x, Direction dir) {
    require_power_of_two(x.size(), "dft");
    FftPlan::get(x.size())->execute(x, dir);
}

ComplexVector dft(ConstComplexSpan x, Direction dir) {
    ComplexVector y(x.begin(), x.end());
    dft_inplace(y, dir);
    return y;
}

void fwht_inplace(std::span<Complex> x) {
    require_power_of_two(x.size(), "fwht");
    const std::size_t n = x.size();
    for (std::size_t h = 1; h < n; h <<= 1) {
        for (std::size_t i = 0; i < n; i += 2 * h) {
            for (std::size_t j = i; j < i + h; ++j) {
                const Complex a = x[j];
                const Complex b = x[j + h];
                x[j] = a + b;
                x[j + h] = a - b;
            }
        }
    }
}

ComplexVector fwht(ConstComplexSpan x) {
    ComplexVector y(x.begin(), x.end());
    fwht_inplace(y);
    return y;
}

ComplexVector circular_convolve(ConstComplexSpan z, ConstComplexSpan x) {
    require_dimension(x.size(), z.size(), "circular_convolve");
    require_power_of_two(z.size(), "circular_convolve");
    const auto plan = FftPlan::get(z.size());
    ComplexVector zf(z.begin(), z.end());
    ComplexVector xf(x.begin(), x.end());
    plan->execute(zf, Direction::forward);
    plan->execute(xf, Direction::forward);
    for (std::size_t i = 0; i < xf.size(); ++i) xf[i] = mul(xf[i], zf[i]);
    plan->execute(xf, Direction::inverse);
    return xf;
}

ToeplitzSpec::ToeplitzSpec(ComplexVector first_row, ComplexVector first_column)
    : first_row_(std::move(first_row)), first_column_(std::move(first_column)) {
    if (first_row_.empty()) throw std::invalid_argument("ToeplitzSpec: empty matrix");
    require_dimension(first_column_.size(), first_row_.size(), "ToeplitzSpec first column");
    if (first_row_[0] != first_column_[0]) {
        throw std::invalid_argument("ToeplitzSpec: first_row[0] and first_column[0] disagree");
    }
}

ComplexVector ToeplitzSpec::circulant_embedding(std::size_t length) const {
    const std::size_t n = size();
    if (length + 1 < 2 * n) throw std::invalid_argument("circulant_embedding: length below 2n-1");
    ComplexVector c(length, Complex{});
    for (std::size_t j = 0; j < n; ++j) c[j] = first_column_[j];
    for (std::size_t l = 1; l < n; ++l) c[length - l] = first_row_[l];
    return c;
}

ComplexVector toeplitz_multiply(const ToeplitzSpec& t, ConstComplexSpan x) {
    const std::size_t n = t.size();
    require_dimension(x.size(), n, "toeplitz_multiply");
    const std::size_t len = next_power_of_two(2 * n);
    ComplexVector padded(len, Complex{});
    std::copy(x.begin(), x.end(), padded.begin());
    ComplexVector y = circular_convolve(t.circulant_embedding(len), padded);
    y.resize(n);
    return y;
}

}  // namespace fastsketch
