#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "fastsketch/common.hpp"

namespace fastsketch {

enum class Direction { forward, inverse };

/// Precomputed twiddle factors and bit-reversal table for a radix-2 FFT of length n.
/// Plans are immutable; FftPlan::get hands out shared instances from a process-wide cache.
class FftPlan {
public:
    explicit FftPlan(std::size_t n);

    static std::shared_ptr<const FftPlan> get(std::size_t n);

    std::size_t size() const noexcept { return n_; }

    /// In-place transform. Forward is unnormalized; inverse carries the 1/n factor.
    void execute(std::span<Complex> data, Direction dir) const;

    /// Inverse transform without the 1/n factor (the conjugate-transpose of forward).
    void execute_adjoint(std::span<Complex> data) const;

private:
    void butterflies(std::span<Complex> data, bool conjugate) const;

    std::size_t n_;
    std::vector<Complex> twiddles_;  // exp(-2*pi*i*j/n), j < n/2
    std::vector<std::uint32_t> bitrev_;
};

/// y_j = sum_t x_t exp(-2*pi*i*j*t/d) for forward; inverse is the normalized inverse.
ComplexVector dft(ConstComplexSpan x, Direction dir);
void dft_inplace(std::span<Complex> x, Direction dir);

/// Unnormalized Sylvester-Hadamard transform; fwht(fwht(x)) == d * x.
ComplexVector fwht(ConstComplexSpan x);
void fwht_inplace(std::span<Complex> x);

/// y_j = sum_i z_{(j-i) mod d} x_i, via the FFT.
ComplexVector circular_convolve(ConstComplexSpan z, ConstComplexSpan x);

/// Square Toeplitz matrix T with T[j][l] = first_column[j-l] for j >= l and first_row[l-j] otherwise.
class ToeplitzSpec {
public:
    ToeplitzSpec(ComplexVector first_row, ComplexVector first_column);

    std::size_t size() const noexcept { return first_row_.size(); }
    const ComplexVector& first_row() const noexcept { return first_row_; }
    const ComplexVector& first_column() const noexcept { return first_column_; }

    Complex entry(std::size_t j, std::size_t l) const {
        return j >= l ? first_column_[j - l] : first_row_[l - j];
    }

    /// Defining vector of a circulant of the given length (>= 2n-1) whose leading n x n block
    /// is T: the first column, zeros, then the reversed tail of the first row.
    ComplexVector circulant_embedding(std::size_t length) const;

private:
    ComplexVector first_row_;
    ComplexVector first_column_;
};

/// T x in O(n log n) through a power-of-two circulant of length >= 2n.
ComplexVector toeplitz_multiply(const ToeplitzSpec& t, ConstComplexSpan x);

}  // namespace fastsketch
