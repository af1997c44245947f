#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fastsketch {

inline constexpr const char* kVersion = "0.1.0";

using Complex = std::complex<double>;
using ComplexVector = std::vector<Complex>;
using ConstComplexSpan = std::span<const Complex>;

/// Raised when operand shapes do not agree (vector length vs operator dimension, etc.).
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a brute-force routine would exceed its configured work cap.
class CapExceeded : public std::length_error {
public:
    using std::length_error::length_error;
};

constexpr bool is_power_of_two(std::size_t n) noexcept { return n > 0 && (n & (n - 1)) == 0; }

constexpr std::size_t next_power_of_two(std::size_t n) noexcept {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

inline void require_dimension(std::size_t got, std::size_t want, const char* what) {
    if (got != want) {
        throw DimensionError(std::string(what) + ": expected length " + std::to_string(want) +
                             ", got " + std::to_string(got));
    }
}

inline void require_power_of_two(std::size_t n, const char* what) {
    if (!is_power_of_two(n)) {
        throw DimensionError(std::string(what) + ": length " + std::to_string(n) + " is not a power of two");
    }
}

double squared_norm(ConstComplexSpan x) noexcept;
double norm2(ConstComplexSpan x) noexcept;

/// <a, b> = sum_i a_i * conj(b_i)
Complex inner_product(ConstComplexSpan a, ConstComplexSpan b);

bool all_finite(ConstComplexSpan x) noexcept;

}  // namespace fastsketch
