#include "fastsketch/common.hpp"

#include <cmath>

namespace fastsketch {

double squared_norm(ConstComplexSpan x) noexcept {
    double s = 0.0;
    for (const Complex& v : x) s += v.real() * v.real() + v.imag() * v.imag();
    return s;
}

double norm2(ConstComplexSpan x) noexcept { return std::sqrt(squared_norm(x)); }

Complex inner_product(ConstComplexSpan a, ConstComplexSpan b) {
    require_dimension(b.size(), a.size(), "inner_product");
    double re = 0.0;
    double im = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        re += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
        im += a[i].imag() * b[i].real() - a[i].real() * b[i].imag();
    }
    return {re, im};
}

bool all_finite(ConstComplexSpan x) noexcept {
    for (const Complex& v : x) {
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    }
    return true;
}

}  // namespace fastsketch
