#pragma once

#include <concepts>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <type_traits>
#include <vector>

#include <Eigen/Dense>

#include "fastsketch/common.hpp"
#include "fastsketch/ensembles.hpp"
#include "fastsketch/rng.hpp"

namespace fastsketch {

/// m x B table of Rademacher signs, row-major by bucket.
class SignTable {
public:
    SignTable(std::size_t buckets, std::size_t bucket_size, std::vector<std::int8_t> signs);

    static SignTable sample(std::size_t buckets, std::size_t bucket_size, Rng& rng);
    static SignTable all_positive(std::size_t buckets, std::size_t bucket_size);

    std::size_t buckets() const noexcept { return m_; }
    std::size_t bucket_size() const noexcept { return b_; }
    /// Zero-based bucket and slot.
    int at(std::size_t bucket, std::size_t slot) const { return signs_[bucket * b_ + slot]; }
    const std::vector<std::int8_t>& values() const noexcept { return signs_; }

    SignTable negated() const;

private:
    std::size_t m_;
    std::size_t b_;
    std::vector<std::int8_t> signs_;
};

/// One-based bucket hash h(b, i) = B(b - 1) + i, a bijection [m] x [B] -> [mB].
std::size_t bucket_index(std::size_t bucket, std::size_t slot, std::size_t bucket_size);

/// The hashed operator Phi / sqrt(mB): row b is sum_i sigma_{b,i} a_{h(b,i)}, scaled by 1/sqrt(mB).
class SketchOperator {
public:
    SketchOperator(RowSource source, SignTable signs, std::optional<std::uint64_t> seed = std::nullopt);

    const RowSource& source() const noexcept { return source_; }
    const SignTable& signs() const noexcept { return signs_; }
    EnsembleKind kind() const noexcept { return source_.kind(); }
    std::size_t dim() const noexcept { return source_.dim(); }
    std::size_t buckets() const noexcept { return signs_.buckets(); }
    std::size_t bucket_size() const noexcept { return signs_.bucket_size(); }
    double scale() const noexcept { return scale_; }
    std::optional<std::uint64_t> seed() const noexcept { return seed_; }

private:
    RowSource source_;
    SignTable signs_;
    double scale_;
    std::optional<std::uint64_t> seed_;
};

/// Samples A with mB rows (stream derive_seed(seed, 0, "rows")) and sigma (stream
/// derive_seed(seed, 0, "signs")). Circulant sources need mB <= d.
SketchOperator build_sketch(std::size_t d, std::size_t buckets, std::size_t bucket_size,
                            EnsembleKind kind, std::uint64_t seed);

/// Phi x / sqrt(mB), length m: one apply_rows plus an O(mB) signed bucket sum.
ComplexVector apply(const SketchOperator& op, ConstComplexSpan x,
                    CirculantPath path = CirculantPath::automatic);

/// Phi^* z / sqrt(mB), length d.
ComplexVector apply_adjoint(const SketchOperator& op, ConstComplexSpan z,
                            CirculantPath path = CirculantPath::automatic);

// Vector overloads; without them ADL would pick std::apply for std::vector arguments.
template <typename V>
    requires std::same_as<std::remove_cvref_t<V>, ComplexVector>
ComplexVector apply(const SketchOperator& op, V&& x, CirculantPath path = CirculantPath::automatic) {
    return apply(op, ConstComplexSpan(x), path);
}
template <typename V>
    requires std::same_as<std::remove_cvref_t<V>, ComplexVector>
ComplexVector apply_adjoint(const SketchOperator& op, V&& z, CirculantPath path = CirculantPath::automatic) {
    return apply_adjoint(op, ConstComplexSpan(z), path);
}

/// Explicit m x d matrix of the normalized operator. The cap bounds m * d.
Eigen::MatrixXcd densify_sketch(const SketchOperator& op, std::size_t cap = kDefaultDensifyCap);

/// Column j of the normalized operator, i.e. apply(op, e_j).
ComplexVector sketch_column(const SketchOperator& op, std::size_t j);

/// Binary audit dump: "FSKB", u32 version, u32 kind, u64 d, m, B, u64 seed (0 if absent),
/// then the payload (u64 indices, i8 eps, or f64 row-major Gaussian entries) and the m*B i8 signs.
/// All integers little-endian.
void write_binary_dump(const SketchOperator& op, std::ostream& out);

}  // namespace fastsketch
