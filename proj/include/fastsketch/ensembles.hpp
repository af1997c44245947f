#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "fastsketch/common.hpp"
#include "fastsketch/rng.hpp"

namespace fastsketch {

enum class EnsembleKind { partial_fourier, partial_hadamard, partial_circulant, dense_gaussian };

/// Short names: "fourier", "hadamard", "circulant", "gaussian".
std::string to_string(EnsembleKind kind);
/// Accepts the short names and the long enum spellings ("partial_fourier", ...).
EnsembleKind parse_ensemble_kind(std::string_view name);

/// Circulant application strategy. `automatic` picks blocked Toeplitz when the row block is
/// small enough relative to d to pay off.
enum class CirculantPath { automatic, blocked_toeplitz, full_fft };

inline constexpr std::size_t kDefaultDensifyCap = std::size_t{1} << 24;

/// Compact description of a structured M x d matrix A.
///
/// Fourier and Hadamard sources keep M zero-based row indices of the unnormalized d x d
/// transform, so every entry has modulus exactly 1. Circulant sources keep the sign vector
/// eps and use rows 0..M-1 of the circulant H_eps (H_eps x = eps * x). Gaussian sources keep an
/// explicit real matrix with i.i.d. N(0,1) entries.
class RowSource {
public:
    static RowSource partial_fourier(std::size_t d, std::vector<std::uint64_t> indices,
                                     std::optional<std::uint64_t> seed = std::nullopt);
    static RowSource partial_hadamard(std::size_t d, std::vector<std::uint64_t> indices,
                                      std::optional<std::uint64_t> seed = std::nullopt);
    static RowSource partial_circulant(std::size_t d, std::size_t rows, std::vector<std::int8_t> signs,
                                       std::optional<std::uint64_t> seed = std::nullopt);
    static RowSource dense_gaussian(Eigen::MatrixXd matrix,
                                    std::optional<std::uint64_t> seed = std::nullopt);

    EnsembleKind kind() const noexcept { return kind_; }
    std::size_t dim() const noexcept { return d_; }
    std::size_t rows() const noexcept { return rows_; }
    std::optional<std::uint64_t> seed() const noexcept { return seed_; }

    const std::vector<std::uint64_t>& row_indices() const noexcept { return indices_; }
    const std::vector<std::int8_t>& circulant_signs() const noexcept { return eps_; }
    const Eigen::MatrixXd& gaussian_matrix() const noexcept { return *gaussian_; }

    /// Row i of A as a dense vector of length d.
    ComplexVector row(std::size_t i) const;

    friend RowSource sample_row_source(EnsembleKind kind, std::size_t d, std::size_t rows,
                                       std::uint64_t seed);
    friend ComplexVector apply_rows(const RowSource& src, ConstComplexSpan x, CirculantPath path);
    friend ComplexVector apply_rows_adjoint(const RowSource& src, ConstComplexSpan y,
                                            CirculantPath path);

private:
    struct CirculantSpectra;

    RowSource() = default;

    EnsembleKind kind_ = EnsembleKind::partial_fourier;
    std::size_t d_ = 0;
    std::size_t rows_ = 0;
    std::optional<std::uint64_t> seed_;
    std::vector<std::uint64_t> indices_;
    std::vector<std::int8_t> eps_;
    std::shared_ptr<const Eigen::MatrixXd> gaussian_;
    std::shared_ptr<const CirculantSpectra> spectra_;
};

/// M i.i.d. uniform row indices from [0, d), with replacement.
RowSource sample_bounded_orthogonal(std::size_t d, std::size_t rows, EnsembleKind kind, Rng& rng);
/// Uniform eps in {+-1}^d; rows fixed to the contiguous block 0..M-1.
RowSource sample_partial_circulant(std::size_t d, std::size_t rows, Rng& rng);
RowSource sample_dense_gaussian(std::size_t d, std::size_t rows, Rng& rng);

/// Samples any kind from a fresh stream seeded by `seed` and records the seed on the source.
RowSource sample_row_source(EnsembleKind kind, std::size_t d, std::size_t rows, std::uint64_t seed);

/// A x (length M).
ComplexVector apply_rows(const RowSource& src, ConstComplexSpan x,
                         CirculantPath path = CirculantPath::automatic);
/// A^* y (length d).
ComplexVector apply_rows_adjoint(const RowSource& src, ConstComplexSpan y,
                                 CirculantPath path = CirculantPath::automatic);

/// Explicit M x d matrix; throws CapExceeded when M*d > cap.
Eigen::MatrixXcd densify(const RowSource& src, std::size_t cap = kDefaultDensifyCap);

}  // namespace fastsketch
