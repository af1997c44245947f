#include "fastsketch/ensembles.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

#include "fastsketch/transforms.hpp"

namespace fastsketch {

namespace {

inline Complex mul(Complex a, Complex b) noexcept {
    return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

inline Complex mul_conj(Complex a, Complex w) noexcept {
    return {a.real() * w.real() + a.imag() * w.imag(), a.imag() * w.real() - a.real() * w.imag()};
}

// exp(-2 pi i t s / d), reducing t*s modulo d first so the angle stays small.
Complex fourier_entry(std::uint64_t t, std::uint64_t s, std::size_t d) {
    const std::uint64_t r = (t * s) % d;
    const double angle = -2.0 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(d);
    return {std::cos(angle), std::sin(angle)};
}

double hadamard_entry(std::uint64_t t, std::uint64_t s) {
    return (std::popcount(t & s) & 1) ? -1.0 : 1.0;
}

void check_indices(std::size_t d, const std::vector<std::uint64_t>& indices) {
    require_power_of_two(d, "RowSource");
    if (indices.empty()) throw std::invalid_argument("RowSource: at least one row is required");
    for (std::uint64_t t : indices) {
        if (t >= d) throw std::out_of_range("RowSource: row index outside [0, d)");
    }
}

}  // namespace

// FFTs of the circulant defining vectors. `full` has length d; `blocks` holds d / block_len
// spectra of length 2 * block_len, one per Toeplitz block of the leading rows.
struct RowSource::CirculantSpectra {
    ComplexVector full;
    std::size_t block_len = 0;
    std::vector<ComplexVector> blocks;
};

std::string to_string(EnsembleKind kind) {
    switch (kind) {
        case EnsembleKind::partial_fourier: return "fourier";
        case EnsembleKind::partial_hadamard: return "hadamard";
        case EnsembleKind::partial_circulant: return "circulant";
        case EnsembleKind::dense_gaussian: return "gaussian";
    }
    return "unknown";
}

EnsembleKind parse_ensemble_kind(std::string_view name) {
    if (name == "fourier" || name == "partial_fourier") return EnsembleKind::partial_fourier;
    if (name == "hadamard" || name == "partial_hadamard") return EnsembleKind::partial_hadamard;
    if (name == "circulant" || name == "partial_circulant") return EnsembleKind::partial_circulant;
    if (name == "gaussian" || name == "dense_gaussian") return EnsembleKind::dense_gaussian;
    throw std::invalid_argument("unknown ensemble kind: " + std::string(name));
}

RowSource RowSource::partial_fourier(std::size_t d, std::vector<std::uint64_t> indices,
                                     std::optional<std::uint64_t> seed) {
    check_indices(d, indices);
    RowSource src;
    src.kind_ = EnsembleKind::partial_fourier;
    src.d_ = d;
    src.rows_ = indices.size();
    src.seed_ = seed;
    src.indices_ = std::move(indices);
    return src;
}

RowSource RowSource::partial_hadamard(std::size_t d, std::vector<std::uint64_t> indices,
                                      std::optional<std::uint64_t> seed) {
    RowSource src = partial_fourier(d, std::move(indices), seed);
    src.kind_ = EnsembleKind::partial_hadamard;
    return src;
}

RowSource RowSource::partial_circulant(std::size_t d, std::size_t rows, std::vector<std::int8_t> signs,
                                       std::optional<std::uint64_t> seed) {
    require_power_of_two(d, "RowSource");
    require_dimension(signs.size(), d, "partial_circulant signs");
    if (rows == 0) throw std::invalid_argument("RowSource: at least one row is required");
    if (rows > d) {
        throw std::invalid_argument("partial_circulant: M = " + std::to_string(rows) +
                                    " exceeds d = " + std::to_string(d));
    }
    for (std::int8_t e : signs) {
        if (e != 1 && e != -1) throw std::invalid_argument("partial_circulant: signs must be +-1");
    }

    auto spectra = std::make_shared<CirculantSpectra>();
    spectra->full.assign(signs.begin(), signs.end());
    dft_inplace(spectra->full, Direction::forward);

    // Block c of the leading rows is the Toeplitz matrix T_c[j][l] = eps[(j - l - c*L) mod d].
    const std::size_t block = next_power_of_two(rows);
    spectra->block_len = block;
    const auto plan = FftPlan::get(2 * block);
    for (std::size_t c = 0; c < d / block; ++c) {
        const std::size_t offset = c * block;
        ComplexVector column(block);
        ComplexVector row(block);
        for (std::size_t j = 0; j < block; ++j) {
            column[j] = signs[(j + d - offset) % d];
            row[j] = signs[(2 * d - j - offset) % d];
        }
        ComplexVector embedded = ToeplitzSpec(std::move(row), std::move(column)).circulant_embedding(2 * block);
        plan->execute(embedded, Direction::forward);
        spectra->blocks.push_back(std::move(embedded));
    }

    RowSource src;
    src.kind_ = EnsembleKind::partial_circulant;
    src.d_ = d;
    src.rows_ = rows;
    src.seed_ = seed;
    src.eps_ = std::move(signs);
    src.spectra_ = std::move(spectra);
    return src;
}

RowSource RowSource::dense_gaussian(Eigen::MatrixXd matrix, std::optional<std::uint64_t> seed) {
    if (matrix.rows() == 0 || matrix.cols() == 0) throw std::invalid_argument("dense_gaussian: empty matrix");
    RowSource src;
    src.kind_ = EnsembleKind::dense_gaussian;
    src.d_ = static_cast<std::size_t>(matrix.cols());
    src.rows_ = static_cast<std::size_t>(matrix.rows());
    src.seed_ = seed;
    src.gaussian_ = std::make_shared<const Eigen::MatrixXd>(std::move(matrix));
    return src;
}

ComplexVector RowSource::row(std::size_t i) const {
    if (i >= rows_) throw std::out_of_range("RowSource::row: index out of range");
    ComplexVector r(d_);
    switch (kind_) {
        case EnsembleKind::partial_fourier:
            for (std::size_t s = 0; s < d_; ++s) r[s] = fourier_entry(indices_[i], s, d_);
            break;
        case EnsembleKind::partial_hadamard:
            for (std::size_t s = 0; s < d_; ++s) r[s] = hadamard_entry(indices_[i], s);
            break;
        case EnsembleKind::partial_circulant:
            for (std::size_t s = 0; s < d_; ++s) r[s] = static_cast<double>(eps_[(i + d_ - s) % d_]);
            break;
        case EnsembleKind::dense_gaussian:
            for (std::size_t s = 0; s < d_; ++s) {
                r[s] = (*gaussian_)(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(s));
            }
            break;
    }
    return r;
}

RowSource sample_bounded_orthogonal(std::size_t d, std::size_t rows, EnsembleKind kind, Rng& rng) {
    require_power_of_two(d, "sample_bounded_orthogonal");
    if (rows == 0) throw std::invalid_argument("sample_bounded_orthogonal: M must be positive");
    std::vector<std::uint64_t> indices(rows);
    for (auto& t : indices) t = rng.uniform_index(d);
    switch (kind) {
        case EnsembleKind::partial_fourier: return RowSource::partial_fourier(d, std::move(indices));
        case EnsembleKind::partial_hadamard: return RowSource::partial_hadamard(d, std::move(indices));
        default: throw std::invalid_argument("sample_bounded_orthogonal: kind must be fourier or hadamard");
    }
}

RowSource sample_partial_circulant(std::size_t d, std::size_t rows, Rng& rng) {
    require_power_of_two(d, "sample_partial_circulant");
    if (rows > d) {
        throw std::invalid_argument("sample_partial_circulant: M = " + std::to_string(rows) +
                                    " exceeds d = " + std::to_string(d));
    }
    std::vector<std::int8_t> eps(d);
    for (auto& e : eps) e = static_cast<std::int8_t>(rng.sign());
    return RowSource::partial_circulant(d, rows, std::move(eps));
}

RowSource sample_dense_gaussian(std::size_t d, std::size_t rows, Rng& rng) {
    if (rows == 0 || d == 0) throw std::invalid_argument("sample_dense_gaussian: empty shape");
    Eigen::MatrixXd g(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(d));
    for (Eigen::Index i = 0; i < g.rows(); ++i) {
        for (Eigen::Index j = 0; j < g.cols(); ++j) g(i, j) = rng.normal();
    }
    return RowSource::dense_gaussian(std::move(g));
}

RowSource sample_row_source(EnsembleKind kind, std::size_t d, std::size_t rows, std::uint64_t seed) {
    Rng rng(seed);
    RowSource src = [&] {
        switch (kind) {
            case EnsembleKind::partial_circulant: return sample_partial_circulant(d, rows, rng);
            case EnsembleKind::dense_gaussian: return sample_dense_gaussian(d, rows, rng);
            default: return sample_bounded_orthogonal(d, rows, kind, rng);
        }
    }();
    src.seed_ = seed;
    return src;
}

namespace {

bool use_blocked(std::size_t d, std::size_t block, CirculantPath path) {
    switch (path) {
        case CirculantPath::blocked_toeplitz: return true;
        case CirculantPath::full_fft: return false;
        case CirculantPath::automatic: return 2 * block < d;
    }
    return false;
}

}  // namespace

ComplexVector apply_rows(const RowSource& src, ConstComplexSpan x, CirculantPath path) {
    require_dimension(x.size(), src.d_, "apply_rows");
    ComplexVector out(src.rows_);
    switch (src.kind_) {
        case EnsembleKind::partial_fourier:
        case EnsembleKind::partial_hadamard: {
            ComplexVector full(x.begin(), x.end());
            if (src.kind_ == EnsembleKind::partial_fourier) {
                dft_inplace(full, Direction::forward);
            } else {
                fwht_inplace(full);
            }
            for (std::size_t i = 0; i < src.rows_; ++i) out[i] = full[src.indices_[i]];
            break;
        }
        case EnsembleKind::partial_circulant: {
            const auto& spectra = *src.spectra_;
            if (use_blocked(src.d_, spectra.block_len, path)) {
                const std::size_t block = spectra.block_len;
                const auto plan = FftPlan::get(2 * block);
                ComplexVector acc(2 * block, Complex{});
                ComplexVector buf(2 * block);
                for (std::size_t c = 0; c < spectra.blocks.size(); ++c) {
                    std::copy(x.begin() + c * block, x.begin() + (c + 1) * block, buf.begin());
                    std::fill(buf.begin() + block, buf.end(), Complex{});
                    plan->execute(buf, Direction::forward);
                    const ComplexVector& spec = spectra.blocks[c];
                    for (std::size_t j = 0; j < buf.size(); ++j) acc[j] += mul(buf[j], spec[j]);
                }
                plan->execute(acc, Direction::inverse);
                std::copy(acc.begin(), acc.begin() + src.rows_, out.begin());
            } else {
                const auto plan = FftPlan::get(src.d_);
                ComplexVector buf(x.begin(), x.end());
                plan->execute(buf, Direction::forward);
                for (std::size_t j = 0; j < buf.size(); ++j) buf[j] = mul(buf[j], spectra.full[j]);
                plan->execute(buf, Direction::inverse);
                std::copy(buf.begin(), buf.begin() + src.rows_, out.begin());
            }
            break;
        }
        case EnsembleKind::dense_gaussian: {
            Eigen::Map<const Eigen::VectorXcd> xv(x.data(), static_cast<Eigen::Index>(x.size()));
            Eigen::Map<Eigen::VectorXcd> ov(out.data(), static_cast<Eigen::Index>(out.size()));
            ov.noalias() = src.gaussian_->cast<Complex>() * xv;
            break;
        }
    }
    return out;
}

ComplexVector apply_rows_adjoint(const RowSource& src, ConstComplexSpan y, CirculantPath path) {
    require_dimension(y.size(), src.rows_, "apply_rows_adjoint");
    ComplexVector out(src.d_, Complex{});
    switch (src.kind_) {
        case EnsembleKind::partial_fourier:
        case EnsembleKind::partial_hadamard: {
            for (std::size_t i = 0; i < src.rows_; ++i) out[src.indices_[i]] += y[i];
            if (src.kind_ == EnsembleKind::partial_fourier) {
                FftPlan::get(src.d_)->execute_adjoint(out);
            } else {
                fwht_inplace(out);
            }
            break;
        }
        case EnsembleKind::partial_circulant: {
            const auto& spectra = *src.spectra_;
            if (use_blocked(src.d_, spectra.block_len, path)) {
                const std::size_t block = spectra.block_len;
                const auto plan = FftPlan::get(2 * block);
                ComplexVector yf(2 * block, Complex{});
                std::copy(y.begin(), y.end(), yf.begin());
                plan->execute(yf, Direction::forward);
                ComplexVector buf(2 * block);
                for (std::size_t c = 0; c < spectra.blocks.size(); ++c) {
                    const ComplexVector& spec = spectra.blocks[c];
                    for (std::size_t j = 0; j < buf.size(); ++j) buf[j] = mul_conj(yf[j], spec[j]);
                    plan->execute(buf, Direction::inverse);
                    std::copy(buf.begin(), buf.begin() + block, out.begin() + c * block);
                }
            } else {
                const auto plan = FftPlan::get(src.d_);
                std::copy(y.begin(), y.end(), out.begin());
                plan->execute(out, Direction::forward);
                for (std::size_t j = 0; j < out.size(); ++j) out[j] = mul_conj(out[j], spectra.full[j]);
                plan->execute(out, Direction::inverse);
            }
            break;
        }
        case EnsembleKind::dense_gaussian: {
            Eigen::Map<const Eigen::VectorXcd> yv(y.data(), static_cast<Eigen::Index>(y.size()));
            Eigen::Map<Eigen::VectorXcd> ov(out.data(), static_cast<Eigen::Index>(out.size()));
            ov.noalias() = src.gaussian_->transpose().cast<Complex>() * yv;
            break;
        }
    }
    return out;
}

Eigen::MatrixXcd densify(const RowSource& src, std::size_t cap) {
    if (src.rows() > cap / src.dim()) {
        throw CapExceeded("densify: M*d = " + std::to_string(src.rows()) + "*" + std::to_string(src.dim()) +
                          " exceeds cap " + std::to_string(cap));
    }
    Eigen::MatrixXcd a(static_cast<Eigen::Index>(src.rows()), static_cast<Eigen::Index>(src.dim()));
    for (std::size_t i = 0; i < src.rows(); ++i) {
        const ComplexVector r = src.row(i);
        for (std::size_t s = 0; s < r.size(); ++s) a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(s)) = r[s];
    }
    return a;
}

}  // namespace fastsketch
