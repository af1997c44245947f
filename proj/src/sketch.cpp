#include "fastsketch/sketch.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <ostream>

namespace fastsketch {

SignTable::SignTable(std::size_t buckets, std::size_t bucket_size, std::vector<std::int8_t> signs)
    : m_(buckets), b_(bucket_size), signs_(std::move(signs)) {
    if (m_ == 0 || b_ == 0) throw std::invalid_argument("SignTable: m and B must be positive");
    require_dimension(signs_.size(), m_ * b_, "SignTable");
    for (std::int8_t s : signs_) {
        if (s != 1 && s != -1) throw std::invalid_argument("SignTable: entries must be +-1");
    }
}

SignTable SignTable::sample(std::size_t buckets, std::size_t bucket_size, Rng& rng) {
    std::vector<std::int8_t> signs(buckets * bucket_size);
    for (auto& s : signs) s = static_cast<std::int8_t>(rng.sign());
    return SignTable(buckets, bucket_size, std::move(signs));
}

SignTable SignTable::all_positive(std::size_t buckets, std::size_t bucket_size) {
    return SignTable(buckets, bucket_size, std::vector<std::int8_t>(buckets * bucket_size, 1));
}

SignTable SignTable::negated() const {
    std::vector<std::int8_t> flipped(signs_);
    for (auto& s : flipped) s = static_cast<std::int8_t>(-s);
    return SignTable(m_, b_, std::move(flipped));
}

std::size_t bucket_index(std::size_t bucket, std::size_t slot, std::size_t bucket_size) {
    if (bucket_size == 0) throw std::invalid_argument("bucket_index: B must be positive");
    if (bucket == 0) throw std::out_of_range("bucket_index: bucket is one-based");
    if (slot == 0 || slot > bucket_size) throw std::out_of_range("bucket_index: slot outside [1, B]");
    return bucket_size * (bucket - 1) + slot;
}

SketchOperator::SketchOperator(RowSource source, SignTable signs, std::optional<std::uint64_t> seed)
    : source_(std::move(source)), signs_(std::move(signs)), seed_(seed) {
    const std::size_t rows = signs_.buckets() * signs_.bucket_size();
    if (source_.rows() != rows) {
        throw DimensionError("SketchOperator: source has " + std::to_string(source_.rows()) +
                             " rows but m*B = " + std::to_string(rows));
    }
    scale_ = 1.0 / std::sqrt(static_cast<double>(rows));
}

SketchOperator build_sketch(std::size_t d, std::size_t buckets, std::size_t bucket_size,
                            EnsembleKind kind, std::uint64_t seed) {
    if (buckets == 0 || bucket_size == 0) throw std::invalid_argument("build_sketch: m and B must be positive");
    require_power_of_two(d, "build_sketch");
    const std::size_t rows = buckets * bucket_size;
    if (kind == EnsembleKind::partial_circulant && rows > d) {
        throw std::invalid_argument("build_sketch: circulant source needs m*B = " + std::to_string(rows) +
                                    " <= d = " + std::to_string(d) + "; zero-pad the signal to d' = " +
                                    std::to_string(next_power_of_two(rows)) + " or more");
    }
    RowSource source = sample_row_source(kind, d, rows, derive_seed(seed, 0, "rows"));
    Rng sign_rng(derive_seed(seed, 0, "signs"));
    SignTable signs = SignTable::sample(buckets, bucket_size, sign_rng);
    return SketchOperator(std::move(source), std::move(signs), seed);
}

ComplexVector apply(const SketchOperator& op, ConstComplexSpan x, CirculantPath path) {
    require_dimension(x.size(), op.dim(), "apply");
    const ComplexVector y = apply_rows(op.source(), x, path);
    const std::size_t m = op.buckets();
    const std::size_t bsize = op.bucket_size();
    const auto& sigma = op.signs().values();
    ComplexVector out(m);
    for (std::size_t b = 0; b < m; ++b) {
        Complex acc{};
        const std::size_t base = b * bsize;
        for (std::size_t i = 0; i < bsize; ++i) {
            if (sigma[base + i] > 0) {
                acc += y[base + i];
            } else {
                acc -= y[base + i];
            }
        }
        out[b] = acc * op.scale();
    }
    return out;
}

ComplexVector apply_adjoint(const SketchOperator& op, ConstComplexSpan z, CirculantPath path) {
    require_dimension(z.size(), op.buckets(), "apply_adjoint");
    const std::size_t bsize = op.bucket_size();
    const auto& sigma = op.signs().values();
    ComplexVector w(op.buckets() * bsize);
    for (std::size_t b = 0; b < op.buckets(); ++b) {
        const Complex v = z[b] * op.scale();
        for (std::size_t i = 0; i < bsize; ++i) w[b * bsize + i] = sigma[b * bsize + i] > 0 ? v : -v;
    }
    return apply_rows_adjoint(op.source(), w, path);
}

Eigen::MatrixXcd densify_sketch(const SketchOperator& op, std::size_t cap) {
    const std::size_t m = op.buckets();
    const std::size_t d = op.dim();
    if (m > cap / d) {
        throw CapExceeded("densify_sketch: m*d = " + std::to_string(m) + "*" + std::to_string(d) +
                          " exceeds cap " + std::to_string(cap));
    }
    Eigen::MatrixXcd phi = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(d));
    for (std::size_t b = 0; b < m; ++b) {
        for (std::size_t i = 0; i < op.bucket_size(); ++i) {
            const ComplexVector row = op.source().row(b * op.bucket_size() + i);
            const double s = op.signs().at(b, i);
            for (std::size_t t = 0; t < d; ++t) phi(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(t)) += s * row[t];
        }
    }
    phi *= op.scale();
    return phi;
}

ComplexVector sketch_column(const SketchOperator& op, std::size_t j) {
    if (j >= op.dim()) throw std::out_of_range("sketch_column: column index out of range");
    ComplexVector e(op.dim(), Complex{});
    e[j] = 1.0;
    return apply(op, e);
}

namespace {

template <typename T>
void put(std::ostream& out, T value) {
    static_assert(std::is_trivially_copyable_v<T>);
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
    out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

}  // namespace

void write_binary_dump(const SketchOperator& op, std::ostream& out) {
    out.write("FSKB", 4);
    put<std::uint32_t>(out, 1);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(op.kind()));
    put<std::uint64_t>(out, op.dim());
    put<std::uint64_t>(out, op.buckets());
    put<std::uint64_t>(out, op.bucket_size());
    put<std::uint64_t>(out, op.seed().value_or(0));
    const RowSource& src = op.source();
    switch (src.kind()) {
        case EnsembleKind::partial_fourier:
        case EnsembleKind::partial_hadamard:
            for (std::uint64_t t : src.row_indices()) put<std::uint64_t>(out, t);
            break;
        case EnsembleKind::partial_circulant:
            for (std::int8_t e : src.circulant_signs()) put<std::int8_t>(out, e);
            break;
        case EnsembleKind::dense_gaussian: {
            const Eigen::MatrixXd& g = src.gaussian_matrix();
            for (Eigen::Index i = 0; i < g.rows(); ++i) {
                for (Eigen::Index j = 0; j < g.cols(); ++j) put<double>(out, g(i, j));
            }
            break;
        }
    }
    for (std::int8_t s : op.signs().values()) put<std::int8_t>(out, s);
}

}  // namespace fastsketch
