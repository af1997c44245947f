#include "fastsketch/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include <Eigen/Dense>

#include "fastsketch/analysis.hpp"

namespace fastsketch {

ComplexVector SparseSignal::to_dense() const {
    ComplexVector x(dim, Complex{});
    for (std::size_t i = 0; i < support.size(); ++i) x[support[i]] = values[i];
    return x;
}

void SparseSignal::validate() const {
    if (support.size() != values.size()) throw std::invalid_argument("SparseSignal: support/value size mismatch");
    for (std::size_t i = 0; i < support.size(); ++i) {
        if (support[i] >= dim) throw std::invalid_argument("SparseSignal: index outside [0, d)");
        if (i > 0 && support[i] <= support[i - 1]) throw std::invalid_argument("SparseSignal: indices not increasing");
        if (values[i] == Complex{}) throw std::invalid_argument("SparseSignal: explicit zero stored");
    }
}

SparseSignal SparseSignal::from_dense(ConstComplexSpan x) {
    SparseSignal s;
    s.dim = x.size();
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] != Complex{}) {
            s.support.push_back(i);
            s.values.push_back(x[i]);
        }
    }
    return s;
}

namespace {

// Indices of the `count` largest-modulus entries, ties to the smaller index, in rank order.
std::vector<std::size_t> top_indices(ConstComplexSpan x, std::size_t count) {
    std::vector<std::size_t> idx(x.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    count = std::min(count, x.size());
    std::vector<double> mag(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) mag[i] = std::norm(x[i]);
    std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(count), idx.end(),
                      [&](std::size_t a, std::size_t b) { return mag[a] > mag[b] || (mag[a] == mag[b] && a < b); });
    idx.resize(count);
    return idx;
}

ComplexVector subtract(ConstComplexSpan a, ConstComplexSpan b) {
    ComplexVector out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
    return out;
}

double relative_change(const ComplexVector& next, const ComplexVector& prev) {
    double diff = 0.0;
    for (std::size_t i = 0; i < next.size(); ++i) diff += std::norm(next[i] - prev[i]);
    const double base = squared_norm(next);
    if (base == 0.0) return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return std::sqrt(diff / base);
}

void check_problem(const SketchOperator& op, ConstComplexSpan y, const RecoveryOptions& options) {
    require_dimension(y.size(), op.buckets(), "recovery measurements");
    if (options.k > op.dim()) throw std::invalid_argument("recovery: k exceeds d");
    if (options.max_iters == 0) throw std::invalid_argument("recovery: max_iters must be at least 1");
    if (!(options.tol >= 0.0)) throw std::invalid_argument("recovery: tol must be non-negative");
}

}  // namespace

SparseSignal hard_threshold(ConstComplexSpan x, long long k) {
    if (k < 0) throw std::invalid_argument("hard_threshold: k must be non-negative");
    if (static_cast<unsigned long long>(k) > x.size()) throw std::invalid_argument("hard_threshold: k exceeds d");
    std::vector<std::size_t> keep = top_indices(x, static_cast<std::size_t>(k));
    std::sort(keep.begin(), keep.end());
    SparseSignal s;
    s.dim = x.size();
    for (std::size_t i : keep) {
        if (x[i] != Complex{}) {
            s.support.push_back(i);
            s.values.push_back(x[i]);
        }
    }
    return s;
}

RecoveryResult iht(const SketchOperator& op, ConstComplexSpan y, const RecoveryOptions& options) {
    check_problem(op, y, options);
    const double y_norm = norm2(y);
    ComplexVector x(op.dim(), Complex{});
    ComplexVector residual(y.begin(), y.end());
    double prev_residual = y_norm;

    RecoveryResult result;
    for (std::size_t it = 1; it <= options.max_iters; ++it) {
        ComplexVector step = apply_adjoint(op, residual);
        for (std::size_t i = 0; i < step.size(); ++i) step[i] += x[i];
        ComplexVector next = hard_threshold(step, static_cast<long long>(options.k)).to_dense();

        const double change = relative_change(next, x);
        x = std::move(next);
        residual = subtract(y, apply(op, x));
        const double r = norm2(residual);
        if (r > prev_residual) result.residual_increases.push_back(it);
        prev_residual = r;
        result.iterations_used = it;
        if (options.on_iterate) options.on_iterate(it, x);
        if (change <= options.tol || r <= options.tol * y_norm) {
            result.converged = true;
            break;
        }
    }
    result.residual_norm = prev_residual;
    result.estimate = SparseSignal::from_dense(x);
    return result;
}

RecoveryResult iht(const SketchOperator& op, ConstComplexSpan y, std::size_t k, std::size_t max_iters, double tol) {
    RecoveryOptions options;
    options.k = k;
    options.max_iters = max_iters;
    options.tol = tol;
    return iht(op, y, options);
}

RecoveryResult cosamp(const SketchOperator& op, ConstComplexSpan y, const RecoveryOptions& options) {
    check_problem(op, y, options);
    if (3 * options.k > op.dim()) throw std::invalid_argument("cosamp: requires 3k <= d");
    const double y_norm = norm2(y);
    const std::size_t m = op.buckets();
    const std::size_t k = options.k;

    std::map<std::size_t, ComplexVector> column_cache;
    auto column = [&](std::size_t j) -> const ComplexVector& {
        auto it = column_cache.find(j);
        if (it == column_cache.end()) it = column_cache.emplace(j, sketch_column(op, j)).first;
        return it->second;
    };

    ComplexVector x(op.dim(), Complex{});
    ComplexVector residual(y.begin(), y.end());
    double prev_residual = y_norm;
    RecoveryResult result;
    bool failed = false;

    for (std::size_t it = 1; it <= options.max_iters; ++it) {
        const ComplexVector proxy = apply_adjoint(op, residual);
        std::vector<std::size_t> merged = top_indices(proxy, 2 * k);
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (x[i] != Complex{}) merged.push_back(i);
        }
        std::sort(merged.begin(), merged.end());
        merged.erase(std::unique(merged.begin(), merged.end()), merged.end());

        const auto cols = static_cast<Eigen::Index>(merged.size());
        Eigen::MatrixXcd sub(static_cast<Eigen::Index>(m), cols);
        for (Eigen::Index c = 0; c < cols; ++c) {
            const ComplexVector& col = column(merged[static_cast<std::size_t>(c)]);
            for (std::size_t r = 0; r < m; ++r) sub(static_cast<Eigen::Index>(r), c) = col[r];
        }
        Eigen::Map<const Eigen::VectorXcd> yv(y.data(), static_cast<Eigen::Index>(m));
        Eigen::MatrixXcd normal = sub.adjoint() * sub;
        normal.diagonal().array() += 1e-12;
        const Eigen::LDLT<Eigen::MatrixXcd> ldlt(normal);
        const Eigen::VectorXcd coeffs = ldlt.solve(sub.adjoint() * yv);
        if (ldlt.info() != Eigen::Success || !coeffs.allFinite()) {
            failed = true;
            result.iterations_used = it;
            break;
        }

        ComplexVector candidate(op.dim(), Complex{});
        for (Eigen::Index c = 0; c < cols; ++c) candidate[merged[static_cast<std::size_t>(c)]] = coeffs(c);
        ComplexVector next = hard_threshold(candidate, static_cast<long long>(k)).to_dense();

        const double change = relative_change(next, x);
        x = std::move(next);
        residual = subtract(y, apply(op, x));
        const double r = norm2(residual);
        if (r > prev_residual) result.residual_increases.push_back(it);
        prev_residual = r;
        result.iterations_used = it;
        if (options.on_iterate) options.on_iterate(it, x);
        if (change <= options.tol || r <= options.tol * y_norm) {
            result.converged = true;
            break;
        }
    }
    if (failed) result.converged = false;
    result.residual_norm = prev_residual;
    result.estimate = SparseSignal::from_dense(x);
    return result;
}

RecoveryResult cosamp(const SketchOperator& op, ConstComplexSpan y, std::size_t k, std::size_t max_iters,
                      double tol) {
    RecoveryOptions options;
    options.k = k;
    options.max_iters = max_iters;
    options.tol = tol;
    return cosamp(op, y, options);
}

L2L1Metrics l2l1_metrics(ConstComplexSpan true_x, const SparseSignal& estimate, std::size_t k) {
    require_dimension(estimate.dim, true_x.size(), "l2l1_metrics");
    if (k == 0 || k > true_x.size()) throw std::invalid_argument("l2l1_metrics: k must lie in [1, d]");
    const ComplexVector xhat = estimate.to_dense();
    L2L1Metrics metrics;
    metrics.err_l2 = norm2(subtract(xhat, true_x));

    const ComplexVector head = hard_threshold(true_x, static_cast<long long>(k)).to_dense();
    double tail_l1 = 0.0;
    for (std::size_t i = 0; i < true_x.size(); ++i) tail_l1 += std::abs(true_x[i] - head[i]);
    const double scaled_tail = tail_l1 / std::sqrt(static_cast<double>(k));
    if (scaled_tail == 0.0) {
        metrics.head_tail_ratio = metrics.err_l2 == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    } else {
        metrics.head_tail_ratio = metrics.err_l2 / scaled_tail;
    }
    return metrics;
}

ComplexVector random_sparse_signal(std::size_t d, std::size_t k, Rng& rng) {
    ComplexVector x(d, Complex{});
    for (std::size_t i : sample_support(d, k, rng)) {
        double v = rng.normal();
        while (v == 0.0) v = rng.normal();
        x[i] = v;
    }
    return x;
}

ComplexVector power_law_signal(std::size_t d, double decay, Rng& rng) {
    std::vector<std::size_t> place(d);
    std::iota(place.begin(), place.end(), std::size_t{0});
    for (std::size_t i = d; i > 1; --i) std::swap(place[i - 1], place[rng.uniform_index(i)]);
    ComplexVector x(d);
    for (std::size_t r = 0; r < d; ++r) {
        x[place[r]] = static_cast<double>(rng.sign()) * std::pow(static_cast<double>(r + 1), -decay);
    }
    return x;
}

void add_measurement_noise(std::vector<Complex>& y, double sigma, Rng& rng) {
    if (sigma < 0.0) throw std::invalid_argument("add_measurement_noise: sigma must be non-negative");
    const double s = sigma / std::sqrt(2.0);
    for (auto& v : y) {
        const double re = rng.normal();
        const double im = rng.normal();
        v += Complex{s * re, s * im};
    }
}

}  // namespace fastsketch
