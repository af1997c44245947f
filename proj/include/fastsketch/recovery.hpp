#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "fastsketch/common.hpp"
#include "fastsketch/rng.hpp"
#include "fastsketch/sketch.hpp"

namespace fastsketch {

/// d-dimensional vector stored as strictly increasing zero-based indices and their nonzero values.
struct SparseSignal {
    std::size_t dim = 0;
    std::vector<std::size_t> support;
    ComplexVector values;

    std::size_t nonzeros() const noexcept { return support.size(); }
    ComplexVector to_dense() const;
    /// Throws std::invalid_argument if the invariants do not hold.
    void validate() const;
    static SparseSignal from_dense(ConstComplexSpan x);
};

/// Keeps the k entries of largest modulus; ties go to the smaller index. Zeros are dropped.
SparseSignal hard_threshold(ConstComplexSpan x, long long k);

struct RecoveryResult {
    SparseSignal estimate;
    std::size_t iterations_used = 0;
    double residual_norm = 0.0;  // ||y - Phi x_hat||
    bool converged = false;
    std::vector<std::size_t> residual_increases;  // iterations where the residual grew
};

struct RecoveryOptions {
    std::size_t k = 1;
    std::size_t max_iters = 500;
    /// Stop once ||x_{t+1} - x_t|| <= tol ||x_{t+1}|| or ||y - Phi x_{t+1}|| <= tol ||y||.
    double tol = 1e-10;
    /// Called after every iteration with the current dense iterate.
    std::function<void(std::size_t, const ComplexVector&)> on_iterate;
};

/// Iterative hard thresholding with unit step: x <- H_k(x + Phi^*(y - Phi x)), from x = 0.
RecoveryResult iht(const SketchOperator& op, ConstComplexSpan y, const RecoveryOptions& options);
RecoveryResult iht(const SketchOperator& op, ConstComplexSpan y, std::size_t k, std::size_t max_iters, double tol);

/// CoSaMP: merge the top-2k proxy entries with the current support, least squares on the merged
/// columns (regularized normal equations), prune to k. Needs 3k <= d.
RecoveryResult cosamp(const SketchOperator& op, ConstComplexSpan y, const RecoveryOptions& options);
RecoveryResult cosamp(const SketchOperator& op, ConstComplexSpan y, std::size_t k, std::size_t max_iters,
                      double tol);

struct L2L1Metrics {
    double err_l2 = 0.0;
    /// err_l2 / (||x - H_k(x)||_1 / sqrt(k)); +inf when the tail is 0 but the error is not.
    double head_tail_ratio = 0.0;
};

L2L1Metrics l2l1_metrics(ConstComplexSpan true_x, const SparseSignal& estimate, std::size_t k);

/// k-sparse signal with a uniform support and i.i.d. N(0, 1) real coefficients.
ComplexVector random_sparse_signal(std::size_t d, std::size_t k, Rng& rng);

/// Compressible signal: magnitudes (r + 1)^(-decay) for rank r, random signs, random placement.
ComplexVector power_law_signal(std::size_t d, double decay, Rng& rng);

/// Adds complex white Gaussian noise with E|n_i|^2 = sigma^2.
void add_measurement_noise(std::vector<Complex>& y, double sigma, Rng& rng);

}  // namespace fastsketch
