#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fastsketch/common.hpp"
#include "fastsketch/rng.hpp"
#include "fastsketch/sketch.hpp"

namespace fastsketch {

enum class RipMethod { exact, monte_carlo };
std::string to_string(RipMethod method);

/// Restricted isometry constant at sparsity k. For monte_carlo, `epsilon` is a certified lower
/// bound on the true constant (it is attained by an actual support).
struct RipReport {
    std::size_t k = 0;
    RipMethod method = RipMethod::exact;
    double epsilon = 0.0;
    std::uint64_t supports_evaluated = 0;
    std::optional<std::uint64_t> seed;
    double wall_time_seconds = 0.0;
};

inline constexpr std::uint64_t kDefaultSupportCap = 1'000'000;

/// C(n, k), saturating at UINT64_MAX.
std::uint64_t binomial(std::uint64_t n, std::uint64_t k) noexcept;

/// sum_r conj(a_r) b_r, accumulated in index order. Every Gram entry in this module goes
/// through here so exact and sampled constants agree bit-for-bit on identical columns.
Complex column_inner(ConstComplexSpan a, ConstComplexSpan b);

/// max(lambda_max - 1, 1 - lambda_min) of a Hermitian Gram block (lower triangle is read).
double gram_deviation(const Eigen::MatrixXcd& gram);

/// Exhaustive constant over all k-subsets of columns: the max over S of
/// max(sigma_max(S)^2 - 1, 1 - sigma_min(S)^2). Supports whose Gershgorin bound cannot beat the
/// running maximum skip the eigensolve; the result is unchanged by that screen.
/// Throws CapExceeded when C(d, k) > cap.
RipReport exact_rip_constant(const Eigen::MatrixXcd& mat, std::size_t k,
                             std::uint64_t cap = kDefaultSupportCap, std::size_t threads = 1);

/// Samples `trials` uniform k-subsets, extracts those columns with apply(op, e_j) and returns
/// the largest deviation seen.
RipReport mc_rip_lower_bound(const SketchOperator& op, std::size_t k, std::size_t trials, Rng& rng);
/// Same, with a fresh stream from `seed`, recorded on the report.
RipReport mc_rip_lower_bound(const SketchOperator& op, std::size_t k, std::size_t trials,
                             std::uint64_t seed);

/// Uniform k-subset of [0, n), sorted ascending (partial Fisher-Yates).
std::vector<std::size_t> sample_support(std::size_t n, std::size_t k, Rng& rng);

struct BucketNormProfile {
    std::size_t sparsity = 0;
    std::vector<double> per_bucket;  // sup over T_s of ||A_b x|| for each bucket b
    double overall = 0.0;            // max over buckets
};

/// Exact max_b sup_{x in T_s} ||A_b x|| on the unnormalized B x d bucket blocks A_b.
BucketNormProfile bucket_norm_profile(const SketchOperator& op, std::size_t s,
                                      std::uint64_t cap = kDefaultSupportCap);

struct OperatorNorms {
    double one_to_one = 0.0;    // max column l1 norm
    double inf_to_inf = 0.0;    // max row l1 norm
    double two_to_two = 0.0;    // spectral norm
    std::size_t power_iterations = 0;
    bool used_eigendecomposition = false;
};

/// Spectral norm by power iteration on A^*A (deterministic start, relative tolerance 1e-8,
/// at most 10^4 iterations), with a dense eigensolve fallback for matrices up to 64 x 64.
OperatorNorms operator_norms(const Eigen::MatrixXcd& mat);

/// a + bi -> (a, b), entrywise.
std::vector<double> complexify_vector(ConstComplexSpan x);
/// a + bi -> [[a, -b], [b, a]], entrywise.
Eigen::MatrixXd complexify_matrix(const Eigen::MatrixXcd& a);

/// Planning heuristic from the asymptotic regimes with every hidden constant set to 1 and
/// natural logarithms.
struct ParameterPlan {
    EnsembleKind kind = EnsembleKind::partial_fourier;
    std::size_t d = 0;
    std::size_t k = 0;
    double epsilon = 0.0;
    std::uint64_t m = 0;          // recommended rows, capped at d
    std::uint64_t m_formula = 0;  // ceil(k ln d ln^2(Bk) / eps^2) before the cap
    std::uint64_t B = 0;
    std::uint64_t d_effective = 0;
    std::vector<std::string> warnings;
};

ParameterPlan recommend_parameters(std::size_t d, std::size_t k, double epsilon, EnsembleKind kind);

}  // namespace fastsketch
