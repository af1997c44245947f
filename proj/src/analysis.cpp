#include "fastsketch/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>

#include "fastsketch/parallel.hpp"

namespace fastsketch {

std::string to_string(RipMethod method) {
    return method == RipMethod::exact ? "exact" : "monte_carlo";
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) noexcept {
    if (k > n) return 0;
    k = std::min(k, n - k);
    unsigned __int128 acc = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        acc = acc * (n - k + i) / i;
        if (acc > std::numeric_limits<std::uint64_t>::max()) return std::numeric_limits<std::uint64_t>::max();
    }
    return static_cast<std::uint64_t>(acc);
}

Complex column_inner(ConstComplexSpan a, ConstComplexSpan b) {
    require_dimension(b.size(), a.size(), "column_inner");
    double re = 0.0;
    double im = 0.0;
    for (std::size_t r = 0; r < a.size(); ++r) {
        re += a[r].real() * b[r].real() + a[r].imag() * b[r].imag();
        im += a[r].real() * b[r].imag() - a[r].imag() * b[r].real();
    }
    return {re, im};
}

double gram_deviation(const Eigen::MatrixXcd& gram) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(gram, Eigen::EigenvaluesOnly);
    const auto& ev = solver.eigenvalues();
    return std::max(ev(ev.size() - 1) - 1.0, 1.0 - ev(0));
}

namespace {

double elapsed_seconds(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

double top_eigenvalue(const Eigen::MatrixXcd& gram) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(gram, Eigen::EigenvaluesOnly);
    return solver.eigenvalues()(gram.rows() - 1);
}

Eigen::MatrixXcd gram_of_columns(const std::vector<ComplexVector>& cols) {
    const auto n = static_cast<Eigen::Index>(cols.size());
    Eigen::MatrixXcd g(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j <= i; ++j) {
            g(i, j) = column_inner(cols[static_cast<std::size_t>(i)], cols[static_cast<std::size_t>(j)]);
            g(j, i) = std::conj(g(i, j));
        }
    }
    return g;
}

Eigen::MatrixXcd gram_of_matrix(const Eigen::MatrixXcd& mat) {
    const auto rows = static_cast<std::size_t>(mat.rows());
    const Eigen::Index d = mat.cols();
    Eigen::MatrixXcd g(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        ConstComplexSpan ci(mat.col(i).data(), rows);
        for (Eigen::Index j = 0; j <= i; ++j) {
            g(i, j) = column_inner(ci, ConstComplexSpan(mat.col(j).data(), rows));
            g(j, i) = std::conj(g(i, j));
        }
    }
    return g;
}

enum class Objective { deviation, top_eigenvalue };

// Exhaustive max of an eigenvalue objective over all k-subsets of a d x d Gram matrix.
// A support is solved only if its Gershgorin bound reaches the running threshold.
class SupportSearch {
public:
    SupportSearch(const Eigen::MatrixXcd& gram, std::size_t k, Objective objective)
        : gram_(gram), k_(k), d_(static_cast<std::size_t>(gram.rows())), objective_(objective),
          abs_(gram.cwiseAbs()), diag_(d_) {
        for (std::size_t a = 0; a < d_; ++a) {
            const double g = gram_(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(a)).real();
            diag_[a] = objective_ == Objective::deviation ? std::abs(g - 1.0) : g;
        }
    }

    double run(std::size_t threads) {
        // Lower bound from 1- and 2-sparse supports; valid because the objective is monotone
        // under adding columns (interlacing).
        double lower = *std::max_element(diag_.begin(), diag_.end());
        if (k_ >= 2) {
            for (std::size_t i = 0; i < d_; ++i) {
                for (std::size_t j = i + 1; j < d_; ++j) lower = std::max(lower, pair_value(i, j));
            }
        }
        lower_ = lower * (1.0 - 1e-10);
        best_.store(-std::numeric_limits<double>::infinity());
        const std::size_t first_count = d_ - k_ + 1;
        parallel_for(first_count, threads, [&](std::size_t s0) { search_from(s0); });
        return best_.load();
    }

private:
    double pair_value(std::size_t i, std::size_t j) const {
        const double a = gram_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)).real();
        const double b = gram_(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)).real();
        const double c = abs_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        const double mid = 0.5 * (a + b);
        const double rad = std::hypot(0.5 * (a - b), c);
        return objective_ == Objective::deviation ? std::max(mid + rad - 1.0, 1.0 - (mid - rad)) : mid + rad;
    }

    double threshold() const { return std::max(lower_, best_.load(std::memory_order_relaxed) * (1.0 - 1e-10)); }

    void offer(double value) {
        double cur = best_.load(std::memory_order_relaxed);
        while (value > cur && !best_.compare_exchange_weak(cur, value)) {
        }
    }

    void evaluate(const std::vector<std::size_t>& chosen) {
        Eigen::MatrixXcd sub(static_cast<Eigen::Index>(k_), static_cast<Eigen::Index>(k_));
        for (std::size_t a = 0; a < k_; ++a) {
            for (std::size_t b = 0; b <= a; ++b) {
                sub(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
                    gram_(static_cast<Eigen::Index>(chosen[a]), static_cast<Eigen::Index>(chosen[b]));
                sub(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)) =
                    std::conj(sub(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)));
            }
        }
        offer(objective_ == Objective::deviation ? gram_deviation(sub) : top_eigenvalue(sub));
    }

    void search_from(std::size_t s0) {
        std::vector<std::size_t> chosen(k_);
        std::vector<std::vector<double>> partial(k_ + 1, std::vector<double>(k_, 0.0));
        chosen[0] = s0;
        descend(1, s0 + 1, chosen, partial);
    }

    // partial[depth][a] = sum of |G| between chosen[a] and the other chosen columns so far.
    void descend(std::size_t depth, std::size_t start, std::vector<std::size_t>& chosen,
                 std::vector<std::vector<double>>& partial) {
        const std::vector<double>& p = partial[depth];
        if (depth == k_) {
            double bound = 0.0;
            for (std::size_t a = 0; a < k_; ++a) bound = std::max(bound, diag_[chosen[a]] + p[a]);
            if (bound >= threshold()) evaluate(chosen);
            return;
        }
        std::vector<const double*> cols(depth);
        for (std::size_t a = 0; a < depth; ++a) cols[a] = abs_.col(static_cast<Eigen::Index>(chosen[a])).data();
        const std::size_t stop = d_ - (k_ - depth) + 1;
        if (depth + 1 == k_) {
            for (std::size_t q = start; q < stop; ++q) {
                double bound = 0.0;
                double row_q = diag_[q];
                for (std::size_t a = 0; a < depth; ++a) {
                    const double g = cols[a][q];
                    bound = std::max(bound, diag_[chosen[a]] + p[a] + g);
                    row_q += g;
                }
                bound = std::max(bound, row_q);
                if (bound >= threshold()) {
                    chosen[depth] = q;
                    evaluate(chosen);
                }
            }
            return;
        }
        std::vector<double>& next = partial[depth + 1];
        for (std::size_t q = start; q < stop; ++q) {
            double row_q = 0.0;
            for (std::size_t a = 0; a < depth; ++a) {
                const double g = cols[a][q];
                next[a] = p[a] + g;
                row_q += g;
            }
            next[depth] = row_q;
            chosen[depth] = q;
            descend(depth + 1, q + 1, chosen, partial);
        }
    }

    const Eigen::MatrixXcd& gram_;
    std::size_t k_;
    std::size_t d_;
    Objective objective_;
    Eigen::MatrixXd abs_;
    std::vector<double> diag_;
    double lower_ = 0.0;
    std::atomic<double> best_{0.0};
};

}  // namespace

RipReport exact_rip_constant(const Eigen::MatrixXcd& mat, std::size_t k, std::uint64_t cap,
                             std::size_t threads) {
    const auto start = std::chrono::steady_clock::now();
    const auto d = static_cast<std::size_t>(mat.cols());
    if (k == 0) throw std::invalid_argument("exact_rip_constant: k must be positive");
    if (k > d || k > static_cast<std::size_t>(mat.rows())) {
        throw std::invalid_argument("exact_rip_constant: k exceeds min(m, d)");
    }
    const std::uint64_t supports = binomial(d, k);
    if (supports > cap) {
        throw CapExceeded("exact_rip_constant: C(" + std::to_string(d) + ", " + std::to_string(k) + ") = " +
                          std::to_string(supports) + " supports exceeds cap " + std::to_string(cap) +
                          "; use the Monte-Carlo lower bound instead");
    }
    const Eigen::MatrixXcd gram = gram_of_matrix(mat);
    SupportSearch search(gram, k, Objective::deviation);

    RipReport report;
    report.k = k;
    report.method = RipMethod::exact;
    report.epsilon = search.run(std::max<std::size_t>(threads, 1));
    report.supports_evaluated = supports;
    report.wall_time_seconds = elapsed_seconds(start);
    return report;
}

std::vector<std::size_t> sample_support(std::size_t n, std::size_t k, Rng& rng) {
    if (k > n) throw std::invalid_argument("sample_support: k exceeds n");
    std::vector<std::size_t> pool(n);
    for (std::size_t i = 0; i < n; ++i) pool[i] = i;
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.uniform_index(n - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    std::sort(pool.begin(), pool.end());
    return pool;
}

RipReport mc_rip_lower_bound(const SketchOperator& op, std::size_t k, std::size_t trials, Rng& rng) {
    const auto start = std::chrono::steady_clock::now();
    if (trials == 0) throw std::invalid_argument("mc_rip_lower_bound: trials must be positive");
    if (k == 0 || k > op.dim()) throw std::invalid_argument("mc_rip_lower_bound: k outside [1, d]");

    double best = 0.0;
    std::vector<ComplexVector> cols(k);
    for (std::size_t t = 0; t < trials; ++t) {
        const auto support = sample_support(op.dim(), k, rng);
        for (std::size_t a = 0; a < k; ++a) cols[a] = sketch_column(op, support[a]);
        best = std::max(best, gram_deviation(gram_of_columns(cols)));
    }
    RipReport report;
    report.k = k;
    report.method = RipMethod::monte_carlo;
    report.epsilon = best;
    report.supports_evaluated = trials;
    report.wall_time_seconds = elapsed_seconds(start);
    return report;
}

RipReport mc_rip_lower_bound(const SketchOperator& op, std::size_t k, std::size_t trials, std::uint64_t seed) {
    Rng rng(seed);
    RipReport report = mc_rip_lower_bound(op, k, trials, rng);
    report.seed = seed;
    return report;
}

BucketNormProfile bucket_norm_profile(const SketchOperator& op, std::size_t s, std::uint64_t cap) {
    const std::size_t d = op.dim();
    if (s > d) throw std::invalid_argument("bucket_norm_profile: s exceeds d");
    BucketNormProfile profile;
    profile.sparsity = s;
    profile.per_bucket.assign(op.buckets(), 0.0);
    if (s == 0) return profile;
    const std::uint64_t supports = binomial(d, s);
    if (supports > cap) {
        throw CapExceeded("bucket_norm_profile: C(" + std::to_string(d) + ", " + std::to_string(s) +
                          ") supports exceeds cap " + std::to_string(cap));
    }
    const std::size_t bsize = op.bucket_size();
    for (std::size_t b = 0; b < op.buckets(); ++b) {
        Eigen::MatrixXcd block(static_cast<Eigen::Index>(bsize), static_cast<Eigen::Index>(d));
        for (std::size_t i = 0; i < bsize; ++i) {
            const ComplexVector row = op.source().row(b * bsize + i);
            for (std::size_t t = 0; t < d; ++t) block(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t)) = row[t];
        }
        const Eigen::MatrixXcd gram = gram_of_matrix(block);
        SupportSearch search(gram, s, Objective::top_eigenvalue);
        profile.per_bucket[b] = std::sqrt(std::max(search.run(1), 0.0));
        profile.overall = std::max(profile.overall, profile.per_bucket[b]);
    }
    return profile;
}

OperatorNorms operator_norms(const Eigen::MatrixXcd& mat) {
    OperatorNorms norms;
    if (mat.size() == 0) return norms;
    if (!mat.allFinite()) throw std::invalid_argument("operator_norms: non-finite entries");
    norms.one_to_one = mat.cwiseAbs().colwise().sum().maxCoeff();
    norms.inf_to_inf = mat.cwiseAbs().rowwise().sum().maxCoeff();
    if (norms.one_to_one == 0.0) return norms;

    constexpr std::size_t kMaxIterations = 10'000;
    constexpr double kTolerance = 1e-8;
    Rng rng(0x5eed5eed5eed5eedULL);
    Eigen::VectorXcd v(mat.cols());
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = Complex{rng.uniform01() - 0.5, rng.uniform01() - 0.5};
    v.normalize();

    double lambda = 0.0;
    bool converged = false;
    for (std::size_t it = 0; it < kMaxIterations; ++it) {
        const Eigen::VectorXcd w = mat.adjoint() * (mat * v);
        const double next = v.dot(w).real();  // Rayleigh quotient, never above lambda_max
        norms.power_iterations = it + 1;
        const double wn = w.norm();
        if (wn == 0.0) {
            lambda = 0.0;
            converged = true;
            break;
        }
        v = w / wn;
        if (it > 0 && std::abs(next - lambda) <= kTolerance * std::abs(next)) {
            lambda = std::max(lambda, next);
            converged = true;
            break;
        }
        lambda = next;
    }
    if (!converged && mat.rows() <= 64 && mat.cols() <= 64) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(mat.adjoint() * mat, Eigen::EigenvaluesOnly);
        lambda = solver.eigenvalues().maxCoeff();
        norms.used_eigendecomposition = true;
    }
    norms.two_to_two = std::sqrt(std::max(lambda, 0.0));
    return norms;
}

std::vector<double> complexify_vector(ConstComplexSpan x) {
    std::vector<double> out(2 * x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        out[2 * i] = x[i].real();
        out[2 * i + 1] = x[i].imag();
    }
    return out;
}

Eigen::MatrixXd complexify_matrix(const Eigen::MatrixXcd& a) {
    Eigen::MatrixXd out(2 * a.rows(), 2 * a.cols());
    for (Eigen::Index r = 0; r < a.rows(); ++r) {
        for (Eigen::Index c = 0; c < a.cols(); ++c) {
            const double re = a(r, c).real();
            const double im = a(r, c).imag();
            out(2 * r, 2 * c) = re;
            out(2 * r, 2 * c + 1) = -im + 0.0;  // no negative zeros
            out(2 * r + 1, 2 * c) = im;
            out(2 * r + 1, 2 * c + 1) = re;
        }
    }
    return out;
}

namespace {

std::uint64_t ceil_positive(double v) {
    if (!(v > 1.0)) return 1;
    if (v >= 1.8e19) return std::numeric_limits<std::uint64_t>::max();
    return static_cast<std::uint64_t>(std::ceil(v));
}

double rows_formula(std::size_t k, double ln_d, std::uint64_t B, double epsilon) {
    const double l = std::log(static_cast<double>(B) * static_cast<double>(k));
    return static_cast<double>(k) * ln_d * l * l / (epsilon * epsilon);
}

}  // namespace

ParameterPlan recommend_parameters(std::size_t d, std::size_t k, double epsilon, EnsembleKind kind) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("recommend_parameters: epsilon must lie in (0, 1)");
    if (k == 0 || k > d) throw std::invalid_argument("recommend_parameters: k must lie in [1, d]");
    if (kind == EnsembleKind::dense_gaussian) {
        throw std::invalid_argument("recommend_parameters: no structured regime for the dense Gaussian baseline");
    }
    ParameterPlan plan;
    plan.kind = kind;
    plan.d = d;
    plan.k = k;
    plan.epsilon = epsilon;
    const double ln_d = std::log(static_cast<double>(d));
    const double ln_k = std::log(static_cast<double>(k));

    if (kind == EnsembleKind::partial_circulant) {
        // B >= ln^2 m ln^2 k ln^2 d depends on m, and m depends on B: iterate to a fixed point
        // starting from m = k ln d ln^2(k ln d) / eps^2.
        const double kl = static_cast<double>(k) * ln_d;
        std::uint64_t m = ceil_positive(kl * std::pow(std::log(std::max(kl, 1.0)), 2) / (epsilon * epsilon));
        std::uint64_t B = 1;
        for (int iter = 0; iter < 64; ++iter) {
            const double ln_m = std::log(static_cast<double>(m));
            B = ceil_positive(ln_m * ln_m * ln_k * ln_k * ln_d * ln_d);
            const std::uint64_t next = ceil_positive(rows_formula(k, ln_d, B, epsilon));
            if (next == m) break;
            m = next;
        }
        plan.B = B;
        plan.m_formula = m;
        const double ln_m = std::log(static_cast<double>(m));
        if (static_cast<double>(k) < ln_m * ln_m) {
            plan.warnings.push_back("k below the circulant regime floor k >= ln^2 m");
        }
    } else {
        plan.B = ceil_positive(std::pow(ln_d, 6.5));
        plan.m_formula = ceil_positive(rows_formula(k, ln_d, plan.B, epsilon));
        const double ln_m = std::log(static_cast<double>(plan.m_formula));
        if (static_cast<double>(k) < std::pow(ln_m, 2.5)) {
            plan.warnings.push_back("k below the bounded-orthogonal regime floor k >= ln^2.5 m");
        }
    }

    plan.m = std::min<std::uint64_t>(plan.m_formula, d);
    if (plan.m < plan.m_formula) {
        plan.warnings.push_back("m capped at d = " + std::to_string(d) + " (formula gives " +
                                std::to_string(plan.m_formula) + ")");
    }
    plan.d_effective = d;
    if (kind == EnsembleKind::partial_circulant) {
        const unsigned __int128 rows = static_cast<unsigned __int128>(plan.m) * plan.B;
        if (rows > (static_cast<unsigned __int128>(1) << 62)) {
            throw std::overflow_error("recommend_parameters: m*B too large to zero-pad");
        }
        const auto needed = static_cast<std::uint64_t>(rows);
        if (needed > d) {
            plan.d_effective = next_power_of_two(needed);
            plan.warnings.push_back("circulant needs m*B <= d: zero-pad d from " + std::to_string(d) + " to " +
                                    std::to_string(plan.d_effective));
        }
    }
    return plan;
}

}  // namespace fastsketch
