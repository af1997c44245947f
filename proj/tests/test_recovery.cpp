#include "doctest.h"
#include "oracles.hpp"

#include "fastsketch/recovery.hpp"

using namespace fastsketch;
using oracle::Vec;

namespace {

// Phi with all d Fourier rows, B = 1 and positive signs: the unitary DFT.
SketchOperator unitary_dft(std::size_t d) {
    std::vector<std::uint64_t> all(d);
    for (std::size_t i = 0; i < d; ++i) all[i] = i;
    return SketchOperator(RowSource::partial_fourier(d, all), SignTable::all_positive(d, 1));
}

}  // namespace

TEST_CASE("hard threshold") {
    const SparseSignal a = hard_threshold(Vec{3.0, -5.0, 1.0}, 1);
    CHECK(a.support == std::vector<std::size_t>{1});
    CHECK(a.values == Vec{-5.0});

    const SparseSignal b = hard_threshold(Vec{2.0, -2.0, 0.0}, 1);
    CHECK(b.support == std::vector<std::size_t>{0});

    const SparseSignal c = hard_threshold(Vec{1.0, 0.0, -4.0, 2.0}, 4);
    CHECK(c.support == std::vector<std::size_t>{0, 2, 3});
    CHECK(c.to_dense() == Vec{1.0, 0.0, -4.0, 2.0});

    CHECK(hard_threshold(Vec{1.0, 2.0}, 0).nonzeros() == 0);
    CHECK_THROWS_AS(hard_threshold(Vec{1.0}, -1), std::invalid_argument);
    CHECK_THROWS_AS(hard_threshold(Vec{1.0}, 2), std::invalid_argument);
}

TEST_CASE("sparse signal invariants") {
    SparseSignal s;
    s.dim = 4;
    s.support = {0, 2};
    s.values = {1.0, 2.0};
    CHECK_NOTHROW(s.validate());
    s.support = {2, 0};
    CHECK_THROWS(s.validate());
    s.support = {0, 4};
    CHECK_THROWS(s.validate());
    s.support = {0, 2};
    s.values = {1.0, 0.0};
    CHECK_THROWS(s.validate());

    const SparseSignal f = SparseSignal::from_dense(Vec{0.0, 3.0, 0.0, -1.0});
    CHECK(f.support == std::vector<std::size_t>{1, 3});
    CHECK_NOTHROW(f.validate());
}

TEST_CASE("iht trivial cases") {
    const SketchOperator op = build_sketch(64, 16, 2, EnsembleKind::partial_fourier, 1);
    const RecoveryResult zero = iht(op, Vec(16), 3, 100, 1e-10);
    CHECK(zero.estimate.nonzeros() == 0);
    CHECK(zero.iterations_used == 1);
    CHECK(zero.converged);

    const SketchOperator u = unitary_dft(64);
    Rng rng(2);
    const Vec x = random_sparse_signal(64, 5, rng);
    const RecoveryResult r = iht(u, apply(u, x), 5, 50, 1e-10);
    CHECK(r.iterations_used == 1);
    CHECK(oracle::max_diff(r.estimate.to_dense(), x) < 1e-12);

    CHECK_THROWS_AS(iht(op, Vec(15), 3, 10, 1e-10), DimensionError);
    CHECK_THROWS(iht(op, Vec(16), 65, 10, 1e-10));
    CHECK_THROWS(iht(op, Vec(16), 3, 0, 1e-10));
}

TEST_CASE("iht iterates stay k-sparse and recover a sparse signal") {
    const std::size_t d = 256, k = 4;
    const SketchOperator op = build_sketch(d, 80, 8, EnsembleKind::partial_fourier, 3);
    Rng rng(4);
    const Vec x = random_sparse_signal(d, k, rng);
    RecoveryOptions options;
    options.k = k;
    std::size_t calls = 0;
    options.on_iterate = [&](std::size_t it, const ComplexVector& xi) {
        ++calls;
        CHECK(it == calls);
        std::size_t nnz = 0;
        for (const auto& v : xi) nnz += v != Complex{} ? 1 : 0;
        CHECK(nnz <= k);
    };
    const RecoveryResult r = iht(op, apply(op, x), options);
    CHECK(calls == r.iterations_used);
    CHECK(r.converged);
    Vec diff(d);
    const Vec xh = r.estimate.to_dense();
    for (std::size_t i = 0; i < d; ++i) diff[i] = xh[i] - x[i];
    CHECK(std::sqrt(oracle::sq_norm(diff) / oracle::sq_norm(x)) < 1e-6);
    const Vec res_vec = apply(op, xh);
    const Vec y = apply(op, x);
    Vec res(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) res[i] = y[i] - res_vec[i];
    CHECK(std::abs(std::sqrt(oracle::sq_norm(res)) - r.residual_norm) < 1e-12);
}

TEST_CASE("cosamp trivial cases") {
    const SketchOperator op = build_sketch(64, 16, 2, EnsembleKind::partial_fourier, 1);
    const RecoveryResult zero = cosamp(op, Vec(16), 3, 100, 1e-10);
    CHECK(zero.estimate.nonzeros() == 0);
    CHECK(zero.converged);
    CHECK_THROWS(cosamp(op, Vec(16), 22, 10, 1e-10));
}

TEST_CASE("cosamp on a small well-conditioned instance matches the pseudo-inverse") {
    const std::size_t d = 32, k = 2, m = 16;
    int checked = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const SketchOperator op = build_sketch(d, m, 2, EnsembleKind::partial_fourier, seed);
        Rng rng(derive_seed(seed, 0, "signal"));
        const Vec x = random_sparse_signal(d, k, rng);
        const Vec y = apply(op, x);

        const Eigen::MatrixXcd phi = densify_sketch(op);
        const SparseSignal truth = SparseSignal::from_dense(x);
        Eigen::MatrixXcd sub(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(k));
        for (std::size_t c = 0; c < k; ++c) sub.col(static_cast<Eigen::Index>(c)) = phi.col(static_cast<Eigen::Index>(truth.support[c]));
        const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(sub, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const auto& sv = svd.singularValues();
        if (sv(0) / sv(sv.size() - 1) > 3.0) continue;
        Eigen::VectorXcd yv(static_cast<Eigen::Index>(m));
        for (std::size_t i = 0; i < m; ++i) yv(static_cast<Eigen::Index>(i)) = y[i];
        const Eigen::VectorXcd pinv = svd.solve(yv);

        const RecoveryResult r = cosamp(op, y, k, 100, 1e-12);
        const Vec xh = r.estimate.to_dense();
        CHECK(oracle::max_diff(xh, x) < 1e-8);
        for (std::size_t c = 0; c < k; ++c) CHECK(std::abs(xh[truth.support[c]] - pinv(static_cast<Eigen::Index>(c))) < 1e-8);
        ++checked;
    }
    CHECK(checked >= 5);
}

TEST_CASE("recovery is deterministic") {
    const SketchOperator op = build_sketch(256, 64, 4, EnsembleKind::partial_hadamard, 7);
    Rng rng(8);
    const Vec x = random_sparse_signal(256, 3, rng);
    const Vec y = apply(op, x);
    for (auto* solver : {static_cast<RecoveryResult (*)(const SketchOperator&, ConstComplexSpan, std::size_t, std::size_t, double)>(&iht),
                         static_cast<RecoveryResult (*)(const SketchOperator&, ConstComplexSpan, std::size_t, std::size_t, double)>(&cosamp)}) {
        const RecoveryResult a = solver(op, y, 3, 200, 1e-10);
        const RecoveryResult b = solver(op, y, 3, 200, 1e-10);
        CHECK(a.estimate.support == b.estimate.support);
        CHECK(a.estimate.values == b.estimate.values);
        CHECK(a.iterations_used == b.iterations_used);
        CHECK(a.residual_norm == b.residual_norm);
        CHECK(a.residual_increases == b.residual_increases);
    }
}

TEST_CASE("l2/l1 metrics") {
    const Vec x{0.0, 2.0, 0.0, -1.0};
    const auto exact = l2l1_metrics(x, SparseSignal::from_dense(x), 2);
    CHECK(exact.err_l2 == 0.0);
    CHECK(exact.head_tail_ratio == 0.0);

    const Vec dense{3.0, -2.0, 1.0, 0.5};
    const auto same = l2l1_metrics(dense, SparseSignal::from_dense(dense), 2);
    CHECK(same.err_l2 == 0.0);
    CHECK(same.head_tail_ratio == 0.0);

    const auto off = l2l1_metrics(x, SparseSignal::from_dense(Vec{0.0, 2.0, 0.0, 0.0}), 2);
    CHECK(off.err_l2 == 1.0);
    CHECK(std::isinf(off.head_tail_ratio));

    const auto tail = l2l1_metrics(dense, SparseSignal::from_dense(Vec{3.0, -2.0, 0.0, 0.0}), 2);
    CHECK(tail.err_l2 == doctest::Approx(std::sqrt(1.25)));
    CHECK(tail.head_tail_ratio == doctest::Approx(std::sqrt(1.25) / (1.5 / std::sqrt(2.0))));
}

TEST_CASE("signal generators") {
    Rng rng(9);
    const Vec s = random_sparse_signal(100, 7, rng);
    CHECK(SparseSignal::from_dense(s).nonzeros() == 7);
    for (const auto& v : s) CHECK(v.imag() == 0.0);

    const Vec p = power_law_signal(64, 1.5, rng);
    std::vector<double> mags;
    for (const auto& v : p) mags.push_back(std::abs(v));
    std::sort(mags.rbegin(), mags.rend());
    for (std::size_t r = 0; r < mags.size(); ++r) {
        CHECK(mags[r] == doctest::Approx(std::pow(static_cast<double>(r + 1), -1.5)));
    }

    const double sigma = 0.3;
    double energy = 0.0;
    const std::size_t n = 20000;
    Vec y(n);
    add_measurement_noise(y, sigma, rng);
    for (const auto& v : y) energy += std::norm(v);
    CHECK(energy / n == doctest::Approx(sigma * sigma).epsilon(0.05));
    CHECK_THROWS(add_measurement_noise(y, -1.0, rng));
}
