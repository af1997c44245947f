#include "doctest.h"
#include "oracles.hpp"

#include "fastsketch/jl.hpp"

using namespace fastsketch;
using oracle::Vec;

namespace {

PointSet gaussian_points(std::size_t n, std::size_t d, std::mt19937_64& gen) {
    PointSet pts;
    pts.dim = d;
    pts.complex_valued = true;
    for (std::size_t i = 0; i < n; ++i) pts.points.push_back(oracle::random_vector(d, gen));
    return pts;
}

}  // namespace

TEST_CASE("column signs") {
    const auto xi = jl_column_signs(1000, 4);
    for (auto s : xi) CHECK((s == 1 || s == -1));
    CHECK(xi == jl_column_signs(1000, 4));
    CHECK(xi != jl_column_signs(1000, 5));

    std::mt19937_64 gen(40);
    const Vec x = oracle::random_vector(1000, gen);
    Vec flipped(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) flipped[i] = static_cast<double>(xi[i]) * x[i];
    CHECK(oracle::sq_norm(flipped) == oracle::sq_norm(x));
}

TEST_CASE("embedding trivial point sets") {
    const SketchOperator op = build_sketch(64, 8, 2, EnsembleKind::partial_fourier, 3);
    PointSet zero;
    zero.dim = 64;
    zero.points.push_back(Vec(64));
    const PointSet e = jl_embed(op, zero, 1);
    REQUIRE(e.size() == 1);
    CHECK(e.dim == 8);
    CHECK(oracle::max_abs(e.points[0]) == 0.0);

    std::mt19937_64 gen(41);
    PointSet twins;
    twins.dim = 64;
    twins.complex_valued = true;
    const Vec p = oracle::random_vector(64, gen);
    twins.points = {p, p};
    const PointSet te = jl_embed(op, twins, 2);
    CHECK(te.points[0] == te.points[1]);
    const DistortionReport r = distortion_report(twins, te);
    CHECK(r.pairs_evaluated == 0);
    CHECK(r.zero_distance_pairs == 1);
}

TEST_CASE("embedding equals dense operator times diagonal signs") {
    std::mt19937_64 gen(42);
    for (EnsembleKind kind : {EnsembleKind::partial_fourier, EnsembleKind::partial_hadamard,
                              EnsembleKind::partial_circulant, EnsembleKind::dense_gaussian}) {
        const SketchOperator op = build_sketch(64, 8, 4, kind, 6);
        const PointSet pts = gaussian_points(10, 64, gen);
        const PointSet emb = jl_embed(op, pts, 99);
        const auto xi = jl_column_signs(64, 99);
        Eigen::MatrixXcd phi = densify_sketch(op);
        for (Eigen::Index j = 0; j < 64; ++j) phi.col(j) *= static_cast<double>(xi[static_cast<std::size_t>(j)]);
        for (std::size_t i = 0; i < pts.size(); ++i) {
            CHECK(oracle::rel_err(emb.points[i], oracle::mat_vec(phi, pts.points[i])) < 1e-10);
        }
    }
}

TEST_CASE("real inputs to real ensembles give real embeddings") {
    PointSet pts;
    pts.dim = 32;
    std::mt19937_64 gen(43);
    std::normal_distribution<double> nd;
    for (int i = 0; i < 3; ++i) {
        Vec p(32);
        for (auto& v : p) v = nd(gen);
        pts.points.push_back(p);
    }
    const PointSet e = jl_embed(build_sketch(32, 4, 2, EnsembleKind::partial_hadamard, 1), pts, 2);
    CHECK_FALSE(e.complex_valued);
    for (const auto& p : e.points) {
        for (const auto& v : p) CHECK(v.imag() == 0.0);
    }
    CHECK(jl_embed(build_sketch(32, 4, 2, EnsembleKind::partial_fourier, 1), pts, 2).complex_valued);
}

TEST_CASE("distortion report trivial embeddings") {
    std::mt19937_64 gen(44);
    const PointSet pts = gaussian_points(6, 16, gen);
    const DistortionReport same = distortion_report(pts, pts);
    CHECK(same.epsilon_hat == 0.0);
    CHECK(same.pairs_evaluated == 15);

    PointSet doubled = pts;
    for (auto& p : doubled.points) {
        for (auto& v : p) v *= 2.0;
    }
    const DistortionReport r = distortion_report(pts, doubled);
    CHECK(r.max_expansion == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(r.min_contraction == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(r.epsilon_hat == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("distortion report against a direct pair scan") {
    std::mt19937_64 gen(45);
    const PointSet pts = gaussian_points(12, 256, gen);
    const SketchOperator op = build_sketch(256, 64, 2, EnsembleKind::partial_circulant, 8);
    const PointSet emb = jl_embed(op, pts, 9);
    const DistortionReport r = distortion_report(pts, emb);
    double hi = 0.0, lo = 1e300;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            Vec a(256), b(64);
            for (std::size_t t = 0; t < 256; ++t) a[t] = pts.points[i][t] - pts.points[j][t];
            for (std::size_t t = 0; t < 64; ++t) b[t] = emb.points[i][t] - emb.points[j][t];
            const double ratio = std::sqrt(oracle::sq_norm(b) / oracle::sq_norm(a));
            hi = std::max(hi, ratio);
            lo = std::min(lo, ratio);
        }
    }
    CHECK(r.max_expansion == doctest::Approx(hi).epsilon(1e-12));
    CHECK(r.min_contraction == doctest::Approx(lo).epsilon(1e-12));
    CHECK(r.min_contraction <= r.max_expansion);
    CHECK(r.epsilon_hat == doctest::Approx(std::max(hi - 1.0, 1.0 - lo)).epsilon(1e-12));
}

TEST_CASE("jl errors") {
    std::mt19937_64 gen(46);
    const PointSet pts = gaussian_points(4, 32, gen);
    const SketchOperator op = build_sketch(64, 4, 2, EnsembleKind::partial_fourier, 1);
    CHECK_THROWS_AS(jl_embed(op, pts, 1), DimensionError);

    PointSet fewer = pts;
    fewer.points.pop_back();
    CHECK_THROWS(distortion_report(pts, fewer));
    PointSet single = pts;
    single.points.resize(1);
    CHECK_THROWS(distortion_report(single, single));

    PointSet ragged = pts;
    ragged.points[2].pop_back();
    CHECK_THROWS(ragged.validate());
}

TEST_CASE("jl embedding is deterministic") {
    std::mt19937_64 gen(47);
    const PointSet pts = gaussian_points(5, 128, gen);
    const SketchOperator op = build_sketch(128, 16, 4, EnsembleKind::partial_fourier, 10);
    const PointSet a = jl_embed(op, pts, 11);
    const PointSet b = jl_embed(op, pts, 11);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.points[i] == b.points[i]);
}
