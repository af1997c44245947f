#include "fastsketch/jl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fastsketch {

void PointSet::validate() const {
    for (const auto& p : points) require_dimension(p.size(), dim, "PointSet point");
}

std::vector<std::int8_t> jl_column_signs(std::size_t d, std::uint64_t seed) {
    Rng rng(derive_seed(seed, 0, "column-signs"));
    std::vector<std::int8_t> xi(d);
    for (auto& s : xi) s = static_cast<std::int8_t>(rng.sign());
    return xi;
}

PointSet jl_embed(const SketchOperator& op, const PointSet& pts, std::uint64_t seed) {
    require_dimension(pts.dim, op.dim(), "jl_embed");
    pts.validate();
    const auto xi = jl_column_signs(op.dim(), seed);
    // Real inputs stay real under every kind except Fourier.
    const bool real_output = !pts.complex_valued && op.kind() != EnsembleKind::partial_fourier;

    PointSet out;
    out.dim = op.buckets();
    out.complex_valued = !real_output;
    out.points.reserve(pts.size());
    ComplexVector flipped(op.dim());
    for (const auto& p : pts.points) {
        for (std::size_t j = 0; j < p.size(); ++j) flipped[j] = xi[j] > 0 ? p[j] : -p[j];
        ComplexVector y = apply(op, flipped);
        if (real_output) {
            for (auto& v : y) v = Complex{v.real(), 0.0};
        }
        out.points.push_back(std::move(y));
    }
    return out;
}

namespace {

double distance(const ComplexVector& a, const ComplexVector& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::norm(a[i] - b[i]);
    return std::sqrt(s);
}

}  // namespace

DistortionReport distortion_report(const PointSet& original, const PointSet& embedded) {
    require_dimension(embedded.size(), original.size(), "distortion_report point count");
    if (original.size() < 2) throw std::invalid_argument("distortion_report: needs at least two points");
    original.validate();
    embedded.validate();

    DistortionReport report;
    double max_ratio = -std::numeric_limits<double>::infinity();
    double min_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < original.size(); ++i) {
        for (std::size_t j = i + 1; j < original.size(); ++j) {
            const double before = distance(original.points[i], original.points[j]);
            if (before == 0.0) {
                ++report.zero_distance_pairs;
                continue;
            }
            const double ratio = distance(embedded.points[i], embedded.points[j]) / before;
            max_ratio = std::max(max_ratio, ratio);
            min_ratio = std::min(min_ratio, ratio);
            ++report.pairs_evaluated;
        }
    }
    if (report.pairs_evaluated > 0) {
        report.max_expansion = max_ratio;
        report.min_contraction = min_ratio;
        report.epsilon_hat = std::max({max_ratio - 1.0, 1.0 - min_ratio, 0.0});
    }
    return report;
}

}  // namespace fastsketch
