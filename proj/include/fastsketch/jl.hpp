#pragma once

#include <cstdint>
#include <vector>

#include "fastsketch/common.hpp"
#include "fastsketch/sketch.hpp"

namespace fastsketch {

/// N points of a common dimension. `complex_valued` only affects how the set is written out;
/// real sets carry zero imaginary parts.
struct PointSet {
    std::size_t dim = 0;
    bool complex_valued = false;
    std::vector<ComplexVector> points;

    std::size_t size() const noexcept { return points.size(); }
    /// Throws DimensionError if any point has the wrong length.
    void validate() const;
};

struct DistortionReport {
    double max_expansion = 1.0;
    double min_contraction = 1.0;
    double epsilon_hat = 0.0;
    std::size_t pairs_evaluated = 0;
    std::size_t zero_distance_pairs = 0;
};

/// The shared diagonal xi in {+-1}^d used by jl_embed for this seed.
std::vector<std::int8_t> jl_column_signs(std::size_t d, std::uint64_t seed);

/// Embeds every point as apply(op, xi .* x) with one xi drawn from `seed`.
PointSet jl_embed(const SketchOperator& op, const PointSet& pts, std::uint64_t seed);

/// Exact all-pairs ratios ||f(x_i) - f(x_j)|| / ||x_i - x_j||. Pairs with zero original
/// distance are counted in zero_distance_pairs and excluded from the ratios.
DistortionReport distortion_report(const PointSet& original, const PointSet& embedded);

}  // namespace fastsketch
