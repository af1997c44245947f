#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "json.hpp"

#include "fastsketch/analysis.hpp"
#include "fastsketch/ensembles.hpp"
#include "fastsketch/jl.hpp"
#include "fastsketch/recovery.hpp"
#include "fastsketch/sketch.hpp"

namespace fastsketch {

/// File could not be opened, read or written, or its contents do not parse.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// {"kind", "d", "M", "seed"?, "payload"}. Payload is the index list, the eps sign list, or the
/// Gaussian matrix as a list of rows.
nlohmann::json row_source_to_json(const RowSource& src);
RowSource row_source_from_json(const nlohmann::json& j);

/// Seeded operators serialize as {"kind", "d", "m", "B", "seed"} and are rebuilt with
/// build_sketch. Unseeded operators also carry "source" and "signs".
nlohmann::json operator_to_json(const SketchOperator& op);
SketchOperator operator_from_json(const nlohmann::json& j);

nlohmann::json to_json(const RipReport& report);
nlohmann::json to_json(const ParameterPlan& plan);
nlohmann::json to_json(const DistortionReport& report);
nlohmann::json to_json(const RecoveryResult& result);
nlohmann::json to_json(const BucketNormProfile& profile);

/// Point-set CSV: a header line "d=<d>,complex=<0|1>", then one line per point with d real
/// coordinates or 2d interleaved re,im values. Numbers use 17 significant digits.
void write_point_set_csv(std::ostream& out, const PointSet& pts);
PointSet read_point_set_csv(std::istream& in);

void write_point_set_file(const std::string& path, const PointSet& pts);
PointSet read_point_set_file(const std::string& path);

/// Shortest-round-trip-safe formatting used for every CSV number.
std::string format_double(double v);

}  // namespace fastsketch
