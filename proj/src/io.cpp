#include "fastsketch/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace fastsketch {

using nlohmann::json;

json row_source_to_json(const RowSource& src) {
    json j;
    j["kind"] = to_string(src.kind());
    j["d"] = src.dim();
    j["M"] = src.rows();
    if (src.seed()) j["seed"] = *src.seed();
    switch (src.kind()) {
        case EnsembleKind::partial_fourier:
        case EnsembleKind::partial_hadamard:
            j["payload"] = src.row_indices();
            break;
        case EnsembleKind::partial_circulant: {
            std::vector<int> eps(src.circulant_signs().begin(), src.circulant_signs().end());
            j["payload"] = eps;
            break;
        }
        case EnsembleKind::dense_gaussian: {
            json rows = json::array();
            const auto& g = src.gaussian_matrix();
            for (Eigen::Index r = 0; r < g.rows(); ++r) {
                std::vector<double> row(static_cast<std::size_t>(g.cols()));
                for (Eigen::Index c = 0; c < g.cols(); ++c) row[static_cast<std::size_t>(c)] = g(r, c);
                rows.push_back(row);
            }
            j["payload"] = rows;
            break;
        }
    }
    return j;
}

RowSource row_source_from_json(const json& j) {
    try {
        const EnsembleKind kind = parse_ensemble_kind(j.at("kind").get<std::string>());
        const auto d = j.at("d").get<std::size_t>();
        const auto rows = j.at("M").get<std::size_t>();
        std::optional<std::uint64_t> seed;
        if (j.contains("seed")) seed = j.at("seed").get<std::uint64_t>();
        const json& payload = j.at("payload");
        switch (kind) {
            case EnsembleKind::partial_fourier:
            case EnsembleKind::partial_hadamard: {
                auto idx = payload.get<std::vector<std::uint64_t>>();
                require_dimension(idx.size(), rows, "row source payload");
                return kind == EnsembleKind::partial_fourier ? RowSource::partial_fourier(d, std::move(idx), seed)
                                                             : RowSource::partial_hadamard(d, std::move(idx), seed);
            }
            case EnsembleKind::partial_circulant: {
                const auto eps = payload.get<std::vector<int>>();
                return RowSource::partial_circulant(d, rows, std::vector<std::int8_t>(eps.begin(), eps.end()), seed);
            }
            case EnsembleKind::dense_gaussian: {
                Eigen::MatrixXd g(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(d));
                require_dimension(payload.size(), rows, "gaussian payload rows");
                for (std::size_t r = 0; r < rows; ++r) {
                    const auto row = payload[r].get<std::vector<double>>();
                    require_dimension(row.size(), d, "gaussian payload row");
                    for (std::size_t c = 0; c < d; ++c) g(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = row[c];
                }
                return RowSource::dense_gaussian(std::move(g), seed);
            }
        }
    } catch (const json::exception& e) {
        throw IoError(std::string("row source JSON: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw IoError(std::string("row source JSON: ") + e.what());
    }
    throw IoError("row source JSON: unreachable kind");
}

json operator_to_json(const SketchOperator& op) {
    json j;
    j["kind"] = to_string(op.kind());
    j["d"] = op.dim();
    j["m"] = op.buckets();
    j["B"] = op.bucket_size();
    if (op.seed()) {
        j["seed"] = *op.seed();
    } else {
        j["source"] = row_source_to_json(op.source());
        std::vector<int> signs(op.signs().values().begin(), op.signs().values().end());
        j["signs"] = signs;
    }
    return j;
}

SketchOperator operator_from_json(const json& j) {
    try {
        const EnsembleKind kind = parse_ensemble_kind(j.at("kind").get<std::string>());
        const auto d = j.at("d").get<std::size_t>();
        const auto m = j.at("m").get<std::size_t>();
        const auto B = j.at("B").get<std::size_t>();
        if (j.contains("seed")) return build_sketch(d, m, B, kind, j.at("seed").get<std::uint64_t>());
        RowSource src = row_source_from_json(j.at("source"));
        const auto signs = j.at("signs").get<std::vector<int>>();
        return SketchOperator(std::move(src), SignTable(m, B, std::vector<std::int8_t>(signs.begin(), signs.end())));
    } catch (const json::exception& e) {
        throw IoError(std::string("operator JSON: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw IoError(std::string("operator JSON: ") + e.what());
    }
}

json to_json(const RipReport& report) {
    json j;
    j["k"] = report.k;
    j["method"] = to_string(report.method);
    j["epsilon"] = report.epsilon;
    j["supports_evaluated"] = report.supports_evaluated;
    j["seed"] = report.seed ? json(*report.seed) : json(nullptr);
    j["wall_time"] = report.wall_time_seconds;
    return j;
}

json to_json(const ParameterPlan& plan) {
    json j;
    j["kind"] = to_string(plan.kind);
    j["d"] = plan.d;
    j["k"] = plan.k;
    j["epsilon"] = plan.epsilon;
    j["m"] = plan.m;
    j["m_formula"] = plan.m_formula;
    j["B"] = plan.B;
    j["d_effective"] = plan.d_effective;
    j["warnings"] = plan.warnings;
    return j;
}

json to_json(const DistortionReport& report) {
    json j;
    j["max_expansion"] = report.max_expansion;
    j["min_contraction"] = report.min_contraction;
    j["epsilon_hat"] = report.epsilon_hat;
    j["pairs_evaluated"] = report.pairs_evaluated;
    j["zero_distance_pairs"] = report.zero_distance_pairs;
    return j;
}

json to_json(const RecoveryResult& result) {
    json j;
    j["iterations_used"] = result.iterations_used;
    j["residual_norm"] = result.residual_norm;
    j["converged"] = result.converged;
    j["residual_increases"] = result.residual_increases;
    json est;
    est["d"] = result.estimate.dim;
    est["support"] = result.estimate.support;
    std::vector<std::array<double, 2>> values;
    for (const auto& v : result.estimate.values) values.push_back({v.real(), v.imag()});
    est["values"] = values;
    j["estimate"] = est;
    return j;
}

json to_json(const BucketNormProfile& profile) {
    json j;
    j["sparsity"] = profile.sparsity;
    j["per_bucket"] = profile.per_bucket;
    j["overall"] = profile.overall;
    return j;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_point_set_csv(std::ostream& out, const PointSet& pts) {
    pts.validate();
    out << "d=" << pts.dim << ",complex=" << (pts.complex_valued ? 1 : 0) << '\n';
    for (const auto& p : pts.points) {
        for (std::size_t i = 0; i < p.size(); ++i) {
            if (i > 0) out << ',';
            out << format_double(p[i].real());
            if (pts.complex_valued) out << ',' << format_double(p[i].imag());
        }
        out << '\n';
    }
}

PointSet read_point_set_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw IoError("point CSV: missing header");
    PointSet pts;
    int complex_flag = -1;
    unsigned long long dim = 0;
    if (std::sscanf(line.c_str(), "d=%llu,complex=%d", &dim, &complex_flag) != 2 ||
        (complex_flag != 0 && complex_flag != 1)) {
        throw IoError("point CSV: header must read d=<d>,complex=<0|1>, got '" + line + "'");
    }
    pts.dim = static_cast<std::size_t>(dim);
    pts.complex_valued = complex_flag == 1;
    const std::size_t per_row = pts.complex_valued ? 2 * pts.dim : pts.dim;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<double> vals;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            std::size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(cell, &used);
            } catch (const std::exception&) {
                throw IoError("point CSV line " + std::to_string(line_no) + ": bad number '" + cell + "'");
            }
            if (used != cell.size() || !std::isfinite(v)) {
                throw IoError("point CSV line " + std::to_string(line_no) + ": bad number '" + cell + "'");
            }
            vals.push_back(v);
        }
        if (vals.size() != per_row) {
            throw IoError("point CSV line " + std::to_string(line_no) + ": expected " + std::to_string(per_row) +
                          " values, got " + std::to_string(vals.size()));
        }
        ComplexVector p(pts.dim);
        for (std::size_t i = 0; i < pts.dim; ++i) {
            p[i] = pts.complex_valued ? Complex{vals[2 * i], vals[2 * i + 1]} : Complex{vals[i], 0.0};
        }
        pts.points.push_back(std::move(p));
    }
    return pts;
}

void write_point_set_file(const std::string& path, const PointSet& pts) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    write_point_set_csv(out, pts);
    if (!out) throw IoError("failed writing '" + path + "'");
}

PointSet read_point_set_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    return read_point_set_csv(in);
}

}  // namespace fastsketch
