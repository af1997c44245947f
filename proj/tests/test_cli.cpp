#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"

#include "fastsketch/cli.hpp"
#include "fastsketch/io.hpp"
#include "fastsketch/parallel.hpp"

using namespace fastsketch;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run_cli(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = cli::main_entry(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch_dir(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("fastsketch_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace

TEST_CASE("reference hash values") {
    // published SplitMix64 output for state 0 and FNV-1a test vectors
    CHECK(splitmix64(0) == 0xe220a8397b1dcdafULL);
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("derive_seed") {
    CHECK(derive_seed(42, 3, "rows") == derive_seed(42, 3, "rows"));
    CHECK(derive_seed(42, 0, "signs") != derive_seed(42, 0, "rows"));
    CHECK(derive_seed(42, 0, "rows") != derive_seed(43, 0, "rows"));

    std::set<std::uint64_t> seen;
    for (std::uint64_t t = 0; t < 10000; ++t) seen.insert(derive_seed(7, t, "trial"));
    CHECK(seen.size() == 10000);
}

TEST_CASE("rng distributions") {
    Rng rng(1);
    std::vector<int> counts(7);
    for (int i = 0; i < 70000; ++i) ++counts[rng.uniform_index(7)];
    for (int c : counts) CHECK(std::abs(c - 10000) < 500);

    double sum = 0.0, sum_sq = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const double v = rng.normal();
        sum += v;
        sum_sq += v * v;
    }
    CHECK(std::abs(sum / n) < 0.02);
    CHECK(std::abs(sum_sq / n - 1.0) < 0.02);

    Rng a(99), b(99);
    for (int i = 0; i < 100; ++i) CHECK(a.normal() == b.normal());
}

TEST_CASE("parallel helpers") {
    CHECK(resolve_threads(3) == 3);
    setenv("FASTSKETCH_THREADS", "5", 1);
    CHECK(resolve_threads() == 5);
    setenv("FASTSKETCH_THREADS", "junk", 1);
    CHECK(resolve_threads() >= 1);
    unsetenv("FASTSKETCH_THREADS");

    std::vector<int> hits(100);
    parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
    for (int h : hits) CHECK(h == 1);
    CHECK_THROWS_AS(parallel_for(10, 3, [](std::size_t i) {
                        if (i == 7) throw std::runtime_error("boom");
                    }),
                    std::runtime_error);
}

TEST_CASE("operator and row source JSON round trips") {
    std::mt19937_64 gen(61);
    for (EnsembleKind kind : {EnsembleKind::partial_fourier, EnsembleKind::partial_hadamard,
                              EnsembleKind::partial_circulant, EnsembleKind::dense_gaussian}) {
        const SketchOperator op = build_sketch(64, 4, 4, kind, 5);
        const SketchOperator back = operator_from_json(json::parse(operator_to_json(op).dump()));
        CHECK(densify_sketch(back) == densify_sketch(op));

        const SketchOperator unseeded(op.source(), op.signs());
        const json j = operator_to_json(unseeded);
        CHECK(j.contains("source"));
        CHECK(densify_sketch(operator_from_json(json::parse(j.dump()))) == densify_sketch(op));

        const RowSource src = row_source_from_json(json::parse(row_source_to_json(op.source()).dump()));
        CHECK(densify(src) == densify(op.source()));
    }
    CHECK_THROWS_AS(operator_from_json(json{{"kind", "fourier"}}), IoError);
    CHECK_THROWS_AS(row_source_from_json(json{{"kind", "dct"}, {"d", 4}, {"M", 1}, {"payload", {0}}}), IoError);
}

TEST_CASE("point set CSV round trips") {
    std::mt19937_64 gen(62);
    PointSet c;
    c.dim = 5;
    c.complex_valued = true;
    for (int i = 0; i < 3; ++i) c.points.push_back(oracle::random_vector(5, gen));
    std::stringstream cs;
    write_point_set_csv(cs, c);
    const PointSet cb = read_point_set_csv(cs);
    CHECK(cb.complex_valued);
    CHECK(cb.points == c.points);

    PointSet r;
    r.dim = 3;
    r.points = {{1.0, -2.5, 1e-300}, {0.1, 0.2, 0.3}};
    std::stringstream rs;
    write_point_set_csv(rs, r);
    CHECK(rs.str().rfind("d=3,complex=0\n", 0) == 0);
    const PointSet rb = read_point_set_csv(rs);
    CHECK_FALSE(rb.complex_valued);
    CHECK(rb.points == r.points);

    std::stringstream bad1("d=3,complex=0\n1,2\n");
    CHECK_THROWS_AS(read_point_set_csv(bad1), IoError);
    std::stringstream bad2("d=2,complex=0\n1,x\n");
    CHECK_THROWS_AS(read_point_set_csv(bad2), IoError);
    std::stringstream bad3("");
    CHECK_THROWS_AS(read_point_set_csv(bad3), IoError);
}

TEST_CASE("command line parsing") {
    const auto c = cli::parse_command_line({"rip", "--d", "16", "--k", "2", "--m", "8", "--B", "2", "--seed", "7"});
    CHECK(c.command == "rip");
    CHECK(*c.d == 16);
    CHECK(*c.master_seed == 7);
    CHECK_FALSE(c.seed_auto);

    const auto a = cli::parse_command_line({"build", "--d", "16", "--m", "2", "--B", "2", "--seed", "auto"});
    CHECK(a.seed_auto);
    CHECK(a.master_seed.has_value());

    CHECK_THROWS_AS(cli::parse_command_line({"build", "--d", "16", "--m", "2", "--B", "2"}), cli::UsageError);
    CHECK_THROWS_AS(cli::parse_command_line({"build", "--seed", "x1"}), cli::UsageError);
    CHECK_NOTHROW(cli::parse_command_line({"plan", "--d", "64", "--k", "2", "--epsilon", "0.5"}));
}

TEST_CASE("config files, with flags winning") {
    const fs::path dir = scratch_dir("config");
    const fs::path cfg = dir / "exp.cfg";
    std::ofstream(cfg) << "# experiment\nd = 64\nk=3\nm=8\nB=2\nseed=11\nkind=hadamard\n\n";
    const auto c = cli::parse_command_line({"rip", "--config", cfg.string(), "--k", "2"});
    CHECK(*c.d == 64);
    CHECK(*c.k == 2);
    CHECK(c.kind == "hadamard");
    CHECK(*c.master_seed == 11);

    std::ofstream(dir / "bad.cfg") << "d 64\n";
    CHECK_THROWS_AS(cli::parse_command_line({"rip", "--config", (dir / "bad.cfg").string()}), cli::UsageError);
    std::ofstream(dir / "unknown.cfg") << "colour=blue\n";
    const Run r = run_cli({"rip", "--config", (dir / "unknown.cfg").string()});
    CHECK(r.code == cli::kUsageError);
}

TEST_CASE("exit codes and error JSON") {
    const Run usage = run_cli({"rip", "--d", "16"});
    CHECK(usage.code == cli::kUsageError);
    const json e = json::parse(usage.err);
    CHECK(e["error"]["type"] == "usage");

    const Run bad_kind = run_cli({"rip", "--d", "16", "--m", "4", "--B", "2", "--k", "2", "--kind", "dct", "--seed", "1"});
    CHECK(bad_kind.code == cli::kUsageError);

    const Run io = run_cli({"apply", "--op", "/nonexistent/op.json", "--input", "x.csv", "--output", "y.csv"});
    CHECK(io.code == cli::kIoError);
    CHECK(json::parse(io.err)["error"]["type"] == "io");

    const Run none = run_cli({});
    CHECK(none.code == cli::kUsageError);

    const Run cap = run_cli({"rip", "--d", "1024", "--m", "16", "--B", "2", "--k", "3", "--seed", "1"});
    CHECK(cap.code == cli::kRuntimeError);
}

TEST_CASE("plan command reports the planner output") {
    const Run r = run_cli({"plan", "--d", "1024", "--k", "16", "--epsilon", "0.5", "--kind", "fourier"});
    REQUIRE(r.code == 0);
    const json j = json::parse(r.out);
    CHECK(j["schema_version"] == cli::kSchemaVersion);
    CHECK(j["library_version"] == kVersion);
    CHECK(j["result"] == to_json(recommend_parameters(1024, 16, 0.5, EnsembleKind::partial_fourier)));
}

TEST_CASE("rip command is deterministic") {
    const std::vector<std::string> args = {"rip", "--d", "16", "--k", "2", "--m", "8", "--B", "2",
                                           "--kind", "fourier", "--method", "exact", "--seed", "7"};
    json a = json::parse(run_cli(args).out);
    json b = json::parse(run_cli(args).out);
    a["result"].erase("wall_time");
    b["result"].erase("wall_time");
    CHECK(a == b);
    CHECK(a["master_seed"] == 7);
    const SketchOperator op = build_sketch(16, 8, 2, EnsembleKind::partial_fourier, 7);
    CHECK(a["result"]["epsilon"].get<double>() == exact_rip_constant(densify_sketch(op), 2).epsilon);
}

TEST_CASE("build then apply through files") {
    const fs::path dir = scratch_dir("apply");
    const Run b = run_cli({"build", "--d", "64", "--m", "8", "--B", "4", "--kind", "circulant", "--seed", "3",
                           "--output", (dir / "op.json").string(), "--dump", (dir / "op.bin").string()});
    REQUIRE(b.code == 0);
    CHECK(slurp(dir / "op.bin").rfind("FSKB", 0) == 0);

    std::mt19937_64 gen(63);
    PointSet pts;
    pts.dim = 64;
    pts.complex_valued = true;
    for (int i = 0; i < 4; ++i) pts.points.push_back(oracle::random_vector(64, gen));
    write_point_set_file((dir / "x.csv").string(), pts);

    const Run a = run_cli({"apply", "--op", (dir / "op.json").string(), "--input", (dir / "x.csv").string(),
                           "--output", (dir / "y.csv").string()});
    REQUIRE(a.code == 0);
    const PointSet y = read_point_set_file((dir / "y.csv").string());
    const SketchOperator op = build_sketch(64, 8, 4, EnsembleKind::partial_circulant, 3);
    REQUIRE(y.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) CHECK(y.points[i] == apply(op, pts.points[i]));

    const Run adj = run_cli({"apply", "--op", (dir / "op.json").string(), "--input", (dir / "y.csv").string(),
                             "--output", (dir / "z.csv").string(), "--adjoint"});
    REQUIRE(adj.code == 0);
    const PointSet z = read_point_set_file((dir / "z.csv").string());
    CHECK(z.dim == 64);
    CHECK(z.points[0] == apply_adjoint(op, y.points[0]));
}

TEST_CASE("recover, jl and bench commands write their tables") {
    const fs::path dir = scratch_dir("tables");
    const Run r = run_cli({"recover", "--d", "128", "--k", "3", "--m", "48", "--B", "4", "--trials", "3",
                           "--seed", "5", "--output", (dir / "rec.csv").string()});
    REQUIRE(r.code == 0);
    CHECK(json::parse(r.out)["result"]["trials"].size() == 3);
    CHECK(slurp(dir / "rec.csv").rfind("trial,relative_error", 0) == 0);

    const Run j = run_cli({"jl", "--d", "64", "--m", "16", "--B", "2", "--points", "6", "--trials", "2", "--seed", "5",
                           "--output", (dir / "emb.csv").string()});
    REQUIRE(j.code == 0);
    CHECK(read_point_set_file((dir / "emb.csv").string()).size() == 6);

    const Run b = run_cli({"bench", "--d", "256..1024", "--m", "8", "--B", "2", "--trials", "5", "--seed", "1",
                           "--output", (dir / "bench.csv").string()});
    REQUIRE(b.code == 0);
    std::istringstream lines(slurp(dir / "bench.csv"));
    std::string header;
    std::getline(lines, header);
    CHECK(header == "d,m,B,kind,trials,median_apply_seconds,median_adjoint_seconds,doubling_ratio");
    int rows = 0;
    for (std::string line; std::getline(lines, line);) ++rows;
    CHECK(rows == 3);
    CHECK(run_cli({"bench", "--d", "256", "--m", "8", "--B", "2", "--trials", "3", "--seed", "1"}).code ==
          cli::kUsageError);
}

TEST_CASE("embedded config round trips through key=value") {
    const auto c = cli::parse_command_line({"recover", "--d", "128", "--k", "3", "--m", "48", "--B", "4",
                                            "--algo", "cosamp", "--tol", "1e-9", "--seed", "5"});
    const json cj = cli::config_to_json(c);
    const fs::path dir = scratch_dir("roundtrip");
    std::ofstream(dir / "cfg") << cli::config_json_to_key_values(cj);
    const auto back = cli::parse_command_line({"recover", "--config", (dir / "cfg").string()});
    CHECK(cli::config_to_json(back) == cj);
}

TEST_CASE("installed binary runs") {
    const fs::path dir = scratch_dir("binary");
    const std::string cmd = std::string("\"") + FASTSKETCH_CLI_PATH + "\" plan --d 64 --k 2 --epsilon 0.5 > \"" +
                            (dir / "plan.json").string() + "\"";
    REQUIRE(std::system(cmd.c_str()) == 0);
    CHECK(json::parse(slurp(dir / "plan.json"))["command"] == "plan");
}
