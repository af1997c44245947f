#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace fastsketch::cli {

inline constexpr int kSchemaVersion = 1;

enum ExitCode : int { kOk = 0, kRuntimeError = 1, kUsageError = 2, kIoError = 3 };

class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Resolved settings for one subcommand run. Unset optionals mean "not given".
struct ExperimentConfig {
    std::string command;  // build | apply | rip | jl | recover | bench | plan

    std::optional<std::size_t> d;
    std::optional<std::size_t> m;
    std::optional<std::size_t> B;
    std::optional<std::size_t> k;
    std::optional<double> epsilon;
    std::string kind = "fourier";
    std::optional<std::size_t> trials;
    std::optional<std::uint64_t> master_seed;
    bool seed_auto = false;
    std::size_t max_iters = 500;
    double tol = 1e-10;
    std::optional<std::size_t> threads;

    std::string method = "exact";  // rip: exact | mc
    std::uint64_t cap = 1'000'000;
    std::string algo = "iht";      // recover: iht | cosamp
    double noise = 0.0;
    std::size_t points = 50;       // jl: generated point count
    std::string d_range;           // bench: "lo..hi" (doubling) or a single value
    std::string circulant_path = "auto";
    bool adjoint = false;

    // inputs
    std::string op_path;
    std::string input_path;
    // outputs (not part of the embedded config)
    std::string report_path;
    std::string output_path;
    std::string dump_path;
};

/// BenchRecord for one dimension.
struct BenchRecord {
    std::size_t d = 0;
    std::size_t m = 0;
    std::size_t B = 0;
    std::string kind;
    std::size_t trials = 0;
    double median_apply_seconds = 0.0;
    double median_adjoint_seconds = 0.0;
    std::vector<double> apply_seconds;
    std::vector<double> adjoint_seconds;
};

/// Parses argv (including an optional `--config FILE` of key=value lines; command-line flags
/// win on conflict). Throws UsageError.
ExperimentConfig parse_command_line(const std::vector<std::string>& args);

/// Reads key=value lines ('#' comments, blank lines ignored).
std::vector<std::pair<std::string, std::string>> read_key_value_file(const std::string& path);

/// The experiment-defining part of the config as JSON, with keys equal to option names.
nlohmann::json config_to_json(const ExperimentConfig& config);

/// key=value lines reproducing `config_json` when passed back through --config.
std::string config_json_to_key_values(const nlohmann::json& config_json);

/// Runs one subcommand. Writes the JSON report to report_path (or `out`) and returns an exit code.
int run(const ExperimentConfig& config, std::ostream& out);

/// argv entry point: parse, run, and on failure print {"error": {...}} JSON to `err`.
int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fastsketch::cli
