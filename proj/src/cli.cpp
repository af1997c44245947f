#include "fastsketch/cli.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"

#include "fastsketch/analysis.hpp"
#include "fastsketch/io.hpp"
#include "fastsketch/jl.hpp"
#include "fastsketch/parallel.hpp"
#include "fastsketch/recovery.hpp"
#include "fastsketch/sketch.hpp"

namespace fastsketch::cli {

using nlohmann::json;

namespace {

const std::vector<std::string> kCommands = {"build", "apply", "rip", "jl", "recover", "bench", "plan"};

bool is_randomized(const std::string& command) {
    return command != "apply" && command != "plan";
}

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

template <typename T>
T require(const std::optional<T>& value, const char* name, const std::string& command) {
    if (!value) throw UsageError("--" + std::string(name) + " is required for '" + command + "'");
    return *value;
}

CirculantPath parse_path(const std::string& name) {
    if (name == "auto") return CirculantPath::automatic;
    if (name == "blocked") return CirculantPath::blocked_toeplitz;
    if (name == "full") return CirculantPath::full_fft;
    throw UsageError("--circulant-path must be auto, blocked or full");
}

std::uint64_t auto_seed() {
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << text;
    if (!out) throw IoError("failed writing '" + path + "'");
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw IoError("'" + path + "' is not valid JSON: " + e.what());
    }
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

ComplexVector gaussian_vector(std::size_t n, Rng& rng) {
    ComplexVector x(n);
    for (auto& v : x) {
        const double re = rng.normal();
        const double im = rng.normal();
        v = Complex{re, im};
    }
    return x;
}

struct Artifacts {
    json result;
};

SketchOperator operator_for(const ExperimentConfig& c, std::uint64_t seed) {
    const auto d = require(c.d, "d", c.command);
    const auto m = require(c.m, "m", c.command);
    const auto B = require(c.B, "B", c.command);
    return build_sketch(d, m, B, parse_ensemble_kind(c.kind), seed);
}

json run_build(const ExperimentConfig& c) {
    const SketchOperator op = operator_for(c, *c.master_seed);
    const json op_json = operator_to_json(op);
    if (!c.output_path.empty()) write_text_file(c.output_path, op_json.dump(2) + "\n");
    if (!c.dump_path.empty()) {
        std::ofstream out(c.dump_path, std::ios::binary);
        if (!out) throw IoError("cannot open '" + c.dump_path + "' for writing");
        write_binary_dump(op, out);
        if (!out) throw IoError("failed writing '" + c.dump_path + "'");
    }
    json result;
    result["operator"] = op_json;
    result["scale"] = op.scale();
    result["rows_sampled"] = op.source().rows();
    return result;
}

SketchOperator load_operator(const std::string& path) {
    const json j = read_json_file(path);
    // Accept a bare operator document or a build report.
    if (j.contains("result") && j["result"].contains("operator")) return operator_from_json(j["result"]["operator"]);
    return operator_from_json(j);
}

json run_apply(const ExperimentConfig& c) {
    if (c.op_path.empty()) throw UsageError("--op is required for 'apply'");
    if (c.input_path.empty()) throw UsageError("--input is required for 'apply'");
    if (c.output_path.empty()) throw UsageError("--output is required for 'apply'");
    const SketchOperator op = load_operator(c.op_path);
    const PointSet in = read_point_set_file(c.input_path);
    const CirculantPath path = parse_path(c.circulant_path);
    PointSet out;
    out.complex_valued = true;
    out.dim = c.adjoint ? op.dim() : op.buckets();
    for (const auto& p : in.points) {
        out.points.push_back(c.adjoint ? apply_adjoint(op, p, path) : apply(op, p, path));
    }
    write_point_set_file(c.output_path, out);
    json result;
    result["operator"] = operator_to_json(op);
    result["vectors"] = in.size();
    result["input_dim"] = in.dim;
    result["output_dim"] = out.dim;
    result["adjoint"] = c.adjoint;
    return result;
}

json run_rip(const ExperimentConfig& c, std::size_t threads) {
    const SketchOperator op = c.op_path.empty() ? operator_for(c, *c.master_seed) : load_operator(c.op_path);
    const auto k = require(c.k, "k", c.command);
    RipReport report;
    if (c.method == "exact") {
        report = exact_rip_constant(densify_sketch(op), k, c.cap, threads);
    } else if (c.method == "mc") {
        report = mc_rip_lower_bound(op, k, require(c.trials, "trials", c.command),
                                    derive_seed(*c.master_seed, 0, "supports"));
    } else {
        throw UsageError("--method must be exact or mc");
    }
    report.seed = *c.master_seed;
    json result = to_json(report);
    result["operator"] = operator_to_json(op);
    return result;
}

json run_jl(const ExperimentConfig& c, std::size_t threads) {
    const std::size_t trials = c.trials.value_or(1);
    const auto d = require(c.d, "d", c.command);
    std::optional<PointSet> given;
    if (!c.input_path.empty()) given = read_point_set_file(c.input_path);

    std::vector<DistortionReport> reports(trials);
    std::optional<PointSet> first_embedding;
    parallel_for(trials, threads, [&](std::size_t t) {
        const std::uint64_t master = *c.master_seed;
        const SketchOperator op = operator_for(c, derive_seed(master, t, "operator"));
        PointSet pts;
        if (given) {
            pts = *given;
        } else {
            Rng rng(derive_seed(master, t, "points"));
            pts.dim = d;
            for (std::size_t i = 0; i < c.points; ++i) {
                ComplexVector p(d);
                for (auto& v : p) v = rng.normal();
                pts.points.push_back(std::move(p));
            }
        }
        PointSet embedded = jl_embed(op, pts, derive_seed(master, t, "column-signs"));
        reports[t] = distortion_report(pts, embedded);
        if (t == 0) first_embedding = std::move(embedded);
    });
    if (!c.output_path.empty()) write_point_set_file(c.output_path, *first_embedding);

    json per_trial = json::array();
    std::vector<double> eps;
    for (std::size_t t = 0; t < trials; ++t) {
        json r = to_json(reports[t]);
        r["trial"] = t;
        per_trial.push_back(r);
        eps.push_back(reports[t].epsilon_hat);
    }
    json result;
    result["trials"] = per_trial;
    result["median_epsilon_hat"] = median(eps);
    result["max_epsilon_hat"] = *std::max_element(eps.begin(), eps.end());
    return result;
}

struct TrialOutcome {
    RecoveryResult result;
    double relative_error = 0.0;
    L2L1Metrics metrics;
};

json run_recover(const ExperimentConfig& c, std::size_t threads) {
    const std::size_t trials = c.trials.value_or(1);
    const auto d = require(c.d, "d", c.command);
    const auto k = require(c.k, "k", c.command);
    if (c.algo != "iht" && c.algo != "cosamp") throw UsageError("--algo must be iht or cosamp");
    std::optional<ComplexVector> given;
    if (!c.input_path.empty()) {
        const PointSet pts = read_point_set_file(c.input_path);
        if (pts.size() != 1) throw UsageError("--input must hold exactly one signal");
        require_dimension(pts.dim, d, "recover signal");
        given = pts.points[0];
    }
    constexpr double kSuccessTolerance = 1e-6;

    std::vector<TrialOutcome> outcomes(trials);
    parallel_for(trials, threads, [&](std::size_t t) {
        const std::uint64_t master = *c.master_seed;
        const SketchOperator op = operator_for(c, derive_seed(master, t, "operator"));
        ComplexVector x;
        if (given) {
            x = *given;
        } else {
            Rng rng(derive_seed(master, t, "signal"));
            x = random_sparse_signal(d, k, rng);
        }
        ComplexVector y = apply(op, x);
        if (c.noise > 0.0) {
            Rng rng(derive_seed(master, t, "noise"));
            add_measurement_noise(y, c.noise, rng);
        }
        RecoveryOptions options;
        options.k = k;
        options.max_iters = c.max_iters;
        options.tol = c.tol;
        TrialOutcome& o = outcomes[t];
        o.result = c.algo == "iht" ? iht(op, y, options) : cosamp(op, y, options);
        o.metrics = l2l1_metrics(x, o.result.estimate, k);
        const double xn = norm2(x);
        o.relative_error = xn > 0.0 ? o.metrics.err_l2 / xn : o.metrics.err_l2;
    });

    std::size_t successes = 0;
    json per_trial = json::array();
    std::ostringstream csv;
    csv << "trial,relative_error,err_l2,head_tail_ratio,iterations,residual_norm,converged,success\n";
    for (std::size_t t = 0; t < trials; ++t) {
        const TrialOutcome& o = outcomes[t];
        const bool success = o.relative_error <= kSuccessTolerance;
        successes += success ? 1 : 0;
        json r = to_json(o.result);
        r["trial"] = t;
        r["relative_error"] = o.relative_error;
        r["err_l2"] = o.metrics.err_l2;
        r["head_tail_ratio"] = std::isinf(o.metrics.head_tail_ratio) ? json("inf") : json(o.metrics.head_tail_ratio);
        r["success"] = success;
        per_trial.push_back(r);
        csv << t << ',' << format_double(o.relative_error) << ',' << format_double(o.metrics.err_l2) << ','
            << (std::isinf(o.metrics.head_tail_ratio) ? std::string("inf") : format_double(o.metrics.head_tail_ratio))
            << ',' << o.result.iterations_used << ',' << format_double(o.result.residual_norm) << ','
            << (o.result.converged ? 1 : 0) << ',' << (success ? 1 : 0) << '\n';
    }
    if (!c.output_path.empty()) write_text_file(c.output_path, csv.str());
    json result;
    result["trials"] = per_trial;
    result["success_tolerance"] = kSuccessTolerance;
    result["success_rate"] = static_cast<double>(successes) / static_cast<double>(trials);
    return result;
}

std::vector<std::size_t> parse_range(const std::string& spec) {
    std::vector<std::size_t> out;
    try {
        const auto dots = spec.find("..");
        if (dots == std::string::npos) {
            out.push_back(std::stoull(spec));
        } else {
            const std::size_t lo = std::stoull(spec.substr(0, dots));
            const std::size_t hi = std::stoull(spec.substr(dots + 2));
            if (lo == 0 || hi < lo) throw UsageError("bad --d range '" + spec + "'");
            for (std::size_t v = lo; v <= hi; v *= 2) out.push_back(v);
        }
    } catch (const std::logic_error&) {
        throw UsageError("bad --d range '" + spec + "'");
    }
    return out;
}

json run_bench(const ExperimentConfig& c) {
    const std::string spec = !c.d_range.empty() ? c.d_range : std::to_string(require(c.d, "d", c.command));
    const auto dims = parse_range(spec);
    const std::size_t trials = c.trials.value_or(9);
    if (trials < 5) throw UsageError("bench needs --trials >= 5");
    const auto m = require(c.m, "m", c.command);
    const auto B = require(c.B, "B", c.command);
    const EnsembleKind kind = parse_ensemble_kind(c.kind);

    std::vector<BenchRecord> records;
    for (std::size_t i = 0; i < dims.size(); ++i) {
        const std::uint64_t master = *c.master_seed;
        const SketchOperator op = build_sketch(dims[i], m, B, kind, derive_seed(master, i, "operator"));
        Rng rng(derive_seed(master, i, "input"));
        const ComplexVector x = gaussian_vector(dims[i], rng);
        const ComplexVector z = gaussian_vector(m, rng);
        BenchRecord rec;
        rec.d = dims[i];
        rec.m = m;
        rec.B = B;
        rec.kind = to_string(kind);
        rec.trials = trials;
        volatile double sink = 0.0;
        sink = sink + apply(op, x)[0].real() + apply_adjoint(op, z)[0].real();  // warm-up
        for (std::size_t t = 0; t < trials; ++t) {
            auto t0 = std::chrono::steady_clock::now();
            const ComplexVector y = apply(op, x);
            auto t1 = std::chrono::steady_clock::now();
            const ComplexVector w = apply_adjoint(op, z);
            auto t2 = std::chrono::steady_clock::now();
            sink = sink + y[0].real() + w[0].real();
            rec.apply_seconds.push_back(std::chrono::duration<double>(t1 - t0).count());
            rec.adjoint_seconds.push_back(std::chrono::duration<double>(t2 - t1).count());
        }
        rec.median_apply_seconds = median(rec.apply_seconds);
        rec.median_adjoint_seconds = median(rec.adjoint_seconds);
        records.push_back(std::move(rec));
    }

    std::ostringstream csv;
    csv << "d,m,B,kind,trials,median_apply_seconds,median_adjoint_seconds,doubling_ratio\n";
    json rows = json::array();
    for (std::size_t i = 0; i < records.size(); ++i) {
        const BenchRecord& r = records[i];
        const bool has_ratio = i > 0 && records[i - 1].d * 2 == r.d;
        const double ratio = has_ratio ? r.median_apply_seconds / records[i - 1].median_apply_seconds : 0.0;
        csv << r.d << ',' << r.m << ',' << r.B << ',' << r.kind << ',' << r.trials << ','
            << format_double(r.median_apply_seconds) << ',' << format_double(r.median_adjoint_seconds) << ','
            << (has_ratio ? format_double(ratio) : std::string()) << '\n';
        json j;
        j["d"] = r.d;
        j["m"] = r.m;
        j["B"] = r.B;
        j["kind"] = r.kind;
        j["trials"] = r.trials;
        j["timing"] = {{"median_apply_seconds", r.median_apply_seconds},
                       {"median_adjoint_seconds", r.median_adjoint_seconds},
                       {"apply_seconds", r.apply_seconds},
                       {"adjoint_seconds", r.adjoint_seconds},
                       {"doubling_ratio", has_ratio ? json(ratio) : json(nullptr)}};
        rows.push_back(j);
    }
    if (!c.output_path.empty()) write_text_file(c.output_path, csv.str());
    json result;
    result["records"] = rows;
    return result;
}

json run_plan(const ExperimentConfig& c) {
    const ParameterPlan plan = recommend_parameters(require(c.d, "d", c.command), require(c.k, "k", c.command),
                                                    require(c.epsilon, "epsilon", c.command),
                                                    parse_ensemble_kind(c.kind));
    return to_json(plan);
}

struct HelpRequested {
    std::string text;
    explicit HelpRequested(std::string t) : text(std::move(t)) {}
};

// Option names shared by parse_command_line and config_to_json.
void add_dims(CLI::App* sub, ExperimentConfig& c, bool with_k) {
    sub->add_option("--d", c.d, "Signal dimension (power of two)");
    sub->add_option("--m", c.m, "Number of buckets (output rows)");
    sub->add_option("--B", c.B, "Bucket size");
    sub->add_option("--kind", c.kind, "fourier | hadamard | circulant | gaussian");
    if (with_k) sub->add_option("--k", c.k, "Sparsity");
}

}  // namespace

std::vector<std::pair<std::string, std::string>> read_key_value_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config '" + path + "'");
    std::vector<std::pair<std::string, std::string>> entries;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw UsageError("config '" + path + "' line " + std::to_string(line_no) + ": expected key=value");
        }
        entries.emplace_back(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
    }
    return entries;
}

ExperimentConfig parse_command_line(const std::vector<std::string>& raw_args) {
    // Splice config-file entries right after the subcommand so later command-line flags win.
    std::vector<std::string> args;
    std::string config_path;
    for (std::size_t i = 0; i < raw_args.size(); ++i) {
        const std::string& a = raw_args[i];
        if (a == "--config") {
            if (i + 1 >= raw_args.size()) throw UsageError("--config needs a file");
            config_path = raw_args[++i];
        } else if (a.rfind("--config=", 0) == 0) {
            config_path = a.substr(9);
        } else {
            args.push_back(a);
        }
    }
    if (!config_path.empty()) {
        auto sub = std::find_if(args.begin(), args.end(), [](const std::string& a) {
            return std::find(kCommands.begin(), kCommands.end(), a) != kCommands.end();
        });
        if (sub == args.end()) throw UsageError("a subcommand is required");
        std::vector<std::string> injected;
        for (const auto& [key, value] : read_key_value_file(config_path)) {
            injected.push_back("--" + key + "=" + value);
        }
        args.insert(sub + 1, injected.begin(), injected.end());
    }

    ExperimentConfig c;
    std::string seed_text;
    CLI::App app{"fastsketch: hashed structured RIP matrices, JL embeddings and sparse recovery", "fastsketch"};
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.require_subcommand(1);

    auto add_common = [&](CLI::App* sub, bool randomized) {
        if (randomized) sub->add_option("--seed", seed_text, "Master seed (integer) or 'auto'");
        sub->add_option("--threads", c.threads, "Worker threads (default: FASTSKETCH_THREADS or all cores)");
        sub->add_option("--report", c.report_path, "Write the JSON report here instead of stdout");
    };

    auto* build = app.add_subcommand("build", "Sample an operator and write it as JSON");
    add_dims(build, c, false);
    add_common(build, true);
    build->add_option("--output", c.output_path, "Operator JSON output path");
    build->add_option("--dump", c.dump_path, "Binary payload+signs dump path");

    auto* apply_cmd = app.add_subcommand("apply", "Apply an operator (or its adjoint) to CSV vectors");
    add_common(apply_cmd, false);
    apply_cmd->add_option("--op", c.op_path, "Operator JSON");
    apply_cmd->add_option("--input", c.input_path, "Input point CSV");
    apply_cmd->add_option("--output", c.output_path, "Output point CSV");
    apply_cmd->add_flag("--adjoint", c.adjoint, "Apply the adjoint");
    apply_cmd->add_option("--circulant-path", c.circulant_path, "auto | blocked | full");

    auto* rip = app.add_subcommand("rip", "Measure the restricted isometry constant");
    add_dims(rip, c, true);
    add_common(rip, true);
    rip->add_option("--method", c.method, "exact | mc");
    rip->add_option("--trials", c.trials, "Sampled supports for mc");
    rip->add_option("--cap", c.cap, "Largest C(d,k) allowed for exact");
    rip->add_option("--op", c.op_path, "Use this operator JSON instead of sampling one");

    auto* jl = app.add_subcommand("jl", "JL embedding distortion of a point set");
    add_dims(jl, c, false);
    add_common(jl, true);
    jl->add_option("--trials", c.trials, "Independent operators/point sets");
    jl->add_option("--points", c.points, "Gaussian points to generate when --input is absent");
    jl->add_option("--input", c.input_path, "Point CSV");
    jl->add_option("--output", c.output_path, "Embedded points CSV (trial 0)");

    auto* recover = app.add_subcommand("recover", "Sparse recovery experiment");
    add_dims(recover, c, true);
    add_common(recover, true);
    recover->add_option("--algo", c.algo, "iht | cosamp");
    recover->add_option("--trials", c.trials, "Independent trials");
    recover->add_option("--max-iters", c.max_iters, "Iteration ceiling");
    recover->add_option("--tol", c.tol, "Relative stopping tolerance");
    recover->add_option("--noise", c.noise, "Measurement noise standard deviation");
    recover->add_option("--input", c.input_path, "Signal CSV (one point)");
    recover->add_option("--output", c.output_path, "Per-trial CSV");

    auto* bench = app.add_subcommand("bench", "Time apply/adjoint across dimensions");
    bench->add_option("--d", c.d_range, "Dimension or doubling range lo..hi");
    bench->add_option("--m", c.m, "Number of buckets");
    bench->add_option("--B", c.B, "Bucket size");
    bench->add_option("--kind", c.kind, "fourier | hadamard | circulant | gaussian");
    add_common(bench, true);
    bench->add_option("--trials", c.trials, "Timed repetitions per dimension (>= 5)");
    bench->add_option("--output", c.output_path, "BenchRecord CSV");

    auto* plan = app.add_subcommand("plan", "Recommend (m, B) for a target sparsity and distortion");
    plan->add_option("--d", c.d, "Signal dimension");
    plan->add_option("--k", c.k, "Sparsity");
    plan->add_option("--epsilon", c.epsilon, "Target RIP constant in (0, 1)");
    plan->add_option("--kind", c.kind, "fourier | hadamard | circulant");
    add_common(plan, false);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);  // throws CLI::ParseError
    } catch (const CLI::CallForHelp&) {
        const auto subs = app.get_subcommands();
        throw HelpRequested(subs.empty() ? app.help() : subs.front()->help());
    }

    for (auto* sub : app.get_subcommands()) c.command = sub->get_name();
    if (is_randomized(c.command)) {
        if (seed_text.empty()) {
            throw UsageError("'" + c.command + "' is randomized: pass --seed <integer> or --seed auto");
        }
        if (seed_text == "auto") {
            c.seed_auto = true;
            c.master_seed = auto_seed();
        } else {
            try {
                std::size_t used = 0;
                c.master_seed = std::stoull(seed_text, &used, 0);
                if (used != seed_text.size()) throw std::invalid_argument("trailing characters");
            } catch (const std::exception&) {
                throw UsageError("--seed must be an unsigned integer or 'auto', got '" + seed_text + "'");
            }
        }
    }
    return c;
}

json config_to_json(const ExperimentConfig& c) {
    json j;
    j["command"] = c.command;
    auto put = [&](const char* key, const auto& opt) {
        if (opt) j[key] = *opt;
    };
    const std::string& cmd = c.command;
    if (cmd == "bench") {
        j["d"] = !c.d_range.empty() ? c.d_range : (c.d ? std::to_string(*c.d) : std::string());
    } else if (cmd != "apply") {
        put("d", c.d);
    }
    if (cmd == "build" || cmd == "rip" || cmd == "jl" || cmd == "recover" || cmd == "bench") {
        put("m", c.m);
        put("B", c.B);
    }
    if (cmd != "apply") j["kind"] = c.kind;
    if (cmd == "rip" || cmd == "recover" || cmd == "plan") put("k", c.k);
    if (cmd == "plan") put("epsilon", c.epsilon);
    if (is_randomized(cmd)) put("seed", c.master_seed);
    if (cmd == "rip") {
        j["method"] = c.method;
        j["cap"] = c.cap;
        put("trials", c.trials);
        if (!c.op_path.empty()) j["op"] = c.op_path;
    }
    if (cmd == "jl") {
        put("trials", c.trials);
        j["points"] = c.points;
        if (!c.input_path.empty()) j["input"] = c.input_path;
    }
    if (cmd == "recover") {
        j["algo"] = c.algo;
        put("trials", c.trials);
        j["max-iters"] = c.max_iters;
        j["tol"] = c.tol;
        j["noise"] = c.noise;
        if (!c.input_path.empty()) j["input"] = c.input_path;
    }
    if (cmd == "bench") put("trials", c.trials);
    if (cmd == "apply") {
        j["op"] = c.op_path;
        j["input"] = c.input_path;
        j["adjoint"] = c.adjoint;
        j["circulant-path"] = c.circulant_path;
    }
    return j;
}

std::string config_json_to_key_values(const json& config_json) {
    std::ostringstream out;
    for (auto it = config_json.begin(); it != config_json.end(); ++it) {
        if (it.key() == "command") continue;
        const json& v = it.value();
        std::string text;
        if (v.is_string()) {
            text = v.get<std::string>();
        } else if (v.is_boolean()) {
            text = v.get<bool>() ? "true" : "false";
        } else if (v.is_number_float()) {
            text = format_double(v.get<double>());
        } else {
            text = v.dump();
        }
        out << it.key() << '=' << text << '\n';
    }
    return out.str();
}

int run(const ExperimentConfig& c, std::ostream& out) {
    const std::size_t threads = resolve_threads(c.threads);
    json result;
    if (c.command == "build") {
        result = run_build(c);
    } else if (c.command == "apply") {
        result = run_apply(c);
    } else if (c.command == "rip") {
        result = run_rip(c, threads);
    } else if (c.command == "jl") {
        result = run_jl(c, threads);
    } else if (c.command == "recover") {
        result = run_recover(c, threads);
    } else if (c.command == "bench") {
        result = run_bench(c);
    } else if (c.command == "plan") {
        result = run_plan(c);
    } else {
        throw UsageError("unknown command '" + c.command + "'");
    }

    json report;
    report["schema_version"] = kSchemaVersion;
    report["library_version"] = kVersion;
    report["command"] = c.command;
    report["config"] = config_to_json(c);
    report["master_seed"] = c.master_seed ? json(*c.master_seed) : json(nullptr);
    report["result"] = result;
    const std::string text = report.dump(2) + "\n";
    if (c.report_path.empty()) {
        out << text;
    } else {
        write_text_file(c.report_path, text);
    }
    return kOk;
}

int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    auto fail = [&](int code, const char* type, const std::string& message) {
        json e;
        e["error"] = {{"type", type}, {"message", message}};
        e["exit_code"] = code;
        err << e.dump() << '\n';
        return code;
    };
    try {
        const ExperimentConfig config = parse_command_line(args);
        return run(config, out);
    } catch (const HelpRequested& h) {
        out << h.text;
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        return kOk;
    } catch (const CLI::ParseError& e) {
        return fail(kUsageError, "usage", e.what());
    } catch (const UsageError& e) {
        return fail(kUsageError, "usage", e.what());
    } catch (const IoError& e) {
        return fail(kIoError, "io", e.what());
    } catch (const std::invalid_argument& e) {
        return fail(kUsageError, "usage", e.what());
    } catch (const std::exception& e) {
        return fail(kRuntimeError, "runtime", e.what());
    }
}

}  // namespace fastsketch::cli
