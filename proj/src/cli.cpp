#include "netinfer/cli.hpp"

#include "netinfer/error.hpp"
#include "netinfer/json_io.hpp"
#include "netinfer/parallel.hpp"
#include "netinfer/scores.hpp"
#include "netinfer/search.hpp"
#include "netinfer/simulate.hpp"
#include "netinfer/timeseries.hpp"

#include <CLI11.hpp>
#include <openssl/evp.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>

namespace netinfer::cli {

namespace fs = std::filesystem;

namespace {

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ValidationError("cannot read '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json read_json(const std::string& path) {
    try {
        return json::parse(read_text(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError("'" + path + "' is not valid JSON: " + e.what());
    }
}

std::string dump(const json& doc) { return doc.dump(2) + "\n"; }

// A single integer applies to every subsystem; otherwise one value per subsystem.
std::vector<std::size_t> expand(const std::vector<std::size_t>& values, std::size_t m, const std::string& flag) {
    if (values.size() == 1) {
        return std::vector<std::size_t>(m, values.front());
    }
    if (values.size() != m) {
        throw ValidationError("--" + flag + " takes one value or one per subsystem (" + std::to_string(m) + ")");
    }
    return values;
}

// Scoring flags shared by `score` and `infer`. Values left unset on the
// command line fall back to the options file, then to built-in defaults.
struct ScoringFlags {
    std::string options_file;
    std::optional<std::string> score;
    std::optional<double> alpha;
    std::vector<std::size_t> bins;
    std::optional<std::string> estimator;
    std::optional<double> kernel_width;
    std::vector<std::size_t> kappa;
    std::vector<std::size_t> tau;
    std::optional<std::size_t> surrogates;
    std::optional<std::string> surrogate_method;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> search;
    std::optional<std::size_t> restarts;
    std::optional<std::size_t> max_parents;

    void add_to(CLI::App& app, bool with_search) {
        app.add_option("--options", options_file, "JSON file with default values for these flags");
        app.add_option("--score", score, "te, tea, tee, aic, bic or ml (default tee)");
        app.add_option("--alpha", alpha, "confidence level for tea/tee (default 0.95)");
        app.add_option("--bins", bins, "discretisation bins, one value or one per column (default 4)")->delimiter(',');
        app.add_option("--estimator", estimator, "discrete-plugin, linear-gaussian or box-kernel");
        app.add_option("--kernel-width", kernel_width, "box-kernel width (default 0.2)");
        app.add_option("--kappa", kappa, "embedding dimension, one value or one per column (default 2)")->delimiter(',');
        app.add_option("--tau", tau, "embedding delay, one value or one per column (default 1)")->delimiter(',');
        app.add_option("--surrogates", surrogates, "surrogate count for tee (default 99)");
        app.add_option("--surrogate-method", surrogate_method, "permutation or bootstrap");
        app.add_option("--seed", seed, "seed for surrogates and restarts (default 0)");
        if (with_search) {
            app.add_option("--search", search, "exhaustive or greedy (default exhaustive)");
            app.add_option("--restarts", restarts, "random restarts for greedy search (default 0)");
            app.add_option("--max-parents", max_parents, "parent cap (default 3 for te, unlimited otherwise)");
        }
    }

    // Fills unset fields from the options file.
    void merge_file() {
        if (options_file.empty()) {
            return;
        }
        const json doc = read_json(options_file);
        if (!doc.is_object()) {
            throw ValidationError("options file must hold a JSON object");
        }
        auto take = [&]<typename T>(const char* key, std::optional<T>& slot) {
            if (!slot && doc.contains(key)) {
                try {
                    slot = doc.at(key).get<T>();
                } catch (const nlohmann::json::exception&) {
                    throw ValidationError(std::string("options file: bad value for '") + key + "'");
                }
            }
        };
        auto take_list = [&](const char* key, std::vector<std::size_t>& slot) {
            if (slot.empty() && doc.contains(key)) {
                const auto& v = doc.at(key);
                try {
                    slot = v.is_array() ? v.get<std::vector<std::size_t>>() : std::vector<std::size_t>{v.get<std::size_t>()};
                } catch (const nlohmann::json::exception&) {
                    throw ValidationError(std::string("options file: bad value for '") + key + "'");
                }
            }
        };
        for (const auto& [key, value] : doc.items()) {
            static const std::set<std::string> known = {"score",      "alpha",      "bins",     "estimator",
                                                        "kernel_width", "kappa",    "tau",      "surrogates",
                                                        "surrogate_method", "seed", "search",   "restarts",
                                                        "max_parents"};
            if (!known.contains(key)) {
                throw ValidationError("options file: unknown key '" + key + "'");
            }
        }
        take("score", score);
        take("alpha", alpha);
        take_list("bins", bins);
        take("estimator", estimator);
        take("kernel_width", kernel_width);
        take_list("kappa", kappa);
        take_list("tau", tau);
        take("surrogates", surrogates);
        take("surrogate_method", surrogate_method);
        take("seed", seed);
        take("search", search);
        take("restarts", restarts);
        take("max_parents", max_parents);
    }

    ScoreOptions score_options() const {
        ScoreOptions o;
        o.kind = parse_score_kind(score.value_or("tee"));
        o.alpha = alpha.value_or(0.95);
        o.estimator = parse_estimator(estimator.value_or("discrete-plugin"), kernel_width.value_or(0.2));
        o.surrogates.count = surrogates.value_or(99);
        o.surrogates.alpha = o.alpha;
        o.surrogates.method = parse_surrogate_method(surrogate_method.value_or("permutation"));
        o.surrogates.seed = seed.value_or(0);
        if (o.kind == ScoreKind::TEE) {
            o.surrogates.validate();
        }
        return o;
    }

    SearchConfig search_config() const {
        SearchConfig c;
        c.method = parse_search_method(search.value_or("exhaustive"));
        c.max_parents = max_parents;
        c.restarts = restarts.value_or(0);
        c.seed = seed.value_or(0);
        return c;
    }
};

// Embedded data ready for scoring.
struct Prepared {
    EmbeddedView view;
    ScoreOptions options;
    std::vector<std::string> names;
};

Prepared prepare(const TimeSeriesSet& ts, const ScoringFlags& flags) {
    const std::size_t m = ts.subsystem_count();
    Prepared p;
    p.options = flags.score_options();
    p.names = ts.names();
    EmbeddingSpec spec;
    spec.kappa = expand(flags.kappa.empty() ? std::vector<std::size_t>{2} : flags.kappa, m, "kappa");
    spec.tau = expand(flags.tau.empty() ? std::vector<std::size_t>{1} : flags.tau, m, "tau");
    if (p.options.estimator.type == EstimatorKind::Type::DiscretePlugin) {
        const auto b = expand(flags.bins.empty() ? std::vector<std::size_t>{4} : flags.bins, m, "bins");
        const std::vector<int> bins(b.begin(), b.end());
        p.view = delay_embed(discretize(ts, bins), spec);
    } else {
        if (!flags.bins.empty()) {
            throw ValidationError("--bins only applies to the discrete-plugin estimator");
        }
        p.view = delay_embed(ts, spec);
    }
    p.options.validate(p.view);
    return p;
}

struct Manifest {
    std::string command;
    std::vector<std::string> args;
    std::vector<std::string> config_paths;
    json seeds = json::object();
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

    json to_json() const {
        json doc;
        doc["command"] = command;
        doc["args"] = args;
        doc["tool"] = "netinfer";
        doc["version"] = NETINFER_VERSION;
        doc["config_paths"] = config_paths;
        doc["seeds"] = seeds;
        json in = json::array();
        for (const auto& path : inputs) {
            in.push_back({{"path", path}, {"sha256", sha256_file(path)}});
        }
        doc["inputs"] = std::move(in);
        json out = json::array();
        for (const auto& path : outputs) {
            out.push_back({{"path", path}, {"sha256", sha256_file(path)}});
        }
        doc["outputs"] = std::move(out);
        doc["threads"] = worker_count();
        doc["duration_seconds"] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        return doc;
    }
};

std::string manifest_path(const std::string& prefix) { return prefix + ".manifest.json"; }

std::string file_name(const std::string& path) { return fs::path(path).filename().string(); }

void print_report(std::ostream& out, const ScoreReport& r, const std::vector<std::string>& names) {
    out << "score " << to_string(r.kind) << "  estimator " << r.estimator << "  rows " << r.n_effective << "\n";
    out << std::left << std::setw(16) << "vertex" << std::setw(24) << "parents" << std::right << std::setw(14)
        << "te_bits" << std::setw(14) << "penalty" << std::setw(14) << "local" << "\n";
    for (const auto& v : r.per_vertex) {
        std::string ps;
        for (const auto p : v.parents) {
            ps += (ps.empty() ? "" : ",") + names[p];
        }
        out << std::left << std::setw(16) << names[v.vertex] << std::setw(24) << (ps.empty() ? "-" : ps)
            << std::right << std::setprecision(6) << std::setw(14) << v.te << std::setw(14) << v.penalty
            << std::setw(14) << v.local << "\n";
    }
    out << "total " << std::setprecision(10) << r.total << "\n";
    for (const auto& note : r.notes) {
        out << "note: " << note << "\n";
    }
}

json seeds_of(const ScoreOptions& o) {
    json s;
    s["surrogates"] = o.kind == ScoreKind::TEE ? o.surrogates.seed : 0;
    return s;
}

int cmd_simulate(const std::string& config_path, const std::string& prefix, std::optional<std::uint64_t> seed,
                 std::optional<std::size_t> n, Manifest& manifest, std::ostream& out) {
    GdsConfig cfg = gds_config_from_json(read_json(config_path));
    if (seed) {
        cfg.seed = *seed;
    }
    if (n) {
        cfg.n = *n;
    }
    const SimOutput sim = simulate(cfg);
    const std::string csv = prefix + ".csv";
    const std::string dot = prefix + ".truth.dot";
    const std::string echo = prefix + ".config.json";
    const std::string mpath = manifest_path(prefix);
    write_file_atomic(csv, to_csv(sim.observations));
    write_file_atomic(dot, "// manifest: " + file_name(mpath) + "\n" + to_dot(sim.truth, sim.config_echo.names, "truth"));
    json echo_doc = gds_config_to_json(sim.config_echo);
    echo_doc["manifest"] = file_name(mpath);
    write_file_atomic(echo, dump(echo_doc));

    manifest.config_paths = {config_path};
    manifest.seeds["simulation"] = sim.config_echo.seed;
    manifest.inputs = {config_path};
    manifest.outputs = {csv, dot, echo};
    write_file_atomic(mpath, dump(manifest.to_json()));
    out << "wrote " << csv << " (" << sim.observations.subsystem_count() << " columns, "
        << sim.observations.sample_count() << " rows), " << dot << ", " << echo << "\n";
    return kOk;
}

int cmd_score(const std::string& data, const std::string& graph_path, ScoringFlags flags, const std::string& prefix,
              Manifest& manifest, std::ostream& out) {
    flags.merge_file();
    const TimeSeriesSet ts = load_csv(data);
    const Dag graph = align_graph(load_dot(graph_path), ts.names());
    const Prepared p = prepare(ts, flags);
    LocalScorer scorer(p.view, p.options);
    const ScoreReport report = scorer.report(graph);
    print_report(out, report, p.names);
    if (!prefix.empty()) {
        const std::string rpath = prefix + ".report.json";
        json doc = report_to_json(report, p.names);
        doc["manifest"] = file_name(manifest_path(prefix));
        write_file_atomic(rpath, dump(doc));
        if (!flags.options_file.empty()) {
            manifest.config_paths = {flags.options_file};
        }
        manifest.seeds = seeds_of(p.options);
        manifest.inputs = {data, graph_path};
        manifest.outputs = {rpath};
        write_file_atomic(manifest_path(prefix), dump(manifest.to_json()));
    }
    return kOk;
}

int cmd_infer(const std::string& data, ScoringFlags flags, const std::string& prefix, Manifest& manifest,
              std::ostream& out, std::ostream& err) {
    flags.merge_file();
    const TimeSeriesSet ts = load_csv(data);
    const std::size_t m = ts.subsystem_count();
    const SearchConfig cfg = flags.search_config();
    if (cfg.method == SearchMethod::Exhaustive && m > kMaxExhaustiveVertices) {
        throw ValidationError("exhaustive search supports at most " + std::to_string(kMaxExhaustiveVertices) +
                              " subsystems, data has " + std::to_string(m) + "; use --search greedy");
    }
    const Prepared p = prepare(ts, flags);
    if (p.options.kind == ScoreKind::TE && m > 1 && cfg.parent_cap(ScoreKind::TE, m) + 1 >= m) {
        err << "warning: the te score never penalises edges, so the result will be a complete DAG; "
               "use tea or tee, or set --max-parents\n";
    }
    LocalScorer scorer(p.view, p.options);
    const SearchResult result = search(scorer, cfg);
    print_report(out, result.best_report, p.names);
    out << "graphs scored " << result.visited << "\n";
    const std::string dot_body = to_dot(result.best, p.names, "inferred");
    if (prefix.empty()) {
        out << dot_body;
        return kOk;
    }
    const std::string dpath = prefix + ".dot";
    const std::string rpath = prefix + ".report.json";
    const std::string mpath = manifest_path(prefix);
    write_file_atomic(dpath, "// manifest: " + file_name(mpath) + "\n" + dot_body);
    json doc = report_to_json(result.best_report, p.names);
    doc["search"] = to_string(cfg.method);
    doc["graphs_scored"] = result.visited;
    doc["manifest"] = file_name(mpath);
    write_file_atomic(rpath, dump(doc));
    if (!flags.options_file.empty()) {
        manifest.config_paths = {flags.options_file};
    }
    manifest.seeds = seeds_of(p.options);
    manifest.seeds["search"] = cfg.seed;
    manifest.inputs = {data};
    manifest.outputs = {dpath, rpath};
    write_file_atomic(mpath, dump(manifest.to_json()));
    return kOk;
}

int cmd_eval(const std::string& inferred_path, const std::string& truth_path, const std::string& prefix,
             Manifest& manifest, std::ostream& out) {
    const NamedGraph truth = load_dot(truth_path);
    const Dag inferred = align_graph(load_dot(inferred_path), truth.names);
    json doc = comparison_to_json(compare_graphs(inferred, truth.graph));
    if (prefix.empty()) {
        out << dump(doc);
        return kOk;
    }
    const std::string mpath = manifest_path(prefix);
    const std::string path = prefix + ".metrics.json";
    doc["manifest"] = file_name(mpath);
    write_file_atomic(path, dump(doc));
    out << dump(doc);
    manifest.inputs = {inferred_path, truth_path};
    manifest.outputs = {path};
    write_file_atomic(mpath, dump(manifest.to_json()));
    return kOk;
}

}  // namespace

std::string sha256_file(const std::string& path) {
    const std::string bytes = read_text(path);
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw NumericError("sha256 failed for '" + path + "'");
    }
    std::ostringstream hex;
    for (unsigned int i = 0; i < len; ++i) {
        hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
    }
    return hex.str();
}

void write_file_atomic(const std::string& path, const std::string& contents) {
    const fs::path target(path);
    if (target.has_parent_path()) {
        fs::create_directories(target.parent_path());
    }
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) {
            throw Error("cannot write '" + tmp.string() + "'");
        }
        f << contents;
        f.flush();
        if (!f) {
            throw Error("write failed for '" + tmp.string() + "'");
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp);
        throw Error("cannot rename '" + tmp.string() + "' to '" + path + "': " + ec.message());
    }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Transfer-entropy structure learning for networks of coupled dynamical systems", "netinfer"};
    app.require_subcommand(1);
    app.set_version_flag("--version", NETINFER_VERSION);

    Manifest manifest;
    manifest.args = args;

    std::string sim_config;
    std::string sim_prefix;
    std::optional<std::uint64_t> sim_seed;
    std::optional<std::size_t> sim_n;
    auto* simulate_cmd = app.add_subcommand("simulate", "Simulate a coupled dynamical network");
    simulate_cmd->add_option("config", sim_config, "GDS configuration JSON")->required();
    simulate_cmd->add_option("-o,--out", sim_prefix, "output prefix (writes .csv, .truth.dot, .config.json)")
        ->required();
    simulate_cmd->add_option("--seed", sim_seed, "overrides the config seed");
    simulate_cmd->add_option("-n,--samples", sim_n, "overrides the config sample count");

    std::string score_data;
    std::string score_graph_path;
    std::string score_prefix;
    ScoringFlags score_flags;
    auto* score_cmd = app.add_subcommand("score", "Score a given graph on a dataset");
    score_cmd->add_option("data", score_data, "observations CSV")->required();
    score_cmd->add_option("graph", score_graph_path, "graph DOT")->required();
    score_cmd->add_option("-o,--out", score_prefix, "output prefix (writes .report.json)");
    score_flags.add_to(*score_cmd, false);

    std::string infer_data;
    std::string infer_prefix;
    ScoringFlags infer_flags;
    auto* infer_cmd = app.add_subcommand("infer", "Search for the best-scoring graph");
    infer_cmd->add_option("data", infer_data, "observations CSV")->required();
    infer_cmd->add_option("-o,--out", infer_prefix, "output prefix (writes .dot, .report.json)");
    infer_flags.add_to(*infer_cmd, true);

    std::string eval_inferred;
    std::string eval_truth;
    std::string eval_prefix;
    auto* eval_cmd = app.add_subcommand("eval", "Compare an inferred graph with the truth");
    eval_cmd->add_option("inferred", eval_inferred, "inferred graph DOT")->required();
    eval_cmd->add_option("truth", eval_truth, "ground-truth graph DOT")->required();
    eval_cmd->add_option("-o,--out", eval_prefix, "output prefix (writes .metrics.json)");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kOk : kValidation;
    }

    try {
        if (simulate_cmd->parsed()) {
            manifest.command = "simulate";
            return cmd_simulate(sim_config, sim_prefix, sim_seed, sim_n, manifest, out);
        }
        if (score_cmd->parsed()) {
            manifest.command = "score";
            return cmd_score(score_data, score_graph_path, score_flags, score_prefix, manifest, out);
        }
        if (infer_cmd->parsed()) {
            manifest.command = "infer";
            return cmd_infer(infer_data, infer_flags, infer_prefix, manifest, out, err);
        }
        manifest.command = "eval";
        return cmd_eval(eval_inferred, eval_truth, eval_prefix, manifest, out);
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return kValidation;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kRuntime;
    }
}

int run(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(args, std::cout, std::cerr);
}

}  // namespace netinfer::cli
