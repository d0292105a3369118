#include "netinfer/error.hpp"
#include "netinfer/estimators.hpp"
#include "netinfer/json_io.hpp"
#include "netinfer/scores.hpp"
#include "netinfer/search.hpp"
#include "netinfer/simulate.hpp"
#include "netinfer/stats.hpp"

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace netinfer;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

py::object to_python(const json& doc) { return py::module_::import("json").attr("loads")(doc.dump()); }

std::vector<std::string> column_names(const std::optional<std::vector<std::string>>& names, std::size_t m) {
    if (names) {
        return *names;
    }
    return default_names(m);
}

TimeSeriesSet to_series(const Array& data, const std::optional<std::vector<std::string>>& names) {
    if (data.ndim() != 2) {
        throw ValidationError("data must be a 2-d array of shape (samples, subsystems)");
    }
    const auto n = static_cast<std::size_t>(data.shape(0));
    const auto m = static_cast<std::size_t>(data.shape(1));
    std::vector<std::vector<double>> cols(m, std::vector<double>(n));
    const auto view = data.unchecked<2>();
    for (std::size_t t = 0; t < n; ++t) {
        for (std::size_t i = 0; i < m; ++i) {
            cols[i][t] = view(t, i);
        }
    }
    return TimeSeriesSet(column_names(names, m), std::move(cols));
}

std::vector<std::size_t> per_column(const std::vector<std::size_t>& v, std::size_t m, const char* what) {
    if (v.size() == 1) {
        return std::vector<std::size_t>(m, v.front());
    }
    if (v.size() != m) {
        throw ValidationError(std::string(what) + " needs one value or one per column");
    }
    return v;
}

// Keyword options shared by the scoring entry points.
struct Options {
    std::string score = "tee";
    double alpha = 0.95;
    std::vector<std::size_t> bins{4};
    std::string estimator = "discrete-plugin";
    double kernel_width = 0.2;
    std::vector<std::size_t> kappa{2};
    std::vector<std::size_t> tau{1};
    std::size_t surrogates = 99;
    std::string surrogate_method = "permutation";
    std::uint64_t seed = 0;

    ScoreOptions score_options() const {
        ScoreOptions o;
        o.kind = parse_score_kind(score);
        o.alpha = alpha;
        o.estimator = parse_estimator(estimator, kernel_width);
        o.surrogates.count = surrogates;
        o.surrogates.alpha = alpha;
        o.surrogates.method = parse_surrogate_method(surrogate_method);
        o.surrogates.seed = seed;
        return o;
    }

    EmbeddedView embed(const TimeSeriesSet& ts, const EstimatorKind& kind) const {
        const std::size_t m = ts.subsystem_count();
        EmbeddingSpec spec;
        spec.kappa = per_column(kappa, m, "kappa");
        spec.tau = per_column(tau, m, "tau");
        if (kind.type == EstimatorKind::Type::DiscretePlugin) {
            const auto b = per_column(bins, m, "bins");
            return delay_embed(discretize(ts, std::vector<int>(b.begin(), b.end())), spec);
        }
        return delay_embed(ts, spec);
    }
};

Dag graph_from_names(const std::vector<std::pair<std::string, std::string>>& edges, const TimeSeriesSet& ts) {
    std::vector<Edge> idx;
    for (const auto& [a, b] : edges) {
        idx.emplace_back(ts.index_of(a), ts.index_of(b));
    }
    return Dag::from_edges(ts.subsystem_count(), idx);
}

std::vector<std::pair<std::string, std::string>> named_edges(const Dag& g, const std::vector<std::string>& names) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& [a, b] : g.edges()) {
        out.emplace_back(names[a], names[b]);
    }
    return out;
}

#define NETINFER_OPTION_ARGS                                                                                         \
    py::arg("score") = "tee", py::arg("alpha") = 0.95, py::arg("bins") = std::vector<std::size_t>{4},                \
    py::arg("estimator") = "discrete-plugin", py::arg("kernel_width") = 0.2,                                         \
    py::arg("kappa") = std::vector<std::size_t>{2}, py::arg("tau") = std::vector<std::size_t>{1},                    \
    py::arg("surrogates") = 99, py::arg("surrogate_method") = "permutation", py::arg("seed") = 0

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Transfer-entropy structure learning for networks of coupled dynamical systems";
    m.attr("__version__") = NETINFER_VERSION;

    static py::exception<ValidationError> validation(m, "ValidationError", PyExc_ValueError);
    static py::exception<NumericError> numeric(m, "NumericError", PyExc_ArithmeticError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) {
                std::rethrow_exception(p);
            }
        } catch (const ValidationError& e) {
            PyErr_SetString(validation.ptr(), e.what());
        } catch (const NumericError& e) {
            PyErr_SetString(numeric.ptr(), e.what());
        }
    });

    m.def(
        "simulate",
        [](const std::string& config) {
            const SimOutput sim = simulate(gds_config_from_json(json::parse(config)));
            const auto& ts = sim.observations;
            Array data({ts.sample_count(), ts.subsystem_count()});
            auto w = data.mutable_unchecked<2>();
            for (std::size_t i = 0; i < ts.subsystem_count(); ++i) {
                const auto s = ts.series(i);
                for (std::size_t t = 0; t < s.size(); ++t) {
                    w(t, i) = s[t];
                }
            }
            py::dict out;
            out["names"] = ts.names();
            out["data"] = data;
            out["edges"] = named_edges(sim.truth, ts.names());
            return out;
        },
        py::arg("config"), "Simulate from a JSON configuration string; returns names, data (N x M) and true edges.");

    m.def(
        "transfer_entropy",
        [](const Array& data, std::size_t dest, const std::vector<std::size_t>& sources, const std::string& estimator,
           double kernel_width, std::vector<std::size_t> bins, std::vector<std::size_t> kappa,
           std::vector<std::size_t> tau) {
            Options o;
            o.estimator = estimator;
            o.kernel_width = kernel_width;
            o.bins = std::move(bins);
            o.kappa = std::move(kappa);
            o.tau = std::move(tau);
            const auto kind = parse_estimator(estimator, kernel_width);
            const auto ts = to_series(data, std::nullopt);
            return collective_transfer_entropy(dest, sources, o.embed(ts, kind), kind);
        },
        py::arg("data"), py::arg("dest"), py::arg("sources"), py::arg("estimator") = "discrete-plugin",
        py::arg("kernel_width") = 0.2, py::arg("bins") = std::vector<std::size_t>{4},
        py::arg("kappa") = std::vector<std::size_t>{2}, py::arg("tau") = std::vector<std::size_t>{1},
        "Collective transfer entropy in bits from source columns to the destination column.");

    m.def(
        "score",
        [](const Array& data, const std::vector<std::pair<std::string, std::string>>& edges,
           const std::optional<std::vector<std::string>>& names, std::string score, double alpha,
           std::vector<std::size_t> bins, std::string estimator, double kernel_width, std::vector<std::size_t> kappa,
           std::vector<std::size_t> tau, std::size_t surrogates, std::string surrogate_method, std::uint64_t seed) {
            const Options o{score, alpha, bins, estimator, kernel_width, kappa, tau, surrogates, surrogate_method, seed};
            const auto ts = to_series(data, names);
            const auto opts = o.score_options();
            const auto view = o.embed(ts, opts.estimator);
            return to_python(report_to_json(score_graph(graph_from_names(edges, ts), view, opts), ts.names()));
        },
        py::arg("data"), py::arg("edges"), py::arg("names") = py::none(), NETINFER_OPTION_ARGS,
        "Score a graph given as (parent, child) name pairs; returns the report as a dict.");

    m.def(
        "infer",
        [](const Array& data, const std::optional<std::vector<std::string>>& names, std::string score, double alpha,
           std::vector<std::size_t> bins, std::string estimator, double kernel_width, std::vector<std::size_t> kappa,
           std::vector<std::size_t> tau, std::size_t surrogates, std::string surrogate_method, std::uint64_t seed,
           const std::string& search_method, std::size_t restarts, std::optional<std::size_t> max_parents) {
            const Options o{score, alpha, bins, estimator, kernel_width, kappa, tau, surrogates, surrogate_method, seed};
            const auto ts = to_series(data, names);
            const auto opts = o.score_options();
            const auto view = o.embed(ts, opts.estimator);
            SearchConfig cfg;
            cfg.method = parse_search_method(search_method);
            cfg.restarts = restarts;
            cfg.seed = seed;
            cfg.max_parents = max_parents;
            LocalScorer scorer(view, opts);
            SearchResult result;
            {
                py::gil_scoped_release release;
                result = search(scorer, cfg);
            }
            py::dict out;
            out["edges"] = named_edges(result.best, ts.names());
            out["report"] = to_python(report_to_json(result.best_report, ts.names()));
            out["graphs_scored"] = result.visited;
            return out;
        },
        py::arg("data"), py::arg("names") = py::none(), NETINFER_OPTION_ARGS, py::arg("search") = "exhaustive",
        py::arg("restarts") = 0, py::arg("max_parents") = py::none(),
        "Search for the best-scoring DAG; returns edges, the report and the number of graphs scored.");

    m.def(
        "compare",
        [](const std::vector<std::pair<std::string, std::string>>& inferred,
           const std::vector<std::pair<std::string, std::string>>& truth, const std::vector<std::string>& names) {
            const TimeSeriesSet dummy(names, std::vector<std::vector<double>>(names.size(), std::vector<double>{0, 0}));
            return to_python(comparison_to_json(compare_graphs(graph_from_names(inferred, dummy), graph_from_names(truth, dummy))));
        },
        py::arg("inferred"), py::arg("truth"), py::arg("names"),
        "Precision, recall, F1 and structural Hamming distance between two edge lists.");

    m.def("chi2_quantile", py::overload_cast<std::uint64_t, double>(&chi2_quantile), py::arg("df"), py::arg("alpha"));
}
