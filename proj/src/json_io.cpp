#include "netinfer/json_io.hpp"

#include "netinfer/error.hpp"

#include <set>

namespace netinfer {

namespace {

[[noreturn]] void bad_field(const std::string& field, const std::string& what) {
    throw ValidationError("invalid config field '" + field + "': " + what);
}

template <typename T>
T get_field(const json& doc, const std::string& field, const std::string& path) {
    try {
        return doc.at(field).get<T>();
    } catch (const nlohmann::json::exception& e) {
        bad_field(path, e.what());
    }
}

double get_number(const json& obj, const std::string& field, const std::string& path, double fallback) {
    if (!obj.contains(field)) {
        return fallback;
    }
    if (!obj.at(field).is_number()) {
        bad_field(path, "expected a number");
    }
    return obj.at(field).get<double>();
}

std::size_t get_count(const json& obj, const std::string& field, std::size_t fallback) {
    if (!obj.contains(field)) {
        return fallback;
    }
    const auto& v = obj.at(field);
    if (!v.is_number_integer() || v.get<long long>() < 0) {
        bad_field(field, "expected a non-negative integer");
    }
    return v.get<std::size_t>();
}

std::size_t vertex_index(const std::vector<std::string>& names, const json& ref, const std::string& path) {
    if (!ref.is_string()) {
        bad_field(path, "vertex references must be names");
    }
    const auto name = ref.get<std::string>();
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == name) {
            return i;
        }
    }
    bad_field(path, "unknown vertex '" + name + "'");
}

}  // namespace

json report_to_json(const ScoreReport& report, const std::vector<std::string>& names) {
    json doc;
    doc["score_kind"] = to_string(report.kind);
    doc["estimator"] = report.estimator;
    doc["alpha"] = report.alpha;
    doc["seed"] = report.seed;
    doc["surrogates"] = report.surrogates;
    doc["surrogate_method"] = report.surrogate_method;
    doc["n_effective"] = report.n_effective;
    doc["total"] = report.total;
    json vertices = json::array();
    for (const auto& v : report.per_vertex) {
        json entry;
        entry["vertex"] = v.vertex;
        entry["name"] = v.vertex < names.size() ? names[v.vertex] : std::to_string(v.vertex);
        entry["parents"] = v.parents;
        json parent_names = json::array();
        for (const auto p : v.parents) {
            parent_names.push_back(p < names.size() ? names[p] : std::to_string(p));
        }
        entry["parent_names"] = std::move(parent_names);
        entry["te"] = v.te;
        entry["penalty"] = v.penalty;
        entry["local"] = v.local;
        vertices.push_back(std::move(entry));
    }
    doc["per_vertex"] = std::move(vertices);
    doc["notes"] = report.notes;
    return doc;
}

json comparison_to_json(const GraphComparison& cmp) {
    json doc;
    doc["precision"] = cmp.precision;
    doc["recall"] = cmp.recall;
    doc["f1"] = cmp.f1;
    doc["shd"] = cmp.shd;
    return doc;
}

GdsConfig gds_config_from_json(const json& doc) {
    if (!doc.is_object()) {
        throw ValidationError("config must be a JSON object");
    }
    static const std::set<std::string> known = {"names",    "vertices",          "edges",         "model", "process_noise_std",
                                                "obs_noise_std", "n",            "burn_in",       "seed",  "initial_state",
                                                "manifest"};  // echoed configs carry their manifest name
    for (const auto& [key, value] : doc.items()) {
        if (!known.contains(key)) {
            bad_field(key, "unknown field");
        }
    }

    GdsConfig cfg;
    if (doc.contains("names")) {
        cfg.names = get_field<std::vector<std::string>>(doc, "names", "names");
    }
    std::size_t m = cfg.names.size();
    if (doc.contains("vertices")) {
        const std::size_t declared = get_count(doc, "vertices", 0);
        if (!cfg.names.empty() && declared != m) {
            bad_field("vertices", "does not match the number of names");
        }
        m = declared;
    }
    if (m == 0) {
        bad_field("names", "give vertex names or a positive 'vertices' count");
    }
    if (cfg.names.empty()) {
        cfg.names = default_names(m);
    }
    if (std::set<std::string>(cfg.names.begin(), cfg.names.end()).size() != m) {
        bad_field("names", "vertex names must be unique");
    }

    std::vector<Edge> edges;
    if (doc.contains("edges")) {
        const auto& list = doc.at("edges");
        if (!list.is_array()) {
            bad_field("edges", "expected a list of [from, to] pairs");
        }
        for (const auto& e : list) {
            if (!e.is_array() || e.size() != 2) {
                bad_field("edges", "expected a list of [from, to] pairs");
            }
            edges.emplace_back(vertex_index(cfg.names, e[0], "edges"), vertex_index(cfg.names, e[1], "edges"));
        }
    }
    try {
        cfg.graph = Dag::from_edges(m, edges);
    } catch (const ValidationError& e) {
        bad_field("edges", e.what());
    }

    if (!doc.contains("model") || !doc.at("model").is_object()) {
        bad_field("model", "expected an object with a 'type'");
    }
    const auto& model = doc.at("model");
    const auto type = get_field<std::string>(model, "type", "model.type");
    if (type == "coupled-logistic") {
        for (const auto& [key, value] : model.items()) {
            if (key != "type" && key != "r" && key != "epsilon") {
                bad_field("model." + key, "unknown field for coupled-logistic");
            }
        }
        CoupledLogistic cl;
        cl.r = get_number(model, "r", "r", cl.r);
        cl.epsilon = get_number(model, "epsilon", "epsilon", cl.epsilon);
        cfg.model = cl;
    } else if (type == "linear-gaussian") {
        for (const auto& [key, value] : model.items()) {
            if (key != "type" && key != "self" && key != "coupling") {
                bad_field("model." + key, "unknown field for linear-gaussian");
            }
        }
        LinearGaussianModel lg;
        lg.self = get_number(model, "self", "self", 0.0);
        lg.weights.assign(m, std::vector<double>(m, 0.0));
        if (model.contains("coupling")) {
            const auto& list = model.at("coupling");
            if (!list.is_array()) {
                bad_field("coupling", "expected a list of {from, to, weight}");
            }
            for (const auto& c : list) {
                if (!c.is_object() || !c.contains("from") || !c.contains("to") || !c.contains("weight")) {
                    bad_field("coupling", "expected a list of {from, to, weight}");
                }
                const auto from = vertex_index(cfg.names, c.at("from"), "coupling");
                const auto to = vertex_index(cfg.names, c.at("to"), "coupling");
                lg.weights[to][from] = get_number(c, "weight", "coupling", 0.0);
            }
        }
        cfg.model = lg;
    } else {
        bad_field("model.type", "expected 'coupled-logistic' or 'linear-gaussian', got '" + type + "'");
    }

    cfg.process_noise_std = get_number(doc, "process_noise_std", "process_noise_std", 0.0);
    cfg.obs_noise_std = get_number(doc, "obs_noise_std", "obs_noise_std", 0.0);
    cfg.n = get_count(doc, "n", cfg.n);
    cfg.burn_in = get_count(doc, "burn_in", cfg.burn_in);
    if (doc.contains("seed")) {
        if (!doc.at("seed").is_number_unsigned() && !(doc.at("seed").is_number_integer() && doc.at("seed").get<long long>() >= 0)) {
            bad_field("seed", "expected a non-negative integer");
        }
        cfg.seed = doc.at("seed").get<std::uint64_t>();
    }
    if (doc.contains("initial_state")) {
        cfg.initial_state = get_field<std::vector<double>>(doc, "initial_state", "initial_state");
    }
    cfg.validate();
    return cfg;
}

json gds_config_to_json(const GdsConfig& cfg) {
    json doc;
    doc["names"] = cfg.names;
    doc["vertices"] = cfg.graph.size();
    json edges = json::array();
    for (const auto& [from, to] : cfg.graph.edges()) {
        edges.push_back(json::array({cfg.names.at(from), cfg.names.at(to)}));
    }
    doc["edges"] = std::move(edges);
    json model;
    if (const auto* cl = std::get_if<CoupledLogistic>(&cfg.model)) {
        model["type"] = "coupled-logistic";
        model["r"] = cl->r;
        model["epsilon"] = cl->epsilon;
    } else {
        const auto& lg = std::get<LinearGaussianModel>(cfg.model);
        model["type"] = "linear-gaussian";
        model["self"] = lg.self;
        json coupling = json::array();
        for (std::size_t i = 0; i < lg.weights.size(); ++i) {
            for (std::size_t j = 0; j < lg.weights[i].size(); ++j) {
                if (lg.weights[i][j] != 0.0) {
                    coupling.push_back({{"from", cfg.names.at(j)}, {"to", cfg.names.at(i)}, {"weight", lg.weights[i][j]}});
                }
            }
        }
        model["coupling"] = std::move(coupling);
    }
    doc["model"] = std::move(model);
    doc["process_noise_std"] = cfg.process_noise_std;
    doc["obs_noise_std"] = cfg.obs_noise_std;
    doc["n"] = cfg.n;
    doc["burn_in"] = cfg.burn_in;
    doc["seed"] = cfg.seed;
    if (cfg.initial_state) {
        doc["initial_state"] = *cfg.initial_state;
    }
    return doc;
}

}  // namespace netinfer
