#include "netinfer/simulate.hpp"

#include "netinfer/error.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>

namespace netinfer {

namespace {

double logistic(double r, double z) { return r * z * (1.0 - z); }

double reflect_unit(double x) {
    // Reflections at 0 and 1 compose to a period-2 fold.
    x = std::fmod(std::abs(x), 2.0);
    return x > 1.0 ? 2.0 - x : x;
}

void require(bool ok, const std::string& field, const std::string& what) {
    if (!ok) {
        throw ValidationError("invalid config field '" + field + "': " + what);
    }
}

struct Trajectory {
    std::vector<std::vector<double>> states;
    std::vector<std::vector<double>> observations;
};

// Runs burn_in + n synchronous updates from x_0 and keeps the last n states.
template <typename Step>
Trajectory run(const GdsConfig& cfg, std::vector<double> x, std::mt19937_64& rng, Step&& step) {
    const std::size_t m = cfg.graph.size();
    std::normal_distribution<double> unit(0.0, 1.0);
    Trajectory out;
    out.states.assign(m, std::vector<double>(cfg.n));
    out.observations.assign(m, std::vector<double>(cfg.n));
    std::vector<double> next(m);
    const std::size_t total = cfg.burn_in + cfg.n;
    for (std::size_t s = 1; s <= total; ++s) {
        for (std::size_t i = 0; i < m; ++i) {
            const double noise = cfg.process_noise_std > 0.0 ? cfg.process_noise_std * unit(rng) : 0.0;
            next[i] = step(i, x, noise);
            if (!std::isfinite(next[i])) {
                throw NumericError("state of subsystem '" + cfg.names[i] + "' diverged at step " + std::to_string(s));
            }
        }
        x.swap(next);
        if (s > cfg.burn_in) {
            const std::size_t t = s - cfg.burn_in - 1;
            for (std::size_t i = 0; i < m; ++i) {
                out.states[i][t] = x[i];
                const double noise = cfg.obs_noise_std > 0.0 ? cfg.obs_noise_std * unit(rng) : 0.0;
                out.observations[i][t] = x[i] + noise;
            }
        }
    }
    return out;
}

SimOutput finish(const GdsConfig& cfg, Trajectory traj) {
    return SimOutput{TimeSeriesSet(cfg.names, std::move(traj.observations)), std::move(traj.states), cfg.graph, cfg};
}

GdsConfig with_defaults(GdsConfig cfg) {
    if (cfg.names.empty()) {
        cfg.names = default_names(cfg.graph.size());
    }
    if (auto* lg = std::get_if<LinearGaussianModel>(&cfg.model); lg && lg->weights.empty()) {
        lg->weights.assign(cfg.graph.size(), std::vector<double>(cfg.graph.size(), 0.0));
    }
    return cfg;
}

}  // namespace

std::vector<std::string> default_names(std::size_t m) {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < m; ++i) {
        names.push_back("v" + std::to_string(i + 1));
    }
    return names;
}

double spectral_radius(const LinearGaussianModel& model, std::size_t m) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m)) *
                        model.self;
    for (std::size_t i = 0; i < m && i < model.weights.size(); ++i) {
        for (std::size_t j = 0; j < m && j < model.weights[i].size(); ++j) {
            a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) += model.weights[i][j];
        }
    }
    if (m == 0) {
        return 0.0;
    }
    return Eigen::EigenSolver<Eigen::MatrixXd>(a, false).eigenvalues().cwiseAbs().maxCoeff();
}

void GdsConfig::validate() const {
    const std::size_t m = graph.size();
    require(m >= 1, "graph", "needs at least one vertex");
    require(names.size() == m, "names", "expected " + std::to_string(m) + " names");
    require(is_acyclic(graph), "graph", "contains a directed cycle");
    require(n >= 2, "n", "must be >= 2");
    require(std::isfinite(process_noise_std) && process_noise_std >= 0.0, "process_noise_std", "must be >= 0");
    require(std::isfinite(obs_noise_std) && obs_noise_std >= 0.0, "obs_noise_std", "must be >= 0");
    if (initial_state) {
        require(initial_state->size() == m, "initial_state", "expected " + std::to_string(m) + " values");
    }
    if (const auto* cl = std::get_if<CoupledLogistic>(&model)) {
        require(cl->epsilon > 0.0 && cl->epsilon < 1.0, "epsilon", "must satisfy 0 < epsilon < 1");
        require(cl->r > 0.0 && cl->r <= 4.0, "r", "must satisfy 0 < r <= 4");
        if (initial_state) {
            for (const double x : *initial_state) {
                require(x >= 0.0 && x <= 1.0, "initial_state", "logistic states must lie in [0, 1]");
            }
        }
    } else {
        const auto& lg = std::get<LinearGaussianModel>(model);
        require(std::isfinite(lg.self), "self", "must be finite");
        require(lg.weights.size() == m, "coupling", "expected a " + std::to_string(m) + "x" + std::to_string(m) +
                                                        " weight matrix");
        for (std::size_t i = 0; i < m; ++i) {
            require(lg.weights[i].size() == m, "coupling", "row " + std::to_string(i) + " has the wrong length");
            for (std::size_t j = 0; j < m; ++j) {
                require(std::isfinite(lg.weights[i][j]), "coupling", "weights must be finite");
                require(lg.weights[i][j] == 0.0 || graph.has_edge(j, i), "coupling",
                        "non-zero weight " + names[j] + " -> " + names[i] + " without a graph edge");
            }
        }
        require(spectral_radius(lg, m) < 1.0, "coupling", "nonstationary system (spectral radius >= 1)");
    }
}

SimOutput simulate_coupled_logistic(const GdsConfig& config) {
    const GdsConfig cfg = with_defaults(config);
    if (!std::holds_alternative<CoupledLogistic>(cfg.model)) {
        throw ValidationError("invalid config field 'model': expected coupled-logistic");
    }
    cfg.validate();
    const auto model = std::get<CoupledLogistic>(cfg.model);
    const std::size_t m = cfg.graph.size();
    std::mt19937_64 rng(cfg.seed);
    std::vector<double> x0(m);
    if (cfg.initial_state) {
        x0 = *cfg.initial_state;
    } else {
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (auto& x : x0) {
            x = u(rng);
        }
    }
    auto step = [&](std::size_t i, const std::vector<double>& x, double noise) {
        const auto& ps = cfg.graph.parents(i);
        double value = 0.0;
        if (ps.empty()) {
            value = logistic(model.r, x[i]);
        } else {
            double coupled = 0.0;
            for (const auto j : ps) {
                coupled += logistic(model.r, x[j]);
            }
            value = (1.0 - model.epsilon) * logistic(model.r, x[i]) +
                    (model.epsilon / static_cast<double>(ps.size())) * coupled;
        }
        value += noise;
        return std::isfinite(value) ? reflect_unit(value) : value;
    };
    return finish(cfg, run(cfg, std::move(x0), rng, step));
}

SimOutput simulate_linear_gaussian(const GdsConfig& config) {
    const GdsConfig cfg = with_defaults(config);
    if (!std::holds_alternative<LinearGaussianModel>(cfg.model)) {
        throw ValidationError("invalid config field 'model': expected linear-gaussian");
    }
    cfg.validate();
    const auto& model = std::get<LinearGaussianModel>(cfg.model);
    const std::size_t m = cfg.graph.size();
    std::mt19937_64 rng(cfg.seed);
    std::vector<double> x0 = cfg.initial_state.value_or(std::vector<double>(m, 0.0));
    auto step = [&](std::size_t i, const std::vector<double>& x, double noise) {
        double value = model.self * x[i];
        for (const auto j : cfg.graph.parents(i)) {
            value += model.weights[i][j] * x[j];
        }
        return value + noise;
    };
    return finish(cfg, run(cfg, std::move(x0), rng, step));
}

SimOutput simulate(const GdsConfig& cfg) {
    return std::holds_alternative<CoupledLogistic>(cfg.model) ? simulate_coupled_logistic(cfg)
                                                              : simulate_linear_gaussian(cfg);
}

}  // namespace netinfer
