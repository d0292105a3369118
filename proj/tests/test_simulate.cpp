#include "helpers.hpp"
#include "oracles.hpp"

#include "netinfer/error.hpp"
#include "netinfer/estimators.hpp"
#include "netinfer/simulate.hpp"

#include <doctest.h>

using namespace netinfer;

namespace {

GdsConfig logistic_config(std::size_t m, const std::vector<Edge>& edges) {
    GdsConfig cfg;
    cfg.graph = Dag::from_edges(m, edges);
    cfg.names = default_names(m);
    cfg.model = CoupledLogistic{4.0, 0.4};
    return cfg;
}

double lag1_autocorrelation(std::span<const double> x) {
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / x.size();
    double num = 0.0;
    double den = 0.0;
    for (std::size_t t = 0; t < x.size(); ++t) {
        den += (x[t] - mean) * (x[t] - mean);
        if (t + 1 < x.size()) {
            num += (x[t] - mean) * (x[t + 1] - mean);
        }
    }
    return num / den;
}

}  // namespace

TEST_SUITE("simulate") {

TEST_CASE("noise-free logistic orbit") {
    auto cfg = logistic_config(1, {});
    cfg.n = 3;
    cfg.burn_in = 0;
    cfg.initial_state = std::vector<double>{0.5};
    const auto out = simulate_coupled_logistic(cfg);
    CHECK(out.states[0][0] == 1.0);
    CHECK(out.states[0][1] == 0.0);
    CHECK(out.states[0][2] == 0.0);
}

TEST_CASE("uncoupled noise-free trajectories follow the scalar map") {
    auto cfg = logistic_config(3, {});
    cfg.model = CoupledLogistic{3.7, 0.3};
    cfg.n = 500;
    cfg.burn_in = 25;
    cfg.initial_state = std::vector<double>{0.1, 0.35, 0.77};
    const auto out = simulate(cfg);
    for (std::size_t i = 0; i < 3; ++i) {
        const auto orbit = oracle::logistic_orbit(3.7, (*cfg.initial_state)[i], 525);
        const std::vector<double> tail(orbit.begin() + 25, orbit.end());
        CHECK(out.states[i] == tail);
        const auto obs = out.observations.series(i);
        CHECK(std::vector<double>(obs.begin(), obs.end()) == tail);
    }
}

TEST_CASE("coupled update matches the mixture formula") {
    auto cfg = logistic_config(3, {{0, 2}, {1, 2}});
    cfg.n = 2;
    cfg.burn_in = 0;
    cfg.initial_state = std::vector<double>{0.2, 0.3, 0.6};
    const auto out = simulate(cfg);
    const auto g = [](double z) { return 4.0 * z * (1.0 - z); };
    CHECK(out.states[2][0] == doctest::Approx(0.6 * g(0.6) + 0.2 * (g(0.2) + g(0.3))).epsilon(1e-15));
    CHECK(out.states[0][0] == doctest::Approx(g(0.2)));
}

TEST_CASE("configuration validation names the field") {
    auto cfg = logistic_config(2, {{0, 1}});
    cfg.model = CoupledLogistic{4.0, 1.0};
    CHECK_THROWS_WITH_AS(simulate(cfg), doctest::Contains("epsilon"), ValidationError);
    cfg.model = CoupledLogistic{4.0, 0.4};
    cfg.n = 1;
    CHECK_THROWS_WITH_AS(simulate(cfg), doctest::Contains("'n'"), ValidationError);
    cfg.n = 10;
    cfg.obs_noise_std = -1.0;
    CHECK_THROWS_WITH_AS(simulate(cfg), doctest::Contains("obs_noise_std"), ValidationError);
    cfg.obs_noise_std = 0.0;
    cfg.initial_state = std::vector<double>{0.5};
    CHECK_THROWS_WITH_AS(simulate(cfg), doctest::Contains("initial_state"), ValidationError);
    cfg.initial_state.reset();
    cfg.graph = Dag::from_edges(2, {{0, 1}, {1, 0}});
    CHECK_THROWS_AS(simulate(cfg), ValidationError);
}

TEST_CASE("logistic states stay in the unit interval under noise") {
    auto cfg = logistic_config(3, {{0, 1}, {1, 2}});
    cfg.process_noise_std = 0.05;
    cfg.n = 5000;
    cfg.seed = 4;
    const auto out = simulate(cfg);
    CHECK(out.observations.sample_count() == 5000);
    CHECK(out.truth == cfg.graph);
    for (const auto& s : out.states) {
        for (const double x : s) {
            REQUIRE(x >= 0.0);
            REQUIRE(x <= 1.0);
        }
    }
}

TEST_CASE("simulation is bit-reproducible") {
    auto cfg = logistic_config(3, {{0, 1}, {1, 2}});
    cfg.process_noise_std = 1e-3;
    cfg.obs_noise_std = 1e-3;
    cfg.n = 2000;
    cfg.seed = 12;
    const auto a = simulate(cfg);
    const auto b = simulate(cfg);
    CHECK(a.observations.all_series() == b.observations.all_series());
    CHECK(a.states == b.states);
    cfg.seed = 13;
    CHECK(simulate(cfg).observations.all_series() != a.observations.all_series());
}

TEST_CASE("white noise from the linear-Gaussian model") {
    GdsConfig cfg;
    cfg.graph = Dag(2);
    cfg.names = default_names(2);
    cfg.model = LinearGaussianModel{};
    cfg.process_noise_std = 1.0;
    cfg.n = 10000;
    cfg.seed = 3;
    const auto out = simulate_linear_gaussian(cfg);
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(std::abs(lag1_autocorrelation(out.observations.series(i))) < 0.05);
    }
}

TEST_CASE("linear-Gaussian validation") {
    GdsConfig cfg;
    cfg.graph = Dag::from_edges(2, {{0, 1}});
    cfg.names = default_names(2);
    LinearGaussianModel lg;
    lg.self = 1.0;
    lg.weights = {{0, 0}, {0.5, 0}};
    cfg.model = lg;
    CHECK_THROWS_WITH_AS(simulate(cfg), doctest::Contains("nonstationary system"), ValidationError);
    lg.self = 0.5;
    lg.weights = {{0, 0.3}, {0.5, 0}};
    cfg.model = lg;
    CHECK_THROWS_WITH_AS(simulate(cfg), doctest::Contains("coupling"), ValidationError);
    CHECK(spectral_radius(LinearGaussianModel{0.9, {{0, 0}, {0.5, 0}}}, 2) == doctest::Approx(0.9));
    cfg.model = CoupledLogistic{};
    CHECK_THROWS_AS(simulate_linear_gaussian(cfg), ValidationError);
}

TEST_CASE("linear-Gaussian TE matches the Lyapunov covariance") {
    // x1' = 0.9 x1 + e1, x2' = 0.9 x2 + 0.5 x1 + e2, unit innovations.
    GdsConfig cfg;
    cfg.graph = Dag::from_edges(2, {{0, 1}});
    cfg.names = default_names(2);
    cfg.model = LinearGaussianModel{0.9, {{0, 0}, {0.5, 0}}};
    cfg.process_noise_std = 1.0;
    cfg.n = 50000;
    cfg.seed = 5;
    const auto out = simulate(cfg);
    const auto view = delay_embed(out.observations, EmbeddingSpec::uniform(2, 1, 1));
    const std::size_t one[] = {0};
    const double te = collective_transfer_entropy(1, one, view, EstimatorKind::linear_gaussian());

    const oracle::Mat2 a{{{0.9, 0.0}, {0.5, 0.9}}};
    const oracle::Mat2 q{{{1.0, 0.0}, {0.0, 1.0}}};
    const auto s = oracle::lyapunov(a, q);
    // Var(x2' | x2) = 0.25 Var(x1 | x2) + 1, Var(x2' | x1, x2) = 1.
    const double var_x1_given_x2 = s[0][0] - s[0][1] * s[0][1] / s[1][1];
    const double analytic = 0.5 * std::log2(0.25 * var_x1_given_x2 + 1.0);
    CHECK(std::abs(te - analytic) < 0.02);
}

TEST_CASE("coupling direction is visible in transfer entropy") {
    int forward = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto sim = testutil::logistic_network(2, {{0, 1}}, seed, 2000, 0.2);
        const auto view = delay_embed(discretize(sim.observations, 4), EmbeddingSpec::uniform(2, 1, 1));
        const std::size_t from0[] = {0};
        const std::size_t from1[] = {1};
        forward += collective_transfer_entropy(1, from0, view, EstimatorKind::discrete_plugin()) >
                   collective_transfer_entropy(0, from1, view, EstimatorKind::discrete_plugin());
    }
    CHECK(forward >= 90);
}

}  // TEST_SUITE
