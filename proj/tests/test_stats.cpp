#include "helpers.hpp"
#include "oracles.hpp"

#include "netinfer/error.hpp"
#include "netinfer/stats.hpp"

#include <doctest.h>

#include <cstdlib>
#include <numeric>
#include <set>

using namespace netinfer;

TEST_SUITE("stats") {

TEST_CASE("chi-squared quantile examples") {
    CHECK(std::abs(chi2_quantile(1, 0.95) - 3.84146) < 1e-4);
    CHECK(std::abs(chi2_quantile(2, 0.95) - (-2.0 * std::log(1.0 - 0.95))) < 1e-4);
    CHECK(std::abs(chi2_quantile(1, 0.95) - oracle::chi2_quantile(1, 0.95)) < 1e-4);
    CHECK_THROWS_AS(chi2_quantile(0, 0.95), ValidationError);
    CHECK_THROWS_AS(chi2_quantile(1, 1.0), ValidationError);
    CHECK_THROWS_AS(chi2_quantile(Chi2Params{3, 0.0}), ValidationError);
}

TEST_CASE("chi-squared quantile inverts the CDF") {
    for (std::uint64_t df : {1, 2, 3, 7, 20, 100, 5000}) {
        for (double alpha : {0.01, 0.5, 0.9, 0.95, 0.99, 0.999}) {
            CHECK(std::abs(chi2_cdf(df, chi2_quantile(df, alpha)) - alpha) < 1e-8);
        }
    }
    CHECK(chi2_cdf(4, 0.0) == 0.0);
    CHECK(chi2_cdf(4, -1.0) == 0.0);
    CHECK(std::abs(chi2_cdf(2, 3.0) - oracle::chi2_cdf(2, 3.0)) < 1e-8);
}

TEST_CASE("degrees of freedom") {
    const auto spec = EmbeddingSpec::uniform(3, 1, 1);
    const int binary[] = {2, 2, 2};
    const std::size_t one[] = {1};
    const auto a = te_degrees_of_freedom(0, one, spec, binary);
    CHECK(a.total == 2);
    CHECK(a.per_source == std::vector<std::uint64_t>{2});

    const std::size_t two[] = {1, 2};
    const auto b = te_degrees_of_freedom(0, two, spec, binary);
    CHECK(b.per_source == std::vector<std::uint64_t>{2, 4});
    CHECK(b.total == 6);

    CHECK(te_degrees_of_freedom(0, {}, spec, binary).total == 0);

    // Telescoping identity over mixed alphabets and embedding dimensions.
    EmbeddingSpec mixed;
    mixed.tau = {1, 1, 1, 1};
    mixed.kappa = {2, 1, 3, 2};
    const int r[] = {3, 2, 4, 5};
    const std::size_t srcs[] = {2, 1, 3};
    const auto c = te_degrees_of_freedom(0, srcs, mixed, r);
    std::uint64_t prod = 1;
    for (const auto s : srcs) {
        std::uint64_t states = 1;
        for (std::size_t k = 0; k < mixed.kappa[s]; ++k) {
            states *= static_cast<std::uint64_t>(r[s]);
        }
        prod *= states;
    }
    CHECK(c.total == static_cast<std::uint64_t>(r[0] - 1) * (prod - 1) * 9);
    CHECK(std::accumulate(c.per_source.begin(), c.per_source.end(), std::uint64_t{0}) == c.total);

    const std::size_t self[] = {0};
    CHECK_THROWS_AS(te_degrees_of_freedom(0, self, spec, binary), ValidationError);
    const auto huge = EmbeddingSpec::uniform(3, 1, 40);
    CHECK_THROWS_WITH_AS(te_degrees_of_freedom(0, two, huge, binary), "df overflow", NumericError);
}

TEST_CASE("empirical quantile") {
    const double four[] = {4, 2, 1, 3};
    CHECK(empirical_quantile(four, 0.5) == 2);
    const double one[] = {5};
    CHECK(empirical_quantile(one, 0.01) == 5);
    CHECK(empirical_quantile(one, 0.99) == 5);
    CHECK_THROWS_AS(empirical_quantile(std::span<const double>{}, 0.5), ValidationError);
    CHECK_THROWS_AS(empirical_quantile(four, 1.0), ValidationError);

    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> xs(10000);
    for (auto& x : xs) {
        x = u(rng);
    }
    CHECK(std::abs(empirical_quantile(xs, 0.9) - 0.9) < 0.02);
    double prev = -1.0;
    for (double a = 0.05; a < 1.0; a += 0.05) {
        const double q = empirical_quantile(xs, a);
        CHECK(q >= prev);
        prev = q;
    }
}

TEST_CASE("surrogate configuration") {
    SurrogateConfig cfg;
    CHECK(cfg.count == 99);
    CHECK(cfg.recommended_minimum() == 19);
    cfg.count = 0;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    CHECK(parse_surrogate_method("bootstrap") == SurrogateMethod::Bootstrap);
    CHECK_THROWS_AS(parse_surrogate_method("block"), ValidationError);
    CHECK(derive_seed(1, 0) != derive_seed(1, 1));
    CHECK(derive_seed(1, 0) != derive_seed(2, 0));
}

TEST_CASE("surrogate row orders") {
    const auto p = surrogate_row_order(1000, SurrogateMethod::Permutation, 5);
    auto sorted = p;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        REQUIRE(sorted[i] == i);
    }
    CHECK(p == surrogate_row_order(1000, SurrogateMethod::Permutation, 5));
    CHECK(p != surrogate_row_order(1000, SurrogateMethod::Permutation, 6));

    const auto b = surrogate_row_order(1000, SurrogateMethod::Bootstrap, 5);
    CHECK(b.size() == 1000);
    CHECK(*std::max_element(b.begin(), b.end()) < 1000);
    CHECK(std::set<std::size_t>(b.begin(), b.end()).size() < 1000);
}

TEST_CASE("permutation surrogates preserve source marginals") {
    const auto sym = oracle::random_symbols(2, 500, 3, 4);
    const auto order = surrogate_row_order(499, SurrogateMethod::Permutation, 9);
    std::vector<int> before(3, 0);
    std::vector<int> after(3, 0);
    for (std::size_t t = 0; t < 499; ++t) {
        ++before[static_cast<std::size_t>(sym[1][t])];
        ++after[static_cast<std::size_t>(sym[1][order[t]])];
    }
    CHECK(before == after);
}

TEST_CASE("surrogate samples") {
    const auto sym = oracle::random_symbols(2, 2000, 2, 31);
    const auto view = delay_embed(testutil::make_discrete(sym, 2), EmbeddingSpec::uniform(2, 1, 1));
    const std::size_t one[] = {1};
    SurrogateConfig cfg;
    cfg.count = 1;
    CHECK(surrogate_te_samples(0, one, view, EstimatorKind::discrete_plugin(), cfg).size() == 1);
    CHECK_THROWS_AS(surrogate_te_samples(0, {}, view, EstimatorKind::discrete_plugin(), cfg), ValidationError);

    // Under the null the measured value is one more draw from the surrogate law.
    cfg.count = 500;
    cfg.seed = 3;
    const auto s = surrogate_te_samples(0, one, view, EstimatorKind::discrete_plugin(), cfg);
    const double mean = std::accumulate(s.begin(), s.end(), 0.0) / s.size();
    double var = 0.0;
    for (const double x : s) {
        var += (x - mean) * (x - mean);
    }
    const double sd = std::sqrt(var / (s.size() - 1));
    const double measured = collective_transfer_entropy(0, one, view, EstimatorKind::discrete_plugin());
    CHECK(std::abs(measured - mean) < 2.0 * sd);

    // Worker count does not change the result.
    setenv("NETINFER_THREADS", "3", 1);
    const auto threaded = surrogate_te_samples(0, one, view, EstimatorKind::discrete_plugin(), cfg);
    unsetenv("NETINFER_THREADS");
    CHECK(threaded == s);
}

TEST_CASE("coupled streams exceed the surrogate quantile") {
    int wins = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto sim = testutil::logistic_network(2, {{0, 1}}, seed, 2000);
        const auto view = delay_embed(discretize(sim.observations, 4), EmbeddingSpec::uniform(2, 1, 1));
        const std::size_t one[] = {0};
        SurrogateConfig cfg;
        cfg.count = 19;
        cfg.seed = seed;
        const auto s = surrogate_te_samples(1, one, view, EstimatorKind::discrete_plugin(), cfg);
        wins += collective_transfer_entropy(1, one, view, EstimatorKind::discrete_plugin()) > empirical_quantile(s, 0.95);
    }
    CHECK(wins >= 95);
}

}  // TEST_SUITE
