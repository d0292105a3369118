#include "netinfer/stats.hpp"

#include "netinfer/error.hpp"
#include "netinfer/parallel.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace netinfer {

namespace {

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
    if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) {
        throw NumericError("df overflow");
    }
    return a * b;
}

std::uint64_t checked_pow(std::uint64_t base, std::size_t exp) {
    std::uint64_t out = 1;
    for (std::size_t k = 0; k < exp; ++k) {
        out = checked_mul(out, base);
    }
    return out;
}

// Unbiased draw from [0, bound) by rejection on the top of the 64-bit range.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    while (true) {
        const std::uint64_t x = rng();
        if (x < limit) {
            return x % bound;
        }
    }
}

}  // namespace

void Chi2Params::validate() const {
    if (df < 1) {
        throw ValidationError("chi-squared degrees of freedom must be >= 1");
    }
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw ValidationError("confidence level alpha must lie in (0, 1)");
    }
}

double chi2_quantile(const Chi2Params& p) {
    p.validate();
    const boost::math::chi_squared_distribution<double> dist(static_cast<double>(p.df));
    return boost::math::quantile(dist, p.alpha);
}

double chi2_quantile(std::uint64_t df, double alpha) { return chi2_quantile(Chi2Params{df, alpha}); }

double chi2_cdf(std::uint64_t df, double x) {
    if (df < 1) {
        throw ValidationError("chi-squared degrees of freedom must be >= 1");
    }
    if (x <= 0.0) {
        return 0.0;
    }
    const boost::math::chi_squared_distribution<double> dist(static_cast<double>(df));
    return boost::math::cdf(dist, x);
}

DegreesOfFreedom te_degrees_of_freedom(std::size_t dest, std::span<const std::size_t> sources,
                                       const EmbeddingSpec& spec, std::span<const int> alphabet) {
    const std::size_t m = alphabet.size();
    if (spec.subsystem_count() != m || dest >= m) {
        throw ValidationError("degrees of freedom: subsystem index or spec size mismatch");
    }
    for (const auto s : sources) {
        if (s == dest) {
            throw ValidationError("degrees of freedom: destination listed among its sources");
        }
        if (s >= m) {
            throw ValidationError("degrees of freedom: source index out of range");
        }
    }
    for (const int r : alphabet) {
        if (r < 2) {
            throw ValidationError("degrees of freedom: alphabet sizes must be >= 2");
        }
    }
    DegreesOfFreedom out;
    if (sources.empty()) {
        return out;
    }
    const auto r_dest = static_cast<std::uint64_t>(alphabet[dest]);
    const std::uint64_t base = checked_mul(r_dest - 1, checked_pow(r_dest, spec.kappa.at(dest)));
    std::uint64_t preceding = 1;
    for (const auto s : sources) {
        const std::uint64_t states = checked_pow(static_cast<std::uint64_t>(alphabet[s]), spec.kappa.at(s));
        const std::uint64_t l = checked_mul(checked_mul(base, states - 1), preceding);
        out.per_source.push_back(l);
        if (out.total > std::numeric_limits<std::uint64_t>::max() - l) {
            throw NumericError("df overflow");
        }
        out.total += l;
        preceding = checked_mul(preceding, states);
    }
    return out;
}

void SurrogateConfig::validate() const {
    if (count < 1) {
        throw ValidationError("surrogate count must be >= 1");
    }
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw ValidationError("surrogate confidence level alpha must lie in (0, 1)");
    }
}

std::size_t SurrogateConfig::recommended_minimum() const {
    return static_cast<std::size_t>(std::ceil(alpha / (1.0 - alpha) - 1e-9));
}

std::string to_string(SurrogateMethod m) { return m == SurrogateMethod::Permutation ? "permutation" : "bootstrap"; }

SurrogateMethod parse_surrogate_method(const std::string& text) {
    if (text == "permutation") {
        return SurrogateMethod::Permutation;
    }
    if (text == "bootstrap") {
        return SurrogateMethod::Bootstrap;
    }
    throw ValidationError("unknown surrogate method '" + text + "'");
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::vector<std::size_t> surrogate_row_order(std::size_t n, SurrogateMethod method, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<std::size_t> order(n);
    if (method == SurrogateMethod::Bootstrap) {
        for (auto& x : order) {
            x = static_cast<std::size_t>(bounded(rng, n));
        }
        return order;
    }
    for (std::size_t i = 0; i < n; ++i) {
        order[i] = i;
    }
    for (std::size_t i = n; i > 1; --i) {
        const auto j = static_cast<std::size_t>(bounded(rng, i));
        std::swap(order[i - 1], order[j]);
    }
    return order;
}

std::vector<double> surrogate_te_samples(std::size_t dest, std::span<const std::size_t> sources,
                                         const EmbeddedView& view, const EstimatorKind& kind,
                                         const SurrogateConfig& cfg) {
    cfg.validate();
    if (sources.empty()) {
        throw ValidationError("surrogate samples need a non-empty source set");
    }
    const double self = self_conditional_entropy(dest, view, kind);
    std::vector<double> samples(cfg.count);
    parallel_for(cfg.count, [&](std::size_t k) {
        const auto order = surrogate_row_order(view.rows(), cfg.method, derive_seed(cfg.seed, k));
        samples[k] = self - source_conditional_entropy(dest, sources, view, kind, order);
    });
    return samples;
}

double empirical_quantile(std::span<const double> samples, double alpha) {
    if (samples.empty()) {
        throw ValidationError("empirical quantile of an empty sample");
    }
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw ValidationError("empirical quantile: alpha must lie in (0, 1)");
    }
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    // Ceiling rank; the epsilon guards alpha * n landing a hair above an integer.
    auto rank = static_cast<std::size_t>(std::ceil(alpha * n - 1e-9));
    rank = std::clamp<std::size_t>(rank, 1, sorted.size());
    return sorted[rank - 1];
}

}  // namespace netinfer
