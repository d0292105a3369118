#pragma once

#include "netinfer/estimators.hpp"
#include "netinfer/timeseries.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace netinfer {

struct Chi2Params {
    std::uint64_t df = 1;
    double alpha = 0.95;

    void validate() const;
};

/// x with P(chi2(df) <= x) = alpha.
double chi2_quantile(const Chi2Params& p);
double chi2_quantile(std::uint64_t df, double alpha);

/// P(chi2(df) <= x), the regularized lower incomplete gamma P(df/2, x/2).
double chi2_cdf(std::uint64_t df, double x);

/// Degrees of freedom of the conditional independence test between a
/// destination's next value and a set of sources given the destination's own
/// embedded past, split into one term per source in the given order.
struct DegreesOfFreedom {
    std::uint64_t total = 0;
    std::vector<std::uint64_t> per_source;
};

/// total = (r_d - 1)(prod_j r_j^k_j - 1) r_d^k_d; source j contributes
/// (r_d - 1)(r_j^k_j - 1) r_d^k_d prod_{k<j} r_k^k_k. Throws NumericError("df overflow").
DegreesOfFreedom te_degrees_of_freedom(std::size_t dest, std::span<const std::size_t> sources,
                                       const EmbeddingSpec& spec, std::span<const int> alphabet);

enum class SurrogateMethod { Permutation, Bootstrap };

struct SurrogateConfig {
    std::size_t count = 99;
    double alpha = 0.95;
    SurrogateMethod method = SurrogateMethod::Permutation;
    std::uint64_t seed = 0;

    void validate() const;
    /// ceil(alpha / (1 - alpha)); fewer surrogates make the quantile the sample maximum.
    std::size_t recommended_minimum() const;
};

std::string to_string(SurrogateMethod m);
SurrogateMethod parse_surrogate_method(const std::string& text);

/// Mixes (seed, index) into an independent 64-bit seed (splitmix64 finaliser).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

/// Uniform random permutation of [0, n), or n draws with replacement for bootstrap.
std::vector<std::size_t> surrogate_row_order(std::size_t n, SurrogateMethod method, std::uint64_t seed);

/// Transfer entropy recomputed cfg.count times with the joint source-history
/// rows permuted (or resampled) across time; sample k uses derive_seed(cfg.seed, k).
std::vector<double> surrogate_te_samples(std::size_t dest, std::span<const std::size_t> sources,
                                         const EmbeddedView& view, const EstimatorKind& kind,
                                         const SurrogateConfig& cfg);

/// Smallest sample v with #{samples <= v} / N >= alpha.
double empirical_quantile(std::span<const double> samples, double alpha);

}  // namespace netinfer
