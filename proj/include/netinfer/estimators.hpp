#pragma once

#include "netinfer/dag.hpp"
#include "netinfer/timeseries.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace netinfer {

/// Density model used to turn embedded observations into entropies.
struct EstimatorKind {
    enum class Type { DiscretePlugin, LinearGaussian, BoxKernel };

    Type type = Type::DiscretePlugin;
    double width = 0.0;  // box-kernel only

    static EstimatorKind discrete_plugin() { return {Type::DiscretePlugin, 0.0}; }
    static EstimatorKind linear_gaussian() { return {Type::LinearGaussian, 0.0}; }
    static EstimatorKind box_kernel(double width);

    /// "discrete-plugin", "linear-gaussian" or "box-kernel(<width>)".
    std::string name() const;
    /// Throws ValidationError when the estimator cannot run on `view`.
    void check_compatible(const EmbeddedView& view) const;

    friend bool operator==(const EstimatorKind&, const EstimatorKind&) = default;
};

/// Parses the names produced by EstimatorKind::name() plus the short forms
/// "discrete", "gaussian" and "box-kernel" (the latter with `width`).
EstimatorKind parse_estimator(const std::string& text, double width = 0.0);

/// One variable of an embedded view: the present sample y^i_{n+1} or the
/// kappa-dimensional history vector of subsystem i.
struct Variable {
    enum class Role { Present, History };

    Role role = Role::Present;
    std::size_t subsystem = 0;

    static Variable present(std::size_t i) { return {Role::Present, i}; }
    static Variable history(std::size_t i) { return {Role::History, i}; }
};

struct EntropyResult {
    double value = 0.0;  // bits
    std::size_t n_effective = 0;
    EstimatorKind kind;
};

/// H(target | conditioners) in bits over the aligned rows of `view`.
///
/// discrete-plugin: -sum p(z,w) log2 p(z|w) from raw relative frequencies.
/// linear-gaussian: 1/2 log2((2 pi e)^d det S) with S the Schur complement of
///   the unbiased sample covariance.
/// box-kernel: mean of -log2 p(z|w), densities from max-norm neighbour counts
///   within `width` (self included, i.e. a +1 count for isolated rows).
EntropyResult conditional_entropy(std::span<const Variable> target, std::span<const Variable> conditioners,
                                  const EmbeddedView& view, const EstimatorKind& kind);

/// Collective transfer entropy from `sources` to `dest`, in bits. Empty sources give exactly 0.
double collective_transfer_entropy(std::size_t dest, std::span<const std::size_t> sources, const EmbeddedView& view,
                                   const EstimatorKind& kind);

/// Same quantity with the joint source-history rows taken in `source_rows`
/// order (row t of the sources is read from row source_rows[t]); the
/// destination present sample and history are left in place.
double collective_transfer_entropy(std::size_t dest, std::span<const std::size_t> sources, const EmbeddedView& view,
                                   const EstimatorKind& kind, std::span<const std::size_t> source_rows);

/// H(dest_{n+1} | own history), the baseline term of every transfer entropy into `dest`.
double self_conditional_entropy(std::size_t dest, const EmbeddedView& view, const EstimatorKind& kind);

/// H(dest_{n+1} | own history, reordered source histories); see collective_transfer_entropy.
double source_conditional_entropy(std::size_t dest, std::span<const std::size_t> sources, const EmbeddedView& view,
                                  const EstimatorKind& kind, std::span<const std::size_t> source_rows = {});

/// Stochastic interaction of all subsystems: sum of self-conditioned entropies
/// minus the joint next-step entropy given every history.
double stochastic_interaction(const EmbeddedView& view, const EstimatorKind& kind);

/// KL divergence of the graph-factorised transition model from the data
/// distribution. The discrete estimator counts it row by row; the others use
/// the equivalent form S_Y minus the summed parent-set transfer entropy.
double kl_divergence(const Dag& graph, const EmbeddedView& view, const EstimatorKind& kind);

}  // namespace netinfer
