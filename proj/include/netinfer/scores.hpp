#pragma once

#include "netinfer/dag.hpp"
#include "netinfer/estimators.hpp"
#include "netinfer/stats.hpp"
#include "netinfer/timeseries.hpp"

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

namespace netinfer {

/// Graph scoring functions. AIC, BIC and ML are the information-criterion family.
enum class ScoreKind { TE, TEA, TEE, AIC, BIC, ML };

std::string to_string(ScoreKind kind);
ScoreKind parse_score_kind(const std::string& text);
bool is_information_criterion(ScoreKind kind);

struct ScoreOptions {
    ScoreKind kind = ScoreKind::TEE;
    EstimatorKind estimator = EstimatorKind::discrete_plugin();
    double alpha = 0.95;
    /// TEE only; its alpha field is ignored in favour of `alpha` above.
    SurrogateConfig surrogates;

    /// Throws ValidationError for combinations that have no defined score.
    void validate(const EmbeddedView& view) const;
};

struct VertexScore {
    std::size_t vertex = 0;
    std::vector<std::size_t> parents;
    double te = 0.0;       // bits
    double penalty = 0.0;  // in the units of `local`
    double local = 0.0;
};

struct ScoreReport {
    ScoreKind kind = ScoreKind::TE;
    std::string estimator;
    double alpha = 0.0;
    std::uint64_t seed = 0;
    std::size_t surrogates = 0;
    std::string surrogate_method;
    std::size_t n_effective = 0;
    double total = 0.0;
    std::vector<VertexScore> per_vertex;
    std::vector<std::string> notes;
};

/// Thread-safe memo of local scores keyed by everything that affects them.
class LocalScoreCache {
public:
    struct Key {
        std::uint64_t data_fingerprint = 0;
        std::size_t vertex = 0;
        std::vector<std::size_t> parents;  // sorted
        ScoreKind kind = ScoreKind::TE;
        std::string estimator;
        double alpha = 0.0;
        std::uint64_t seed = 0;
        std::size_t surrogates = 0;
        int method = 0;

        auto tie() const {
            return std::tie(data_fingerprint, vertex, parents, kind, estimator, alpha, seed, surrogates, method);
        }
        friend bool operator<(const Key& a, const Key& b) { return a.tie() < b.tie(); }
        friend bool operator==(const Key& a, const Key& b) { return a.tie() == b.tie(); }
    };

    std::optional<VertexScore> find(const Key& key) const;
    void insert(const Key& key, const VertexScore& value);
    std::size_t size() const;

private:
    mutable std::mutex mutex_;
    std::map<Key, VertexScore> entries_;
};

/// Decomposable scoring of one dataset: per-vertex local scores with memoization.
class LocalScorer {
public:
    LocalScorer(const EmbeddedView& view, ScoreOptions options,
                std::shared_ptr<LocalScoreCache> cache = std::make_shared<LocalScoreCache>());

    const EmbeddedView& view() const { return view_; }
    const ScoreOptions& options() const { return options_; }
    std::size_t vertex_count() const { return view_.total_subsystems(); }

    LocalScoreCache::Key key(std::size_t vertex, std::vector<std::size_t> parents) const;

    /// Cached per-vertex term; parent order does not matter.
    VertexScore score(std::size_t vertex, std::vector<std::size_t> parents);
    double local(std::size_t vertex, const std::vector<std::size_t>& parents) { return score(vertex, parents).local; }

    /// Uncached evaluation, exposed for cache-consistency checks.
    VertexScore compute(std::size_t vertex, std::vector<std::size_t> parents) const;

    ScoreReport report(const Dag& graph);

    /// Number of local scores actually computed (cache misses).
    std::size_t computations() const { return computations_.load(); }

private:
    const EmbeddedView& view_;
    ScoreOptions options_;
    std::shared_ptr<LocalScoreCache> cache_;
    std::uint64_t fingerprint_ = 0;
    std::atomic<std::size_t> computations_{0};
};

/// Content hash of an embedded view (rows, embedding and every value).
std::uint64_t fingerprint(const EmbeddedView& view);

/// Parent ordering that maximises the summed chi-squared penalty: decreasing
/// embedded alphabet size r^kappa, ties by index.
std::vector<std::size_t> max_penalty_order(std::span<const std::size_t> parents, const EmbeddedView& view);

/// Sum of chi-squared quantiles for the per-parent test decomposition in the given order.
double tea_penalty(std::size_t vertex, std::span<const std::size_t> ordered_parents, const EmbeddedView& view,
                   const EstimatorKind& kind, double alpha);

/// Model dimension of one vertex: (r_i - 1) r_i^k_i prod_j r_j^k_j.
double ic_model_dimension(std::size_t vertex, std::span<const std::size_t> parents, const EmbeddedView& view);

/// f(N) of the information criterion: AIC 1, BIC log2(N)/2, ML 0.
double ic_weight(ScoreKind kind, std::size_t n);

/// Memoized dispatch to one vertex's term of the selected score.
double local_score(std::size_t vertex, const std::vector<std::size_t>& parents, const EmbeddedView& view,
                   const ScoreOptions& options, LocalScoreCache& cache);

ScoreReport score_graph(const Dag& graph, const EmbeddedView& view, const ScoreOptions& options);
ScoreReport score_te(const Dag& graph, const EmbeddedView& view, const EstimatorKind& kind);
ScoreReport score_tea(const Dag& graph, const EmbeddedView& view, double alpha,
                      const EstimatorKind& kind = EstimatorKind::discrete_plugin());
ScoreReport score_tee(const Dag& graph, const EmbeddedView& view, const EstimatorKind& kind,
                      const SurrogateConfig& cfg);
ScoreReport score_ic(const Dag& graph, const EmbeddedView& view, ScoreKind variant);

}  // namespace netinfer
