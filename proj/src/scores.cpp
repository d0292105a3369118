#include "netinfer/scores.hpp"

#include "netinfer/error.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

namespace netinfer {

namespace {

constexpr std::uint64_t kFnvOffset = 1469598103934665603ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

void mix(std::uint64_t& h, std::uint64_t x) {
    for (int b = 0; b < 8; ++b) {
        h ^= (x >> (8 * b)) & 0xFF;
        h *= kFnvPrime;
    }
}

std::uint64_t parent_set_seed(std::uint64_t seed, std::size_t vertex, std::span<const std::size_t> parents) {
    std::uint64_t s = derive_seed(seed, vertex);
    for (const auto p : parents) {
        s = derive_seed(s, p);
    }
    return s;
}

double embedded_states(std::size_t i, const EmbeddedView& view) {
    return std::pow(static_cast<double>(view.alphabet(i)), static_cast<double>(view.kappa(i)));
}

}  // namespace

std::string to_string(ScoreKind kind) {
    switch (kind) {
        case ScoreKind::TE:
            return "te";
        case ScoreKind::TEA:
            return "tea";
        case ScoreKind::TEE:
            return "tee";
        case ScoreKind::AIC:
            return "aic";
        case ScoreKind::BIC:
            return "bic";
        case ScoreKind::ML:
            return "ml";
    }
    return "unknown";
}

ScoreKind parse_score_kind(const std::string& text) {
    for (const auto k : {ScoreKind::TE, ScoreKind::TEA, ScoreKind::TEE, ScoreKind::AIC, ScoreKind::BIC, ScoreKind::ML}) {
        if (to_string(k) == text) {
            return k;
        }
    }
    throw ValidationError("unknown score '" + text + "' (expected te, tea, tee, aic, bic or ml)");
}

bool is_information_criterion(ScoreKind kind) {
    return kind == ScoreKind::AIC || kind == ScoreKind::BIC || kind == ScoreKind::ML;
}

void ScoreOptions::validate(const EmbeddedView& view) const {
    estimator.check_compatible(view);
    if (kind == ScoreKind::TEA || kind == ScoreKind::TEE) {
        if (!(alpha > 0.0 && alpha < 1.0)) {
            throw ValidationError("alpha must lie in (0, 1)");
        }
    }
    if (kind == ScoreKind::TEA && estimator.type == EstimatorKind::Type::BoxKernel) {
        throw ValidationError("tea needs an analytic null distribution; use discrete-plugin or linear-gaussian, "
                              "or tee for the box-kernel estimator");
    }
    if (is_information_criterion(kind) && estimator.type != EstimatorKind::Type::DiscretePlugin) {
        throw ValidationError(to_string(kind) + " needs a parametric model; use the discrete-plugin estimator");
    }
    if (kind == ScoreKind::TEE) {
        SurrogateConfig cfg = surrogates;
        cfg.alpha = alpha;
        cfg.validate();
    }
}

std::optional<VertexScore> LocalScoreCache::find(const Key& key) const {
    std::lock_guard lock(mutex_);
    const auto it = entries_.find(key);
    if (it == entries_.end()) {
        return std::nullopt;
    }
    return it->second;
}

void LocalScoreCache::insert(const Key& key, const VertexScore& value) {
    std::lock_guard lock(mutex_);
    entries_[key] = value;
}

std::size_t LocalScoreCache::size() const {
    std::lock_guard lock(mutex_);
    return entries_.size();
}

std::uint64_t fingerprint(const EmbeddedView& view) {
    std::uint64_t h = kFnvOffset;
    mix(h, view.rows());
    mix(h, view.offset());
    mix(h, view.total_subsystems());
    mix(h, view.is_discrete() ? 1 : 0);
    for (const auto i : view.subsystems()) {
        mix(h, i);
        mix(h, view.kappa(i));
        mix(h, view.tau(i));
        if (view.is_discrete()) {
            mix(h, static_cast<std::uint64_t>(view.alphabet(i)));
        }
        for (const double x : view.present(i)) {
            mix(h, std::bit_cast<std::uint64_t>(x));
        }
        for (std::size_t k = 0; k < view.kappa(i); ++k) {
            for (const double x : view.history(i, k)) {
                mix(h, std::bit_cast<std::uint64_t>(x));
            }
        }
    }
    return h;
}

std::vector<std::size_t> max_penalty_order(std::span<const std::size_t> parents, const EmbeddedView& view) {
    std::vector<std::size_t> order(parents.begin(), parents.end());
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double sa = embedded_states(a, view);
        const double sb = embedded_states(b, view);
        return sa != sb ? sa > sb : a < b;
    });
    return order;
}

double tea_penalty(std::size_t vertex, std::span<const std::size_t> ordered_parents, const EmbeddedView& view,
                   const EstimatorKind& kind, double alpha) {
    double penalty = 0.0;
    if (kind.type == EstimatorKind::Type::LinearGaussian) {
        // One regression coefficient per added lag of a scalar destination.
        for (const auto p : ordered_parents) {
            penalty += chi2_quantile(view.kappa(p), alpha);
        }
        return penalty;
    }
    const std::size_t m = view.total_subsystems();
    EmbeddingSpec spec = EmbeddingSpec::uniform(m, 1, 1);
    std::vector<int> alphabet(m, 2);
    for (const auto i : view.subsystems()) {
        spec.kappa[i] = view.kappa(i);
        spec.tau[i] = view.tau(i);
        alphabet[i] = view.alphabet(i);
    }
    const auto df = te_degrees_of_freedom(vertex, ordered_parents, spec, alphabet);
    for (const auto l : df.per_source) {
        penalty += chi2_quantile(l, alpha);
    }
    return penalty;
}

double ic_model_dimension(std::size_t vertex, std::span<const std::size_t> parents, const EmbeddedView& view) {
    double c = (view.alphabet(vertex) - 1) * embedded_states(vertex, view);
    for (const auto p : parents) {
        c *= embedded_states(p, view);
    }
    return c;
}

double ic_weight(ScoreKind kind, std::size_t n) {
    switch (kind) {
        case ScoreKind::AIC:
            return 1.0;
        case ScoreKind::BIC:
            return std::log2(static_cast<double>(n)) / 2.0;
        case ScoreKind::ML:
            return 0.0;
        default:
            throw ValidationError("ic_weight: " + to_string(kind) + " is not an information criterion");
    }
}

LocalScorer::LocalScorer(const EmbeddedView& view, ScoreOptions options, std::shared_ptr<LocalScoreCache> cache)
    : view_(view), options_(std::move(options)), cache_(std::move(cache)), fingerprint_(fingerprint(view)) {
    if (!view_.covers_all()) {
        throw ValidationError("scoring needs a view over every subsystem");
    }
    options_.surrogates.alpha = options_.alpha;
    options_.validate(view_);
    if (!cache_) {
        cache_ = std::make_shared<LocalScoreCache>();
    }
}

LocalScoreCache::Key LocalScorer::key(std::size_t vertex, std::vector<std::size_t> parents) const {
    std::sort(parents.begin(), parents.end());
    LocalScoreCache::Key k;
    k.data_fingerprint = fingerprint_;
    k.vertex = vertex;
    k.parents = std::move(parents);
    k.kind = options_.kind;
    k.estimator = options_.estimator.name();
    if (options_.kind == ScoreKind::TEA || options_.kind == ScoreKind::TEE) {
        k.alpha = options_.alpha;
    }
    if (options_.kind == ScoreKind::TEE) {
        k.seed = options_.surrogates.seed;
        k.surrogates = options_.surrogates.count;
        k.method = static_cast<int>(options_.surrogates.method);
    }
    return k;
}

VertexScore LocalScorer::compute(std::size_t vertex, std::vector<std::size_t> parents) const {
    std::sort(parents.begin(), parents.end());
    VertexScore out;
    out.vertex = vertex;
    out.parents = parents;
    const auto& kind = options_.estimator;
    const std::size_t n = view_.rows();

    if (is_information_criterion(options_.kind)) {
        // Graph-dependent part of the observable log-likelihood, in bits.
        const double self = self_conditional_entropy(vertex, view_, kind);
        const double cond = parents.empty() ? self : source_conditional_entropy(vertex, parents, view_, kind);
        out.te = parents.empty() ? 0.0 : self - cond;
        out.penalty = ic_weight(options_.kind, n) * ic_model_dimension(vertex, parents, view_);
        out.local = -static_cast<double>(n) * cond - out.penalty;
        return out;
    }

    out.te = collective_transfer_entropy(vertex, parents, view_, kind);
    if (parents.empty()) {
        return out;
    }
    switch (options_.kind) {
        case ScoreKind::TE:
            out.local = out.te;
            break;
        case ScoreKind::TEA: {
            const double statistic = 2.0 * static_cast<double>(n) * std::numbers::ln2 * out.te;
            out.penalty = tea_penalty(vertex, max_penalty_order(parents, view_), view_, kind, options_.alpha);
            out.local = statistic - out.penalty;
            break;
        }
        case ScoreKind::TEE: {
            SurrogateConfig cfg = options_.surrogates;
            cfg.alpha = options_.alpha;
            cfg.seed = parent_set_seed(cfg.seed, vertex, parents);
            const auto samples = surrogate_te_samples(vertex, parents, view_, kind, cfg);
            out.penalty = empirical_quantile(samples, options_.alpha);
            out.local = out.te - out.penalty;
            break;
        }
        default:
            break;
    }
    return out;
}

VertexScore LocalScorer::score(std::size_t vertex, std::vector<std::size_t> parents) {
    if (vertex >= vertex_count()) {
        throw ValidationError("vertex " + std::to_string(vertex) + " out of range");
    }
    auto k = key(vertex, std::move(parents));
    if (auto hit = cache_->find(k)) {
        return *hit;
    }
    ++computations_;
    auto value = compute(vertex, k.parents);
    cache_->insert(k, value);
    return value;
}

ScoreReport LocalScorer::report(const Dag& graph) {
    if (graph.size() != vertex_count()) {
        throw ValidationError("graph has " + std::to_string(graph.size()) + " vertices, data has " +
                              std::to_string(vertex_count()) + " subsystems");
    }
    if (!is_acyclic(graph)) {
        throw ValidationError("graph contains a directed cycle");
    }
    ScoreReport r;
    r.kind = options_.kind;
    r.estimator = options_.estimator.name();
    r.n_effective = view_.rows();
    if (options_.kind == ScoreKind::TEA || options_.kind == ScoreKind::TEE) {
        r.alpha = options_.alpha;
    }
    if (options_.kind == ScoreKind::TEE) {
        r.seed = options_.surrogates.seed;
        r.surrogates = options_.surrogates.count;
        r.surrogate_method = to_string(options_.surrogates.method);
        if (options_.surrogates.count < options_.surrogates.recommended_minimum()) {
            r.notes.push_back("surrogate count below ceil(alpha/(1-alpha)); quantile is the sample maximum");
        }
    }
    if (options_.kind == ScoreKind::TEA) {
        r.notes.push_back("statistic 2*N*TE uses TE in nats; penalties use the maximum-penalty parent order");
    }
    if (is_information_criterion(options_.kind)) {
        r.notes.push_back("log-likelihood in bits; latent-state entropy term dropped as graph-independent");
    }
    for (std::size_t v = 0; v < graph.size(); ++v) {
        r.per_vertex.push_back(score(v, graph.parents(v)));
        r.total += r.per_vertex.back().local;
    }
    return r;
}

double local_score(std::size_t vertex, const std::vector<std::size_t>& parents, const EmbeddedView& view,
                   const ScoreOptions& options, LocalScoreCache& cache) {
    LocalScorer scorer(view, options, std::shared_ptr<LocalScoreCache>(&cache, [](LocalScoreCache*) {}));
    return scorer.local(vertex, parents);
}

ScoreReport score_graph(const Dag& graph, const EmbeddedView& view, const ScoreOptions& options) {
    LocalScorer scorer(view, options);
    return scorer.report(graph);
}

ScoreReport score_te(const Dag& graph, const EmbeddedView& view, const EstimatorKind& kind) {
    return score_graph(graph, view, ScoreOptions{ScoreKind::TE, kind, 0.95, {}});
}

ScoreReport score_tea(const Dag& graph, const EmbeddedView& view, double alpha, const EstimatorKind& kind) {
    return score_graph(graph, view, ScoreOptions{ScoreKind::TEA, kind, alpha, {}});
}

ScoreReport score_tee(const Dag& graph, const EmbeddedView& view, const EstimatorKind& kind,
                      const SurrogateConfig& cfg) {
    return score_graph(graph, view, ScoreOptions{ScoreKind::TEE, kind, cfg.alpha, cfg});
}

ScoreReport score_ic(const Dag& graph, const EmbeddedView& view, ScoreKind variant) {
    if (!is_information_criterion(variant)) {
        throw ValidationError("score_ic: variant must be aic, bic or ml");
    }
    return score_graph(graph, view, ScoreOptions{variant, EstimatorKind::discrete_plugin(), 0.95, {}});
}

}  // namespace netinfer
