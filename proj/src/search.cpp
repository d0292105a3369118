#include "netinfer/search.hpp"

#include "netinfer/error.hpp"
#include "netinfer/parallel.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <limits>
#include <random>

namespace netinfer {

namespace {

using Mask = std::uint32_t;
using ParentMasks = std::array<Mask, kMaxExhaustiveVertices>;

std::vector<std::size_t> mask_to_list(Mask mask) {
    std::vector<std::size_t> out;
    for (std::size_t v = 0; mask; ++v, mask >>= 1) {
        if (mask & 1U) {
            out.push_back(v);
        }
    }
    return out;
}

// Every DAG has a unique layering by longest-path depth: layer 0 holds the
// parentless vertices and a vertex in layer k has all parents in layers < k
// and at least one in layer k-1. Enumerating layerings and parent choices
// consistent with them therefore yields each labelled DAG exactly once.
class DagEnumerator {
public:
    DagEnumerator(std::size_t m, std::size_t cap, const std::function<void(const ParentMasks&)>& visit)
        : m_(m), cap_(cap), visit_(visit) {}

    void run() {
        parents_.fill(0);
        const Mask all = m_ == 0 ? 0 : ((Mask{1} << m_) - 1);
        if (m_ == 0) {
            visit_(parents_);
            return;
        }
        for (Mask layer = all; layer; layer = (layer - 1) & all) {
            next_layer(all & ~layer, layer, layer);
        }
    }

private:
    void next_layer(Mask remaining, Mask previous, Mask placed) {
        if (remaining == 0) {
            visit_(parents_);
            return;
        }
        for (Mask layer = remaining; layer; layer = (layer - 1) & remaining) {
            const auto members = mask_to_list(layer);
            assign(members, 0, remaining & ~layer, previous, placed, layer);
        }
    }

    void assign(const std::vector<std::size_t>& members, std::size_t idx, Mask remaining, Mask previous, Mask placed,
                Mask layer) {
        if (idx == members.size()) {
            next_layer(remaining, layer, placed | layer);
            return;
        }
        const auto v = members[idx];
        for (Mask ps = placed; ps; ps = (ps - 1) & placed) {
            if ((ps & previous) == 0 || static_cast<std::size_t>(std::popcount(ps)) > cap_) {
                continue;
            }
            parents_[v] = ps;
            assign(members, idx + 1, remaining, previous, placed, layer);
        }
        parents_[v] = 0;
    }

    std::size_t m_;
    std::size_t cap_;
    const std::function<void(const ParentMasks&)>& visit_;
    ParentMasks parents_{};
};

Dag masks_to_dag(std::size_t m, const ParentMasks& masks) {
    std::vector<std::vector<std::size_t>> parents(m);
    for (std::size_t v = 0; v < m; ++v) {
        parents[v] = mask_to_list(masks[v]);
    }
    return Dag(m, std::move(parents));
}

std::vector<Edge> mask_edges(std::size_t m, const ParentMasks& masks) {
    std::vector<Edge> edges;
    for (std::size_t v = 0; v < m; ++v) {
        for (const auto p : mask_to_list(masks[v])) {
            edges.emplace_back(p, v);
        }
    }
    std::sort(edges.begin(), edges.end());
    return edges;
}

void check_enumerable(std::size_t m) {
    if (m > kMaxExhaustiveVertices) {
        throw ValidationError("exhaustive enumeration supports at most " + std::to_string(kMaxExhaustiveVertices) +
                              " vertices (got " + std::to_string(m) + "); use greedy search");
    }
}

Dag random_start(std::size_t m, std::size_t cap, std::mt19937_64& rng) {
    std::vector<std::size_t> order(m);
    for (std::size_t i = 0; i < m; ++i) {
        order[i] = i;
    }
    for (std::size_t i = m; i > 1; --i) {
        std::swap(order[i - 1], order[rng() % i]);
    }
    Dag g(m);
    for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t i = 0; i < j; ++i) {
            if ((rng() & 1U) && g.parents(order[j]).size() < cap) {
                g.add_edge(order[i], order[j]);
            }
        }
    }
    return g;
}

bool better(double total, const Dag& graph, double best_total, const Dag& best) {
    if (total != best_total) {
        return total > best_total;
    }
    return edge_set_less(graph, best);
}

}  // namespace

std::string to_string(SearchMethod m) { return m == SearchMethod::Exhaustive ? "exhaustive" : "greedy"; }

SearchMethod parse_search_method(const std::string& text) {
    if (text == "exhaustive") {
        return SearchMethod::Exhaustive;
    }
    if (text == "greedy") {
        return SearchMethod::Greedy;
    }
    throw ValidationError("unknown search method '" + text + "' (expected exhaustive or greedy)");
}

std::size_t SearchConfig::parent_cap(ScoreKind kind, std::size_t vertices) const {
    const std::size_t unlimited = vertices == 0 ? 0 : vertices - 1;
    if (max_parents) {
        return std::min(*max_parents, unlimited);
    }
    return kind == ScoreKind::TE ? std::min<std::size_t>(3, unlimited) : unlimited;
}

std::string Move::describe() const {
    const char* name = type == Type::Add ? "add" : (type == Type::Delete ? "delete" : "reverse");
    return std::string(name) + " " + std::to_string(from) + "->" + std::to_string(to);
}

void enumerate_dags(std::size_t m, const std::function<void(const Dag&)>& visit, std::optional<std::size_t> max_parents) {
    check_enumerable(m);
    const std::size_t cap = max_parents.value_or(m);
    const std::function<void(const ParentMasks&)> on_masks = [&](const ParentMasks& masks) {
        visit(masks_to_dag(m, masks));
    };
    DagEnumerator(m, cap, on_masks).run();
}

std::vector<Dag> all_dags(std::size_t m) {
    std::vector<Dag> out;
    enumerate_dags(m, [&](const Dag& g) { out.push_back(g); });
    return out;
}

std::optional<Dag> apply_move(const Dag& graph, const Move& move, std::size_t max_parents) {
    const std::size_t m = graph.size();
    if (move.from >= m || move.to >= m || move.from == move.to) {
        return std::nullopt;
    }
    Dag next = graph;
    switch (move.type) {
        case Move::Type::Add:
            if (graph.has_edge(move.from, move.to) || graph.parents(move.to).size() >= max_parents ||
                creates_cycle(graph, move.from, move.to)) {
                return std::nullopt;
            }
            next.add_edge(move.from, move.to);
            return next;
        case Move::Type::Delete:
            if (!graph.has_edge(move.from, move.to)) {
                return std::nullopt;
            }
            next.remove_edge(move.from, move.to);
            return next;
        case Move::Type::Reverse:
            if (!graph.has_edge(move.from, move.to) || graph.parents(move.from).size() >= max_parents) {
                return std::nullopt;
            }
            next.remove_edge(move.from, move.to);
            if (creates_cycle(next, move.to, move.from)) {
                return std::nullopt;
            }
            next.add_edge(move.to, move.from);
            return next;
    }
    return std::nullopt;
}

std::vector<Move> legal_moves(const Dag& graph, std::size_t max_parents) {
    std::vector<Move> out;
    const std::size_t m = graph.size();
    for (const auto type : {Move::Type::Add, Move::Type::Delete, Move::Type::Reverse}) {
        for (std::size_t from = 0; from < m; ++from) {
            for (std::size_t to = 0; to < m; ++to) {
                const Move mv{type, from, to};
                if (apply_move(graph, mv, max_parents)) {
                    out.push_back(mv);
                }
            }
        }
    }
    return out;
}

IncrementalScore::IncrementalScore(LocalScorer& scorer, Dag start) : scorer_(scorer), graph_(std::move(start)) {
    if (graph_.size() != scorer_.vertex_count()) {
        throw ValidationError("start graph size does not match data");
    }
    if (!is_acyclic(graph_)) {
        throw ValidationError("start graph contains a directed cycle");
    }
    locals_.resize(graph_.size());
    for (std::size_t v = 0; v < graph_.size(); ++v) {
        locals_[v] = scorer_.local(v, graph_.parents(v));
        total_ += locals_[v];
    }
}

double IncrementalScore::delta(const Move& move) {
    auto with = [](std::vector<std::size_t> ps, std::size_t x) {
        ps.push_back(x);
        return ps;
    };
    auto without = [](std::vector<std::size_t> ps, std::size_t x) {
        ps.erase(std::remove(ps.begin(), ps.end(), x), ps.end());
        return ps;
    };
    const auto& to_parents = graph_.parents(move.to);
    switch (move.type) {
        case Move::Type::Add:
            return scorer_.local(move.to, with(to_parents, move.from)) - locals_[move.to];
        case Move::Type::Delete:
            return scorer_.local(move.to, without(to_parents, move.from)) - locals_[move.to];
        case Move::Type::Reverse:
            return scorer_.local(move.to, without(to_parents, move.from)) - locals_[move.to] +
                   scorer_.local(move.from, with(graph_.parents(move.from), move.to)) - locals_[move.from];
    }
    return 0.0;
}

void IncrementalScore::apply(const Move& move) {
    auto next = apply_move(graph_, move, std::numeric_limits<std::size_t>::max());
    if (!next) {
        throw ValidationError("illegal move " + move.describe());
    }
    total_ += delta(move);
    graph_ = std::move(*next);
    locals_[move.to] = scorer_.local(move.to, graph_.parents(move.to));
    if (move.type == Move::Type::Reverse) {
        locals_[move.from] = scorer_.local(move.from, graph_.parents(move.from));
    }
}

double IncrementalScore::recompute_total() const {
    double total = 0.0;
    for (std::size_t v = 0; v < graph_.size(); ++v) {
        total += scorer_.compute(v, graph_.parents(v)).local;
    }
    return total;
}

SearchResult exhaustive_search(LocalScorer& scorer, const SearchConfig& cfg) {
    const std::size_t m = scorer.vertex_count();
    check_enumerable(m);
    const std::size_t cap = cfg.parent_cap(scorer.options().kind, m);

    // Local score table over every (vertex, parent subset) within the cap.
    const std::size_t subsets = std::size_t{1} << m;
    std::vector<double> table(m * subsets, 0.0);
    std::vector<std::pair<std::size_t, Mask>> jobs;
    for (std::size_t v = 0; v < m; ++v) {
        for (Mask ps = 0; ps < subsets; ++ps) {
            if (!(ps & (Mask{1} << v)) && static_cast<std::size_t>(std::popcount(ps)) <= cap) {
                jobs.emplace_back(v, ps);
            }
        }
    }
    parallel_for(jobs.size(), [&](std::size_t k) {
        const auto [v, ps] = jobs[k];
        table[v * subsets + ps] = scorer.local(v, mask_to_list(ps));
    });

    SearchResult result;
    double best_total = -std::numeric_limits<double>::infinity();
    ParentMasks best{};
    std::vector<Edge> best_edges;
    const std::function<void(const ParentMasks&)> visit = [&](const ParentMasks& masks) {
        ++result.visited;
        double total = 0.0;
        for (std::size_t v = 0; v < m; ++v) {
            total += table[v * subsets + masks[v]];
        }
        if (total > best_total) {
            best_total = total;
            best = masks;
            best_edges.clear();
        } else if (total == best_total) {
            if (best_edges.empty()) {
                best_edges = mask_edges(m, best);
            }
            auto edges = mask_edges(m, masks);
            if (edges < best_edges) {
                best = masks;
                best_edges = std::move(edges);
            }
        }
    };
    DagEnumerator(m, cap, visit).run();

    result.best = masks_to_dag(m, best);
    result.best_report = scorer.report(result.best);
    return result;
}

SearchResult greedy_hill_climb(LocalScorer& scorer, const SearchConfig& cfg) {
    const std::size_t m = scorer.vertex_count();
    const std::size_t cap = cfg.parent_cap(scorer.options().kind, m);
    constexpr double kMinImprovement = 1e-12;

    std::mt19937_64 rng(cfg.seed);
    SearchResult result;
    bool have_best = false;
    double best_total = 0.0;

    for (std::size_t run = 0; run <= cfg.restarts; ++run) {
        Dag start = run == 0 ? Dag(m) : random_start(m, cap, rng);
        IncrementalScore state(scorer, start);
        ++result.visited;
        while (true) {
            std::optional<Move> chosen;
            std::optional<Dag> chosen_graph;
            double chosen_delta = kMinImprovement;
            for (const auto& mv : legal_moves(state.graph(), cap)) {
                const double d = state.delta(mv);
                ++result.visited;
                if (d > chosen_delta) {
                    chosen = mv;
                    chosen_delta = d;
                    chosen_graph.reset();
                } else if (chosen && d == chosen_delta) {
                    if (!chosen_graph) {
                        chosen_graph = apply_move(state.graph(), *chosen, cap);
                    }
                    auto candidate = apply_move(state.graph(), mv, cap);
                    if (edge_set_less(*candidate, *chosen_graph)) {
                        chosen = mv;
                        chosen_graph = std::move(candidate);
                    }
                }
            }
            if (!chosen) {
                break;
            }
            state.apply(*chosen);
            if (cfg.record_trace) {
                result.trace.push_back({*chosen, chosen_delta});
            }
        }
        if (!have_best || better(state.total(), state.graph(), best_total, result.best)) {
            have_best = true;
            best_total = state.total();
            result.best = state.graph();
        }
    }
    result.best_report = scorer.report(result.best);
    return result;
}

SearchResult search(LocalScorer& scorer, const SearchConfig& cfg) {
    return cfg.method == SearchMethod::Exhaustive ? exhaustive_search(scorer, cfg) : greedy_hill_climb(scorer, cfg);
}

SearchResult greedy_hill_climb(const EmbeddedView& view, const ScoreOptions& options, const SearchConfig& cfg) {
    LocalScorer scorer(view, options);
    return greedy_hill_climb(scorer, cfg);
}

bool is_local_optimum(LocalScorer& scorer, const Dag& graph, std::size_t max_parents, double tol) {
    IncrementalScore state(scorer, graph);
    for (const auto& mv : legal_moves(graph, max_parents)) {
        if (state.delta(mv) > tol) {
            return false;
        }
    }
    return true;
}

GraphComparison compare_graphs(const Dag& inferred, const Dag& truth) {
    if (inferred.size() != truth.size()) {
        throw ValidationError("compare_graphs: vertex counts differ (" + std::to_string(inferred.size()) + " vs " +
                              std::to_string(truth.size()) + ")");
    }
    const std::size_t m = truth.size();
    std::size_t tp = 0;
    for (const auto& [from, to] : inferred.edges()) {
        if (truth.has_edge(from, to)) {
            ++tp;
        }
    }
    const std::size_t n_inferred = inferred.edge_count();
    const std::size_t n_truth = truth.edge_count();
    GraphComparison out;
    out.precision = n_inferred == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(n_inferred);
    out.recall = n_truth == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(n_truth);
    out.f1 = (out.precision + out.recall) > 0.0 ? 2.0 * out.precision * out.recall / (out.precision + out.recall) : 0.0;
    // One unit per unordered pair whose edge state differs (insert, delete or reverse).
    for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t b = a + 1; b < m; ++b) {
            const int s_inf = inferred.has_edge(a, b) ? 1 : (inferred.has_edge(b, a) ? 2 : 0);
            const int s_true = truth.has_edge(a, b) ? 1 : (truth.has_edge(b, a) ? 2 : 0);
            if (s_inf != s_true) {
                ++out.shd;
            }
        }
    }
    return out;
}

}  // namespace netinfer
