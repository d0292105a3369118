#pragma once

#include "netinfer/dag.hpp"
#include "netinfer/scores.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace netinfer {

inline constexpr std::size_t kMaxExhaustiveVertices = 6;

enum class SearchMethod { Exhaustive, Greedy };

std::string to_string(SearchMethod m);
SearchMethod parse_search_method(const std::string& text);

struct SearchConfig {
    SearchMethod method = SearchMethod::Exhaustive;
    /// Unset means the default for the score: 3 for raw TE, unlimited otherwise.
    std::optional<std::size_t> max_parents;
    std::size_t restarts = 0;
    std::uint64_t seed = 0;
    bool record_trace = false;

    std::size_t parent_cap(ScoreKind kind, std::size_t vertices) const;
};

struct Move {
    enum class Type { Add, Delete, Reverse };

    Type type = Type::Add;
    std::size_t from = 0;
    std::size_t to = 0;

    std::string describe() const;
};

struct TraceStep {
    Move move;
    double delta = 0.0;
};

struct SearchResult {
    Dag best;
    ScoreReport best_report;
    std::size_t visited = 0;
    std::vector<TraceStep> trace;
};

/// Calls `visit` once for every labelled DAG on m vertices (m <= 6), optionally
/// limited to at most `max_parents` parents per vertex.
void enumerate_dags(std::size_t m, const std::function<void(const Dag&)>& visit,
                    std::optional<std::size_t> max_parents = std::nullopt);

/// All labelled DAGs on m vertices; convenient for m <= 4.
std::vector<Dag> all_dags(std::size_t m);

/// The graph obtained by applying `move`, or nullopt when the move is illegal
/// (missing/existing edge, cycle, or parent cap exceeded).
std::optional<Dag> apply_move(const Dag& graph, const Move& move, std::size_t max_parents);

/// Every legal single-edge move in canonical order (type, from, to).
std::vector<Move> legal_moves(const Dag& graph, std::size_t max_parents);

/// Graph plus cached per-vertex local scores, updated incrementally by moves.
class IncrementalScore {
public:
    IncrementalScore(LocalScorer& scorer, Dag start);

    const Dag& graph() const { return graph_; }
    double total() const { return total_; }
    double local(std::size_t v) const { return locals_.at(v); }

    /// Score change of `move` rescoring only the vertices whose parents change.
    double delta(const Move& move);
    void apply(const Move& move);

    /// Sum of local scores recomputed from scratch, bypassing the cache.
    double recompute_total() const;

private:
    LocalScorer& scorer_;
    Dag graph_;
    std::vector<double> locals_;
    double total_ = 0.0;
};

SearchResult exhaustive_search(LocalScorer& scorer, const SearchConfig& cfg);
SearchResult greedy_hill_climb(LocalScorer& scorer, const SearchConfig& cfg);
/// Dispatches on cfg.method.
SearchResult search(LocalScorer& scorer, const SearchConfig& cfg);
SearchResult greedy_hill_climb(const EmbeddedView& view, const ScoreOptions& options, const SearchConfig& cfg);

/// True when no legal single-edge move improves the score by more than `tol`.
bool is_local_optimum(LocalScorer& scorer, const Dag& graph, std::size_t max_parents, double tol = 1e-12);

struct GraphComparison {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t shd = 0;
};

/// Directed-edge precision/recall/F1 and structural Hamming distance.
/// Precision is 1 when nothing is inferred; recall is 1 when the truth has no edges.
GraphComparison compare_graphs(const Dag& inferred, const Dag& truth);

}  // namespace netinfer
