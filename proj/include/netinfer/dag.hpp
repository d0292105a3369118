#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace netinfer {

using Edge = std::pair<std::size_t, std::size_t>;  // (parent, child)

/// Directed graph over m vertices stored as sorted parent sets.
///
/// Self-loops and duplicate parents are rejected on construction; acyclicity is
/// checked separately by is_acyclic() so that cyclic candidates can be
/// represented and rejected by callers.
class Dag {
public:
    Dag() = default;
    explicit Dag(std::size_t m);
    Dag(std::size_t m, std::vector<std::vector<std::size_t>> parents);
    static Dag from_edges(std::size_t m, const std::vector<Edge>& edges);

    std::size_t size() const { return parents_.size(); }
    const std::vector<std::size_t>& parents(std::size_t v) const { return parents_.at(v); }
    bool has_edge(std::size_t from, std::size_t to) const;
    std::size_t edge_count() const;
    /// All edges sorted lexicographically by (parent, child).
    std::vector<Edge> edges() const;

    void add_edge(std::size_t from, std::size_t to);
    void remove_edge(std::size_t from, std::size_t to);

    friend bool operator==(const Dag&, const Dag&) = default;

private:
    std::vector<std::vector<std::size_t>> parents_;
};

/// True iff a topological order exists.
bool is_acyclic(const Dag& graph);

/// True iff `to` can already reach `from`, i.e. adding from -> to closes a cycle.
bool creates_cycle(const Dag& graph, std::size_t from, std::size_t to);

/// Lexicographic comparison of sorted edge lists.
bool edge_set_less(const Dag& a, const Dag& b);

struct NamedGraph {
    std::vector<std::string> names;
    Dag graph;
};

/// Directed DOT with quoted vertex names; every vertex is listed explicitly.
std::string to_dot(const Dag& graph, const std::vector<std::string>& names, const std::string& title = "G");

/// Reads the subset of DOT written by to_dot (node and edge statements,
/// attributes ignored). Vertices are numbered in order of first appearance.
NamedGraph parse_dot(const std::string& text);
NamedGraph load_dot(const std::string& path);

/// Re-indexes a parsed graph so vertex i carries names[i]; throws on mismatch.
Dag align_graph(const NamedGraph& g, const std::vector<std::string>& names);

}  // namespace netinfer
