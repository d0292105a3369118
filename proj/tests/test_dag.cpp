#include "netinfer/dag.hpp"
#include "netinfer/error.hpp"

#include <doctest.h>

using namespace netinfer;

TEST_SUITE("dag") {

TEST_CASE("acyclicity") {
    CHECK(is_acyclic(Dag(0)));
    CHECK(is_acyclic(Dag(3)));
    CHECK(is_acyclic(Dag::from_edges(3, {{0, 1}, {1, 2}})));
    CHECK_FALSE(is_acyclic(Dag::from_edges(2, {{0, 1}, {1, 0}})));
    CHECK_FALSE(is_acyclic(Dag::from_edges(3, {{0, 1}, {1, 2}, {2, 0}})));
}

TEST_CASE("construction rejects malformed parent sets") {
    CHECK_THROWS_AS(Dag(2, {{0}, {}}), ValidationError);
    CHECK_THROWS_AS(Dag(2, {{}, {0, 0}}), ValidationError);
    CHECK_THROWS_AS(Dag(2, {{}, {5}}), ValidationError);
    CHECK_THROWS_AS(Dag(2, {{}}), ValidationError);
    CHECK_THROWS_AS(Dag::from_edges(2, {{0, 1}, {0, 1}}), ValidationError);
    const Dag g(3, {{}, {2, 0}, {}});
    CHECK(g.parents(1) == std::vector<std::size_t>{0, 2});
}

TEST_CASE("edge editing and cycle checks") {
    Dag g(3);
    g.add_edge(0, 1);
    g.add_edge(1, 2);
    CHECK(g.edge_count() == 2);
    CHECK(g.has_edge(0, 1));
    CHECK_FALSE(g.has_edge(1, 0));
    CHECK(creates_cycle(g, 2, 0));
    CHECK_FALSE(creates_cycle(g, 0, 2));
    CHECK(g.edges() == std::vector<Edge>{{0, 1}, {1, 2}});
    g.remove_edge(0, 1);
    CHECK(g.edge_count() == 1);
    CHECK_THROWS_AS(g.remove_edge(0, 1), ValidationError);
    CHECK_THROWS_AS(g.add_edge(1, 1), ValidationError);
}

TEST_CASE("edge-set ordering") {
    const auto a = Dag::from_edges(3, {{0, 1}});
    const auto b = Dag::from_edges(3, {{0, 2}});
    CHECK(edge_set_less(a, b));
    CHECK_FALSE(edge_set_less(b, a));
    CHECK(edge_set_less(Dag(3), a));
}

TEST_CASE("DOT round trip") {
    const std::vector<std::string> names{"alpha", "b c", "x\"y"};
    const auto g = Dag::from_edges(3, {{0, 1}, {2, 1}, {0, 2}});
    const auto parsed = parse_dot(to_dot(g, names));
    CHECK(parsed.names == names);
    CHECK(parsed.graph == g);
}

TEST_CASE("DOT reader handles comments, attributes, chains and isolated vertices") {
    const auto g = parse_dot(R"(// header
strict digraph "net" {
  rankdir=LR;
  node [shape=circle];
  /* block */ a -> b -> c [color=red];
  d;
  # hash comment
}
)");
    CHECK(g.names == std::vector<std::string>{"a", "b", "c", "d"});
    CHECK(g.graph.edges() == std::vector<Edge>{{0, 1}, {1, 2}});
    CHECK_THROWS_AS(parse_dot("graph { a -- b }"), ValidationError);
    CHECK_THROWS_AS(parse_dot("digraph { a -> }"), ValidationError);
    CHECK_THROWS_AS(parse_dot("digraph { a -> b"), ValidationError);
}

TEST_CASE("aligning a graph to data columns") {
    const auto parsed = parse_dot("digraph { y -> x; z; }");
    const auto g = align_graph(parsed, {"x", "y", "z"});
    CHECK(g.edges() == std::vector<Edge>{{1, 0}});
    CHECK_THROWS_AS(align_graph(parsed, {"x", "y"}), ValidationError);
    CHECK_THROWS_AS(align_graph(parsed, {"x", "y", "w"}), ValidationError);
}

}  // TEST_SUITE
