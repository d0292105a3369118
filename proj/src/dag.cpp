#include "netinfer/dag.hpp"

#include "netinfer/error.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace netinfer {

Dag::Dag(std::size_t m) : parents_(m) {}

Dag::Dag(std::size_t m, std::vector<std::vector<std::size_t>> parents) : parents_(std::move(parents)) {
    if (parents_.size() != m) {
        throw ValidationError("graph: " + std::to_string(parents_.size()) + " parent sets for " + std::to_string(m) +
                              " vertices");
    }
    for (std::size_t v = 0; v < m; ++v) {
        auto& ps = parents_[v];
        std::sort(ps.begin(), ps.end());
        if (std::adjacent_find(ps.begin(), ps.end()) != ps.end()) {
            throw ValidationError("graph: duplicate parent of vertex " + std::to_string(v));
        }
        for (const auto p : ps) {
            if (p >= m) {
                throw ValidationError("graph: parent index " + std::to_string(p) + " out of range");
            }
            if (p == v) {
                throw ValidationError("graph: self-loop on vertex " + std::to_string(v));
            }
        }
    }
}

Dag Dag::from_edges(std::size_t m, const std::vector<Edge>& edges) {
    std::vector<std::vector<std::size_t>> parents(m);
    for (const auto& [from, to] : edges) {
        if (to >= m) {
            throw ValidationError("graph: vertex index " + std::to_string(to) + " out of range");
        }
        parents[to].push_back(from);
    }
    return Dag(m, std::move(parents));
}

bool Dag::has_edge(std::size_t from, std::size_t to) const {
    const auto& ps = parents_.at(to);
    return std::binary_search(ps.begin(), ps.end(), from);
}

std::size_t Dag::edge_count() const {
    std::size_t count = 0;
    for (const auto& ps : parents_) {
        count += ps.size();
    }
    return count;
}

std::vector<Edge> Dag::edges() const {
    std::vector<Edge> out;
    for (std::size_t v = 0; v < parents_.size(); ++v) {
        for (const auto p : parents_[v]) {
            out.emplace_back(p, v);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

void Dag::add_edge(std::size_t from, std::size_t to) {
    if (from >= size() || to >= size()) {
        throw ValidationError("graph: edge endpoint out of range");
    }
    if (from == to) {
        throw ValidationError("graph: self-loop on vertex " + std::to_string(to));
    }
    auto& ps = parents_[to];
    const auto it = std::lower_bound(ps.begin(), ps.end(), from);
    if (it != ps.end() && *it == from) {
        throw ValidationError("graph: duplicate edge " + std::to_string(from) + " -> " + std::to_string(to));
    }
    ps.insert(it, from);
}

void Dag::remove_edge(std::size_t from, std::size_t to) {
    auto& ps = parents_.at(to);
    const auto it = std::lower_bound(ps.begin(), ps.end(), from);
    if (it == ps.end() || *it != from) {
        throw ValidationError("graph: no edge " + std::to_string(from) + " -> " + std::to_string(to));
    }
    ps.erase(it);
}

bool is_acyclic(const Dag& graph) {
    // Kahn's algorithm over child lists.
    const std::size_t m = graph.size();
    std::vector<std::size_t> indegree(m);
    std::vector<std::vector<std::size_t>> children(m);
    for (std::size_t v = 0; v < m; ++v) {
        indegree[v] = graph.parents(v).size();
        for (const auto p : graph.parents(v)) {
            children[p].push_back(v);
        }
    }
    std::vector<std::size_t> ready;
    for (std::size_t v = 0; v < m; ++v) {
        if (indegree[v] == 0) {
            ready.push_back(v);
        }
    }
    std::size_t visited = 0;
    while (!ready.empty()) {
        const auto v = ready.back();
        ready.pop_back();
        ++visited;
        for (const auto c : children[v]) {
            if (--indegree[c] == 0) {
                ready.push_back(c);
            }
        }
    }
    return visited == m;
}

bool creates_cycle(const Dag& graph, std::size_t from, std::size_t to) {
    if (from == to) {
        return true;
    }
    // Walk ancestors of `from`; a cycle appears iff `to` is among them.
    std::vector<char> seen(graph.size(), 0);
    std::vector<std::size_t> stack{from};
    while (!stack.empty()) {
        const auto v = stack.back();
        stack.pop_back();
        for (const auto p : graph.parents(v)) {
            if (p == to) {
                return true;
            }
            if (!seen[p]) {
                seen[p] = 1;
                stack.push_back(p);
            }
        }
    }
    return false;
}

bool edge_set_less(const Dag& a, const Dag& b) { return a.edges() < b.edges(); }

namespace {

std::string quote(const std::string& s) {
    std::string out = "\"";
    for (const char c : s) {
        if (c == '"' || c == '\\') {
            out += '\\';
        }
        out += c;
    }
    return out + "\"";
}

class DotLexer {
public:
    explicit DotLexer(const std::string& text) : text_(text) {}

    // Returns "" at end of input. Identifiers come back unquoted; punctuation
    // ("{", "}", ";", "->", "[", "]", "=", ",") is returned verbatim.
    std::string next(bool& is_id) {
        skip_space();
        is_id = false;
        if (pos_ >= text_.size()) {
            return {};
        }
        const char c = text_[pos_];
        if (c == '"') {
            ++pos_;
            std::string out;
            while (pos_ < text_.size() && text_[pos_] != '"') {
                if (text_[pos_] == '\\' && pos_ + 1 < text_.size()) {
                    ++pos_;
                }
                out += text_[pos_++];
            }
            if (pos_ >= text_.size()) {
                throw ValidationError("DOT: unterminated string");
            }
            ++pos_;
            is_id = true;
            return out;
        }
        if (c == '-' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '>') {
            pos_ += 2;
            return "->";
        }
        if (c == '-' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '-') {
            throw ValidationError("DOT: undirected edge '--' is not supported");
        }
        if (std::string_view("{};[]=,").find(c) != std::string_view::npos) {
            ++pos_;
            return std::string(1, c);
        }
        std::string out;
        while (pos_ < text_.size()) {
            const char d = text_[pos_];
            if (std::isalnum(static_cast<unsigned char>(d)) || d == '_' || d == '.' ||
                (d == '-' && !(pos_ + 1 < text_.size() && text_[pos_ + 1] == '>'))) {
                out += d;
                ++pos_;
            } else {
                break;
            }
        }
        if (out.empty()) {
            throw ValidationError(std::string("DOT: unexpected character '") + c + "'");
        }
        is_id = true;
        return out;
    }

private:
    void skip_space() {
        while (pos_ < text_.size()) {
            const char c = text_[pos_];
            if (std::isspace(static_cast<unsigned char>(c))) {
                ++pos_;
            } else if (c == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '/') {
                pos_ = text_.find('\n', pos_);
            } else if (c == '#') {
                pos_ = text_.find('\n', pos_);
            } else if (c == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '*') {
                const auto end = text_.find("*/", pos_ + 2);
                pos_ = end == std::string::npos ? std::string::npos : end + 2;
            } else {
                break;
            }
        }
    }

    const std::string& text_;
    std::size_t pos_ = 0;
};

}  // namespace

std::string to_dot(const Dag& graph, const std::vector<std::string>& names, const std::string& title) {
    if (names.size() != graph.size()) {
        throw ValidationError("to_dot: name count does not match vertex count");
    }
    std::ostringstream out;
    out << "digraph " << quote(title) << " {\n";
    for (const auto& n : names) {
        out << "  " << quote(n) << ";\n";
    }
    for (const auto& [from, to] : graph.edges()) {
        out << "  " << quote(names[from]) << " -> " << quote(names[to]) << ";\n";
    }
    out << "}\n";
    return out.str();
}

NamedGraph parse_dot(const std::string& text) {
    DotLexer lex(text);
    bool is_id = false;
    auto tok = lex.next(is_id);
    if (tok == "strict") {
        tok = lex.next(is_id);
    }
    if (tok != "digraph") {
        throw ValidationError("DOT: expected 'digraph'");
    }
    tok = lex.next(is_id);
    if (is_id) {
        tok = lex.next(is_id);
    }
    if (tok != "{") {
        throw ValidationError("DOT: expected '{'");
    }

    std::vector<std::string> names;
    std::unordered_map<std::string, std::size_t> index;
    std::vector<Edge> edges;
    auto vertex = [&](const std::string& name) {
        const auto [it, inserted] = index.emplace(name, names.size());
        if (inserted) {
            names.push_back(name);
        }
        return it->second;
    };

    tok = lex.next(is_id);
    while (tok != "}") {
        if (tok.empty()) {
            throw ValidationError("DOT: missing closing '}'");
        }
        if (tok == ";" || tok == ",") {
            tok = lex.next(is_id);
            continue;
        }
        if (!is_id) {
            throw ValidationError("DOT: unexpected token '" + tok + "'");
        }
        std::string first = tok;
        tok = lex.next(is_id);
        if (tok == "=") {
            lex.next(is_id);  // graph attribute value
            tok = lex.next(is_id);
            continue;
        }
        const bool keyword = (first == "graph" || first == "node" || first == "edge") && tok == "[";
        std::vector<std::string> chain{first};
        while (tok == "->") {
            tok = lex.next(is_id);
            if (!is_id) {
                throw ValidationError("DOT: expected vertex after '->'");
            }
            chain.push_back(tok);
            tok = lex.next(is_id);
        }
        if (tok == "[") {
            while (tok != "]") {
                tok = lex.next(is_id);
                if (tok.empty()) {
                    throw ValidationError("DOT: unterminated attribute list");
                }
            }
            tok = lex.next(is_id);
        }
        if (keyword) {
            continue;
        }
        std::size_t prev = vertex(chain.front());
        for (std::size_t k = 1; k < chain.size(); ++k) {
            const auto cur = vertex(chain[k]);
            edges.emplace_back(prev, cur);
            prev = cur;
        }
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    return {names, Dag::from_edges(names.size(), edges)};
}

NamedGraph load_dot(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ValidationError("cannot read file '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_dot(buf.str());
}

Dag align_graph(const NamedGraph& g, const std::vector<std::string>& names) {
    std::unordered_map<std::string, std::size_t> target;
    for (std::size_t i = 0; i < names.size(); ++i) {
        target.emplace(names[i], i);
    }
    for (const auto& n : g.names) {
        if (!target.count(n)) {
            throw ValidationError("graph vertex '" + n + "' does not match any data column");
        }
    }
    std::vector<Edge> edges;
    for (const auto& [from, to] : g.graph.edges()) {
        edges.emplace_back(target.at(g.names[from]), target.at(g.names[to]));
    }
    if (g.names.size() != names.size()) {
        for (const auto& n : names) {
            if (std::find(g.names.begin(), g.names.end(), n) == g.names.end()) {
                throw ValidationError("data column '" + n + "' is missing from the graph");
            }
        }
    }
    return Dag::from_edges(names.size(), edges);
}

}  // namespace netinfer
