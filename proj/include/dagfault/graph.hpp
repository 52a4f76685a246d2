#ifndef DAGFAULT_GRAPH_HPP_
#define DAGFAULT_GRAPH_HPP_

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "dagfault/types.hpp"

namespace dagfault {

/// Edge endpoint mark. A directed edge a->b is (tail at a, arrow at b);
/// PAGs additionally use circle for "undetermined".
enum class Mark { tail, arrow, circle };

std::string to_string(Mark m);
Mark mark_from_string(const std::string& s);

enum class GraphKind { cpdag, pag, weighted_dag };

std::string to_string(GraphKind k);
GraphKind graph_kind_from_string(const std::string& s);

class VertexSetMismatch : public Error {
public:
    VertexSetMismatch() : Error("graphs have different vertex sets") {}
};

/// One edge per unordered pair; stored with a < b.
struct MixedEdge {
    Index a = 0, b = 0;
    Mark mark_a = Mark::tail;  // mark at endpoint a
    Mark mark_b = Mark::arrow; // mark at endpoint b
    double weight = std::numeric_limits<double>::quiet_NaN();

    bool has_weight() const { return !std::isnan(weight); }
};

/// Vertex set plus mark-carrying edges; represents CPDAGs, PAGs and
/// weighted DAGs uniformly. The kind tag constrains admissible marks
/// (checked by validate()).
class MixedGraph {
public:
    MixedGraph() = default;
    MixedGraph(GraphKind kind, std::vector<std::string> vertices);

    GraphKind kind() const { return kind_; }
    Index n() const { return static_cast<Index>(vertices_.size()); }
    const std::vector<std::string>& vertices() const { return vertices_; }
    const std::vector<MixedEdge>& edges() const { return edges_; }

    bool adjacent(Index a, Index b) const;
    const MixedEdge* edge(Index a, Index b) const;

    /// Inserts or replaces the unordered pair's edge.
    void add_edge(Index a, Index b, Mark at_a, Mark at_b,
                  double weight = std::numeric_limits<double>::quiet_NaN());
    void remove_edge(Index a, Index b);

    /// Mark at endpoint `at` on edge {x, at}.
    Mark mark_at(Index x, Index at) const;
    /// Sets the mark at endpoint `at` on edge {x, at}.
    void set_mark(Index x, Index at, Mark m);

    /// True iff edge x->y with tail at x and arrow at y.
    bool is_directed(Index x, Index y) const;
    /// Arrow at y on edge x*-*y (any mark at x).
    bool has_arrow_at(Index x, Index y) const;

    std::vector<Index> neighbors(Index v) const;

    /// No directed cycle among tail->arrow edges (topological sort).
    bool acyclic() const;

    /// Kind constraints: cpdag allows tail/arrow, weighted_dag requires
    /// all edges tail->arrow, weighted and acyclic.
    void validate() const;

    bool operator==(const MixedGraph& other) const;

private:
    Index find_edge(Index a, Index b) const;

    GraphKind kind_ = GraphKind::cpdag;
    std::vector<std::string> vertices_;
    std::vector<MixedEdge> edges_;
};

/// DOT rendering: marks map to arrowhead styles (arrow=normal, tail=none,
/// circle=odot), weights become edge labels rounded to 2 decimals.
std::string to_dot(const MixedGraph& g, const std::string& name = "g");
void export_dot(const MixedGraph& g, const std::string& path,
                const std::string& name = "g");

std::string graph_to_json(const MixedGraph& g);
MixedGraph graph_from_json(const std::string& text);
void export_graph_json(const MixedGraph& g, const std::string& path);

}  // namespace dagfault

#endif  // DAGFAULT_GRAPH_HPP_
