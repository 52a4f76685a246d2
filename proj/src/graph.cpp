#include "dagfault/graph.hpp"

#include <algorithm>
#include <fstream>
#include <queue>
#include <sstream>

#include <json.hpp>

namespace dagfault {

std::string to_string(Mark m) {
    switch (m) {
        case Mark::tail: return "tail";
        case Mark::arrow: return "arrow";
        case Mark::circle: return "circle";
    }
    return "?";
}

Mark mark_from_string(const std::string& s) {
    if (s == "tail") return Mark::tail;
    if (s == "arrow") return Mark::arrow;
    if (s == "circle") return Mark::circle;
    throw Error("unknown mark: " + s);
}

std::string to_string(GraphKind k) {
    switch (k) {
        case GraphKind::cpdag: return "cpdag";
        case GraphKind::pag: return "pag";
        case GraphKind::weighted_dag: return "weighted_dag";
    }
    return "?";
}

GraphKind graph_kind_from_string(const std::string& s) {
    if (s == "cpdag") return GraphKind::cpdag;
    if (s == "pag") return GraphKind::pag;
    if (s == "weighted_dag") return GraphKind::weighted_dag;
    throw Error("unknown graph kind: " + s);
}

MixedGraph::MixedGraph(GraphKind kind, std::vector<std::string> vertices)
    : kind_(kind), vertices_(std::move(vertices)) {}

Index MixedGraph::find_edge(Index a, Index b) const {
    if (a > b) std::swap(a, b);
    for (std::size_t i = 0; i < edges_.size(); ++i)
        if (edges_[i].a == a && edges_[i].b == b) return static_cast<Index>(i);
    return -1;
}

bool MixedGraph::adjacent(Index a, Index b) const { return find_edge(a, b) >= 0; }

const MixedEdge* MixedGraph::edge(Index a, Index b) const {
    const Index i = find_edge(a, b);
    return i < 0 ? nullptr : &edges_[static_cast<std::size_t>(i)];
}

void MixedGraph::add_edge(Index a, Index b, Mark at_a, Mark at_b, double weight) {
    if (a == b) throw Error("self loops are not representable");
    if (a > b) {
        std::swap(a, b);
        std::swap(at_a, at_b);
    }
    const Index i = find_edge(a, b);
    const MixedEdge e{a, b, at_a, at_b, weight};
    if (i >= 0)
        edges_[static_cast<std::size_t>(i)] = e;
    else
        edges_.push_back(e);
}

void MixedGraph::remove_edge(Index a, Index b) {
    const Index i = find_edge(a, b);
    if (i >= 0) edges_.erase(edges_.begin() + i);
}

Mark MixedGraph::mark_at(Index x, Index at) const {
    const MixedEdge* e = edge(x, at);
    if (!e) throw Error("mark_at: no such edge");
    return at == e->a ? e->mark_a : e->mark_b;
}

void MixedGraph::set_mark(Index x, Index at, Mark m) {
    const Index i = find_edge(x, at);
    if (i < 0) throw Error("set_mark: no such edge");
    auto& e = edges_[static_cast<std::size_t>(i)];
    if (e.a == at)
        e.mark_a = m;
    else
        e.mark_b = m;
}

bool MixedGraph::is_directed(Index x, Index y) const {
    const MixedEdge* e = edge(x, y);
    if (!e) return false;
    return mark_at(y, x) == Mark::tail && mark_at(x, y) == Mark::arrow;
}

bool MixedGraph::has_arrow_at(Index x, Index y) const {
    const MixedEdge* e = edge(x, y);
    return e && mark_at(x, y) == Mark::arrow;
}

std::vector<Index> MixedGraph::neighbors(Index v) const {
    std::vector<Index> out;
    for (const auto& e : edges_) {
        if (e.a == v) out.push_back(e.b);
        if (e.b == v) out.push_back(e.a);
    }
    std::sort(out.begin(), out.end());
    return out;
}

bool MixedGraph::acyclic() const {
    // Kahn over the tail->arrow subrelation.
    std::vector<Index> indegree(static_cast<std::size_t>(n()), 0);
    for (const auto& e : edges_) {
        if (e.mark_a == Mark::tail && e.mark_b == Mark::arrow)
            ++indegree[static_cast<std::size_t>(e.b)];
        else if (e.mark_a == Mark::arrow && e.mark_b == Mark::tail)
            ++indegree[static_cast<std::size_t>(e.a)];
    }
    std::queue<Index> q;
    for (Index v = 0; v < n(); ++v)
        if (indegree[static_cast<std::size_t>(v)] == 0) q.push(v);
    Index seen = 0;
    while (!q.empty()) {
        const Index v = q.front();
        q.pop();
        ++seen;
        for (const auto& e : edges_) {
            Index from = -1, to = -1;
            if (e.mark_a == Mark::tail && e.mark_b == Mark::arrow) {
                from = e.a;
                to = e.b;
            } else if (e.mark_a == Mark::arrow && e.mark_b == Mark::tail) {
                from = e.b;
                to = e.a;
            } else {
                continue;
            }
            if (from == v && --indegree[static_cast<std::size_t>(to)] == 0)
                q.push(to);
        }
    }
    return seen == n();
}

void MixedGraph::validate() const {
    for (const auto& e : edges_) {
        if (e.a < 0 || e.b >= n() || e.a >= e.b)
            throw Error("edge endpoints out of range");
        if (kind_ == GraphKind::cpdag &&
            (e.mark_a == Mark::circle || e.mark_b == Mark::circle))
            throw Error("cpdag cannot carry circle marks");
        if (kind_ == GraphKind::weighted_dag) {
            const bool directed =
                (e.mark_a == Mark::tail && e.mark_b == Mark::arrow) ||
                (e.mark_a == Mark::arrow && e.mark_b == Mark::tail);
            if (!directed) throw Error("weighted_dag edges must be tail->arrow");
            if (!e.has_weight()) throw Error("weighted_dag edges must carry weights");
        }
    }
    if (kind_ == GraphKind::weighted_dag && !acyclic())
        throw Error("weighted_dag contains a directed cycle");
}

bool MixedGraph::operator==(const MixedGraph& other) const {
    if (vertices_ != other.vertices_ || kind_ != other.kind_) return false;
    if (edges_.size() != other.edges_.size()) return false;
    auto sorted = [](std::vector<MixedEdge> es) {
        std::sort(es.begin(), es.end(), [](const MixedEdge& x, const MixedEdge& y) {
            return std::tie(x.a, x.b) < std::tie(y.a, y.b);
        });
        return es;
    };
    const auto mine = sorted(edges_);
    const auto theirs = sorted(other.edges_);
    for (std::size_t i = 0; i < mine.size(); ++i) {
        const auto& x = mine[i];
        const auto& y = theirs[i];
        const bool weights_equal =
            (!x.has_weight() && !y.has_weight()) ||
            (x.has_weight() && y.has_weight() && x.weight == y.weight);
        if (x.a != y.a || x.b != y.b || x.mark_a != y.mark_a ||
            x.mark_b != y.mark_b || !weights_equal)
            return false;
    }
    return true;
}

namespace {

const char* dot_style(Mark m) {
    switch (m) {
        case Mark::arrow: return "normal";
        case Mark::tail: return "none";
        case Mark::circle: return "odot";
    }
    return "none";
}

std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

}  // namespace

std::string to_dot(const MixedGraph& g, const std::string& name) {
    std::ostringstream os;
    os << "digraph " << name << " {\n";
    for (const auto& v : g.vertices()) os << "  " << quote(v) << ";\n";
    for (const auto& e : g.edges()) {
        os << "  " << quote(g.vertices()[static_cast<std::size_t>(e.a)]) << " -> "
           << quote(g.vertices()[static_cast<std::size_t>(e.b)]) << " [dir=both, arrowtail="
           << dot_style(e.mark_a) << ", arrowhead=" << dot_style(e.mark_b);
        if (e.has_weight()) {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%.2f", e.weight);
            os << ", label=\"" << buf << "\"";
        }
        os << "];\n";
    }
    os << "}\n";
    return os.str();
}

void export_dot(const MixedGraph& g, const std::string& path,
                const std::string& name) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << to_dot(g, name);
}

std::string graph_to_json(const MixedGraph& g) {
    nlohmann::json j;
    j["kind"] = to_string(g.kind());
    j["vertices"] = g.vertices();
    j["edges"] = nlohmann::json::array();
    for (const auto& e : g.edges()) {
        nlohmann::json je = {{"a", g.vertices()[static_cast<std::size_t>(e.a)]},
                             {"b", g.vertices()[static_cast<std::size_t>(e.b)]},
                             {"mark_a", to_string(e.mark_a)},
                             {"mark_b", to_string(e.mark_b)}};
        if (e.has_weight()) je["weight"] = e.weight;
        j["edges"].push_back(je);
    }
    return j.dump(2) + "\n";
}

MixedGraph graph_from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    MixedGraph g(graph_kind_from_string(j.at("kind").get<std::string>()),
                 j.at("vertices").get<std::vector<std::string>>());
    auto index_of = [&](const std::string& v) {
        for (Index i = 0; i < g.n(); ++i)
            if (g.vertices()[static_cast<std::size_t>(i)] == v) return i;
        throw Error("unknown vertex in edge list: " + v);
    };
    for (const auto& je : j.at("edges")) {
        const double w = je.contains("weight")
                             ? je.at("weight").get<double>()
                             : std::numeric_limits<double>::quiet_NaN();
        g.add_edge(index_of(je.at("a").get<std::string>()),
                   index_of(je.at("b").get<std::string>()),
                   mark_from_string(je.at("mark_a").get<std::string>()),
                   mark_from_string(je.at("mark_b").get<std::string>()), w);
    }
    return g;
}

void export_graph_json(const MixedGraph& g, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << graph_to_json(g);
}

}  // namespace dagfault
