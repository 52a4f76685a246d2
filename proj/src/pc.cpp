#include "dagfault/pc.hpp"

#include <algorithm>
#include <numeric>

#include "dagfault/sem.hpp"

namespace dagfault {

void SepsetTable::set(Index a, Index b, std::vector<Index> s) {
    if (a > b) std::swap(a, b);
    std::sort(s.begin(), s.end());
    sets_[{a, b}] = std::move(s);
}

bool SepsetTable::has(Index a, Index b) const {
    if (a > b) std::swap(a, b);
    return sets_.count({a, b}) > 0;
}

const std::vector<Index>& SepsetTable::get(Index a, Index b) const {
    if (a > b) std::swap(a, b);
    return sets_.at({a, b});
}

bool SepsetTable::contains(Index a, Index b, Index v) const {
    if (!has(a, b)) return false;
    const auto& s = get(a, b);
    return std::binary_search(s.begin(), s.end(), v);
}

namespace {

// Lexicographic subset-of-size enumeration over `pool`.
bool next_combination(std::vector<Index>& comb, Index pool_size) {
    const Index k = static_cast<Index>(comb.size());
    Index i = k - 1;
    while (i >= 0 && comb[static_cast<std::size_t>(i)] == pool_size - k + i) --i;
    if (i < 0) return false;
    ++comb[static_cast<std::size_t>(i)];
    for (Index j = i + 1; j < k; ++j)
        comb[static_cast<std::size_t>(j)] = comb[static_cast<std::size_t>(j - 1)] + 1;
    return true;
}

}  // namespace

SkeletonResult fas_stable(const CITest& test, const CausalConfig& cfg,
                          const std::vector<std::string>& names) {
    const Index d = test.n_variables();
    SkeletonResult res{MixedGraph(GraphKind::cpdag,
                                  names.empty() ? default_names(d) : names),
                       {}};
    auto& g = res.graph;
    for (Index a = 0; a < d; ++a)
        for (Index b = a + 1; b < d; ++b) g.add_edge(a, b, Mark::tail, Mark::tail);

    const Index cap = cfg.max_cond_size < 0 ? d : cfg.max_cond_size;
    for (Index depth = 0; depth <= cap; ++depth) {
        // Freeze adjacency sets for this depth so removals within the
        // level cannot influence later tests (stable variant).
        std::vector<std::vector<Index>> frozen(static_cast<std::size_t>(d));
        bool any_candidate = false;
        for (Index v = 0; v < d; ++v) {
            frozen[static_cast<std::size_t>(v)] = g.neighbors(v);
            if (static_cast<Index>(frozen[static_cast<std::size_t>(v)].size()) >
                depth)
                any_candidate = true;
        }
        if (!any_candidate) break;

        for (Index a = 0; a < d; ++a) {
            for (Index b = 0; b < d; ++b) {
                if (a == b || !g.adjacent(a, b)) continue;
                std::vector<Index> pool;
                for (Index v : frozen[static_cast<std::size_t>(a)])
                    if (v != b) pool.push_back(v);
                if (static_cast<Index>(pool.size()) < depth) continue;

                std::vector<Index> comb(static_cast<std::size_t>(depth));
                std::iota(comb.begin(), comb.end(), 0);
                bool removed = false;
                do {
                    std::vector<Index> S;
                    for (Index idx : comb)
                        S.push_back(pool[static_cast<std::size_t>(idx)]);
                    if (test.test(a, b, S).independent) {
                        g.remove_edge(a, b);
                        res.sepsets.set(a, b, S);
                        removed = true;
                        break;
                    }
                } while (depth > 0 && next_combination(comb, static_cast<Index>(pool.size())));
                if (removed) continue;
            }
        }
    }
    return res;
}

namespace {

bool is_undirected(const MixedGraph& g, Index a, Index b) {
    return g.adjacent(a, b) && g.mark_at(b, a) == Mark::tail &&
           g.mark_at(a, b) == Mark::tail;
}

// Collider orientation: for unshielded a - k - b with k outside
// sepset(a, b), point both arrowheads at k.
void orient_colliders(MixedGraph& g, const SepsetTable& sepsets) {
    const Index d = g.n();
    for (Index k = 0; k < d; ++k) {
        const auto nbrs = g.neighbors(k);
        for (std::size_t x = 0; x < nbrs.size(); ++x) {
            for (std::size_t y = x + 1; y < nbrs.size(); ++y) {
                const Index a = nbrs[x], b = nbrs[y];
                if (g.adjacent(a, b)) continue;
                if (sepsets.contains(a, b, k)) continue;
                g.set_mark(a, k, Mark::arrow);
                g.set_mark(b, k, Mark::arrow);
            }
        }
    }
}

}  // namespace

void meek_closure(MixedGraph& g) {
    const Index d = g.n();
    bool changed = true;
    while (changed) {
        changed = false;
        for (Index a = 0; a < d; ++a) {
            for (Index b = 0; b < d; ++b) {
                if (a == b || !is_undirected(g, a, b)) continue;

                bool orient = false;
                // R1: c -> a, a - b, c and b nonadjacent  =>  a -> b.
                for (Index c = 0; c < d && !orient; ++c)
                    if (c != a && c != b && g.is_directed(c, a) && !g.adjacent(c, b))
                        orient = true;
                // R2: a -> c -> b with a - b  =>  a -> b.
                for (Index c = 0; c < d && !orient; ++c)
                    if (c != a && c != b && g.is_directed(a, c) && g.is_directed(c, b))
                        orient = true;
                // R3: a - c -> b, a - e -> b, c and e nonadjacent  =>  a -> b.
                for (Index c = 0; c < d && !orient; ++c) {
                    if (c == a || c == b) continue;
                    if (!is_undirected(g, a, c) || !g.is_directed(c, b)) continue;
                    for (Index e = c + 1; e < d && !orient; ++e) {
                        if (e == a || e == b) continue;
                        if (!is_undirected(g, a, e) || !g.is_directed(e, b)) continue;
                        if (!g.adjacent(c, e)) orient = true;
                    }
                }
                if (orient) {
                    g.set_mark(b, a, Mark::tail);
                    g.set_mark(a, b, Mark::arrow);
                    changed = true;
                }
            }
        }
    }
}

MixedGraph pc(const CITest& test, const CausalConfig& cfg,
              const std::vector<std::string>& names) {
    SkeletonResult skel = fas_stable(test, cfg, names);
    orient_colliders(skel.graph, skel.sepsets);
    meek_closure(skel.graph);
    return skel.graph;
}

MixedGraph pc(const Matrix& data, double alpha, const CausalConfig& cfg,
              const std::vector<std::string>& names) {
    FisherZ test(data, alpha);
    return pc(test, cfg, names);
}

}  // namespace dagfault
