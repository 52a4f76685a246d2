#ifndef DAGFAULT_PC_HPP_
#define DAGFAULT_PC_HPP_

#include <map>
#include <string>
#include <vector>

#include "dagfault/citest.hpp"
#include "dagfault/graph.hpp"

namespace dagfault {

struct CausalConfig {
    /// Largest conditioning set searched during skeleton pruning
    /// (and possible-d-sep pruning for FCI); -1 removes the cap.
    int max_cond_size = 3;
};

/// Conditioning set that separated an unordered pair during the skeleton
/// phase; also consulted by the orientation rules.
class SepsetTable {
public:
    void set(Index a, Index b, std::vector<Index> s);
    bool has(Index a, Index b) const;
    const std::vector<Index>& get(Index a, Index b) const;
    bool contains(Index a, Index b, Index v) const;

private:
    std::map<std::pair<Index, Index>, std::vector<Index>> sets_;
};

struct SkeletonResult {
    MixedGraph graph;  // undirected: every edge tail-tail
    SepsetTable sepsets;
    /// Frozen adjacency sets per depth are order-independent; callers can
    /// rely on identical output for any pair enumeration order.
};

/// Stable (order-independent) fast adjacency search: starts complete,
/// removes edges whose endpoints turn independent given subsets of the
/// depth-frozen neighborhoods.
SkeletonResult fas_stable(const CITest& test, const CausalConfig& cfg,
                          const std::vector<std::string>& names = {});

/// Meek rules R1-R3 applied to a fixpoint.
void meek_closure(MixedGraph& g);

/// PC-stable: skeleton, unshielded-collider orientation from sepsets,
/// then the Meek closure. Output kind: cpdag.
MixedGraph pc(const CITest& test, const CausalConfig& cfg,
              const std::vector<std::string>& names = {});
MixedGraph pc(const Matrix& data, double alpha, const CausalConfig& cfg = {},
              const std::vector<std::string>& names = {});

}  // namespace dagfault

#endif  // DAGFAULT_PC_HPP_
