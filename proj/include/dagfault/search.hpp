#ifndef DAGFAULT_SEARCH_HPP_
#define DAGFAULT_SEARCH_HPP_

#include <string>
#include <utility>
#include <vector>

#include "dagfault/metrics.hpp"
#include "dagfault/model.hpp"
#include "dagfault/resample.hpp"

namespace dagfault {

/// Per-key candidate grids sampled uniformly and independently.
struct SearchSpace {
    ModelKind kind = ModelKind::knn;
    std::map<std::string, std::vector<HyperValue>> grid;
    int n_iter = 20;
    std::string objective = "f1_macro";  // also: "bacc", "acc"
};

SearchSpace default_search_space(ModelKind kind);

struct SearchResult {
    ModelSpec best;
    std::vector<std::pair<ModelSpec, double>> table;  // evaluation order
};

/// Samples n_iter distinct specs (duplicates redrawn up to a retry cap),
/// scores each by stratified k-fold cross-validation with fold-train
/// rebalancing, and returns the argmax. Candidates get sub-seeds derived
/// from (seed, candidate index) so parallel and serial runs rank alike.
/// A failing fit contributes score -inf instead of aborting the search.
SearchResult random_search(const SearchSpace& space, const Dataset& train, int k,
                           const ResamplePlan& plan, std::uint64_t seed,
                           int threads = 1);

}  // namespace dagfault

#endif  // DAGFAULT_SEARCH_HPP_
