#ifndef DAGFAULT_SEM_HPP_
#define DAGFAULT_SEM_HPP_

#include <string>
#include <vector>

#include "dagfault/dataset.hpp"
#include "dagfault/graph.hpp"
#include "dagfault/rng.hpp"
#include "dagfault/types.hpp"

namespace dagfault {

/// Linear structural equation model x = B^T x + e with B(i,j) the weight
/// of edge i -> j (so B is strictly upper triangular in `order`).
struct LinearSem {
    Matrix weights;              // d x d, weights(i, j) = coefficient of i -> j
    std::vector<Index> order;    // causal (topological) order
    std::string noise = "uniform";  // "uniform" | "gaussian" | "laplace"
};

/// Random DAG with the given edge probability; weights uniform on
/// +-[0.5, 1.5].
LinearSem random_sem(Index d, double edge_prob, const std::string& noise, Rng& rng);

/// n samples in row-major (sample x variable) layout. Noise is unit-scale.
Matrix sample_sem(const LinearSem& sem, Index n, Rng& rng);

MixedGraph sem_graph(const LinearSem& sem, const std::vector<std::string>& names = {});

std::vector<std::string> default_names(Index d);

/// Labeled classification fixture: a SEM base signal over `schema`
/// variables plus class-specific mean shifts on a sparse variable subset
/// per fault class. Class 0 is the unshifted majority.
Dataset synth_classification(const VariableSchema& schema, Index n_normal,
                             Index n_per_fault, int n_faults, std::uint64_t seed);

}  // namespace dagfault

#endif  // DAGFAULT_SEM_HPP_
