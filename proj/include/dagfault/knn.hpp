#ifndef DAGFAULT_KNN_HPP_
#define DAGFAULT_KNN_HPP_

#include <string>
#include <vector>

#include "dagfault/types.hpp"

namespace dagfault {

/// Memorized standardized training set. Brute-force neighbor search;
/// leaf_size and p are retained as inert metadata (the metric string is
/// what selects the distance).
struct KnnParams {
    Matrix train;                 // standardized rows
    std::vector<ClassId> labels;
    int k = 5;
    std::string weights = "uniform";   // "uniform" | "distance"
    std::string metric = "manhattan";  // "manhattan" | "euclidean"
    double p = 2.0;
    int leaf_size = 20;
};

/// Vote-fraction probabilities over `classes` (ascending). X must already
/// be standardized with the model's scaler.
Matrix knn_proba(const KnnParams& params, const std::vector<ClassId>& classes,
                 const Matrix& X);

}  // namespace dagfault

#endif  // DAGFAULT_KNN_HPP_
