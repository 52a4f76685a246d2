#ifndef DAGFAULT_GBT_HPP_
#define DAGFAULT_GBT_HPP_

#include <vector>

#include "dagfault/rng.hpp"
#include "dagfault/types.hpp"

namespace dagfault {

/// Regression tree node; leaf iff feature < 0, then `weight` is the leaf
/// value. Internal nodes route x[feature] < threshold to `left`.
struct GbtNode {
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double weight = 0.0;
};

struct GbtTree {
    std::vector<GbtNode> nodes;

    double predict_row(const RowVector& x) const;
    int depth() const;
};

struct GbtConfig {
    double learning_rate = 0.1;
    int max_depth = 3;
    int n_estimators = 100;
    double subsample = 1.0;
    double min_child_weight = 1.0;
    double gamma = 0.0;
    static constexpr double kLambda = 1.0;  // L2 on leaf weights
};

/// One-vs-rest additive ensemble: trees[round][class] fit on softmax
/// gradients g = p - y and hessians h = p (1 - p) with exact greedy splits.
struct GbtParams {
    std::vector<std::vector<GbtTree>> trees;
    double learning_rate = 0.1;
    Index n_classes = 0;
};

Matrix gbt_margins(const GbtParams& p, const Matrix& X);
Matrix gbt_proba(const GbtParams& p, const Matrix& X);

/// loss_curve, when given, receives the full-train cross-entropy after
/// every boosting round.
GbtParams gbt_train(const GbtConfig& cfg, const Matrix& X,
                    const std::vector<Index>& y, Index n_classes,
                    std::uint64_t seed, std::vector<double>* loss_curve = nullptr);

}  // namespace dagfault

#endif  // DAGFAULT_GBT_HPP_
