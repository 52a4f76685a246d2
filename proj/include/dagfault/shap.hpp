#ifndef DAGFAULT_SHAP_HPP_
#define DAGFAULT_SHAP_HPP_

#include <functional>
#include <string>
#include <vector>

#include "dagfault/dataset.hpp"
#include "dagfault/model.hpp"
#include "dagfault/types.hpp"

namespace dagfault {

class EmptyBackground : public Error {
public:
    EmptyBackground() : Error("shap background is empty") {}
};

class BudgetTooSmall : public Error {
public:
    BudgetTooSmall(Index got, Index need)
        : Error("coalition budget " + std::to_string(got) + " below minimum " +
                std::to_string(need)) {}
};

class MTooLarge : public Error {
public:
    MTooLarge(Index m, Index have)
        : Error("cannot select top " + std::to_string(m) + " of " +
                std::to_string(have) + " features") {}
};

struct CoalitionBudget {
    Index budget = 2048;         // sampled coalitions above the exact threshold
    Index exact_threshold = 15;  // enumerate all 2^M when M <= this
    std::uint64_t seed = 0;
};

/// Batch scoring function: one scalar model output per input row.
using ScoreFn = std::function<Vector(const Matrix&)>;

struct ShapVector {
    Vector phi;
    double base_value = 0;  // expected score over the background
    double fx = 0;          // score of the explained row
    bool exact = false;
};

/// Shapley attribution of f at x with interventional (marginal) masking:
/// features outside a coalition are imputed by averaging f over background
/// rows. At M <= exact_threshold all 2^M coalitions are enumerated and phi
/// is the exact Shapley value; otherwise `budget` coalitions are drawn
/// with the Shapley kernel weight M-1 / (C(M,s) s (M-s)) and phi solves
/// the weighted least squares under the efficiency constraint.
ShapVector shap_explain_fn(const ScoreFn& f, const RowVector& x,
                           const Matrix& background, const CoalitionBudget& budget);

/// Model adapter: explains predict_proba(., target_class).
ShapVector shap_explain(const TrainedModel& model, const RowVector& x,
                        const Dataset& background, ClassId target_class,
                        const CoalitionBudget& budget);

struct ShapMatrix {
    Matrix values;                        // n_explained x n_features
    Vector base_values;                   // per explained row
    std::vector<ClassId> explained_class; // the model's predicted class per row
    std::vector<VariableInfo> features;
};

/// One shap_explain per sample row, explaining the model's predicted
/// class. Row sub-seeds hash the row contents, so duplicated rows get
/// identical attributions even in sampled mode.
ShapMatrix shap_matrix(const TrainedModel& model, const Dataset& sample,
                       const Dataset& background, const CoalitionBudget& budget,
                       int threads = 1);

struct Ranking {
    struct Item {
        VariableInfo variable;
        Index index = 0;       // column in the explained feature order
        double importance = 0; // mean |phi|
    };
    std::vector<Item> items;  // non-increasing importance
};

Ranking rank_features(const ShapMatrix& sm);

struct VariableSubset {
    std::vector<Index> indices;  // into the ranking's feature order
    std::vector<VariableInfo> variables;
};

VariableSubset select_top(const Ranking& r, Index m);

std::string ranking_to_json(const Ranking& r);

/// Horizontal bar chart of the top `top_n` features, descending.
std::string ranking_to_svg(const Ranking& r, Index top_n = 15);

}  // namespace dagfault

#endif  // DAGFAULT_SHAP_HPP_
