#ifndef DAGFAULT_METRICS_HPP_
#define DAGFAULT_METRICS_HPP_

#include <string>
#include <vector>

#include "dagfault/dataset.hpp"
#include "dagfault/types.hpp"

namespace dagfault {

struct ModelSpec;
struct ResamplePlan;

class UnknownLabel : public Error {
public:
    explicit UnknownLabel(ClassId c)
        : Error("label not in class set: " + std::to_string(c)) {}
};

class ScoresMissingForAUC : public Error {
public:
    ScoresMissingForAUC() : Error("per-class scores are required for AUC") {}
};

/// Row = true class, column = predicted class.
struct ConfusionMatrix {
    std::vector<ClassId> classes;               // ascending
    Eigen::MatrixXi counts;

    Index total() const { return counts.sum(); }
    Index index_of(ClassId c) const;
};

ConfusionMatrix confusion(const std::vector<ClassId>& y_true,
                          const std::vector<ClassId>& y_pred);
ConfusionMatrix confusion(const std::vector<ClassId>& y_true,
                          const std::vector<ClassId>& y_pred,
                          const std::vector<ClassId>& classes);

struct MetricSet {
    double acc = 0, bacc = 0, precision = 0, recall = 0, f1 = 0, auc = 0;
    /// Number of per-class terms that hit a zero denominator and were
    /// defined as 0 (conservative convention, avoids NaN propagation).
    int zero_denominator_terms = 0;

    double by_name(const std::string& name) const;
};

/// With exactly two classes the positive class is the larger id and the
/// literal binary formulas apply; with more classes precision/recall/F1
/// are macro-averaged one-vs-rest, bacc is mean per-class recall, and AUC
/// is the macro one-vs-rest rank (Mann-Whitney) area with ties counted half.
MetricSet compute_metrics(const ConfusionMatrix& cm, const Matrix& scores,
                          const std::vector<ClassId>& y_true);

/// Overload without scores: throws ScoresMissingForAUC.
MetricSet compute_metrics(const ConfusionMatrix& cm);

/// Rank-based binary AUC; `positive` marks the positive sample mask.
double binary_auc(const Vector& scores, const std::vector<bool>& positive);

/// Reference ROC integration (threshold sweep + trapezoid); used by tests
/// as the independent oracle for the rank formulation.
double binary_auc_trapezoid(const Vector& scores, const std::vector<bool>& positive);

struct MetricSummary {
    std::vector<MetricSet> folds;
    MetricSet mean;
    MetricSet stddev;   // sample std over folds (n-1)
    int n_folds = 0;
};

MetricSummary summarize_folds(const std::vector<MetricSet>& folds);

/// Stratified k-fold cross-validation: each fold-train is rebalanced per
/// `plan`, the model is fit on it and evaluated on the untouched
/// fold-validation rows.
MetricSummary cross_validate(const ModelSpec& spec, const Dataset& ds, int k,
                             const ResamplePlan& plan, std::uint64_t seed,
                             int threads = 1);

std::string metrics_to_json(const MetricSummary& s);
/// Aligned-text row, "0.872±0.006" style.
std::string metrics_to_table_row(const std::string& label, const MetricSummary& s);

}  // namespace dagfault

#endif  // DAGFAULT_METRICS_HPP_
