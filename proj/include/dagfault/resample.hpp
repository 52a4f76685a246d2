#ifndef DAGFAULT_RESAMPLE_HPP_
#define DAGFAULT_RESAMPLE_HPP_

#include <map>

#include "dagfault/dataset.hpp"
#include "dagfault/types.hpp"

namespace dagfault {

class TooFewSamples : public Error {
public:
    TooFewSamples(ClassId cls, Index needed)
        : Error("class " + std::to_string(cls) + " needs more than " +
                std::to_string(needed) + " samples for SMOTE"),
          cls(cls) {}
    ClassId cls;
};

class TargetExceedsCount : public Error {
public:
    TargetExceedsCount()
        : Error("undersampling target exceeds current majority count") {}
};

/// Two-stage rebalancing plan: synthetic oversampling targets per class,
/// then a random undersampling target for the majority class.
struct ResamplePlan {
    int smote_k = 5;
    std::map<ClassId, Index> oversample_targets;  // absent class: untouched
    Index majority_target = -1;                   // -1: no undersampling
    std::uint64_t seed = 0;
};

/// Default mirrors the declared ratios: each minority class is raised to
/// twice the median minority count, the majority is cut to twice the
/// largest post-oversampling minority count.
ResamplePlan default_plan(const Dataset& ds, std::uint64_t seed);

/// Synthetic minority oversampling: each synthetic row lies on the segment
/// between a minority row and one of its smote_k same-class nearest
/// neighbors (Euclidean distance on z-scored features, interpolation in the
/// original feature space). Originals are preserved; synthetics are
/// appended grouped by ascending class id.
Dataset smote(const Dataset& ds, const ResamplePlan& plan);

/// Keeps a uniform without-replacement subset of the majority class
/// (original row order); all other rows untouched.
Dataset random_undersample(const Dataset& ds, const ResamplePlan& plan);

/// smote then random_undersample; logs a per-class count report.
Dataset rebalance(const Dataset& ds, const ResamplePlan& plan);

}  // namespace dagfault

#endif  // DAGFAULT_RESAMPLE_HPP_
