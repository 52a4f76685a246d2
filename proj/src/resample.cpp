#include "dagfault/resample.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "dagfault/log.hpp"
#include "dagfault/rng.hpp"

namespace dagfault {

ResamplePlan default_plan(const Dataset& ds, std::uint64_t seed) {
    ResamplePlan plan;
    plan.seed = seed;
    const auto hist = ds.class_histogram();
    if (hist.size() < 2) return plan;

    ClassId majority = hist.begin()->first;
    Index majority_count = 0;
    for (const auto& [c, n] : hist)
        if (n > majority_count) {
            majority = c;
            majority_count = n;
        }

    std::vector<Index> minority_counts;
    for (const auto& [c, n] : hist)
        if (c != majority) minority_counts.push_back(n);
    std::sort(minority_counts.begin(), minority_counts.end());
    const Index median = minority_counts[minority_counts.size() / 2];

    Index largest_target = 0;
    for (const auto& [c, n] : hist) {
        if (c == majority) continue;
        const Index target = std::max(n, 2 * median);
        plan.oversample_targets[c] = target;
        largest_target = std::max(largest_target, target);
    }
    plan.majority_target = std::min(majority_count, 2 * largest_target);
    return plan;
}

namespace {

struct ClassRows {
    std::vector<Index> rows;
};

}  // namespace

Dataset smote(const Dataset& ds, const ResamplePlan& plan) {
    if (plan.smote_k < 1) throw Error("smote_k must be >= 1");
    for (const auto& [cls, target] : plan.oversample_targets) {
        (void)cls;
        if (target < 0) throw Error("oversample target must be >= 0");
    }

    std::map<ClassId, ClassRows> by;
    for (Index i = 0; i < ds.n_rows(); ++i)
        by[ds.labels[static_cast<std::size_t>(i)]].rows.push_back(i);

    // Neighbor search happens on standardized features for distance
    // comparability; interpolation uses the original values (the segment
    // relation is affine-invariant either way).
    const Scaler scaler = fit_scaler(ds);
    const Matrix std_values = apply_scaler(scaler, ds.values);

    std::vector<std::pair<Vector, ClassId>> synthetic;
    Rng rng(derive_seed(plan.seed, hash_label("smote")));

    for (const auto& [cls, target] : plan.oversample_targets) {
        auto it = by.find(cls);
        const Index have = it == by.end() ? 0 : static_cast<Index>(it->second.rows.size());
        if (target <= have) {
            if (target < have)
                throw Error("oversample target below current count for class " +
                            std::to_string(cls));
            continue;
        }
        if (have <= plan.smote_k) throw TooFewSamples(cls, plan.smote_k);

        const auto& rows = it->second.rows;
        const Index m = have;

        // Pairwise distances within the class, standardized space.
        Matrix pts(m, ds.n_cols());
        for (Index r = 0; r < m; ++r)
            pts.row(r) = std_values.row(rows[static_cast<std::size_t>(r)]);
        Matrix d2(m, m);
        for (Index a = 0; a < m; ++a)
            d2.row(a) = (pts.rowwise() - pts.row(a)).rowwise().squaredNorm().transpose();

        // smote_k nearest same-class neighbors per row (self excluded);
        // ties broken by row index so results are order-stable.
        std::vector<std::vector<Index>> knn(static_cast<std::size_t>(m));
        for (Index a = 0; a < m; ++a) {
            std::vector<Index> order(static_cast<std::size_t>(m));
            std::iota(order.begin(), order.end(), 0);
            std::sort(order.begin(), order.end(), [&](Index x, Index y) {
                if (d2(a, x) != d2(a, y)) return d2(a, x) < d2(a, y);
                return x < y;
            });
            for (Index t = 0; t < m && static_cast<Index>(knn[static_cast<std::size_t>(a)].size()) < plan.smote_k; ++t)
                if (order[static_cast<std::size_t>(t)] != a)
                    knn[static_cast<std::size_t>(a)].push_back(order[static_cast<std::size_t>(t)]);
        }

        for (Index s = 0; s < target - have; ++s) {
            const Index a = static_cast<Index>(rng.below(static_cast<std::uint64_t>(m)));
            const auto& nns = knn[static_cast<std::size_t>(a)];
            const Index z = nns[rng.below(nns.size())];
            const double u = rng.uniform_closed();
            const Vector x = ds.values.row(rows[static_cast<std::size_t>(a)]);
            const Vector zv = ds.values.row(rows[static_cast<std::size_t>(z)]);
            synthetic.emplace_back(x + u * (zv - x), cls);
        }
    }

    Dataset out;
    out.variables = ds.variables;
    out.values.resize(ds.n_rows() + static_cast<Index>(synthetic.size()), ds.n_cols());
    out.values.topRows(ds.n_rows()) = ds.values;
    out.labels = ds.labels;
    for (std::size_t s = 0; s < synthetic.size(); ++s) {
        out.values.row(ds.n_rows() + static_cast<Index>(s)) = synthetic[s].first;
        out.labels.push_back(synthetic[s].second);
    }
    return out;
}

Dataset random_undersample(const Dataset& ds, const ResamplePlan& plan) {
    if (plan.majority_target < 0) return ds;
    const auto hist = ds.class_histogram();
    ClassId majority = hist.begin()->first;
    Index majority_count = 0;
    for (const auto& [c, n] : hist)
        if (n > majority_count) {
            majority = c;
            majority_count = n;
        }
    if (plan.majority_target > majority_count) throw TargetExceedsCount();
    if (plan.majority_target == majority_count) return ds;

    std::vector<Index> majority_rows;
    for (Index i = 0; i < ds.n_rows(); ++i)
        if (ds.labels[static_cast<std::size_t>(i)] == majority)
            majority_rows.push_back(i);

    Rng rng(derive_seed(plan.seed, hash_label("undersample")));
    rng.shuffle(majority_rows);
    majority_rows.resize(static_cast<std::size_t>(plan.majority_target));
    std::sort(majority_rows.begin(), majority_rows.end());

    std::vector<Index> keep;
    std::size_t next = 0;
    for (Index i = 0; i < ds.n_rows(); ++i) {
        if (ds.labels[static_cast<std::size_t>(i)] == majority) {
            if (next < majority_rows.size() && majority_rows[next] == i) {
                keep.push_back(i);
                ++next;
            }
        } else {
            keep.push_back(i);
        }
    }
    return ds.select_rows(keep);
}

Dataset rebalance(const Dataset& ds, const ResamplePlan& plan) {
    const auto before = ds.class_histogram();
    Dataset out = random_undersample(smote(ds, plan), plan);
    const auto after = out.class_histogram();
    std::ostringstream report;
    report << "rebalance:";
    for (const auto& [c, n] : after) {
        const auto it = before.find(c);
        report << " class " << c << ": " << (it == before.end() ? 0 : it->second)
               << "->" << n;
    }
    log::info(report.str());
    return out;
}

}  // namespace dagfault
