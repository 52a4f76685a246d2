#include <doctest.h>

#include <algorithm>

#include "dagfault/resample.hpp"
#include "dagfault/rng.hpp"

using namespace dagfault;

namespace {

Dataset make_dataset(const Matrix& values, const std::vector<ClassId>& labels) {
    Dataset ds;
    for (Index j = 0; j < values.cols(); ++j)
        ds.variables.push_back({"V" + std::to_string(j), "", "",
                                VariableKind::continuous_measurement});
    ds.values = values;
    ds.labels = labels;
    return ds;
}

Dataset random_blob(const std::vector<std::pair<ClassId, Index>>& sizes, Index d,
                    std::uint64_t seed) {
    Rng rng(seed);
    Index n = 0;
    for (const auto& [c, k] : sizes) n += k;
    Matrix values(n, d);
    std::vector<ClassId> labels;
    Index row = 0;
    for (const auto& [c, k] : sizes)
        for (Index i = 0; i < k; ++i, ++row) {
            for (Index j = 0; j < d; ++j)
                values(row, j) = rng.normal() + static_cast<double>(c);
            labels.push_back(c);
        }
    return make_dataset(values, labels);
}

// Distance from point s to segment [x, z].
double segment_distance(const Vector& s, const Vector& x, const Vector& z) {
    const Vector dir = z - x;
    const double len2 = dir.squaredNorm();
    if (len2 == 0.0) return (s - x).norm();
    const double t = std::clamp((s - x).dot(dir) / len2, 0.0, 1.0);
    return (s - (x + t * dir)).norm();
}

// Brute-force oracle: the synthetic point must sit on a segment between
// some minority row and one of its k nearest same-class neighbors.
double min_segment_distance(const Vector& s, const Matrix& minority, int k) {
    const Index m = minority.rows();
    double best = std::numeric_limits<double>::infinity();
    for (Index a = 0; a < m; ++a) {
        std::vector<std::pair<double, Index>> d;
        for (Index b = 0; b < m; ++b)
            if (b != a)
                d.emplace_back((minority.row(b) - minority.row(a)).norm(), b);
        std::sort(d.begin(), d.end());
        for (int t = 0; t < k && t < static_cast<int>(d.size()); ++t)
            best = std::min(best, segment_distance(s, minority.row(a),
                                                   minority.row(d[static_cast<std::size_t>(t)].second)));
    }
    return best;
}

}  // namespace

TEST_CASE("smote on identical points reproduces the originals") {
    Matrix values(5, 2);
    values << 9, 9, 9.5, 9.5, 2, 3, 2, 3, 7, 7;
    // class 0: rows 0,1,4 ; class 1: rows 2,3 identical
    const auto ds = make_dataset(values, {0, 0, 1, 1, 0});
    ResamplePlan plan;
    plan.smote_k = 1;
    plan.oversample_targets[1] = 4;
    plan.seed = 5;
    const auto out = smote(ds, plan);
    CHECK(out.n_rows() == 7);
    for (Index i = 5; i < 7; ++i) {
        CHECK(out.labels[static_cast<std::size_t>(i)] == 1);
        CHECK(out.values(i, 0) == doctest::Approx(2.0));
        CHECK(out.values(i, 1) == doctest::Approx(3.0));
    }
}

TEST_CASE("smote synthetic lies on the segment between the two points") {
    Matrix values(5, 2);
    values << 0, 0, 1, 1, 5, 5, 6, 6, 7, 7;
    const auto ds = make_dataset(values, {1, 1, 0, 0, 0});
    ResamplePlan plan;
    plan.smote_k = 1;
    plan.oversample_targets[1] = 3;
    plan.seed = 17;
    const auto out = smote(ds, plan);
    REQUIRE(out.n_rows() == 6);
    const double u = out.values(5, 0);
    CHECK(out.values(5, 1) == doctest::Approx(u));  // on the diagonal segment
    CHECK(u >= 0.0);
    CHECK(u <= 1.0);
}

TEST_CASE("smote synthetics pass the brute-force segment oracle") {
    const auto ds = random_blob({{0, 40}, {1, 10}}, 3, 23);
    ResamplePlan plan;
    plan.smote_k = 5;
    plan.oversample_targets[1] = 30;
    plan.seed = 99;
    const auto out = smote(ds, plan);
    REQUIRE(out.n_rows() == 70);

    Matrix minority(10, 3);
    Index r = 0;
    for (Index i = 0; i < ds.n_rows(); ++i)
        if (ds.labels[static_cast<std::size_t>(i)] == 1)
            minority.row(r++) = ds.values.row(i);

    for (Index i = 50; i < 70; ++i) {
        CHECK(out.labels[static_cast<std::size_t>(i)] == 1);
        CHECK(min_segment_distance(out.values.row(i), minority, 5) < 1e-9);
    }
}

TEST_CASE("smote is deterministic and originals are preserved") {
    const auto ds = random_blob({{0, 30}, {2, 8}}, 4, 7);
    ResamplePlan plan;
    plan.smote_k = 3;
    plan.oversample_targets[2] = 20;
    plan.seed = 42;
    const auto a = smote(ds, plan);
    const auto b = smote(ds, plan);
    CHECK(a.values == b.values);
    CHECK(a.values.topRows(ds.n_rows()) == ds.values);
}

TEST_CASE("smote requires more than k samples") {
    const auto ds = random_blob({{0, 20}, {1, 4}}, 2, 3);
    ResamplePlan plan;
    plan.smote_k = 5;
    plan.oversample_targets[1] = 10;
    CHECK_THROWS_AS(smote(ds, plan), TooFewSamples);
}

TEST_CASE("random_undersample keeps counts and minority rows") {
    const auto ds = random_blob({{0, 100}, {1, 10}}, 2, 51);
    ResamplePlan plan;
    plan.majority_target = 50;
    plan.seed = 9;
    const auto out = random_undersample(ds, plan);
    const auto hist = out.class_histogram();
    CHECK(hist.at(0) == 50);
    CHECK(hist.at(1) == 10);

    // Minority rows untouched, in order.
    Index got = 0;
    for (Index i = 0; i < out.n_rows(); ++i)
        if (out.labels[static_cast<std::size_t>(i)] == 1) ++got;
    CHECK(got == 10);
}

TEST_CASE("random_undersample at current count is the identity") {
    const auto ds = random_blob({{0, 25}, {1, 10}}, 2, 4);
    ResamplePlan plan;
    plan.majority_target = 25;
    const auto out = random_undersample(ds, plan);
    CHECK(out.values == ds.values);
    CHECK(out.labels == ds.labels);
}

TEST_CASE("random_undersample seeds select different subsets") {
    const auto ds = random_blob({{0, 200}, {1, 5}}, 2, 31);
    ResamplePlan a, b;
    a.majority_target = b.majority_target = 40;
    a.seed = 1;
    b.seed = 2;
    const auto da = random_undersample(ds, a);
    const auto db = random_undersample(ds, b);
    CHECK(da.n_rows() == db.n_rows());
    CHECK(da.values != db.values);
}

TEST_CASE("random_undersample rejects targets above the count") {
    const auto ds = random_blob({{0, 10}, {1, 5}}, 2, 3);
    ResamplePlan plan;
    plan.majority_target = 11;
    CHECK_THROWS_AS(random_undersample(ds, plan), TargetExceedsCount);
}

TEST_CASE("rebalance composes counts as planned") {
    const auto ds = random_blob({{0, 500}, {1, 25}}, 3, 13);
    ResamplePlan plan;
    plan.smote_k = 5;
    plan.oversample_targets[1] = 100;
    plan.majority_target = 200;
    plan.seed = 77;
    const auto out = rebalance(ds, plan);
    const auto hist = out.class_histogram();
    CHECK(hist.at(0) == 200);
    CHECK(hist.at(1) == 100);
}

TEST_CASE("an empty plan is the identity") {
    const auto ds = random_blob({{0, 40}, {1, 12}}, 2, 8);
    ResamplePlan plan;
    const auto out = rebalance(ds, plan);
    CHECK(out.values == ds.values);
    CHECK(out.labels == ds.labels);
}

TEST_CASE("21-class rebalance hits the plan histogram exactly") {
    std::vector<std::pair<ClassId, Index>> sizes = {{0, 200}};
    for (ClassId c = 1; c <= 20; ++c) sizes.emplace_back(c, 20);
    const auto ds = random_blob(sizes, 4, 2024);

    ResamplePlan plan;
    plan.smote_k = 5;
    for (ClassId c = 1; c <= 20; ++c) plan.oversample_targets[c] = 100;
    plan.majority_target = 200;
    plan.seed = 6;
    const auto out = rebalance(ds, plan);
    const auto hist = out.class_histogram();
    CHECK(hist.at(0) == 200);
    for (ClassId c = 1; c <= 20; ++c) CHECK(hist.at(c) == 100);
}

TEST_CASE("synthetic labels equal their source class everywhere") {
    const auto ds = random_blob({{0, 60}, {3, 9}, {7, 11}}, 3, 15);
    ResamplePlan plan;
    plan.smote_k = 4;
    plan.oversample_targets[3] = 30;
    plan.oversample_targets[7] = 30;
    plan.seed = 5;
    const auto out = smote(ds, plan);
    // Appended synthetics are grouped by ascending class.
    CHECK(out.n_rows() == 80 + 21 + 19);
    for (Index i = 80; i < 101; ++i)
        CHECK(out.labels[static_cast<std::size_t>(i)] == 3);
    for (Index i = 101; i < out.n_rows(); ++i)
        CHECK(out.labels[static_cast<std::size_t>(i)] == 7);
}

TEST_CASE("default plan oversamples minorities and trims the majority") {
    const auto ds = random_blob({{0, 300}, {1, 10}, {2, 20}, {3, 30}}, 2, 44);
    const auto plan = default_plan(ds, 1);
    // Median minority count is 20 -> targets are max(count, 40).
    CHECK(plan.oversample_targets.at(1) == 40);
    CHECK(plan.oversample_targets.at(2) == 40);
    CHECK(plan.oversample_targets.at(3) == 40);
    CHECK(plan.majority_target == 80);
    const auto out = rebalance(ds, plan);
    const auto hist = out.class_histogram();
    CHECK(hist.at(0) == 80);
    CHECK(hist.at(1) == 40);
}
