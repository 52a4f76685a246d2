#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "dagfault/metrics.hpp"
#include "dagfault/model.hpp"
#include "dagfault/resample.hpp"
#include "dagfault/rng.hpp"
#include "dagfault/search.hpp"

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

Dataset gaussian_1d(double mean0, double mean1, double sigma, Index n_per_class,
                    std::uint64_t seed) {
    Rng rng(seed);
    Matrix values(2 * n_per_class, 1);
    std::vector<ClassId> labels;
    for (Index i = 0; i < n_per_class; ++i) {
        values(i, 0) = mean0 + sigma * rng.normal();
        labels.push_back(0);
    }
    for (Index i = 0; i < n_per_class; ++i) {
        values(n_per_class + i, 0) = mean1 + sigma * rng.normal();
        labels.push_back(1);
    }
    return make_dataset(values, labels);
}

}  // namespace

TEST_CASE("knn k=1 reproduces training labels exactly") {
    Rng rng(2);
    Matrix values(40, 3);
    std::vector<ClassId> labels;
    for (Index i = 0; i < 40; ++i) {
        for (Index j = 0; j < 3; ++j) values(i, j) = rng.normal();
        labels.push_back(static_cast<ClassId>(rng.below(4)));
    }
    // Ensure at least two classes.
    labels[0] = 0;
    labels[1] = 1;
    const auto ds = make_dataset(values, labels);
    ModelSpec spec;
    spec.kind = ModelKind::knn;
    spec.hyper["k"] = std::int64_t{1};
    const auto model = fit(spec, ds);
    CHECK(predict(model, ds.values) == ds.labels);
}

TEST_CASE("knn with k=5 beats 0.9 accuracy at 4 sigma separation") {
    const auto train = gaussian_1d(0.0, 4.0, 1.0, 400, 5);
    const auto test = gaussian_1d(0.0, 4.0, 1.0, 400, 6);
    const auto model = fit(knn_preset(10, 1), train);
    const auto pred = predict(model, test.values);
    double correct = 0;
    for (std::size_t i = 0; i < pred.size(); ++i)
        correct += pred[i] == test.labels[i];
    const double acc = correct / static_cast<double>(pred.size());
    CHECK(acc > 0.9);

    // Monte-Carlo Bayes oracle: threshold at the midpoint.
    double bayes = 0;
    for (Index i = 0; i < test.n_rows(); ++i) {
        const ClassId c = test.values(i, 0) < 2.0 ? 0 : 1;
        bayes += c == test.labels[static_cast<std::size_t>(i)];
    }
    bayes /= static_cast<double>(test.n_rows());
    CHECK(acc > bayes - 0.05);  // knn should track the Bayes rate closely
}

TEST_CASE("mlp preset for 10 variables matches the documented row") {
    const auto spec = mlp_preset(10);
    CHECK(hyper_int_list(spec.hyper, "hidden_layers", {}) ==
          std::vector<std::int64_t>{250, 125, 60});
    CHECK(hyper_string(spec.hyper, "activation", "") == "relu");
    CHECK(hyper_double(spec.hyper, "learning_rate", 0) == doctest::Approx(0.001));
    CHECK(hyper_double(spec.hyper, "l2", 0) == doctest::Approx(0.0001));
    CHECK(hyper_int(spec.hyper, "batch_size", 0) == 64);
}

TEST_CASE("gbt preset for 10 variables matches the documented row") {
    const auto spec = gbt_preset(10);
    CHECK(hyper_double(spec.hyper, "learning_rate", 0) == doctest::Approx(0.05));
    CHECK(hyper_int(spec.hyper, "max_depth", 0) == 3);
    CHECK(hyper_int(spec.hyper, "n_estimators", 0) == 200);
    CHECK(hyper_double(spec.hyper, "subsample", 0) == doctest::Approx(0.9));
    CHECK(hyper_double(spec.hyper, "min_child_weight", 0) == doctest::Approx(3));
    CHECK(hyper_double(spec.hyper, "gamma", 0) == doctest::Approx(0.2));
}

TEST_CASE("knn preset carries the metric string and inert p") {
    const auto spec = knn_preset(52);
    CHECK(hyper_int(spec.hyper, "k", 0) == 5);
    CHECK(hyper_string(spec.hyper, "weights", "") == "uniform");
    CHECK(hyper_string(spec.hyper, "metric", "") == "manhattan");
    CHECK(hyper_int(spec.hyper, "p", 0) == 2);
    CHECK(hyper_int(spec.hyper, "leaf_size", 0) == 20);
}

TEST_CASE("zeroed mlp yields uniform probabilities") {
    MlpParams p;
    p.activation = "relu";
    p.weights = {Matrix::Zero(4, 8), Matrix::Zero(8, 5)};
    p.biases = {RowVector::Zero(8), RowVector::Zero(5)};
    Matrix X = Matrix::Random(6, 4);
    const Matrix proba = mlp_forward(p, X);
    for (Index i = 0; i < 6; ++i)
        for (Index c = 0; c < 5; ++c)
            CHECK(proba(i, c) == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("gbt with zero estimators is the uniform prior") {
    GbtParams p;
    p.n_classes = 3;
    Matrix X = Matrix::Random(4, 2);
    const Matrix proba = gbt_proba(p, X);
    for (Index i = 0; i < 4; ++i)
        for (Index c = 0; c < 3; ++c)
            CHECK(proba(i, c) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("predict is the argmax of predict_proba with rows summing to 1") {
    Rng rng(8);
    Matrix values(60, 2);
    std::vector<ClassId> labels;
    for (Index i = 0; i < 60; ++i) {
        const ClassId c = static_cast<ClassId>(i % 3);
        values(i, 0) = rng.normal() + 3.0 * c;
        values(i, 1) = rng.normal();
        labels.push_back(c);
    }
    const auto ds = make_dataset(values, labels);

    for (ModelKind kind : {ModelKind::knn, ModelKind::mlp, ModelKind::gbt}) {
        ModelSpec spec;
        spec.kind = kind;
        spec.seed = 4;
        if (kind == ModelKind::mlp) {
            spec.hyper["hidden_layers"] = std::vector<std::int64_t>{16};
            spec.hyper["max_epochs"] = std::int64_t{30};
        }
        if (kind == ModelKind::gbt) spec.hyper["n_estimators"] = std::int64_t{20};
        const auto model = fit(spec, ds);
        const auto proba = predict_proba(model, ds.values);
        const auto pred = predict(model, ds.values);
        for (Index i = 0; i < proba.rows(); ++i) {
            CHECK(proba.row(i).sum() == doctest::Approx(1.0).epsilon(1e-9));
            Index best = 0;
            for (Index c = 1; c < proba.cols(); ++c)
                if (proba(i, c) > proba(i, best)) best = c;
            CHECK(pred[static_cast<std::size_t>(i)] ==
                  model.classes[static_cast<std::size_t>(best)]);
        }
    }
}

TEST_CASE("mlp analytic gradients match central finite differences") {
    Rng rng(31);
    MlpParams p = mlp_init(5, {8, 6}, 3, "relu", rng);
    Matrix X(3, 5);
    for (Index i = 0; i < 3; ++i)
        for (Index j = 0; j < 5; ++j) X(i, j) = rng.normal();
    const std::vector<Index> y = {0, 2, 1};
    const double l2 = 0.01;

    MlpParams grad;
    mlp_loss_and_grad(p, X, y, l2, grad);

    const double eps = 1e-5;
    int checked = 0;
    for (std::size_t l = 0; l < p.weights.size(); ++l) {
        for (Index i = 0; i < p.weights[l].rows(); ++i) {
            for (Index j = 0; j < p.weights[l].cols(); ++j) {
                MlpParams plus = p, minus = p;
                plus.weights[l](i, j) += eps;
                minus.weights[l](i, j) -= eps;
                const double fd =
                    (mlp_loss(plus, X, y, l2) - mlp_loss(minus, X, y, l2)) / (2 * eps);
                const double an = grad.weights[l](i, j);
                const double rel =
                    std::abs(fd - an) / std::max({std::abs(fd), std::abs(an), 1e-8});
                CHECK(rel <= 1e-4);
                ++checked;
            }
        }
        for (Index j = 0; j < p.biases[l].cols(); ++j) {
            MlpParams plus = p, minus = p;
            plus.biases[l](0, j) += eps;
            minus.biases[l](0, j) -= eps;
            const double fd =
                (mlp_loss(plus, X, y, l2) - mlp_loss(minus, X, y, l2)) / (2 * eps);
            const double an = grad.biases[l](0, j);
            const double rel =
                std::abs(fd - an) / std::max({std::abs(fd), std::abs(an), 1e-8});
            CHECK(rel <= 1e-4);
            ++checked;
        }
    }
    CHECK(checked > 100);
}

TEST_CASE("gbt training loss is non-increasing with subsample=1") {
    Rng rng(17);
    Matrix X(80, 3);
    std::vector<Index> y;
    for (Index i = 0; i < 80; ++i) {
        const Index c = i % 3;
        for (Index j = 0; j < 3; ++j) X(i, j) = rng.normal() + (j == c ? 1.5 : 0.0);
        y.push_back(c);
    }
    GbtConfig cfg;
    cfg.n_estimators = 40;
    cfg.subsample = 1.0;
    cfg.learning_rate = 0.2;
    std::vector<double> curve;
    gbt_train(cfg, X, y, 3, 12, &curve);
    REQUIRE(curve.size() == 40);
    for (std::size_t i = 1; i < curve.size(); ++i)
        CHECK(curve[i] <= curve[i - 1] + 1e-10);
}

TEST_CASE("gbt trees honor max_depth and finite thresholds") {
    Rng rng(21);
    Matrix X(100, 4);
    std::vector<Index> y;
    for (Index i = 0; i < 100; ++i) {
        for (Index j = 0; j < 4; ++j) X(i, j) = rng.normal();
        y.push_back(X(i, 0) > 0 ? 1 : 0);
    }
    GbtConfig cfg;
    cfg.n_estimators = 10;
    cfg.max_depth = 3;
    const auto params = gbt_train(cfg, X, y, 2, 9);
    for (const auto& round : params.trees) {
        for (const auto& tree : round) {
            CHECK(tree.depth() <= 3);
            for (const auto& nd : tree.nodes)
                if (nd.feature >= 0) CHECK(std::isfinite(nd.threshold));
        }
    }
}

TEST_CASE("fit is bit-for-bit deterministic for a fixed seed") {
    Rng rng(14);
    Matrix values(90, 3);
    std::vector<ClassId> labels;
    for (Index i = 0; i < 90; ++i) {
        const ClassId c = static_cast<ClassId>(i % 3);
        for (Index j = 0; j < 3; ++j) values(i, j) = rng.normal() + c;
        labels.push_back(c);
    }
    const auto ds = make_dataset(values, labels);

    ModelSpec mlp_spec;
    mlp_spec.kind = ModelKind::mlp;
    mlp_spec.seed = 1234;
    mlp_spec.hyper["hidden_layers"] = std::vector<std::int64_t>{8};
    mlp_spec.hyper["max_epochs"] = std::int64_t{15};
    const auto m1 = fit(mlp_spec, ds);
    const auto m2 = fit(mlp_spec, ds);
    const auto& p1 = std::get<MlpParams>(m1.params);
    const auto& p2 = std::get<MlpParams>(m2.params);
    for (std::size_t l = 0; l < p1.weights.size(); ++l)
        CHECK(p1.weights[l] == p2.weights[l]);

    ModelSpec gbt_spec;
    gbt_spec.kind = ModelKind::gbt;
    gbt_spec.seed = 99;
    gbt_spec.hyper["n_estimators"] = std::int64_t{15};
    gbt_spec.hyper["subsample"] = 0.8;
    const auto g1 = fit(gbt_spec, ds);
    const auto g2 = fit(gbt_spec, ds);
    CHECK(gbt_margins(std::get<GbtParams>(g1.params), ds.values) ==
          gbt_margins(std::get<GbtParams>(g2.params), ds.values));
}

TEST_CASE("fit rejects single-class training sets and width mismatches") {
    Matrix values = Matrix::Random(10, 2);
    const auto ds = make_dataset(values, std::vector<ClassId>(10, 3));
    ModelSpec spec;
    spec.kind = ModelKind::knn;
    CHECK_THROWS_AS(fit(spec, ds), SingleClassTrainingSet);

    auto ds2 = ds;
    ds2.labels[0] = 0;
    const auto model = fit(spec, ds2);
    const Matrix wrong = Matrix::Random(4, 5);
    CHECK_THROWS_AS(predict(model, wrong), WidthMismatch);
}

TEST_CASE("model save/load round trips through the DFM1 format") {
    Rng rng(55);
    Matrix values(50, 2);
    std::vector<ClassId> labels;
    for (Index i = 0; i < 50; ++i) {
        values(i, 0) = rng.normal() + (i % 2) * 4.0;
        values(i, 1) = rng.normal();
        labels.push_back(static_cast<ClassId>(i % 2));
    }
    const auto ds = make_dataset(values, labels);
    const std::string path =
        (std::filesystem::temp_directory_path() / "dagfault_model.bin").string();

    for (ModelKind kind : {ModelKind::knn, ModelKind::mlp, ModelKind::gbt}) {
        ModelSpec spec;
        spec.kind = kind;
        spec.seed = 7;
        if (kind == ModelKind::mlp) {
            spec.hyper["hidden_layers"] = std::vector<std::int64_t>{6};
            spec.hyper["max_epochs"] = std::int64_t{10};
        }
        if (kind == ModelKind::gbt) spec.hyper["n_estimators"] = std::int64_t{8};
        const auto model = fit(spec, ds);
        save_model(model, path);
        const auto loaded = load_model(path);
        CHECK(loaded.spec.kind == kind);
        CHECK(loaded.classes == model.classes);
        CHECK(predict_proba(loaded, ds.values) == predict_proba(model, ds.values));
        CHECK(model_to_json(loaded) == model_to_json(model));
    }
    std::remove(path.c_str());
}

TEST_CASE("random_search returns the single spec of a singleton space") {
    const auto ds = gaussian_1d(0, 3, 1, 30, 2);
    SearchSpace space;
    space.kind = ModelKind::knn;
    space.grid["k"] = {HyperValue{std::int64_t{3}}};
    space.n_iter = 20;
    ResamplePlan plan;
    const auto result = random_search(space, ds, 3, plan, 5);
    CHECK(result.table.size() == 1);
    CHECK(hyper_int(result.best.hyper, "k", 0) == 3);
}

TEST_CASE("random_search penalizes overfit k=1 under label noise") {
    Rng rng(100);
    Matrix values(300, 1);
    std::vector<ClassId> labels;
    for (Index i = 0; i < 300; ++i) {
        const ClassId c = i % 2 == 0 ? 0 : 1;
        values(i, 0) = rng.normal() + (c == 0 ? -1.0 : 1.0);
        // 15% label noise.
        labels.push_back(rng.uniform() < 0.15 ? 1 - c : c);
    }
    const auto ds = make_dataset(values, labels);

    SearchSpace space;
    space.kind = ModelKind::knn;
    space.grid["k"] = {HyperValue{std::int64_t{1}}, HyperValue{std::int64_t{5}},
                       HyperValue{std::int64_t{50}}};
    space.n_iter = 20;
    ResamplePlan plan;
    const auto result = random_search(space, ds, 5, plan, 17);
    CHECK(result.table.size() == 3);  // deduplicated grid of 3
    CHECK(hyper_int(result.best.hyper, "k", 0) != 1);
}

TEST_CASE("random_search caps the table at n_iter rows") {
    const auto ds = gaussian_1d(0, 3, 1, 40, 9);
    auto space = default_search_space(ModelKind::knn);
    space.n_iter = 20;
    ResamplePlan plan;
    const auto result = random_search(space, ds, 3, plan, 21);
    CHECK(result.table.size() <= 20);
    CHECK(!result.table.empty());
}
