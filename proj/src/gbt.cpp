#include "dagfault/gbt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace dagfault {

double GbtTree::predict_row(const RowVector& x) const {
    int node = 0;
    while (nodes[static_cast<std::size_t>(node)].feature >= 0) {
        const auto& nd = nodes[static_cast<std::size_t>(node)];
        node = x[nd.feature] < nd.threshold ? nd.left : nd.right;
    }
    return nodes[static_cast<std::size_t>(node)].weight;
}

int GbtTree::depth() const {
    std::vector<int> level(nodes.size(), 0);
    int deepest = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i].feature < 0) continue;
        level[static_cast<std::size_t>(nodes[i].left)] = level[i] + 1;
        level[static_cast<std::size_t>(nodes[i].right)] = level[i] + 1;
        deepest = std::max(deepest, level[i] + 1);
    }
    return deepest;
}

namespace {

Matrix softmax_rows(const Matrix& z) {
    Matrix out = z;
    for (Index i = 0; i < out.rows(); ++i) {
        const double mx = out.row(i).maxCoeff();
        out.row(i) = (out.row(i).array() - mx).exp();
        out.row(i) /= out.row(i).sum();
    }
    return out;
}

struct TreeBuilder {
    const Matrix& X;
    const Vector& g;
    const Vector& h;
    const GbtConfig& cfg;
    GbtTree tree;

    int build(std::vector<Index>& rows, int depth) {
        double G = 0, H = 0;
        for (Index r : rows) {
            G += g[r];
            H += h[r];
        }
        const int id = static_cast<int>(tree.nodes.size());
        tree.nodes.push_back({});
        tree.nodes[static_cast<std::size_t>(id)].weight =
            -G / (H + GbtConfig::kLambda);
        if (depth >= cfg.max_depth || rows.size() < 2) return id;

        // Exact greedy: scan sorted values per feature, split at midpoints
        // between distinct consecutive values.
        const double parent_score = G * G / (H + GbtConfig::kLambda);
        double best_gain = 0;
        int best_feature = -1;
        double best_threshold = 0;
        std::vector<Index> order(rows);
        for (Index f = 0; f < X.cols(); ++f) {
            std::sort(order.begin(), order.end(), [&](Index a, Index b) {
                if (X(a, f) != X(b, f)) return X(a, f) < X(b, f);
                return a < b;
            });
            double GL = 0, HL = 0;
            for (std::size_t t = 0; t + 1 < order.size(); ++t) {
                GL += g[order[t]];
                HL += h[order[t]];
                const double v = X(order[t], f);
                const double vn = X(order[t + 1], f);
                if (v == vn) continue;
                const double GR = G - GL, HR = H - HL;
                if (HL < cfg.min_child_weight || HR < cfg.min_child_weight) continue;
                const double gain =
                    0.5 * (GL * GL / (HL + GbtConfig::kLambda) +
                           GR * GR / (HR + GbtConfig::kLambda) - parent_score) -
                    cfg.gamma;
                if (gain > best_gain) {
                    best_gain = gain;
                    best_feature = static_cast<int>(f);
                    best_threshold = 0.5 * (v + vn);
                }
            }
        }
        if (best_feature < 0) return id;

        std::vector<Index> left, right;
        for (Index r : rows)
            (X(r, best_feature) < best_threshold ? left : right).push_back(r);
        tree.nodes[static_cast<std::size_t>(id)].feature = best_feature;
        tree.nodes[static_cast<std::size_t>(id)].threshold = best_threshold;
        const int l = build(left, depth + 1);
        tree.nodes[static_cast<std::size_t>(id)].left = l;
        const int r = build(right, depth + 1);
        tree.nodes[static_cast<std::size_t>(id)].right = r;
        return id;
    }
};

}  // namespace

Matrix gbt_margins(const GbtParams& p, const Matrix& X) {
    Matrix F = Matrix::Zero(X.rows(), p.n_classes);
    for (const auto& round : p.trees)
        for (Index c = 0; c < p.n_classes; ++c)
            for (Index i = 0; i < X.rows(); ++i)
                F(i, c) += p.learning_rate *
                           round[static_cast<std::size_t>(c)].predict_row(X.row(i));
    return F;
}

Matrix gbt_proba(const GbtParams& p, const Matrix& X) {
    return softmax_rows(gbt_margins(p, X));
}

GbtParams gbt_train(const GbtConfig& cfg, const Matrix& X,
                    const std::vector<Index>& y, Index n_classes,
                    std::uint64_t seed, std::vector<double>* loss_curve) {
    const Index n = X.rows();
    GbtParams params;
    params.learning_rate = cfg.learning_rate;
    params.n_classes = n_classes;
    Rng rng(seed);

    Matrix F = Matrix::Zero(n, n_classes);
    std::vector<Index> all_rows(static_cast<std::size_t>(n));
    std::iota(all_rows.begin(), all_rows.end(), 0);

    for (int round = 0; round < cfg.n_estimators; ++round) {
        const Matrix P = softmax_rows(F);

        // One row subsample per round, shared by the per-class trees.
        std::vector<Index> rows = all_rows;
        if (cfg.subsample < 1.0) {
            rng.shuffle(rows);
            rows.resize(std::max<std::size_t>(
                1, static_cast<std::size_t>(cfg.subsample * static_cast<double>(n))));
            std::sort(rows.begin(), rows.end());
        }

        std::vector<GbtTree> round_trees;
        for (Index c = 0; c < n_classes; ++c) {
            Vector g(n), h(n);
            for (Index i = 0; i < n; ++i) {
                const double p_ic = P(i, c);
                g[i] = p_ic - (y[static_cast<std::size_t>(i)] == c ? 1.0 : 0.0);
                h[i] = p_ic * (1.0 - p_ic);
            }
            TreeBuilder builder{X, g, h, cfg, {}};
            std::vector<Index> node_rows = rows;
            builder.build(node_rows, 0);
            round_trees.push_back(std::move(builder.tree));
        }
        for (Index c = 0; c < n_classes; ++c)
            for (Index i = 0; i < n; ++i)
                F(i, c) += cfg.learning_rate *
                           round_trees[static_cast<std::size_t>(c)].predict_row(X.row(i));
        params.trees.push_back(std::move(round_trees));

        if (loss_curve) {
            const Matrix Pnew = softmax_rows(F);
            double ce = 0;
            for (Index i = 0; i < n; ++i)
                ce -= std::log(
                    std::max(Pnew(i, y[static_cast<std::size_t>(i)]), 1e-300));
            loss_curve->push_back(ce / static_cast<double>(n));
        }
    }
    return params;
}

}  // namespace dagfault
