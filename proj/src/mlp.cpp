#include "dagfault/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

namespace dagfault {

namespace {

Matrix activate(const Matrix& z, const std::string& activation) {
    if (activation == "relu") return z.cwiseMax(0.0);
    if (activation == "tanh") return z.array().tanh().matrix();
    throw Error("unknown activation: " + activation);
}

Matrix activate_grad(const Matrix& z, const std::string& activation) {
    if (activation == "relu")
        return (z.array() > 0.0).cast<double>().matrix();
    // tanh'(z) = 1 - tanh(z)^2
    return (1.0 - z.array().tanh().square()).matrix();
}

Matrix softmax_rows(const Matrix& z) {
    Matrix out = z;
    for (Index i = 0; i < out.rows(); ++i) {
        const double mx = out.row(i).maxCoeff();
        out.row(i) = (out.row(i).array() - mx).exp();
        out.row(i) /= out.row(i).sum();
    }
    return out;
}

struct ForwardCache {
    std::vector<Matrix> pre;    // pre-activations per layer
    std::vector<Matrix> post;   // post-activations (post[0] = input)
};

Matrix forward_cached(const MlpParams& p, const Matrix& X, ForwardCache& cache) {
    cache.pre.clear();
    cache.post.clear();
    cache.post.push_back(X);
    Matrix h = X;
    for (std::size_t l = 0; l < p.weights.size(); ++l) {
        Matrix z = (h * p.weights[l]).rowwise() + p.biases[l];
        cache.pre.push_back(z);
        if (l + 1 < p.weights.size())
            h = activate(z, p.activation);
        else
            h = z;
        cache.post.push_back(h);
    }
    return softmax_rows(h);
}

}  // namespace

MlpParams mlp_init(Index n_inputs, const std::vector<Index>& hidden,
                   Index n_outputs, const std::string& activation, Rng& rng) {
    MlpParams p;
    p.activation = activation;
    std::vector<Index> dims = {n_inputs};
    dims.insert(dims.end(), hidden.begin(), hidden.end());
    dims.push_back(n_outputs);
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        const Index fan_in = dims[l], fan_out = dims[l + 1];
        // He scaling for relu, Glorot for tanh.
        const double scale = activation == "relu"
                                 ? std::sqrt(2.0 / static_cast<double>(fan_in))
                                 : std::sqrt(2.0 / static_cast<double>(fan_in + fan_out));
        Matrix w(fan_in, fan_out);
        for (Index i = 0; i < fan_in; ++i)
            for (Index j = 0; j < fan_out; ++j) w(i, j) = scale * rng.normal();
        p.weights.push_back(std::move(w));
        p.biases.push_back(RowVector::Zero(fan_out));
    }
    return p;
}

Matrix mlp_forward(const MlpParams& p, const Matrix& X) {
    ForwardCache cache;
    return forward_cached(p, X, cache);
}

double mlp_loss(const MlpParams& p, const Matrix& X, const std::vector<Index>& y,
                double l2) {
    ForwardCache cache;
    const Matrix proba = forward_cached(p, X, cache);
    double ce = 0;
    for (Index i = 0; i < X.rows(); ++i)
        ce -= std::log(std::max(proba(i, y[static_cast<std::size_t>(i)]), 1e-300));
    ce /= static_cast<double>(X.rows());
    double reg = 0;
    for (const auto& w : p.weights) reg += w.squaredNorm();
    return ce + 0.5 * l2 * reg;
}

double mlp_loss_and_grad(const MlpParams& p, const Matrix& X,
                         const std::vector<Index>& y, double l2, MlpParams& grad) {
    const Index n = X.rows();
    ForwardCache cache;
    const Matrix proba = forward_cached(p, X, cache);

    double ce = 0;
    for (Index i = 0; i < n; ++i)
        ce -= std::log(std::max(proba(i, y[static_cast<std::size_t>(i)]), 1e-300));
    ce /= static_cast<double>(n);
    double reg = 0;
    for (const auto& w : p.weights) reg += w.squaredNorm();

    grad.activation = p.activation;
    grad.weights.resize(p.weights.size());
    grad.biases.resize(p.biases.size());

    Matrix delta = proba;  // dJ/dZ_L = (P - Y)/n
    for (Index i = 0; i < n; ++i) delta(i, y[static_cast<std::size_t>(i)]) -= 1.0;
    delta /= static_cast<double>(n);

    for (std::size_t l = p.weights.size(); l-- > 0;) {
        grad.weights[l] = cache.post[l].transpose() * delta + l2 * p.weights[l];
        grad.biases[l] = delta.colwise().sum();
        if (l > 0) {
            Matrix dh = delta * p.weights[l].transpose();
            delta = dh.cwiseProduct(activate_grad(cache.pre[l - 1], p.activation));
        }
    }
    return ce + 0.5 * l2 * reg;
}

namespace {

// Stratified carve-out for early stopping; empty valid when infeasible.
void carve_validation(const std::vector<Index>& y, Rng& rng,
                      std::vector<Index>& train_rows, std::vector<Index>& valid_rows) {
    std::map<Index, std::vector<Index>> by;
    for (std::size_t i = 0; i < y.size(); ++i)
        by[y[i]].push_back(static_cast<Index>(i));
    for (const auto& [c, rows] : by) {
        (void)c;
        if (rows.size() < 10) {  // too small to spare a tenth
            train_rows.resize(y.size());
            std::iota(train_rows.begin(), train_rows.end(), 0);
            valid_rows.clear();
            return;
        }
    }
    for (auto& [c, rows] : by) {
        (void)c;
        auto shuffled = rows;
        rng.shuffle(shuffled);
        const std::size_t nv = shuffled.size() / 10;
        for (std::size_t i = 0; i < shuffled.size(); ++i)
            (i < nv ? valid_rows : train_rows).push_back(shuffled[i]);
    }
    std::sort(train_rows.begin(), train_rows.end());
    std::sort(valid_rows.begin(), valid_rows.end());
}

}  // namespace

MlpParams mlp_train(const MlpConfig& cfg, const Matrix& X,
                    const std::vector<Index>& y, Index n_classes,
                    std::uint64_t seed) {
    Rng rng(seed);
    MlpParams p = mlp_init(X.cols(), cfg.hidden_layers, n_classes, cfg.activation, rng);

    std::vector<Index> train_rows, valid_rows;
    carve_validation(y, rng, train_rows, valid_rows);

    Matrix Xt(static_cast<Index>(train_rows.size()), X.cols());
    std::vector<Index> yt(train_rows.size());
    for (std::size_t i = 0; i < train_rows.size(); ++i) {
        Xt.row(static_cast<Index>(i)) = X.row(train_rows[i]);
        yt[i] = y[static_cast<std::size_t>(train_rows[i])];
    }
    Matrix Xv;
    std::vector<Index> yv;
    if (!valid_rows.empty()) {
        Xv.resize(static_cast<Index>(valid_rows.size()), X.cols());
        for (std::size_t i = 0; i < valid_rows.size(); ++i) {
            Xv.row(static_cast<Index>(i)) = X.row(valid_rows[i]);
            yv.push_back(y[static_cast<std::size_t>(valid_rows[i])]);
        }
    }

    const Index n = Xt.rows();
    const Index bs = std::min(cfg.batch_size, n);
    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);

    MlpParams best = p;
    double best_loss = std::numeric_limits<double>::infinity();
    int since_best = 0;
    MlpParams grad;

    for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
        rng.shuffle(order);
        for (Index start = 0; start < n; start += bs) {
            const Index len = std::min(bs, n - start);
            Matrix xb(len, Xt.cols());
            std::vector<Index> yb(static_cast<std::size_t>(len));
            for (Index i = 0; i < len; ++i) {
                xb.row(i) = Xt.row(order[static_cast<std::size_t>(start + i)]);
                yb[static_cast<std::size_t>(i)] =
                    yt[static_cast<std::size_t>(order[static_cast<std::size_t>(start + i)])];
            }
            const double loss = mlp_loss_and_grad(p, xb, yb, cfg.l2, grad);
            if (!std::isfinite(loss)) throw NonFiniteLoss(epoch);
            for (std::size_t l = 0; l < p.weights.size(); ++l) {
                p.weights[l] -= cfg.learning_rate * grad.weights[l];
                p.biases[l] -= cfg.learning_rate * grad.biases[l];
            }
        }
        const double monitored = valid_rows.empty() ? mlp_loss(p, Xt, yt, cfg.l2)
                                                    : mlp_loss(p, Xv, yv, cfg.l2);
        if (!std::isfinite(monitored)) throw NonFiniteLoss(epoch);
        if (monitored < best_loss) {
            best_loss = monitored;
            best = p;
            since_best = 0;
        } else if (++since_best >= cfg.patience) {
            break;
        }
    }
    return best;
}

}  // namespace dagfault
