#include "dagfault/sem.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace dagfault {

LinearSem random_sem(Index d, double edge_prob, const std::string& noise, Rng& rng) {
    LinearSem sem;
    sem.noise = noise;
    sem.order.resize(static_cast<std::size_t>(d));
    std::iota(sem.order.begin(), sem.order.end(), 0);
    rng.shuffle(sem.order);
    sem.weights = Matrix::Zero(d, d);
    for (std::size_t oi = 0; oi < sem.order.size(); ++oi) {
        for (std::size_t oj = oi + 1; oj < sem.order.size(); ++oj) {
            if (rng.uniform() >= edge_prob) continue;
            const double mag = 0.5 + rng.uniform();
            const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
            sem.weights(sem.order[oi], sem.order[oj]) = sign * mag;
        }
    }
    return sem;
}

namespace {

double draw_noise(const std::string& kind, Rng& rng) {
    if (kind == "gaussian") return rng.normal();
    if (kind == "laplace") {
        const double u = rng.uniform() - 0.5;
        return -std::copysign(std::log(1.0 - 2.0 * std::abs(u)), u) / std::sqrt(2.0);
    }
    // uniform with unit variance
    return (rng.uniform_closed() - 0.5) * std::sqrt(12.0);
}

}  // namespace

Matrix sample_sem(const LinearSem& sem, Index n, Rng& rng) {
    const Index d = sem.weights.rows();
    Matrix X(n, d);
    for (Index i = 0; i < n; ++i) {
        for (Index v : sem.order) {
            double x = draw_noise(sem.noise, rng);
            for (Index p = 0; p < d; ++p)
                if (sem.weights(p, v) != 0.0) x += sem.weights(p, v) * X(i, p);
            X(i, v) = x;
        }
    }
    return X;
}

std::vector<std::string> default_names(Index d) {
    std::vector<std::string> names;
    for (Index i = 0; i < d; ++i) names.push_back("V" + std::to_string(i));
    return names;
}

MixedGraph sem_graph(const LinearSem& sem, const std::vector<std::string>& names) {
    const Index d = sem.weights.rows();
    MixedGraph g(GraphKind::weighted_dag, names.empty() ? default_names(d) : names);
    for (Index i = 0; i < d; ++i)
        for (Index j = 0; j < d; ++j)
            if (sem.weights(i, j) != 0.0)
                g.add_edge(i, j, Mark::tail, Mark::arrow, sem.weights(i, j));
    return g;
}

Dataset synth_classification(const VariableSchema& schema, Index n_normal,
                             Index n_per_fault, int n_faults, std::uint64_t seed) {
    const Index d = schema.size();
    Rng rng(derive_seed(seed, hash_label("synth_classification")));
    LinearSem sem = random_sem(d, std::min(0.15, 40.0 / static_cast<double>(d * d)),
                               "gaussian", rng);

    // Each fault shifts a sparse set of variables by a couple of noise sds.
    std::vector<std::vector<Index>> shifted(static_cast<std::size_t>(n_faults));
    std::vector<Vector> deltas(static_cast<std::size_t>(n_faults));
    for (int f = 0; f < n_faults; ++f) {
        std::vector<Index> cols(static_cast<std::size_t>(d));
        std::iota(cols.begin(), cols.end(), 0);
        rng.shuffle(cols);
        const Index k = std::min<Index>(3, d);
        cols.resize(static_cast<std::size_t>(k));
        shifted[static_cast<std::size_t>(f)] = cols;
        Vector delta(k);
        for (Index t = 0; t < k; ++t)
            delta[t] = (rng.uniform() < 0.5 ? -1.0 : 1.0) * (2.0 + rng.uniform());
        deltas[static_cast<std::size_t>(f)] = delta;
    }

    const Index n = n_normal + n_per_fault * n_faults;
    Dataset ds;
    ds.variables = schema.variables;
    ds.values = sample_sem(sem, n, rng);
    ds.labels.assign(static_cast<std::size_t>(n), 0);
    Index row = n_normal;
    for (int f = 0; f < n_faults; ++f) {
        for (Index s = 0; s < n_per_fault; ++s, ++row) {
            ds.labels[static_cast<std::size_t>(row)] = f + 1;
            const auto& cols = shifted[static_cast<std::size_t>(f)];
            for (std::size_t t = 0; t < cols.size(); ++t)
                ds.values(row, cols[t]) += deltas[static_cast<std::size_t>(f)][static_cast<Index>(t)];
        }
    }
    return ds;
}

}  // namespace dagfault
