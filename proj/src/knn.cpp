#include "dagfault/knn.hpp"

#include <algorithm>
#include <numeric>

namespace dagfault {

Matrix knn_proba(const KnnParams& params, const std::vector<ClassId>& classes,
                 const Matrix& X) {
    const Index n = X.rows();
    const Index m = params.train.rows();
    const Index nc = static_cast<Index>(classes.size());
    const int k = std::min<int>(params.k, static_cast<int>(m));
    const bool manhattan = params.metric == "manhattan";
    const bool by_distance = params.weights == "distance";

    auto class_index = [&](ClassId c) {
        return static_cast<Index>(
            std::lower_bound(classes.begin(), classes.end(), c) - classes.begin());
    };

    Matrix proba = Matrix::Zero(n, nc);
    Vector dist(m);
    std::vector<Index> order(static_cast<std::size_t>(m));
    for (Index i = 0; i < n; ++i) {
        if (manhattan)
            dist = (params.train.rowwise() - X.row(i)).cwiseAbs().rowwise().sum();
        else
            dist = (params.train.rowwise() - X.row(i)).rowwise().norm();
        std::iota(order.begin(), order.end(), 0);
        std::partial_sort(order.begin(), order.begin() + k, order.end(),
                          [&](Index a, Index b) {
                              if (dist[a] != dist[b]) return dist[a] < dist[b];
                              return a < b;  // stable under distance ties
                          });
        double total = 0;
        for (int t = 0; t < k; ++t) {
            const Index nb = order[static_cast<std::size_t>(t)];
            const double w = by_distance ? 1.0 / (dist[nb] + 1e-12) : 1.0;
            proba(i, class_index(params.labels[static_cast<std::size_t>(nb)])) += w;
            total += w;
        }
        proba.row(i) /= total;
    }
    return proba;
}

}  // namespace dagfault
