#include "dagfault/citest.hpp"

#include <cmath>

namespace dagfault {

FisherZ::FisherZ(const Matrix& data, double alpha)
    : n_samples_(data.rows()), alpha_(alpha) {
    const Index d = data.cols();
    const RowVector mean = data.colwise().mean();
    Matrix centered = data.rowwise() - mean;
    Vector norm = centered.colwise().norm();
    for (Index j = 0; j < d; ++j)
        if (norm[j] < 1e-300) norm[j] = 1e-300;  // constant column
    centered.array().rowwise() /= norm.transpose().array();
    corr_ = centered.transpose() * centered;
}

CITestResult FisherZ::test(Index i, Index j, const std::vector<Index>& cond) const {
    if (i == j) throw Error("fisher_z: i == j");
    const Index s = static_cast<Index>(cond.size());
    if (n_samples_ <= s + 3) throw TooFewSamplesForTest(n_samples_, s);

    double rho;
    if (cond.empty()) {
        rho = corr_(i, j);
    } else {
        std::vector<Index> idx = {i, j};
        idx.insert(idx.end(), cond.begin(), cond.end());
        const Index m = static_cast<Index>(idx.size());
        Matrix sub(m, m);
        for (Index a = 0; a < m; ++a)
            for (Index b = 0; b < m; ++b)
                sub(a, b) = corr_(idx[static_cast<std::size_t>(a)],
                                  idx[static_cast<std::size_t>(b)]);
        // Invert; escalate a ridge when the submatrix is (near) singular.
        Matrix omega;
        double ridge = 0.0;
        for (;;) {
            Eigen::FullPivLU<Matrix> lu(sub + ridge * Matrix::Identity(m, m));
            if (lu.isInvertible()) {
                omega = lu.inverse();
                break;
            }
            ridge = ridge == 0.0 ? 1e-8 : ridge * 10.0;
            if (ridge > 1e-2) throw Error("fisher_z: singular correlation submatrix");
        }
        rho = -omega(0, 1) / std::sqrt(omega(0, 0) * omega(1, 1));
    }

    rho = std::clamp(rho, -1.0 + 1e-12, 1.0 - 1e-12);
    const double z = 0.5 * std::log((1.0 + rho) / (1.0 - rho)) *
                     std::sqrt(static_cast<double>(n_samples_ - s - 3));
    const double p = std::erfc(std::abs(z) / std::sqrt(2.0));
    return {z, p, p > alpha_};
}

CITestResult fisher_z(const Matrix& data, Index i, Index j,
                      const std::vector<Index>& cond, double alpha) {
    return FisherZ(data, alpha).test(i, j, cond);
}

}  // namespace dagfault
