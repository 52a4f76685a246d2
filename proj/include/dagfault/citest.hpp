#ifndef DAGFAULT_CITEST_HPP_
#define DAGFAULT_CITEST_HPP_

#include <vector>

#include "dagfault/types.hpp"

namespace dagfault {

class TooFewSamplesForTest : public Error {
public:
    TooFewSamplesForTest(Index n, Index cond)
        : Error("need n > |S| + 3 samples for Fisher-z (n=" + std::to_string(n) +
                ", |S|=" + std::to_string(cond) + ")") {}
};

struct CITestResult {
    double statistic = 0.0;
    double p_value = 1.0;
    bool independent = true;  // p_value > alpha
};

/// Conditional-independence oracle shared by the constraint-based
/// algorithms. Implementations must be safe for concurrent test() calls.
class CITest {
public:
    virtual ~CITest() = default;
    virtual CITestResult test(Index i, Index j, const std::vector<Index>& cond) const = 0;
    virtual Index n_variables() const = 0;
    virtual double alpha() const = 0;
};

/// Partial-correlation test: rho_{ij.S} from the inverse of the
/// correlation submatrix over {i,j} u S, z = atanh(rho) * sqrt(n-|S|-3),
/// two-sided p from the standard normal. A near-singular submatrix gets a
/// ridge (1e-8 escalating) before inversion.
class FisherZ : public CITest {
public:
    FisherZ(const Matrix& data, double alpha);

    CITestResult test(Index i, Index j, const std::vector<Index>& cond) const override;
    Index n_variables() const override { return corr_.rows(); }
    double alpha() const override { return alpha_; }

private:
    Matrix corr_;
    Index n_samples_;
    double alpha_;
};

/// Counts test() invocations; used to compare algorithm economy.
class CountingCITest : public CITest {
public:
    explicit CountingCITest(const CITest& inner) : inner_(inner) {}

    CITestResult test(Index i, Index j, const std::vector<Index>& cond) const override {
        ++count_;
        return inner_.test(i, j, cond);
    }
    Index n_variables() const override { return inner_.n_variables(); }
    double alpha() const override { return inner_.alpha(); }
    std::size_t count() const { return count_; }
    void reset() { count_ = 0; }

private:
    const CITest& inner_;
    mutable std::size_t count_ = 0;
};

/// One-shot convenience wrapper around FisherZ.
CITestResult fisher_z(const Matrix& data, Index i, Index j,
                      const std::vector<Index>& cond, double alpha);

}  // namespace dagfault

#endif  // DAGFAULT_CITEST_HPP_
