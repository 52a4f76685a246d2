#ifndef DAGFAULT_MLP_HPP_
#define DAGFAULT_MLP_HPP_

#include <string>
#include <vector>

#include "dagfault/rng.hpp"
#include "dagfault/types.hpp"

namespace dagfault {

class NonFiniteLoss : public Error {
public:
    explicit NonFiniteLoss(int epoch)
        : Error("non-finite loss at epoch " + std::to_string(epoch)), epoch(epoch) {}
    int epoch;
};

/// Feedforward network: ReLU (or tanh) hidden layers, softmax output.
/// weights[l] is (fan_in x fan_out); shapes chain input -> hidden... -> n_classes.
struct MlpParams {
    std::vector<Matrix> weights;
    std::vector<RowVector> biases;
    std::string activation = "relu";

    Index n_inputs() const { return weights.empty() ? 0 : weights.front().rows(); }
    Index n_outputs() const { return weights.empty() ? 0 : weights.back().cols(); }
};

struct MlpConfig {
    std::vector<Index> hidden_layers = {100};
    std::string activation = "relu";
    double learning_rate = 1e-3;
    double l2 = 1e-4;
    Index batch_size = 64;
    int max_epochs = 200;
    int patience = 10;  // early stop: epochs without validation improvement
};

MlpParams mlp_init(Index n_inputs, const std::vector<Index>& hidden,
                   Index n_outputs, const std::string& activation, Rng& rng);

/// Softmax class probabilities for standardized inputs.
Matrix mlp_forward(const MlpParams& p, const Matrix& X);

/// Objective: mean cross-entropy over the batch + (l2/2) * sum ||W||_F^2
/// (biases unpenalized). y holds class indices into the output layer.
double mlp_loss(const MlpParams& p, const Matrix& X, const std::vector<Index>& y,
                double l2);

/// Analytic gradient of mlp_loss; grad has the same shapes as p.
double mlp_loss_and_grad(const MlpParams& p, const Matrix& X,
                         const std::vector<Index>& y, double l2, MlpParams& grad);

/// Mini-batch SGD with constant learning rate. When the data admits a
/// stratified carve-out, a 10% validation split drives early stopping;
/// otherwise the training loss is monitored. Returns the best parameters
/// seen under the monitored loss.
MlpParams mlp_train(const MlpConfig& cfg, const Matrix& X,
                    const std::vector<Index>& y, Index n_classes,
                    std::uint64_t seed);

}  // namespace dagfault

#endif  // DAGFAULT_MLP_HPP_
