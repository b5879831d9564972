#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "tssid/neural/types.hpp"

namespace tssid::neural {

struct MLPConfig {
    int input_dim = 1;
    std::vector<int> hidden_layers = {24, 24, 24, 24};
    int output_dim = 1;

    void validate() const;
    bool operator==(const MLPConfig&) const = default;
};

/// Fully connected network: ReLU hidden layers, linear output layer.
/// Parameters are stored as [W0, b0, W1, b1, ...] with W_l of shape out x in.
class MLP {
public:
    MLP() = default;
    MLP(MLPConfig config, std::mt19937_64& rng);
    /// All-zero weights.
    explicit MLP(MLPConfig config);

    const MLPConfig& config() const { return config_; }
    Tensors& params() { return params_; }
    const Tensors& params() const { return params_; }

    /// inputs: input_dim x B. Returns output_dim x B.
    Eigen::MatrixXd forward(const Eigen::MatrixXd& inputs) const;
    /// Post-ReLU activations of every hidden layer for `inputs`.
    std::vector<Eigen::MatrixXd> hidden_activations(const Eigen::MatrixXd& inputs) const;

    /// MSE averaged over batch and outputs, and its exact gradient.
    double loss_and_gradient(const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& targets, Tensors& grads) const;

private:
    MLPConfig config_;
    Tensors params_;
};

}  // namespace tssid::neural
