#pragma once

#include <random>

#include "tssid/neural/types.hpp"

namespace tssid::neural {

struct LSTMConfig {
    int input_dim = 1;
    int num_layers = 3;
    int hidden_size = 6;
    int lookback = 20;

    void validate() const;
    bool operator==(const LSTMConfig&) const = default;
};

/// Stacked LSTM with a linear head applied to the top hidden state at every
/// step. Gate order inside the 4h-row blocks is input, forget, candidate,
/// output. Parameters: [W_l (4h x in), U_l (4h x h), b_l (4h x 1)] per layer,
/// then head [Wy (1 x h), by (1 x 1)]. Hidden and cell states start at zero
/// for every window.
class LSTM {
public:
    LSTM() = default;
    /// Xavier on every gate block, forget-gate bias 1, other biases 0.
    LSTM(LSTMConfig config, std::mt19937_64& rng);
    /// All-zero weights and biases.
    explicit LSTM(LSTMConfig config);

    const LSTMConfig& config() const { return config_; }
    Tensors& params() { return params_; }
    const Tensors& params() const { return params_; }

    /// Per-step outputs, steps x B. Any window length >= 1 is accepted.
    Eigen::MatrixXd forward(const Sequence& window) const;

    /// MSE averaged over steps and batch; gradients by backpropagation
    /// through time. Window length must equal the configured lookback.
    double loss_and_gradient(const Sequence& window, const Eigen::MatrixXd& targets, Tensors& grads) const;

private:
    struct Cache;
    void check_window(const Sequence& window) const;
    Eigen::MatrixXd run(const Sequence& window, Cache* cache) const;

    LSTMConfig config_;
    Tensors params_;
};

}  // namespace tssid::neural
