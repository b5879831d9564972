#pragma once

#include <random>
#include <string>
#include <variant>

#include <nlohmann/json.hpp>

#include "tssid/neural/lstm.hpp"
#include "tssid/neural/mlp.hpp"

namespace tssid::neural {

enum class NetFamily { FFNN, LSTM };

std::string to_string(NetFamily family);
NetFamily net_family_from_string(const std::string& s);

/// Architecture descriptor. The FFNN is a lookback-1 model: it sees one time
/// step per sample.
struct Architecture {
    NetFamily family = NetFamily::FFNN;
    MLPConfig mlp;
    LSTMConfig lstm;

    int lookback() const { return family == NetFamily::LSTM ? lstm.lookback : 1; }
    int input_dim() const { return family == NetFamily::LSTM ? lstm.input_dim : mlp.input_dim; }
    void set_input_dim(int dim);
    void validate() const;
    bool operator==(const Architecture&) const = default;
};

nlohmann::json to_json(const Architecture& a);
Architecture architecture_from_json(const nlohmann::json& j);

/// Either network behind one window-based interface: inputs are sequences
/// of `lookback` steps, outputs are steps x batch.
class Network {
public:
    Network() = default;
    Network(const Architecture& arch, std::mt19937_64& rng);
    /// All-zero parameters.
    explicit Network(const Architecture& arch);

    const Architecture& architecture() const { return arch_; }
    Tensors& params();
    const Tensors& params() const;

    Eigen::MatrixXd forward(const Sequence& window) const;
    double loss_and_gradient(const Batch& batch, Tensors& grads) const;

private:
    Architecture arch_;
    std::variant<MLP, LSTM> impl_;
};

}  // namespace tssid::neural
