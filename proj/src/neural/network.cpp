#include "tssid/neural/network.hpp"

#include "tssid/error.hpp"

namespace tssid::neural {

std::string to_string(NetFamily family) { return family == NetFamily::LSTM ? "lstm" : "ffnn"; }

NetFamily net_family_from_string(const std::string& s) {
    if (s == "ffnn") return NetFamily::FFNN;
    if (s == "lstm") return NetFamily::LSTM;
    throw Error(ErrorCode::ConfigError, "unknown model family '" + s + "' (expected ffnn or lstm)");
}

void Architecture::set_input_dim(int dim) {
    mlp.input_dim = dim;
    lstm.input_dim = dim;
}

void Architecture::validate() const {
    if (family == NetFamily::LSTM) {
        lstm.validate();
    } else {
        mlp.validate();
        if (mlp.output_dim != 1) throw Error(ErrorCode::ConfigError, "torque models have a single output");
    }
}

nlohmann::json to_json(const Architecture& a) {
    if (a.family == NetFamily::LSTM) {
        return {{"family", "lstm"},
                {"input_dim", a.lstm.input_dim},
                {"num_layers", a.lstm.num_layers},
                {"hidden_size", a.lstm.hidden_size},
                {"lookback", a.lstm.lookback}};
    }
    return {{"family", "ffnn"},
            {"input_dim", a.mlp.input_dim},
            {"hidden_layers", a.mlp.hidden_layers},
            {"output_dim", a.mlp.output_dim}};
}

Architecture architecture_from_json(const nlohmann::json& j) {
    Architecture a;
    try {
        a.family = net_family_from_string(j.at("family").get<std::string>());
        if (a.family == NetFamily::LSTM) {
            a.lstm.input_dim = j.value("input_dim", a.lstm.input_dim);
            a.lstm.num_layers = j.value("num_layers", a.lstm.num_layers);
            a.lstm.hidden_size = j.value("hidden_size", a.lstm.hidden_size);
            a.lstm.lookback = j.value("lookback", a.lstm.lookback);
        } else {
            a.mlp.input_dim = j.value("input_dim", a.mlp.input_dim);
            a.mlp.hidden_layers = j.value("hidden_layers", a.mlp.hidden_layers);
            a.mlp.output_dim = j.value("output_dim", a.mlp.output_dim);
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ConfigError, std::string("architecture: ") + e.what());
    }
    a.set_input_dim(a.input_dim());
    return a;
}

Network::Network(const Architecture& arch, std::mt19937_64& rng) : arch_(arch) {
    arch_.validate();
    if (arch_.family == NetFamily::LSTM) {
        impl_ = LSTM(arch_.lstm, rng);
    } else {
        impl_ = MLP(arch_.mlp, rng);
    }
}

Network::Network(const Architecture& arch) : arch_(arch) {
    arch_.validate();
    if (arch_.family == NetFamily::LSTM) {
        impl_ = LSTM(arch_.lstm);
    } else {
        impl_ = MLP(arch_.mlp);
    }
}

Tensors& Network::params() {
    return std::visit([](auto& n) -> Tensors& { return n.params(); }, impl_);
}

const Tensors& Network::params() const {
    return std::visit([](const auto& n) -> const Tensors& { return n.params(); }, impl_);
}

Eigen::MatrixXd Network::forward(const Sequence& window) const {
    if (const auto* lstm = std::get_if<LSTM>(&impl_)) return lstm->forward(window);
    const auto& mlp = std::get<MLP>(impl_);
    if (window.empty()) throw Error(ErrorCode::DimensionMismatch, "empty input window");
    Eigen::MatrixXd out(static_cast<Eigen::Index>(window.size()), window.front().cols());
    for (std::size_t t = 0; t < window.size(); ++t) out.row(static_cast<Eigen::Index>(t)) = mlp.forward(window[t]);
    return out;
}

double Network::loss_and_gradient(const Batch& batch, Tensors& grads) const {
    if (const auto* lstm = std::get_if<LSTM>(&impl_)) return lstm->loss_and_gradient(batch.inputs, batch.targets, grads);
    if (batch.inputs.size() != 1) throw Error(ErrorCode::DimensionMismatch, "FFNN batches hold a single step");
    return std::get<MLP>(impl_).loss_and_gradient(batch.inputs.front(), batch.targets, grads);
}

}  // namespace tssid::neural
