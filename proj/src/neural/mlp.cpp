#include "tssid/neural/mlp.hpp"

#include "tssid/error.hpp"
#include "tssid/neural/init.hpp"

namespace tssid::neural {

void MLPConfig::validate() const {
    if (input_dim < 1 || output_dim < 1) throw Error(ErrorCode::ConfigError, "MLP dimensions must be >= 1");
    for (int w : hidden_layers) {
        if (w < 1) throw Error(ErrorCode::ConfigError, "MLP hidden widths must be >= 1");
    }
}

namespace {

std::vector<int> layer_sizes(const MLPConfig& c) {
    std::vector<int> sizes{c.input_dim};
    sizes.insert(sizes.end(), c.hidden_layers.begin(), c.hidden_layers.end());
    sizes.push_back(c.output_dim);
    return sizes;
}

}  // namespace

MLP::MLP(MLPConfig config, std::mt19937_64& rng) : config_(std::move(config)) {
    config_.validate();
    const auto sizes = layer_sizes(config_);
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
        params_.push_back(init_xavier(sizes[l], sizes[l + 1], rng));
        params_.push_back(Eigen::MatrixXd::Zero(sizes[l + 1], 1));
    }
}

MLP::MLP(MLPConfig config) : config_(std::move(config)) {
    config_.validate();
    const auto sizes = layer_sizes(config_);
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
        params_.push_back(Eigen::MatrixXd::Zero(sizes[l + 1], sizes[l]));
        params_.push_back(Eigen::MatrixXd::Zero(sizes[l + 1], 1));
    }
}

Eigen::MatrixXd MLP::forward(const Eigen::MatrixXd& inputs) const {
    if (inputs.rows() != config_.input_dim) {
        throw Error(ErrorCode::DimensionMismatch, "MLP expects " + std::to_string(config_.input_dim) +
                                                      " inputs, got " + std::to_string(inputs.rows()));
    }
    Eigen::MatrixXd a = inputs;
    const std::size_t layers = params_.size() / 2;
    for (std::size_t l = 0; l < layers; ++l) {
        Eigen::MatrixXd z = params_[2 * l] * a;
        z.colwise() += params_[2 * l + 1].col(0);
        a = (l + 1 < layers) ? Eigen::MatrixXd(z.cwiseMax(0.0)) : z;
    }
    return a;
}

std::vector<Eigen::MatrixXd> MLP::hidden_activations(const Eigen::MatrixXd& inputs) const {
    if (inputs.rows() != config_.input_dim) throw Error(ErrorCode::DimensionMismatch, "MLP input dimension");
    std::vector<Eigen::MatrixXd> out;
    Eigen::MatrixXd a = inputs;
    for (std::size_t l = 0; l + 1 < params_.size() / 2; ++l) {
        Eigen::MatrixXd z = params_[2 * l] * a;
        z.colwise() += params_[2 * l + 1].col(0);
        a = z.cwiseMax(0.0);
        out.push_back(a);
    }
    return out;
}

double MLP::loss_and_gradient(const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& targets, Tensors& grads) const {
    if (inputs.rows() != config_.input_dim) throw Error(ErrorCode::DimensionMismatch, "MLP input dimension");
    if (targets.rows() != config_.output_dim || targets.cols() != inputs.cols()) {
        throw Error(ErrorCode::DimensionMismatch, "MLP target shape");
    }
    const std::size_t layers = params_.size() / 2;
    std::vector<Eigen::MatrixXd> acts{inputs};
    std::vector<Eigen::MatrixXd> pre;
    for (std::size_t l = 0; l < layers; ++l) {
        Eigen::MatrixXd z = params_[2 * l] * acts.back();
        z.colwise() += params_[2 * l + 1].col(0);
        pre.push_back(z);
        acts.push_back(l + 1 < layers ? Eigen::MatrixXd(z.cwiseMax(0.0)) : z);
    }
    const double n = static_cast<double>(targets.size());
    const Eigen::MatrixXd err = acts.back() - targets;
    const double loss = err.squaredNorm() / n;

    grads.resize(params_.size());
    Eigen::MatrixXd delta = (2.0 / n) * err;
    for (std::size_t l = layers; l-- > 0;) {
        grads[2 * l] = delta * acts[l].transpose();
        grads[2 * l + 1] = delta.rowwise().sum();
        if (l > 0) {
            delta = (params_[2 * l].transpose() * delta).cwiseProduct(
                (pre[l - 1].array() > 0.0).cast<double>().matrix());
        }
    }
    return loss;
}

}  // namespace tssid::neural
