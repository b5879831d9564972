#include "tssid/neural/optim.hpp"

#include <cmath>

#include "tssid/error.hpp"

namespace tssid::neural {

std::string to_string(OptimizerKind kind) { return kind == OptimizerKind::Adam ? "adam" : "rmsprop"; }

OptimizerKind optimizer_kind_from_string(const std::string& s) {
    if (s == "adam") return OptimizerKind::Adam;
    if (s == "rmsprop") return OptimizerKind::RMSprop;
    throw Error(ErrorCode::ConfigError, "unknown optimizer '" + s + "' (expected rmsprop or adam)");
}

OptimizerState make_optimizer_state(OptimizerKind kind, const Tensors& params) {
    OptimizerState s;
    s.kind = kind;
    for (const auto& p : params) {
        s.second.push_back(Eigen::MatrixXd::Zero(p.rows(), p.cols()));
        if (kind == OptimizerKind::Adam) s.first.push_back(Eigen::MatrixXd::Zero(p.rows(), p.cols()));
    }
    return s;
}

namespace {

void check_shapes(const Tensors& params, const Tensors& grads, const OptimizerState& state) {
    bool ok = params.size() == grads.size() && params.size() == state.second.size() &&
              (state.kind != OptimizerKind::Adam || state.first.size() == params.size());
    for (std::size_t k = 0; ok && k < params.size(); ++k) {
        const auto r = params[k].rows(), c = params[k].cols();
        ok = grads[k].rows() == r && grads[k].cols() == c && state.second[k].rows() == r && state.second[k].cols() == c;
        if (ok && state.kind == OptimizerKind::Adam) ok = state.first[k].rows() == r && state.first[k].cols() == c;
    }
    if (!ok) throw Error(ErrorCode::ShapeMismatch, "parameter, gradient and optimizer state shapes differ");
}

constexpr double kEps = 1e-8;

}  // namespace

void step_rmsprop(Tensors& params, const Tensors& grads, OptimizerState& state, double lr) {
    check_shapes(params, grads, state);
    constexpr double rho = 0.99;
    for (std::size_t k = 0; k < params.size(); ++k) {
        auto& v = state.second[k];
        v = rho * v + (1.0 - rho) * grads[k].cwiseAbs2();
        params[k].array() -= lr * grads[k].array() / (v.array().sqrt() + kEps);
    }
    ++state.steps;
}

void step_adam(Tensors& params, const Tensors& grads, OptimizerState& state, double lr) {
    check_shapes(params, grads, state);
    constexpr double b1 = 0.9, b2 = 0.999;
    ++state.steps;
    const double c1 = 1.0 - std::pow(b1, static_cast<double>(state.steps));
    const double c2 = 1.0 - std::pow(b2, static_cast<double>(state.steps));
    for (std::size_t k = 0; k < params.size(); ++k) {
        auto& m = state.first[k];
        auto& v = state.second[k];
        m = b1 * m + (1.0 - b1) * grads[k];
        v = b2 * v + (1.0 - b2) * grads[k].cwiseAbs2();
        params[k].array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + kEps);
    }
}

void optimizer_step(Tensors& params, const Tensors& grads, OptimizerState& state, double lr) {
    if (state.kind == OptimizerKind::Adam) {
        step_adam(params, grads, state, lr);
    } else {
        step_rmsprop(params, grads, state, lr);
    }
}

}  // namespace tssid::neural
