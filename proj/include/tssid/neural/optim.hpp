#pragma once

#include <string>

#include "tssid/neural/types.hpp"

namespace tssid::neural {

enum class OptimizerKind { RMSprop, Adam };

std::string to_string(OptimizerKind kind);
OptimizerKind optimizer_kind_from_string(const std::string& s);

struct OptimizerState {
    OptimizerKind kind = OptimizerKind::RMSprop;
    Tensors first;   // Adam first moment
    Tensors second;  // squared-gradient average
    long long steps = 0;
};

OptimizerState make_optimizer_state(OptimizerKind kind, const Tensors& params);

/// v = 0.99 v + 0.01 g^2;  p -= lr g / (sqrt(v) + 1e-8)
void step_rmsprop(Tensors& params, const Tensors& grads, OptimizerState& state, double lr);
/// beta1 0.9, beta2 0.999, eps 1e-8, bias-corrected moments.
void step_adam(Tensors& params, const Tensors& grads, OptimizerState& state, double lr);
void optimizer_step(Tensors& params, const Tensors& grads, OptimizerState& state, double lr);

}  // namespace tssid::neural
