#pragma once

#include <vector>

#include <Eigen/Dense>

namespace tssid::neural {

/// Ordered parameter (or gradient) tensors of one network.
using Tensors = std::vector<Eigen::MatrixXd>;

/// One features x batch matrix per time step.
using Sequence = std::vector<Eigen::MatrixXd>;

/// Mini-batch of windows: inputs[t] is features x B, targets is steps x B.
struct Batch {
    Sequence inputs;
    Eigen::MatrixXd targets;
};

}  // namespace tssid::neural
