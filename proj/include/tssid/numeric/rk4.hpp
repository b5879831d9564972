#pragma once

#include <Eigen/Dense>

namespace tssid::numeric {

/// Fixed-step classical RK4 for dx/dt = f(x, u(t)) driven by sampled inputs.
/// `inputs` holds one column per sample; between samples the input is
/// linearly interpolated, so the half-step stages see the midpoint average.
/// Returns one state column per input sample, starting with `x0`.
template <typename Rhs>
Eigen::MatrixXd integrate_rk4(Rhs&& rhs, const Eigen::VectorXd& x0, const Eigen::MatrixXd& inputs, double dt) {
    const Eigen::Index steps = inputs.cols();
    Eigen::MatrixXd states(x0.size(), steps);
    if (steps == 0) return states;
    states.col(0) = x0;
    Eigen::VectorXd x = x0;
    Eigen::VectorXd u_mid(inputs.rows());
    for (Eigen::Index k = 0; k + 1 < steps; ++k) {
        const auto u0 = inputs.col(k);
        const auto u1 = inputs.col(k + 1);
        u_mid = 0.5 * (u0 + u1);
        const Eigen::VectorXd k1 = rhs(x, u0);
        const Eigen::VectorXd k2 = rhs(x + 0.5 * dt * k1, u_mid);
        const Eigen::VectorXd k3 = rhs(x + 0.5 * dt * k2, u_mid);
        const Eigen::VectorXd k4 = rhs(x + dt * k3, u1);
        x += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        states.col(k + 1) = x;
    }
    return states;
}

}  // namespace tssid::numeric
