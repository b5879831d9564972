#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace tssid::neural {

/// fan_out x fan_in matrix, uniform on ±sqrt(6 / (fan_in + fan_out)).
Eigen::MatrixXd init_xavier(int fan_in, int fan_out, std::mt19937_64& rng);
Eigen::MatrixXd init_xavier(int fan_in, int fan_out, std::uint64_t seed);

}  // namespace tssid::neural
