#include "tssid/neural/init.hpp"

#include <cmath>

#include "tssid/error.hpp"

namespace tssid::neural {

Eigen::MatrixXd init_xavier(int fan_in, int fan_out, std::mt19937_64& rng) {
    if (fan_in < 1 || fan_out < 1) throw Error(ErrorCode::ConfigError, "xavier init needs positive fan-in and fan-out");
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-bound, bound);
    Eigen::MatrixXd w(fan_out, fan_in);
    // Row-major fill so the draw order does not depend on Eigen's storage.
    for (int r = 0; r < fan_out; ++r) {
        for (int c = 0; c < fan_in; ++c) w(r, c) = dist(rng);
    }
    return w;
}

Eigen::MatrixXd init_xavier(int fan_in, int fan_out, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    return init_xavier(fan_in, fan_out, rng);
}

}  // namespace tssid::neural
