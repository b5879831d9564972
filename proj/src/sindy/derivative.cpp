#include "tssid/sindy/derivative.hpp"

#include <Eigen/Dense>

#include "tssid/error.hpp"

namespace tssid::sindy {

std::string to_string(DerivativeMethod method) {
    return method == DerivativeMethod::Central ? "central" : "smoothed_central";
}

DerivativeMethod derivative_method_from_string(const std::string& s) {
    if (s == "central") return DerivativeMethod::Central;
    if (s == "smoothed_central") return DerivativeMethod::SmoothedCentral;
    throw Error(ErrorCode::ConfigError, "unknown derivative method '" + s + "'");
}

namespace {

// Rows of the returned matrix map a window of samples onto the fitted
// polynomial's value at each window position.
Eigen::MatrixXd savgol_projection(int window, int order) {
    const int half = window / 2;
    Eigen::MatrixXd A(window, order + 1);
    for (int i = 0; i < window; ++i) {
        double p = 1.0;
        for (int j = 0; j <= order; ++j) {
            A(i, j) = p;
            p *= static_cast<double>(i - half);
        }
    }
    // Hat matrix A (A^T A)^-1 A^T via QR for conditioning.
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(A);
    const Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(window, order + 1);
    return Q * Q.transpose();
}

}  // namespace

std::vector<double> savgol_smooth(std::span<const double> series, int window, int order) {
    if (window < 3 || window % 2 == 0 || order < 0 || order >= window) {
        throw Error(ErrorCode::ConfigError, "smoother needs an odd window >= 3 and order < window");
    }
    const auto n = static_cast<int>(series.size());
    std::vector<double> out(series.begin(), series.end());
    if (n < window) return out;
    const Eigen::MatrixXd H = savgol_projection(window, order);
    const int half = window / 2;
    Eigen::Map<const Eigen::VectorXd> y(series.data(), n);
    // Fit deviations from the sample itself so constant stretches map back
    // exactly onto themselves.
    auto fit = [&](int row, int window_start, int i) {
        const double ref = y(i);
        const auto seg = y.segment(window_start, window);
        return ref + H.row(row).dot(seg - Eigen::VectorXd::Constant(window, ref));
    };
    for (int i = half; i < n - half; ++i) out[static_cast<std::size_t>(i)] = fit(half, i - half, i);
    for (int i = 0; i < half; ++i) {
        out[static_cast<std::size_t>(i)] = fit(i, 0, i);
        out[static_cast<std::size_t>(n - 1 - i)] = fit(window - 1 - i, n - window, n - 1 - i);
    }
    return out;
}

std::vector<double> differentiate(std::span<const double> series, double dt, DerivativeMethod method) {
    const std::size_t n = series.size();
    if (n < 3) throw Error(ErrorCode::SeriesTooShort, "differentiation needs at least 3 samples");
    if (!(dt > 0.0)) throw Error(ErrorCode::ConfigError, "dt must be positive");
    std::vector<double> smoothed;
    std::span<const double> x = series;
    if (method == DerivativeMethod::SmoothedCentral) {
        smoothed = savgol_smooth(series, 7, 3);
        x = smoothed;
    }
    std::vector<double> d(n);
    const double inv = 1.0 / (2.0 * dt);
    for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (x[i + 1] - x[i - 1]) * inv;
    d[0] = (-3.0 * x[0] + 4.0 * x[1] - x[2]) * inv;
    d[n - 1] = (3.0 * x[n - 1] - 4.0 * x[n - 2] + x[n - 3]) * inv;
    return d;
}

}  // namespace tssid::sindy
