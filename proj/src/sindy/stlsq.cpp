#include "tssid/sindy/stlsq.hpp"

#include <cmath>

#include "tssid/error.hpp"

namespace tssid::sindy {

namespace {

Eigen::VectorXd solve_active(const Eigen::MatrixXd& A, const Eigen::VectorXd& y, double lambda) {
    if (lambda > 0.0) {
        // Ridge via the augmented system [A; sqrt(lambda) I] to avoid squaring
        // the condition number.
        const Eigen::Index m = A.rows(), k = A.cols();
        Eigen::MatrixXd aug(m + k, k);
        aug.topRows(m) = A;
        aug.bottomRows(k) = std::sqrt(lambda) * Eigen::MatrixXd::Identity(k, k);
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m + k);
        rhs.head(m) = y;
        return aug.householderQr().solve(rhs);
    }
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
    if (qr.rank() < A.cols()) {
        throw Error(ErrorCode::RankDeficient, "library columns are linearly dependent (rank " +
                                                  std::to_string(qr.rank()) + " < " + std::to_string(A.cols()) + ")");
    }
    return qr.solve(y);
}

}  // namespace

StlsqResult stlsq(const Eigen::MatrixXd& theta, const Eigen::MatrixXd& targets, const StlsqOptions& options) {
    if (theta.rows() != targets.rows()) {
        throw Error(ErrorCode::DimensionMismatch, "library and target snapshot counts differ");
    }
    if (!(options.threshold > 0.0) || options.max_iterations < 1 || options.ridge_lambda < 0.0) {
        throw Error(ErrorCode::ConfigError, "stlsq needs threshold > 0, max_iterations >= 1, ridge_lambda >= 0");
    }
    const Eigen::Index m = theta.rows();
    const Eigen::Index p = theta.cols();
    const Eigen::Index neq = targets.cols();
    if (m == 0) throw Error(ErrorCode::SeriesTooShort, "no snapshots to regress");

    StlsqResult result;
    result.column_scale = (theta.array().square().colwise().sum() / static_cast<double>(m)).sqrt().transpose();
    Eigen::MatrixXd normalized = theta;
    for (Eigen::Index j = 0; j < p; ++j) {
        if (result.column_scale(j) > 0.0) normalized.col(j) /= result.column_scale(j);
    }
    result.normalized_coefficients = Eigen::MatrixXd::Zero(neq, p);
    result.active_history.resize(static_cast<std::size_t>(neq));

    for (Eigen::Index eq = 0; eq < neq; ++eq) {
        const Eigen::VectorXd y = targets.col(eq);
        auto& history = result.active_history[static_cast<std::size_t>(eq)];
        if (y.cwiseAbs().maxCoeff() == 0.0) continue;

        std::vector<Eigen::Index> active;
        for (Eigen::Index j = 0; j < p; ++j) {
            if (result.column_scale(j) > 0.0) active.push_back(j);
        }
        Eigen::VectorXd xi = Eigen::VectorXd::Zero(p);
        int iter = 0;
        while (iter < options.max_iterations) {
            ++iter;
            if (active.empty()) break;
            Eigen::MatrixXd A(m, static_cast<Eigen::Index>(active.size()));
            for (std::size_t k = 0; k < active.size(); ++k) A.col(static_cast<Eigen::Index>(k)) = normalized.col(active[k]);
            const Eigen::VectorXd sol = solve_active(A, y, options.ridge_lambda);
            xi.setZero();
            std::vector<Eigen::Index> kept;
            for (std::size_t k = 0; k < active.size(); ++k) {
                const double c = sol(static_cast<Eigen::Index>(k));
                if (std::abs(c) >= options.threshold) {
                    xi(active[k]) = c;
                    kept.push_back(active[k]);
                }
            }
            const bool stable = kept.size() == active.size();
            active = std::move(kept);
            history.push_back(static_cast<int>(active.size()));
            if (stable) break;
        }
        result.iterations = std::max(result.iterations, iter);
        if (active.empty()) {
            throw Error(ErrorCode::NoActiveTerms,
                        "threshold " + std::to_string(options.threshold) + " removed every term of equation " +
                            std::to_string(eq));
        }
        result.normalized_coefficients.row(eq) = xi.transpose();
    }

    result.coefficients = result.normalized_coefficients;
    for (Eigen::Index j = 0; j < p; ++j) {
        if (result.column_scale(j) > 0.0) result.coefficients.col(j) /= result.column_scale(j);
    }
    return result;
}

}  // namespace tssid::sindy
