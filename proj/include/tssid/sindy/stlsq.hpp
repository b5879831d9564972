#pragma once

#include <vector>

#include <Eigen/Dense>

namespace tssid::sindy {

struct StlsqOptions {
    double threshold = 0.05;   // applied to coefficients of unit-RMS columns
    int max_iterations = 20;
    double ridge_lambda = 1e-12;
};

struct StlsqResult {
    Eigen::MatrixXd coefficients;             // equations x terms, original units
    Eigen::MatrixXd normalized_coefficients;  // equations x terms, unit-RMS column units
    Eigen::VectorXd column_scale;             // RMS of every library column
    int iterations = 0;
    /// Active-term count per equation after each iteration.
    std::vector<std::vector<int>> active_history;
};

/// Sequentially thresholded least squares. Columns of `theta` are scaled to
/// unit RMS; each pass solves a ridge least-squares problem on the active
/// columns and drops every coefficient whose normalized magnitude is below
/// the threshold, until the active set is stable or max_iterations passes
/// have run. Identically zero targets yield zero coefficients.
///
/// Throws RankDeficient (ridge_lambda == 0 and the active columns are
/// singular) and NoActiveTerms (a non-zero target lost every term).
StlsqResult stlsq(const Eigen::MatrixXd& theta, const Eigen::MatrixXd& targets, const StlsqOptions& options);

}  // namespace tssid::sindy
