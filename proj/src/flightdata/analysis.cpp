#include "tssid/flightdata/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "tssid/error.hpp"

namespace tssid::flightdata {

std::size_t CorrelationMatrix::index_of(std::string_view name) const {
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw Error(ErrorCode::UnknownChannel, "correlation matrix has no " + std::string(name));
    return static_cast<std::size_t>(it - names.begin());
}

CorrelationMatrix correlation_matrix(std::span<const FlightRecord> records, std::span<const std::string> channel_names) {
    const auto n = static_cast<Eigen::Index>(channel_names.size());
    // One-pass co-moment accumulation (Welford update) over pooled samples.
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(n);
    Eigen::MatrixXd comoment = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd x(n), delta(n);
    double count = 0.0;
    for (const auto& rec : records) {
        std::vector<std::span<const double>> cols;
        for (const auto& name : channel_names) cols.push_back(rec.samples(name));
        for (std::size_t i = 0; i < rec.length(); ++i) {
            for (Eigen::Index k = 0; k < n; ++k) x(k) = cols[static_cast<std::size_t>(k)][i];
            count += 1.0;
            delta = x - mean;
            mean += delta / count;
            comoment.noalias() += delta * (x - mean).transpose();
        }
    }
    if (count < 2.0) throw Error(ErrorCode::LengthMismatch, "correlation needs at least 2 pooled samples");

    CorrelationMatrix out{{channel_names.begin(), channel_names.end()}, Eigen::MatrixXd::Identity(n, n)};
    Eigen::VectorXd sd(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        if (!(comoment(k, k) > 0.0)) {
            throw Error(ErrorCode::ZeroVariance, "channel " + channel_names[static_cast<std::size_t>(k)] +
                                                     " has zero variance");
        }
        sd(k) = std::sqrt(comoment(k, k));
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            // Average the two accumulated halves so the result is exactly symmetric.
            const double c = 0.5 * (comoment(i, j) + comoment(j, i)) / (sd(i) * sd(j));
            out.values(i, j) = out.values(j, i) = std::clamp(c, -1.0, 1.0);
        }
    }
    return out;
}

FeatureRules FeatureRules::defaults() {
    FeatureRules rules;
    rules.exclude = {"T45", "NG", "TOil", "POil", "WF", "NP", "NGR", "TAT"};
    return rules;
}

std::vector<std::string> select_features(const CorrelationMatrix& corr, const std::string& target,
                                         const FeatureRules& rules) {
    const std::size_t target_idx = corr.index_of(target);
    auto contains = [](const std::vector<std::string>& v, const std::string& s) {
        return std::find(v.begin(), v.end(), s) != v.end();
    };
    if (contains(rules.exclude, target)) {
        throw Error(ErrorCode::TargetExcluded, "target " + target + " matches an exclusion rule");
    }
    std::vector<std::string> selected;
    for (std::size_t k = 0; k < corr.names.size(); ++k) {
        const auto& name = corr.names[k];
        if (k == target_idx) continue;
        if (!rules.include.empty() && !contains(rules.include, name)) continue;
        if (contains(rules.exclude, name)) continue;
        const double r = std::abs(corr.values(static_cast<Eigen::Index>(target_idx), static_cast<Eigen::Index>(k)));
        if (r < rules.min_abs_corr || r > rules.max_abs_corr) continue;
        selected.push_back(name);
    }
    return selected;
}

}  // namespace tssid::flightdata
