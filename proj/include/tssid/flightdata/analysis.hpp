#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tssid/flightdata/record.hpp"

namespace tssid::flightdata {

struct CorrelationMatrix {
    std::vector<std::string> names;
    Eigen::MatrixXd values;

    std::size_t index_of(std::string_view name) const;
    double at(std::string_view a, std::string_view b) const { return values(index_of(a), index_of(b)); }
};

/// Pearson coefficients over the samples of all records pooled together.
/// Symmetric with an exact unit diagonal; throws ZeroVariance naming the
/// first constant channel.
CorrelationMatrix correlation_matrix(std::span<const FlightRecord> records, std::span<const std::string> channel_names);

/// Declarative feature-selection rules. A feature survives when it is in
/// `include` (or `include` is empty), not in `exclude`, and its absolute
/// correlation with the target lies within [min_abs_corr, max_abs_corr].
struct FeatureRules {
    std::vector<std::string> include;
    std::vector<std::string> exclude;
    double min_abs_corr = 0.0;
    double max_abs_corr = 1.0;

    /// Engine-internal or normally unavailable variables dropped from the
    /// MISO input set.
    static FeatureRules defaults();
};

/// Features in correlation-matrix order. Throws TargetExcluded if the
/// target itself matches an exclusion rule.
std::vector<std::string> select_features(const CorrelationMatrix& corr, const std::string& target,
                                         const FeatureRules& rules);

}  // namespace tssid::flightdata
