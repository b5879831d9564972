#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "tssid/flightdata/record.hpp"

namespace tssid::flightdata {

struct Range {
    double min = 0.0;
    double max = 1.0;
    bool operator==(const Range&) const = default;
};

/// Per-channel min-max ranges fitted on training flights. The affine map is
/// applied unchanged to other flights, so values outside the training range
/// land outside [0, 1].
class ScalerParams {
public:
    ScalerParams() = default;
    explicit ScalerParams(std::map<std::string, Range> ranges);

    const std::map<std::string, Range>& ranges() const { return ranges_; }
    bool has(std::string_view name) const { return ranges_.find(std::string(name)) != ranges_.end(); }
    const Range& range(std::string_view name) const;

    double scale(std::string_view name, double value) const;
    double unscale(std::string_view name, double value) const;

    bool operator==(const ScalerParams&) const = default;

private:
    std::map<std::string, Range> ranges_;
};

ScalerParams fit_minmax(std::span<const FlightRecord> records, std::span<const std::string> channel_names);

FlightRecord apply_minmax(const ScalerParams& params, const FlightRecord& record);
FlightRecord invert_minmax(const ScalerParams& params, const FlightRecord& record);

}  // namespace tssid::flightdata
