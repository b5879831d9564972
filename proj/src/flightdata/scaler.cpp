#include "tssid/flightdata/scaler.hpp"

#include <algorithm>
#include <limits>

#include "tssid/error.hpp"

namespace tssid::flightdata {

ScalerParams::ScalerParams(std::map<std::string, Range> ranges) : ranges_(std::move(ranges)) {
    for (const auto& [name, r] : ranges_) {
        if (!(r.max > r.min)) throw Error(ErrorCode::DegenerateChannel, "channel " + name + " has max <= min");
    }
}

const Range& ScalerParams::range(std::string_view name) const {
    auto it = ranges_.find(std::string(name));
    if (it == ranges_.end()) throw Error(ErrorCode::UnknownChannel, "scaler not fitted for " + std::string(name));
    return it->second;
}

double ScalerParams::scale(std::string_view name, double value) const {
    const auto& r = range(name);
    return (value - r.min) / (r.max - r.min);
}

double ScalerParams::unscale(std::string_view name, double value) const {
    const auto& r = range(name);
    return value * (r.max - r.min) + r.min;
}

ScalerParams fit_minmax(std::span<const FlightRecord> records, std::span<const std::string> channel_names) {
    std::map<std::string, Range> ranges;
    for (const auto& name : channel_names) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        for (const auto& rec : records) {
            for (double v : rec.samples(name)) {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
        }
        if (!(hi > lo)) throw Error(ErrorCode::DegenerateChannel, "channel " + name + " is constant over training data");
        ranges.emplace(name, Range{lo, hi});
    }
    return ScalerParams(std::move(ranges));
}

namespace {

template <typename Fn>
FlightRecord map_channels(const ScalerParams& params, const FlightRecord& record, Fn fn) {
    std::vector<Channel> channels = record.channels();
    for (auto& ch : channels) {
        params.range(ch.name);
        for (double& v : ch.samples) v = fn(ch.name, v);
    }
    return record.with_channels(std::move(channels));
}

}  // namespace

FlightRecord apply_minmax(const ScalerParams& params, const FlightRecord& record) {
    return map_channels(params, record, [&](const std::string& n, double v) { return params.scale(n, v); });
}

FlightRecord invert_minmax(const ScalerParams& params, const FlightRecord& record) {
    return map_channels(params, record, [&](const std::string& n, double v) { return params.unscale(n, v); });
}

}  // namespace tssid::flightdata
