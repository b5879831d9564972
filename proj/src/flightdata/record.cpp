#include "tssid/flightdata/record.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>

#include "tssid/error.hpp"

namespace tssid::flightdata {

namespace {

struct ChannelInfo {
    const char* name;
    const char* unit;
};

constexpr ChannelInfo kTable[] = {
    {"TRQ", "Nm"},   {"COL", "%"},    {"T1", "°C"},   {"T45", "°C"},   {"TOil", "°C"},
    {"POil", "psi"}, {"P0", "psi"},   {"NR", "%"},    {"TAT", "°C"},   {"NP", "%"},
    {"NG", "%"},     {"NGR", "%"},    {"WF", "lb/h"}, {"AIRSPEED", "kts"},
};

}  // namespace

std::string_view unit_for(std::string_view channel_name) {
    for (const auto& info : kTable) {
        if (channel_name == info.name) return info.unit;
    }
    return "";
}

const std::vector<std::string>& known_channels() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (const auto& info : kTable) out.emplace_back(info.name);
        return out;
    }();
    return names;
}

FlightRecord::FlightRecord(std::string flight_id, double sample_rate_hz, std::vector<Channel> channels,
                           std::vector<ManeuverSegment> maneuvers, double start_time_s)
    : flight_id_(std::move(flight_id)),
      sample_rate_hz_(sample_rate_hz),
      start_time_s_(start_time_s),
      channels_(std::move(channels)),
      maneuvers_(std::move(maneuvers)) {
    validate();
}

void FlightRecord::validate() const {
    if (!(sample_rate_hz_ > 0.0) || !std::isfinite(sample_rate_hz_)) {
        throw Error(ErrorCode::InvalidRecord, flight_id_ + ": sample rate must be positive");
    }
    if (channels_.empty()) throw Error(ErrorCode::InvalidRecord, flight_id_ + ": no channels");
    const std::size_t m = channels_.front().samples.size();
    if (m < 2) {
        throw Error(ErrorCode::LengthMismatch,
                    flight_id_ + ": need at least 2 samples, got " + std::to_string(m));
    }
    std::set<std::string> seen;
    for (const auto& ch : channels_) {
        if (!seen.insert(ch.name).second) {
            throw Error(ErrorCode::InvalidRecord, flight_id_ + ": duplicate channel " + ch.name);
        }
        if (ch.samples.size() != m) {
            throw Error(ErrorCode::LengthMismatch, flight_id_ + ": channel " + ch.name + " has " +
                                                       std::to_string(ch.samples.size()) + " samples, expected " +
                                                       std::to_string(m));
        }
        for (double v : ch.samples) {
            if (!std::isfinite(v)) {
                throw Error(ErrorCode::NonNumericCell, flight_id_ + ": non-finite value in " + ch.name);
            }
        }
    }
    std::size_t prev_end = 0;
    for (const auto& seg : maneuvers_) {
        if (seg.start_index >= seg.end_index || seg.end_index > m) {
            throw Error(ErrorCode::InvalidRecord, flight_id_ + ": maneuver '" + seg.label + "' has invalid bounds");
        }
        if (seg.start_index < prev_end) {
            throw Error(ErrorCode::InvalidRecord, flight_id_ + ": maneuvers overlap or are unsorted");
        }
        prev_end = seg.end_index;
    }
}

std::vector<std::string> FlightRecord::channel_names() const {
    std::vector<std::string> names;
    names.reserve(channels_.size());
    for (const auto& ch : channels_) names.push_back(ch.name);
    return names;
}

bool FlightRecord::has_channel(std::string_view name) const {
    return std::any_of(channels_.begin(), channels_.end(), [&](const Channel& c) { return c.name == name; });
}

const Channel& FlightRecord::channel(std::string_view name) const {
    for (const auto& ch : channels_) {
        if (ch.name == name) return ch;
    }
    throw Error(ErrorCode::MissingChannel, flight_id_ + ": no channel " + std::string(name));
}

std::vector<ManeuverSegment> FlightRecord::active_maneuvers() const {
    if (maneuvers_.empty()) return {ManeuverSegment{"flight", 0, length(), false}};
    std::vector<ManeuverSegment> out;
    for (const auto& seg : maneuvers_) {
        if (!seg.excluded) out.push_back(seg);
    }
    return out;
}

FlightRecord FlightRecord::with_maneuvers(std::vector<ManeuverSegment> maneuvers) const {
    return FlightRecord(flight_id_, sample_rate_hz_, channels_, std::move(maneuvers), start_time_s_);
}

FlightRecord FlightRecord::with_channels(std::vector<Channel> channels) const {
    return FlightRecord(flight_id_, sample_rate_hz_, std::move(channels), maneuvers_, start_time_s_);
}

FlightRecord filter_maneuvers(const FlightRecord& record, std::span<const std::string> excluded_labels) {
    std::vector<ManeuverSegment> segments = record.maneuvers();
    for (auto& seg : segments) {
        if (std::find(excluded_labels.begin(), excluded_labels.end(), seg.label) != excluded_labels.end()) {
            seg.excluded = true;
        }
    }
    return record.with_maneuvers(std::move(segments));
}

}  // namespace tssid::flightdata
