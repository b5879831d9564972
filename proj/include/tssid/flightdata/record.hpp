#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tssid::flightdata {

/// Unit string for a known flight-log channel name ("" when unknown).
std::string_view unit_for(std::string_view channel_name);

/// All channel names of the flight-test variable list, in table order.
const std::vector<std::string>& known_channels();

struct Channel {
    std::string name;
    std::string unit;
    std::vector<double> samples;

    bool operator==(const Channel&) const = default;
};

struct ManeuverSegment {
    std::string label;
    std::size_t start_index = 0;
    std::size_t end_index = 0;  // exclusive
    bool excluded = false;

    std::size_t length() const { return end_index - start_index; }
    bool operator==(const ManeuverSegment&) const = default;
};

/// Uniformly sampled multichannel flight log. All channels share one length
/// (at least two samples) and channel names are unique.
class FlightRecord {
public:
    FlightRecord() = default;
    FlightRecord(std::string flight_id, double sample_rate_hz, std::vector<Channel> channels,
                 std::vector<ManeuverSegment> maneuvers = {}, double start_time_s = 0.0);

    const std::string& flight_id() const { return flight_id_; }
    double sample_rate_hz() const { return sample_rate_hz_; }
    double dt() const { return 1.0 / sample_rate_hz_; }
    double start_time_s() const { return start_time_s_; }
    std::size_t length() const { return channels_.empty() ? 0 : channels_.front().samples.size(); }

    const std::vector<Channel>& channels() const { return channels_; }
    const std::vector<ManeuverSegment>& maneuvers() const { return maneuvers_; }
    std::vector<std::string> channel_names() const;

    bool has_channel(std::string_view name) const;
    /// Throws Error(MissingChannel) when absent.
    const Channel& channel(std::string_view name) const;
    std::span<const double> samples(std::string_view name) const { return channel(name).samples; }

    /// Segments that downstream fitting and scoring use. An unannotated
    /// flight counts as a single "flight" segment.
    std::vector<ManeuverSegment> active_maneuvers() const;

    FlightRecord with_maneuvers(std::vector<ManeuverSegment> maneuvers) const;
    FlightRecord with_channels(std::vector<Channel> channels) const;

    bool operator==(const FlightRecord&) const = default;

private:
    void validate() const;

    std::string flight_id_;
    double sample_rate_hz_ = 1.0;
    double start_time_s_ = 0.0;
    std::vector<Channel> channels_;
    std::vector<ManeuverSegment> maneuvers_;
};

/// Marks segments whose label is in `excluded_labels`; samples are kept.
FlightRecord filter_maneuvers(const FlightRecord& record, std::span<const std::string> excluded_labels);

}  // namespace tssid::flightdata
