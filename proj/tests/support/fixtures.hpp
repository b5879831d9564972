#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "tssid/flightdata/record.hpp"
#include "tssid/synthgen/synthgen.hpp"

namespace fixture {

using tssid::flightdata::Channel;
using tssid::flightdata::FlightRecord;
using tssid::flightdata::ManeuverSegment;

/// Hold / ramp / step flight with the given ground truth.
inline tssid::synthgen::SyntheticFlightSpec flight_spec(const std::string& id, tssid::synthgen::GroundTruthParams truth,
                                                        double rate_hz = 20.0) {
    using tssid::synthgen::ManeuverProfile;
    using tssid::synthgen::ProfileKind;
    tssid::synthgen::SyntheticFlightSpec s;
    s.flight_id = id;
    s.sample_rate_hz = rate_hz;
    s.truth = truth;
    ManeuverProfile hold{ProfileKind::Hold, "hover", 8.0, 300.0};
    ManeuverProfile ramp{ProfileKind::Ramp, "climb", 8.0, 300.0, 450.0};
    ManeuverProfile step{ProfileKind::Step, "", 8.0, 450.0, 380.0, 2.0};
    s.profiles = {hold, ramp, step};
    return s;
}

inline tssid::synthgen::GroundTruthParams first_order_truth() {
    tssid::synthgen::GroundTruthParams t;
    t.order = tssid::synthgen::EngineOrder::First;
    return t;
}

/// Random positive TRQ series with `segments` equal maneuvers.
inline FlightRecord random_flight(const std::string& id, std::size_t length, int segments, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(50.0, 150.0);
    Channel trq{"TRQ", "Nm", {}};
    for (std::size_t i = 0; i < length; ++i) trq.samples.push_back(u(rng));
    std::vector<ManeuverSegment> segs;
    const std::size_t each = length / static_cast<std::size_t>(segments);
    for (int k = 0; k < segments; ++k) {
        segs.push_back({"m" + std::to_string(k), k * each, (k + 1) * each, false});
    }
    return FlightRecord(id, 10.0, {trq}, segs);
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("tssid_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace fixture
