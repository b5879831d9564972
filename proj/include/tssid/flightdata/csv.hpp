#pragma once

#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "tssid/flightdata/record.hpp"

namespace tssid::flightdata {

/// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

/// Parses a full cell as a finite double; returns false on anything else.
bool parse_double(std::string_view text, double& out);

/// Reads a flight CSV (`time_s,<CHANNEL>...`). Only the channels named in
/// `schema` are kept, in schema order; an empty schema keeps every column.
/// Row numbers in NonNumericCell messages are 1-based data rows.
FlightRecord ingest_csv(std::istream& in, std::span<const std::string> schema, const std::string& flight_id,
                        double sample_rate_hz);

void emit_csv(const FlightRecord& record, std::ostream& out);

/// One row of the maneuver sidecar file.
struct ManeuverEntry {
    std::string flight_id;
    std::string label;
    double start_s = 0.0;
    double end_s = 0.0;
};

std::vector<ManeuverEntry> ingest_maneuvers_csv(std::istream& in);

void emit_maneuvers_csv(std::span<const FlightRecord> records, std::ostream& out);

/// Converts the sidecar rows of one flight into index segments (sorted by
/// start) and attaches them to the record.
FlightRecord attach_maneuvers(const FlightRecord& record, std::span<const ManeuverEntry> entries);

}  // namespace tssid::flightdata
