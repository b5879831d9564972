#include "tssid/flightdata/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>

#include "tssid/error.hpp"

namespace tssid::flightdata {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_row(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t pos = 0;
    while (true) {
        const std::size_t comma = line.find(',', pos);
        if (comma == std::string_view::npos) {
            cells.push_back(trim(line.substr(pos)));
            break;
        }
        cells.push_back(trim(line.substr(pos, comma - pos)));
        pos = comma + 1;
    }
    return cells;
}

bool read_nonblank_line(std::istream& in, std::string& line) {
    while (std::getline(in, line)) {
        if (!trim(line).empty()) return true;
    }
    return false;
}

}  // namespace

std::string format_double(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

bool parse_double(std::string_view text, double& out) {
    text = trim(text);
    if (text.empty()) return false;
    if (text.front() == '+') text.remove_prefix(1);
    const auto res = std::from_chars(text.data(), text.data() + text.size(), out);
    return res.ec == std::errc() && res.ptr == text.data() + text.size() && std::isfinite(out);
}

FlightRecord ingest_csv(std::istream& in, std::span<const std::string> schema, const std::string& flight_id,
                        double sample_rate_hz) {
    std::string line;
    if (!read_nonblank_line(in, line)) throw Error(ErrorCode::LengthMismatch, flight_id + ": empty file");
    std::string header_line = line;
    if (header_line.size() >= 3 && header_line.compare(0, 3, "\xEF\xBB\xBF") == 0) header_line.erase(0, 3);
    const auto header_cells = split_row(header_line);
    std::vector<std::string> header(header_cells.begin(), header_cells.end());
    if (header.empty() || header.front() != "time_s") {
        throw Error(ErrorCode::MissingChannel, flight_id + ": first column must be time_s");
    }

    std::vector<std::string> wanted;
    if (schema.empty()) {
        wanted.assign(header.begin() + 1, header.end());
    } else {
        wanted.assign(schema.begin(), schema.end());
    }
    std::vector<std::size_t> columns;
    for (const auto& name : wanted) {
        auto it = std::find(header.begin() + 1, header.end(), name);
        if (it == header.end()) throw Error(ErrorCode::MissingChannel, flight_id + ": column " + name + " absent");
        columns.push_back(static_cast<std::size_t>(it - header.begin()));
    }

    std::vector<Channel> channels;
    for (const auto& name : wanted) channels.push_back({name, std::string(unit_for(name)), {}});

    double start_time = 0.0;
    std::size_t row = 0;
    while (read_nonblank_line(in, line)) {
        ++row;
        const auto cells = split_row(line);
        if (cells.size() != header.size()) {
            throw Error(ErrorCode::LengthMismatch, flight_id + ": row " + std::to_string(row) + " has " +
                                                       std::to_string(cells.size()) + " cells, expected " +
                                                       std::to_string(header.size()));
        }
        double t = 0.0;
        if (!parse_double(cells[0], t)) {
            throw Error(ErrorCode::NonNumericCell, flight_id + ": row=" + std::to_string(row) + " col=time_s");
        }
        if (row == 1) start_time = t;
        for (std::size_t k = 0; k < columns.size(); ++k) {
            double v = 0.0;
            if (!parse_double(cells[columns[k]], v)) {
                throw Error(ErrorCode::NonNumericCell,
                            flight_id + ": row=" + std::to_string(row) + " col=" + wanted[k]);
            }
            channels[k].samples.push_back(v);
        }
    }
    if (row < 2) {
        throw Error(ErrorCode::LengthMismatch,
                    flight_id + ": " + std::to_string(row) + " samples, at least 2 required");
    }
    return FlightRecord(flight_id, sample_rate_hz, std::move(channels), {}, start_time);
}

void emit_csv(const FlightRecord& record, std::ostream& out) {
    out << "time_s";
    for (const auto& ch : record.channels()) out << ',' << ch.name;
    out << '\n';
    const double dt = record.dt();
    for (std::size_t i = 0; i < record.length(); ++i) {
        out << format_double(record.start_time_s() + static_cast<double>(i) * dt);
        for (const auto& ch : record.channels()) out << ',' << format_double(ch.samples[i]);
        out << '\n';
    }
}

std::vector<ManeuverEntry> ingest_maneuvers_csv(std::istream& in) {
    std::string line;
    if (!read_nonblank_line(in, line)) throw Error(ErrorCode::InvalidRecord, "maneuver file is empty");
    const auto header = split_row(line);
    if (header.size() != 4 || header[0] != "flight_id" || header[1] != "label" || header[2] != "start_s" ||
        header[3] != "end_s") {
        throw Error(ErrorCode::MissingChannel, "maneuver header must be flight_id,label,start_s,end_s");
    }
    std::vector<ManeuverEntry> entries;
    std::size_t row = 0;
    while (read_nonblank_line(in, line)) {
        ++row;
        const auto cells = split_row(line);
        if (cells.size() != 4) {
            throw Error(ErrorCode::LengthMismatch, "maneuver row " + std::to_string(row) + " needs 4 cells");
        }
        ManeuverEntry e{std::string(cells[0]), std::string(cells[1]), 0.0, 0.0};
        if (!parse_double(cells[2], e.start_s)) {
            throw Error(ErrorCode::NonNumericCell, "maneuver row=" + std::to_string(row) + " col=start_s");
        }
        if (!parse_double(cells[3], e.end_s)) {
            throw Error(ErrorCode::NonNumericCell, "maneuver row=" + std::to_string(row) + " col=end_s");
        }
        entries.push_back(std::move(e));
    }
    return entries;
}

void emit_maneuvers_csv(std::span<const FlightRecord> records, std::ostream& out) {
    out << "flight_id,label,start_s,end_s\n";
    for (const auto& rec : records) {
        const double dt = rec.dt();
        for (const auto& seg : rec.maneuvers()) {
            out << rec.flight_id() << ',' << seg.label << ','
                << format_double(rec.start_time_s() + static_cast<double>(seg.start_index) * dt) << ','
                << format_double(rec.start_time_s() + static_cast<double>(seg.end_index) * dt) << '\n';
        }
    }
}

FlightRecord attach_maneuvers(const FlightRecord& record, std::span<const ManeuverEntry> entries) {
    std::vector<ManeuverSegment> segments;
    const auto m = static_cast<long long>(record.length());
    for (const auto& e : entries) {
        if (e.flight_id != record.flight_id()) continue;
        auto to_index = [&](double t) {
            long long idx = std::llround((t - record.start_time_s()) * record.sample_rate_hz());
            return static_cast<std::size_t>(std::clamp(idx, 0LL, m));
        };
        segments.push_back({e.label, to_index(e.start_s), to_index(e.end_s), false});
    }
    std::stable_sort(segments.begin(), segments.end(),
                     [](const ManeuverSegment& a, const ManeuverSegment& b) { return a.start_index < b.start_index; });
    return record.with_maneuvers(std::move(segments));
}

}  // namespace tssid::flightdata
