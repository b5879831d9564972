#include "tssid/eval/score.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "tssid/error.hpp"
#include "tssid/flightdata/csv.hpp"

namespace tssid::eval {

using flightdata::format_double;

double mae(std::span<const double> pred, std::span<const double> actual) {
    if (pred.size() != actual.size()) {
        throw Error(ErrorCode::LengthMismatch, "prediction has " + std::to_string(pred.size()) + " samples, actual " +
                                                   std::to_string(actual.size()));
    }
    if (pred.empty()) throw Error(ErrorCode::EmptySeries, "cannot score an empty series");
    double sum = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) sum += std::abs(pred[i] - actual[i]);
    return sum / static_cast<double>(pred.size());
}

double rmae_maneuver(std::span<const double> pred, std::span<const double> actual, double mean_trq_flight) {
    if (!(mean_trq_flight > 0.0)) {
        throw Error(ErrorCode::NonPositiveFlightMean, "flight mean torque " + format_double(mean_trq_flight) + " <= 0");
    }
    return mae(pred, actual) / mean_trq_flight;
}

double flight_mean(const flightdata::FlightRecord& flight, const std::string& target) {
    const auto y = flight.samples(target);
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& seg : flight.active_maneuvers()) {
        for (std::size_t i = seg.start_index; i < seg.end_index; ++i) sum += y[i];
        n += seg.length();
    }
    if (n == 0) throw Error(ErrorCode::NoSegments, flight.flight_id() + ": no active maneuvers");
    return sum / static_cast<double>(n);
}

EvalReport score_model(const std::string& model_id, const Predictions& predictions,
                       std::span<const flightdata::FlightRecord> flights, const std::string& target) {
    std::vector<const flightdata::FlightRecord*> ordered;
    for (const auto& f : flights) ordered.push_back(&f);
    std::sort(ordered.begin(), ordered.end(),
              [](const auto* a, const auto* b) { return a->flight_id() < b->flight_id(); });

    EvalReport report;
    report.model_id = model_id;
    for (const auto* flight : ordered) {
        const auto it = predictions.find(flight->flight_id());
        if (it == predictions.end()) {
            throw Error(ErrorCode::MissingPrediction, model_id + ": no prediction for flight " + flight->flight_id());
        }
        const auto& pred = it->second;
        if (pred.size() != flight->length()) {
            throw Error(ErrorCode::LengthMismatch, model_id + ": prediction for " + flight->flight_id() +
                                                       " has the wrong length");
        }
        const auto actual = flight->samples(target);
        FlightScore fs;
        fs.flight_id = flight->flight_id();
        fs.mean_trq = flight_mean(*flight, target);
        double sum = 0.0;
        for (const auto& seg : flight->active_maneuvers()) {
            const std::span<const double> p(pred.data() + seg.start_index, seg.length());
            if (!std::all_of(p.begin(), p.end(), [](double v) { return std::isfinite(v); })) {
                throw Error(ErrorCode::MissingPrediction, model_id + ": " + flight->flight_id() + "/" + seg.label +
                                                              " has non-finite predictions");
            }
            const auto a = actual.subspan(seg.start_index, seg.length());
            ManeuverScore ms{flight->flight_id(), seg.label, seg.start_index, seg.end_index, mae(p, a), 0.0};
            ms.rmae = rmae_maneuver(p, a, fs.mean_trq);
            sum += ms.rmae;
            ++fs.maneuvers;
            report.maneuvers.push_back(std::move(ms));
        }
        fs.rmae = sum / static_cast<double>(fs.maneuvers);
        report.flights.push_back(std::move(fs));
    }
    if (report.flights.empty()) throw Error(ErrorCode::EmptyDataset, model_id + ": no flights to score");
    double sum = 0.0;
    for (const auto& fs : report.flights) sum += fs.rmae;
    report.overall = sum / static_cast<double>(report.flights.size());
    return report;
}

ComparisonTable compare_models(std::span<const EvalReport> reports) {
    if (reports.empty()) throw Error(ErrorCode::EmptyDataset, "no reports to compare");
    ComparisonTable table;
    for (const auto& fs : reports.front().flights) table.flight_ids.push_back(fs.flight_id);
    table.flight_scores.assign(table.flight_ids.size(), {});
    for (const auto& r : reports) {
        if (r.flights.size() != table.flight_ids.size()) {
            throw Error(ErrorCode::FlightSetMismatch, r.model_id + " was scored on a different flight set");
        }
        for (std::size_t j = 0; j < r.flights.size(); ++j) {
            if (r.flights[j].flight_id != table.flight_ids[j]) {
                throw Error(ErrorCode::FlightSetMismatch, r.model_id + " was scored on a different flight set");
            }
            table.flight_scores[j].push_back(r.flights[j].rmae);
        }
        table.model_ids.push_back(r.model_id);
        table.overall.push_back(r.overall);
    }
    return table;
}

nlohmann::json to_json(const EvalReport& report) {
    nlohmann::json flights = nlohmann::json::array();
    for (const auto& f : report.flights) {
        flights.push_back({{"flight_id", f.flight_id}, {"mean_trq", f.mean_trq}, {"rmae", f.rmae}, {"maneuvers", f.maneuvers}});
    }
    nlohmann::json maneuvers = nlohmann::json::array();
    for (const auto& m : report.maneuvers) {
        maneuvers.push_back({{"flight_id", m.flight_id},
                             {"label", m.label},
                             {"start_index", m.start_index},
                             {"end_index", m.end_index},
                             {"mae", m.mae},
                             {"rmae", m.rmae}});
    }
    return {{"model_id", report.model_id}, {"overall_rmae", report.overall}, {"flights", flights}, {"maneuvers", maneuvers}};
}

EvalReport eval_report_from_json(const nlohmann::json& j) {
    EvalReport r;
    try {
        r.model_id = j.at("model_id").get<std::string>();
        r.overall = j.at("overall_rmae").get<double>();
        for (const auto& f : j.at("flights")) {
            r.flights.push_back({f.at("flight_id").get<std::string>(), f.at("mean_trq").get<double>(),
                                 f.at("rmae").get<double>(), f.at("maneuvers").get<std::size_t>()});
        }
        for (const auto& m : j.at("maneuvers")) {
            r.maneuvers.push_back({m.at("flight_id").get<std::string>(), m.at("label").get<std::string>(),
                                   m.at("start_index").get<std::size_t>(), m.at("end_index").get<std::size_t>(),
                                   m.at("mae").get<double>(), m.at("rmae").get<double>()});
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::IoError, std::string("bad report file: ") + e.what());
    }
    return r;
}

void write_comparison_csv(const ComparisonTable& table, std::ostream& out) {
    out << "flight_id";
    for (const auto& m : table.model_ids) out << ',' << m;
    out << '\n';
    for (std::size_t j = 0; j < table.flight_ids.size(); ++j) {
        out << table.flight_ids[j];
        for (double v : table.flight_scores[j]) out << ',' << format_double(v);
        out << '\n';
    }
    out << "overall";
    for (double v : table.overall) out << ',' << format_double(v);
    out << '\n';
}

void write_maneuver_csv(std::span<const EvalReport> reports, std::ostream& out) {
    if (reports.empty()) return;
    out << "flight_id,label,start_index,end_index";
    for (const auto& r : reports) out << ',' << r.model_id << "_mae," << r.model_id << "_rmae";
    out << '\n';
    const auto& base = reports.front().maneuvers;
    for (std::size_t i = 0; i < base.size(); ++i) {
        out << base[i].flight_id << ',' << base[i].label << ',' << base[i].start_index << ',' << base[i].end_index;
        for (const auto& r : reports) {
            if (r.maneuvers.size() != base.size()) throw Error(ErrorCode::FlightSetMismatch, "maneuver sets differ");
            out << ',' << format_double(r.maneuvers[i].mae) << ',' << format_double(r.maneuvers[i].rmae);
        }
        out << '\n';
    }
}

void write_overlay_csv(std::span<const flightdata::FlightRecord> flights, std::span<const std::string> model_ids,
                       std::span<const Predictions> predictions, std::ostream& out, const std::string& target) {
    if (model_ids.size() != predictions.size()) throw Error(ErrorCode::DimensionMismatch, "model id count");
    out << "flight_id,label,time_s,actual";
    for (const auto& m : model_ids) out << ',' << m;
    out << '\n';
    for (const auto& flight : flights) {
        const auto actual = flight.samples(target);
        std::vector<const std::vector<double>*> series;
        for (const auto& p : predictions) {
            const auto it = p.find(flight.flight_id());
            if (it == p.end() || it->second.size() != flight.length()) {
                throw Error(ErrorCode::MissingPrediction, "no overlay series for " + flight.flight_id());
            }
            series.push_back(&it->second);
        }
        for (const auto& seg : flight.active_maneuvers()) {
            for (std::size_t i = seg.start_index; i < seg.end_index; ++i) {
                out << flight.flight_id() << ',' << seg.label << ','
                    << format_double(flight.start_time_s() + static_cast<double>(i) * flight.dt()) << ','
                    << format_double(actual[i]);
                for (const auto* s : series) out << ',' << format_double((*s)[i]);
                out << '\n';
            }
        }
    }
}

}  // namespace tssid::eval
