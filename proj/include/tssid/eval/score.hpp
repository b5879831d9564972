#pragma once

#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tssid/flightdata/record.hpp"

namespace tssid::eval {

/// Mean absolute error. Throws LengthMismatch, EmptySeries.
double mae(std::span<const double> pred, std::span<const double> actual);

/// MAE of one maneuver divided by the flight's mean torque. Throws
/// NonPositiveFlightMean.
double rmae_maneuver(std::span<const double> pred, std::span<const double> actual, double mean_trq_flight);

/// Mean of `target` over the samples of every active maneuver.
double flight_mean(const flightdata::FlightRecord& flight, const std::string& target = "TRQ");

struct ManeuverScore {
    std::string flight_id;
    std::string label;
    std::size_t start_index = 0;
    std::size_t end_index = 0;
    double mae = 0.0;
    double rmae = 0.0;
};

struct FlightScore {
    std::string flight_id;
    double mean_trq = 0.0;
    double rmae = 0.0;  // mean of the flight's maneuver scores
    std::size_t maneuvers = 0;
};

struct EvalReport {
    std::string model_id;
    std::vector<ManeuverScore> maneuvers;  // flight id order, then segment order
    std::vector<FlightScore> flights;      // flight id order
    double overall = 0.0;                  // mean of flight scores
};

/// Full-length prediction series per flight id.
using Predictions = std::map<std::string, std::vector<double>>;

/// Hierarchical maneuver -> flight -> overall scoring of every active
/// maneuver. Throws MissingPrediction when a flight has no series or a scored
/// sample is not finite.
EvalReport score_model(const std::string& model_id, const Predictions& predictions,
                       std::span<const flightdata::FlightRecord> flights, const std::string& target = "TRQ");

struct ComparisonTable {
    std::vector<std::string> model_ids;
    std::vector<std::string> flight_ids;
    std::vector<std::vector<double>> flight_scores;  // [flight][model]
    std::vector<double> overall;                     // [model]
};

/// Throws FlightSetMismatch when the reports cover different flights.
ComparisonTable compare_models(std::span<const EvalReport> reports);

nlohmann::json to_json(const EvalReport& report);
EvalReport eval_report_from_json(const nlohmann::json& j);

/// flight_id,<model>... rows, then an "overall" row.
void write_comparison_csv(const ComparisonTable& table, std::ostream& out);
/// flight_id,label,start_s,end_s,<model> MAE and rMAE columns.
void write_maneuver_csv(std::span<const EvalReport> reports, std::ostream& out);
/// Predicted-vs-actual overlay of every active maneuver:
/// flight_id,label,time_s,actual,<model>...
void write_overlay_csv(std::span<const flightdata::FlightRecord> flights, std::span<const std::string> model_ids,
                       std::span<const Predictions> predictions, std::ostream& out, const std::string& target = "TRQ");

}  // namespace tssid::eval
