#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "tssid/flightdata/record.hpp"
#include "tssid/sindy/derivative.hpp"
#include "tssid/sindy/library.hpp"
#include "tssid/sindy/stlsq.hpp"

namespace tssid::sindy {

enum class ModelOrder { First, Second };

struct SINDyConfig {
    double threshold = 0.05;
    int max_stlsq_iterations = 20;
    double ridge_lambda = 1e-12;
    DerivativeMethod derivative_method = DerivativeMethod::SmoothedCentral;
    LibrarySpec library;
    std::string state_channel = "TRQ";
    std::string control_channel = "WF";

    void validate() const;
    StlsqOptions stlsq_options() const { return {threshold, max_stlsq_iterations, ridge_lambda}; }
};

nlohmann::json to_json(const SINDyConfig& cfg);
SINDyConfig sindy_config_from_json(const nlohmann::json& j, SINDyConfig base = {});

/// Fitted SINDy-with-control model. Row k of `coefficients` is the right-hand
/// side of d(state_k)/dt over the library terms. For second-order models the
/// first row is the structural identity d(TRQ)/dt = TRQ' and is never
/// regressed.
struct SparseModel {
    ModelOrder order = ModelOrder::First;
    std::vector<std::string> state_names;
    std::vector<std::string> input_names;
    LibrarySpec library;
    std::vector<std::string> term_labels;
    Eigen::MatrixXd coefficients;
    Eigen::VectorXd column_scale;
    double threshold = 0.0;
    std::vector<double> residual_rmse;

    CandidateLibrary candidate_library() const { return CandidateLibrary(library, state_names, input_names); }
    double coefficient(std::size_t equation, std::string_view label) const;
};

nlohmann::json to_json(const SparseModel& model);
SparseModel sparse_model_from_json(const nlohmann::json& j);

/// Regression-ready snapshot matrices assembled segment by segment.
struct Snapshots {
    Eigen::MatrixXd X;        // m x states
    Eigen::MatrixXd U;        // m x inputs
    Eigen::MatrixXd targets;  // m x regressed equations
    std::vector<std::size_t> segment_offsets;  // row where each segment starts
};

/// TRQ, dTRQ/dt and WF per active maneuver; derivatives never cross a
/// segment boundary.
Snapshots first_order_snapshots(std::span<const flightdata::FlightRecord> flights, const SINDyConfig& config);

/// X = [TRQ, TRQ'], U = [WF, WF'], target TRQ''. Each segment needs >= 5
/// samples.
Snapshots augment_second_order(std::span<const flightdata::FlightRecord> flights, const SINDyConfig& config);

SparseModel fit_first_order(std::span<const flightdata::FlightRecord> flights, const SINDyConfig& config);
SparseModel fit_second_order(std::span<const flightdata::FlightRecord> flights, const SINDyConfig& config);

/// RK4 forward simulation with linear input interpolation. `inputs` holds one
/// column per sample (WF, plus WF' for second-order models). Returns one
/// state column per sample.
Eigen::MatrixXd simulate(const SparseModel& model, const Eigen::MatrixXd& inputs, double x0,
                         std::optional<double> xdot0, double dt);

/// Input rows for `simulate`: WF, plus its derivative for second-order models.
Eigen::MatrixXd maneuver_inputs(const SparseModel& model, std::span<const double> wf, double dt,
                                DerivativeMethod method);

/// Evaluation protocol for one maneuver: initial state (and derivative) taken
/// from the measured signal at the segment start.
std::vector<double> simulate_maneuver(const SparseModel& model, const flightdata::FlightRecord& flight,
                                      const flightdata::ManeuverSegment& segment, DerivativeMethod method);

/// Full-length prediction; samples outside active maneuvers are NaN.
std::vector<double> predict_flight(const SparseModel& model, const flightdata::FlightRecord& flight,
                                   DerivativeMethod method);

/// Integrated first-order form of a second-order model along its own
/// simulated trajectory:
///   r(t) = TRQ'(t) - [b'·TRQ(t) + c'·W(t) + K + sum_k xi_k Q_k(t)]
/// where b' and c' are the TRQ' and WF' coefficients, W = ∫WF', Q_k = ∫θ_k
/// for every remaining term and K = TRQ'(0) - b'·TRQ(0).
std::vector<double> reduction_residual(const SparseModel& model, const Eigen::MatrixXd& inputs, double x0,
                                       double xdot0, double dt);

/// "d(TRQ)/dt = −10.00 − 0.5000·TRQ + 0.2000·WF", one line per equation,
/// coefficients with 4 significant digits.
std::string format_equations(const SparseModel& model);

}  // namespace tssid::sindy
