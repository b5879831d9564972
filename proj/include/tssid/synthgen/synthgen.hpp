#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tssid/flightdata/record.hpp"

namespace tssid::synthgen {

enum class EngineOrder { First, Second };

/// Ground-truth fuel-flow to torque dynamics.
///   first order:  dTRQ/dt = -a - b*TRQ + c*WF
///   second order: tau1*tau2*TRQ'' + (tau1+tau2)*TRQ' + TRQ = mu*WF
struct GroundTruthParams {
    EngineOrder order = EngineOrder::Second;
    double a = 10.0;   // Nm/s
    double b = 0.5;    // 1/s
    double c = 0.2;    // Nm/s per lb/h
    double mu = 0.4;   // Nm per lb/h
    double tau1 = 0.6;  // s
    double tau2 = 0.15;  // s
    std::map<std::string, double> noise_sigma;  // per channel, absent = 0
    std::uint64_t seed = 1;

    /// Throws UnstableParameters for non-positive b, tau or mu.
    void validate() const;
    double steady_state(double wf) const;
};

enum class ProfileKind { Step, Hold, Ramp, ChirpSweep };

struct ManeuverProfile {
    ProfileKind kind = ProfileKind::Hold;
    std::string label;  // defaults to the kind name when empty
    double duration_s = 10.0;
    double level = 300.0;        // hold level, step/ramp start, chirp centre (lb/h)
    double target = 300.0;       // step/ramp end level
    double step_time_s = 0.0;    // step instant relative to segment start
    double amplitude = 0.0;      // chirp half amplitude
    double f0_hz = 0.1;
    double f1_hz = 1.0;
    bool random_phase = false;   // chirp start phase drawn from the seed

    std::string effective_label() const;
};

/// Static affine-plus-saturation map WF -> auxiliary channel.
struct AuxMap {
    double offset = 0.0;
    double gain = 0.0;
    double lo = -1e300;
    double hi = 1e300;

    double operator()(double wf) const;
};

/// Maps for COL, NR, T1, P0 and AIRSPEED.
std::map<std::string, AuxMap> default_aux_maps();

struct SyntheticFlightSpec {
    std::string flight_id;
    double sample_rate_hz = 20.0;
    std::vector<ManeuverProfile> profiles;
    GroundTruthParams truth;
    std::map<std::string, AuxMap> aux = default_aux_maps();
    std::optional<double> initial_trq;  // steady state of the first WF sample when absent
};

std::vector<double> generate_wf_profile(std::span<const ManeuverProfile> profiles, double sample_rate_hz,
                                        std::uint64_t seed);

struct EngineTrajectory {
    std::vector<double> trq;
    std::vector<double> trq_dot;
};

/// RK4 integration of the ground-truth ODE with linear interpolation of WF.
EngineTrajectory simulate_engine_states(const GroundTruthParams& params, std::span<const double> wf, double dt,
                                        double trq0, double trqdot0 = 0.0);

inline std::vector<double> simulate_engine(const GroundTruthParams& params, std::span<const double> wf, double dt,
                                           double trq0, double trqdot0 = 0.0) {
    return simulate_engine_states(params, wf, dt, trq0, trqdot0).trq;
}

/// Adds i.i.d. N(0, sigma^2) noise; sigma == 0 returns the input unchanged.
std::vector<double> add_noise(std::span<const double> sequence, double sigma, std::uint64_t seed);

/// Channels TRQ, COL, T1, P0, NR, WF, AIRSPEED with one maneuver segment per
/// profile.
flightdata::FlightRecord generate_flight(const SyntheticFlightSpec& spec);

/// Recipe for a family of randomly composed flights.
struct CorpusGroup {
    std::string prefix = "F";
    int count = 1;
    double duration_s = 60.0;
    double sample_rate_hz = 20.0;
    double wf_min = 220.0;
    double wf_max = 560.0;
    std::vector<ProfileKind> kinds = {ProfileKind::Hold, ProfileKind::Ramp, ProfileKind::Step, ProfileKind::ChirpSweep};
    double segment_min_s = 6.0;
    double segment_max_s = 14.0;
    double chirp_max_hz = 2.0;
    bool taxi_segments = true;  // prepend a "taxiing" ground segment
    GroundTruthParams truth;
    std::map<std::string, AuxMap> aux = default_aux_maps();
};

std::vector<SyntheticFlightSpec> build_corpus(std::span<const CorpusGroup> groups, std::uint64_t seed);

// Structured-text (JSON) forms of the synthetic flight spec.
nlohmann::json to_json(const GroundTruthParams& p);
GroundTruthParams truth_from_json(const nlohmann::json& j, GroundTruthParams base = {});
nlohmann::json to_json(const ManeuverProfile& p);
ManeuverProfile profile_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SyntheticFlightSpec& s);
SyntheticFlightSpec flight_spec_from_json(const nlohmann::json& j);
CorpusGroup corpus_group_from_json(const nlohmann::json& j);

std::string to_string(ProfileKind kind);
ProfileKind profile_kind_from_string(const std::string& s);

}  // namespace tssid::synthgen
