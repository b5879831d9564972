#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "tssid/error.hpp"
#include "tssid/flightdata/record.hpp"
#include "tssid/flightdata/split.hpp"
#include "tssid/neural/train.hpp"
#include "tssid/pipeline/config.hpp"
#include "tssid/sindy/model.hpp"

namespace tssid::pipeline {

inline constexpr const char* kToolVersion = "0.1.0";

/// 0 success, 2 configuration, 3 I/O or malformed input data, 4 computation.
int exit_code_for(ErrorCode code);

struct CommandOptions {
    std::string command;
    std::filesystem::path config;
    std::optional<std::uint64_t> seed;
    std::vector<std::string> models;
    std::optional<int> order;
    std::optional<std::filesystem::path> out;
    bool timings = false;  // adds wall-clock timings to manifests (breaks byte-identity)
    bool grid = false;     // train: also run the configured grid search
};

const std::vector<std::string>& command_names();

/// Runs one command and returns its exit code; diagnostics go to `log`.
int run_command(const CommandOptions& options, std::ostream& log);

// Building blocks shared by the commands (also used by the acceptance suite).

/// Reads <data_dir>/flights/*.csv and <data_dir>/maneuvers.csv, then marks
/// the configured maneuvers as excluded. Flights are ordered by id.
std::vector<flightdata::FlightRecord> load_corpus(const PipelineConfig& config);

flightdata::DatasetSplit compute_split(const PipelineConfig& config,
                                       const std::vector<flightdata::FlightRecord>& corpus);

std::vector<flightdata::FlightRecord> select_flights(const std::vector<flightdata::FlightRecord>& corpus,
                                                     const std::vector<std::string>& ids);

/// Feature selection on the given (training) flights.
std::vector<std::string> select_model_features(const PipelineConfig& config,
                                               const std::vector<flightdata::FlightRecord>& flights);

using LoadedModel = std::variant<sindy::SparseModel, neural::TrainedNet>;

/// Full-length prediction of a loaded model for one flight.
std::vector<double> predict(const LoadedModel& model, const PipelineConfig& config,
                            const flightdata::FlightRecord& flight);

}  // namespace tssid::pipeline
