#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tssid/flightdata/analysis.hpp"
#include "tssid/flightdata/split.hpp"
#include "tssid/neural/train.hpp"
#include "tssid/sindy/model.hpp"
#include "tssid/synthgen/synthgen.hpp"

namespace tssid::pipeline {

struct SplitSpec {
    enum class Mode { Fractions, Lists, Prefixes };
    Mode mode = Mode::Fractions;
    flightdata::SplitFractions fractions;
    std::vector<std::string> train, val, test;  // ids (Lists) or id prefixes (Prefixes)
};

struct NetworkSection {
    neural::Architecture arch;
    neural::TrainConfig train;
    std::vector<neural::GridCandidate> grid;
};

/// Whole-pipeline configuration, read from one JSON file. Relative paths are
/// resolved against the directory of the config file.
struct PipelineConfig {
    std::uint64_t seed = 0;
    std::filesystem::path output_dir;
    std::filesystem::path data_dir;  // defaults to <output_dir>/data
    std::optional<double> sample_rate_hz;  // inferred from the time column when absent
    std::vector<std::string> channels;     // ingest schema; empty keeps every column

    std::vector<synthgen::CorpusGroup> synthetic_groups;
    std::vector<synthgen::SyntheticFlightSpec> synthetic_flights;

    std::vector<std::string> excluded_maneuvers = {"taxiing"};
    SplitSpec split;
    std::string target = "TRQ";
    flightdata::FeatureRules features = flightdata::FeatureRules::defaults();
    sindy::SINDyConfig sindy;
    NetworkSection ffnn;
    NetworkSection lstm;
    std::vector<std::string> models = {"sindy1", "sindy2", "ffnn", "lstm"};
    std::vector<std::string> augment_ids;
    std::vector<std::string> retrain_models = {"ffnn", "lstm"};

    nlohmann::json source;     // the effective JSON after overrides
    std::string fingerprint;   // SHA-256 of source.dump()

    const NetworkSection& network(neural::NetFamily family) const {
        return family == neural::NetFamily::LSTM ? lstm : ffnn;
    }
};

/// Parses `j` (with CLI overrides already merged). Throws ConfigError.
PipelineConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir);

/// Reads and parses a config file; `seed` and `out` override the file.
PipelineConfig load_config(const std::filesystem::path& path, std::optional<std::uint64_t> seed = {},
                           std::optional<std::filesystem::path> out = {});

}  // namespace tssid::pipeline
