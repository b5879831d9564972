#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace tssid::flightdata {

struct DatasetSplit {
    std::vector<std::string> train_ids;
    std::vector<std::string> val_ids;
    std::vector<std::string> test_ids;

    bool operator==(const DatasetSplit&) const = default;
};

struct SplitFractions {
    double train = 0.8;
    double val = 0.1;
    double test = 0.1;
};

/// Seeded shuffle of the (sorted) corpus, then cut by fractions. Counts are
/// rounded for train and val; test takes the remainder.
DatasetSplit split_dataset(std::span<const std::string> corpus, const SplitFractions& fractions, std::uint64_t seed);

/// Explicit lists; throws OverlappingIds when an id appears twice and
/// ConfigError when the lists do not cover the corpus exactly.
DatasetSplit split_dataset(std::span<const std::string> corpus, std::vector<std::string> train,
                           std::vector<std::string> val, std::vector<std::string> test);

nlohmann::json to_json(const DatasetSplit& split);
DatasetSplit split_from_json(const nlohmann::json& j);

}  // namespace tssid::flightdata
