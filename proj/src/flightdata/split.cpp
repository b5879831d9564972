#include "tssid/flightdata/split.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "tssid/error.hpp"

namespace tssid::flightdata {

DatasetSplit split_dataset(std::span<const std::string> corpus, const SplitFractions& fractions, std::uint64_t seed) {
    const double sum = fractions.train + fractions.val + fractions.test;
    if (fractions.train < 0 || fractions.val < 0 || fractions.test < 0 || std::abs(sum - 1.0) > 1e-9) {
        throw Error(ErrorCode::ConfigError, "split fractions must be non-negative and sum to 1");
    }
    std::vector<std::string> ids(corpus.begin(), corpus.end());
    std::sort(ids.begin(), ids.end());
    if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
        throw Error(ErrorCode::OverlappingIds, "corpus contains duplicate flight ids");
    }
    std::mt19937_64 rng(seed);
    std::shuffle(ids.begin(), ids.end(), rng);

    const auto n = static_cast<double>(ids.size());
    const auto n_train = std::min(ids.size(), static_cast<std::size_t>(std::llround(fractions.train * n)));
    const auto n_val = std::min(ids.size() - n_train, static_cast<std::size_t>(std::llround(fractions.val * n)));
    DatasetSplit split;
    split.train_ids.assign(ids.begin(), ids.begin() + static_cast<long>(n_train));
    split.val_ids.assign(ids.begin() + static_cast<long>(n_train), ids.begin() + static_cast<long>(n_train + n_val));
    split.test_ids.assign(ids.begin() + static_cast<long>(n_train + n_val), ids.end());
    return split;
}

DatasetSplit split_dataset(std::span<const std::string> corpus, std::vector<std::string> train,
                           std::vector<std::string> val, std::vector<std::string> test) {
    std::set<std::string> assigned;
    for (const auto* list : {&train, &val, &test}) {
        for (const auto& id : *list) {
            if (!assigned.insert(id).second) throw Error(ErrorCode::OverlappingIds, "flight " + id + " assigned twice");
        }
    }
    const std::set<std::string> all(corpus.begin(), corpus.end());
    if (assigned != all) {
        for (const auto& id : assigned) {
            if (!all.count(id)) throw Error(ErrorCode::ConfigError, "split names unknown flight " + id);
        }
        for (const auto& id : all) {
            if (!assigned.count(id)) throw Error(ErrorCode::ConfigError, "flight " + id + " is not assigned by the split");
        }
    }
    return {std::move(train), std::move(val), std::move(test)};
}

nlohmann::json to_json(const DatasetSplit& split) {
    return {{"train", split.train_ids}, {"val", split.val_ids}, {"test", split.test_ids}};
}

DatasetSplit split_from_json(const nlohmann::json& j) {
    try {
        return {j.at("train").get<std::vector<std::string>>(), j.at("val").get<std::vector<std::string>>(),
                j.at("test").get<std::vector<std::string>>()};
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ConfigError, std::string("bad split file: ") + e.what());
    }
}

}  // namespace tssid::flightdata
