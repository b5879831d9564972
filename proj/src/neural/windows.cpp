#include "tssid/neural/windows.hpp"

#include "tssid/error.hpp"

namespace tssid::neural {

std::vector<std::size_t> window_starts(std::size_t m, int lookback, int stride) {
    if (lookback < 1 || stride < 1) throw Error(ErrorCode::ConfigError, "lookback and stride must be >= 1");
    const auto L = static_cast<std::size_t>(lookback);
    if (m < L) {
        throw Error(ErrorCode::SeriesTooShort,
                    "series of " + std::to_string(m) + " samples is shorter than lookback " + std::to_string(lookback));
    }
    std::vector<std::size_t> starts;
    for (std::size_t s = 0; s + L <= m; s += static_cast<std::size_t>(stride)) starts.push_back(s);
    return starts;
}

Batch WindowedDataset::gather(std::span<const std::size_t> indices) const {
    const auto B = static_cast<Eigen::Index>(indices.size());
    const auto L = static_cast<std::size_t>(lookback);
    const auto F = static_cast<std::size_t>(num_features);
    Batch batch;
    batch.inputs.assign(L, Eigen::MatrixXd(num_features, B));
    batch.targets.resize(lookback, B);
    for (Eigen::Index b = 0; b < B; ++b) {
        const std::size_t w = indices[static_cast<std::size_t>(b)];
        if (w >= size()) throw Error(ErrorCode::DimensionMismatch, "window index out of range");
        for (std::size_t t = 0; t < L; ++t) {
            const double* src = inputs.data() + (w * L + t) * F;
            for (std::size_t f = 0; f < F; ++f) batch.inputs[t](static_cast<Eigen::Index>(f), b) = src[f];
            batch.targets(static_cast<Eigen::Index>(t), b) = targets[w * L + t];
        }
    }
    return batch;
}

void WindowedDataset::append(const WindowedDataset& other) {
    if (other.empty()) return;
    if (empty() && inputs.empty()) {
        *this = other;
        return;
    }
    if (other.lookback != lookback || other.num_features != num_features) {
        throw Error(ErrorCode::DimensionMismatch, "cannot merge window sets of different shapes");
    }
    inputs.insert(inputs.end(), other.inputs.begin(), other.inputs.end());
    targets.insert(targets.end(), other.targets.begin(), other.targets.end());
}

WindowedDataset make_windows(const Eigen::MatrixXd& features, std::span<const double> target, int lookback,
                             int stride) {
    if (static_cast<std::size_t>(features.rows()) != target.size()) {
        throw Error(ErrorCode::LengthMismatch, "feature and target series lengths differ");
    }
    WindowedDataset ds;
    ds.lookback = lookback;
    ds.stride = stride;
    ds.num_features = static_cast<int>(features.cols());
    for (std::size_t s : window_starts(target.size(), lookback, stride)) {
        for (std::size_t t = s; t < s + static_cast<std::size_t>(lookback); ++t) {
            for (Eigen::Index f = 0; f < features.cols(); ++f) ds.inputs.push_back(features(static_cast<Eigen::Index>(t), f));
            ds.targets.push_back(target[t]);
        }
    }
    return ds;
}

WindowedDataset make_windows(const flightdata::FlightRecord& flight, std::span<const std::string> features,
                             const std::string& target, int lookback, int stride) {
    WindowedDataset all;
    all.lookback = lookback;
    all.stride = stride;
    all.num_features = static_cast<int>(features.size());
    const auto y = flight.samples(target);
    std::vector<std::span<const double>> cols;
    for (const auto& name : features) cols.push_back(flight.samples(name));
    for (const auto& seg : flight.active_maneuvers()) {
        if (seg.length() < static_cast<std::size_t>(lookback)) continue;
        Eigen::MatrixXd x(static_cast<Eigen::Index>(seg.length()), static_cast<Eigen::Index>(features.size()));
        for (std::size_t f = 0; f < cols.size(); ++f) {
            for (std::size_t i = 0; i < seg.length(); ++i) {
                x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(f)) = cols[f][seg.start_index + i];
            }
        }
        all.append(make_windows(x, y.subspan(seg.start_index, seg.length()), lookback, stride));
    }
    return all;
}

}  // namespace tssid::neural
