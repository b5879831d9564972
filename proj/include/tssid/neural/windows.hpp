#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tssid/flightdata/record.hpp"
#include "tssid/neural/types.hpp"

namespace tssid::neural {

/// Start offsets of every full window: floor((m - lookback) / stride) + 1 of
/// them. Throws SeriesTooShort when m < lookback.
std::vector<std::size_t> window_starts(std::size_t m, int lookback, int stride);

/// Fixed-length windows stored contiguously as [window][step][feature].
struct WindowedDataset {
    int lookback = 1;
    int stride = 1;
    int num_features = 0;
    std::vector<double> inputs;
    std::vector<double> targets;  // [window][step]

    std::size_t size() const { return lookback == 0 ? 0 : targets.size() / static_cast<std::size_t>(lookback); }
    bool empty() const { return size() == 0; }
    Batch gather(std::span<const std::size_t> indices) const;
    void append(const WindowedDataset& other);
};

/// Windows over one contiguous series. `features` is m x F.
WindowedDataset make_windows(const Eigen::MatrixXd& features, std::span<const double> target, int lookback, int stride);

/// Windows over every active maneuver of an (already scaled) flight; no
/// window spans a segment boundary and segments shorter than the lookback
/// contribute none.
WindowedDataset make_windows(const flightdata::FlightRecord& flight, std::span<const std::string> features,
                             const std::string& target, int lookback, int stride);

}  // namespace tssid::neural
