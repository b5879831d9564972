#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tssid/flightdata/record.hpp"
#include "tssid/flightdata/scaler.hpp"
#include "tssid/neural/network.hpp"
#include "tssid/neural/optim.hpp"
#include "tssid/neural/windows.hpp"

namespace tssid::neural {

struct TrainConfig {
    OptimizerKind optimizer = OptimizerKind::RMSprop;
    double learning_rate = 1e-4;
    int batch_size = 64;
    int epochs = 500;
    std::uint64_t seed = 0;
    bool shuffle = true;
    int stride = 0;  // LSTM training stride; 0 means lookback / 2

    void validate() const;
    int effective_stride(const Architecture& arch) const;
    bool operator==(const TrainConfig&) const = default;
};

nlohmann::json to_json(const TrainConfig& c);
TrainConfig train_config_from_json(const nlohmann::json& j, TrainConfig base = {});

struct TrainResult {
    Network net;
    std::vector<double> train_mse;  // one entry per epoch, after the epoch
    std::vector<double> val_mse;    // NaN when there is no validation data
    long long optimizer_steps = 0;
};

/// Mean squared error of `net` over every window step of `data`.
double dataset_mse(const Network& net, const WindowedDataset& data);

/// Mini-batch training on pre-built windows. Throws EmptyDataset.
TrainResult train(const Architecture& arch, const TrainConfig& config, const WindowedDataset& train_data,
                  const WindowedDataset& val_data);

/// A trained torque model together with everything needed to apply it.
struct TrainedNet {
    Network net;
    std::vector<std::string> features;
    std::string target = "TRQ";
    flightdata::ScalerParams scaler;
    TrainConfig train;
    std::vector<double> train_mse;
    std::vector<double> val_mse;
    long long optimizer_steps = 0;

    const Architecture& architecture() const { return net.architecture(); }
    std::string fingerprint() const;
};

/// SHA-256 over the architecture descriptor, feature list and target.
std::string architecture_fingerprint(const Architecture& arch, std::span<const std::string> features,
                                     const std::string& target);

/// Scaled windows of every active maneuver of `flights`.
WindowedDataset build_windows(std::span<const flightdata::FlightRecord> flights, const flightdata::ScalerParams& scaler,
                              std::span<const std::string> features, const std::string& target, int lookback,
                              int stride);

/// Fits the min-max scaler on the training flights, windows both sets and
/// trains.
TrainedNet fit_network(Architecture arch, const TrainConfig& config, std::vector<std::string> features,
                       const std::string& target, std::span<const flightdata::FlightRecord> train_flights,
                       std::span<const flightdata::FlightRecord> val_flights);

/// Full-length torque prediction in physical units. FFNN: pointwise. LSTM:
/// stride-1 windows, each step predicted by the window ending there; the
/// first lookback-1 steps use the first window's leading outputs.
std::vector<double> predict_series(const TrainedNet& net, const flightdata::FlightRecord& flight);

struct GridCandidate {
    std::string name;
    Architecture arch;
    TrainConfig train;
};

struct GridResult {
    std::string name;
    Architecture arch;
    TrainConfig train;
    double train_mse = 0.0;
    double val_mse = 0.0;
};

/// Trains every candidate and ranks by final validation MSE (ties keep grid
/// order). Throws EmptyGrid.
std::vector<GridResult> grid_search(std::span<const GridCandidate> grid, std::span<const std::string> features,
                                    const std::string& target, std::span<const flightdata::FlightRecord> train_flights,
                                    std::span<const flightdata::FlightRecord> val_flights);

nlohmann::json to_json(const TrainedNet& net);
/// Rejects (ModelMismatch) tensor shapes that disagree with the descriptor
/// and fingerprints that disagree with the stored content.
TrainedNet trained_net_from_json(const nlohmann::json& j);

}  // namespace tssid::neural
