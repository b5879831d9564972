#include "tssid/neural/train.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "tssid/error.hpp"
#include "tssid/hash.hpp"

namespace tssid::neural {

using flightdata::FlightRecord;
using flightdata::ScalerParams;

void TrainConfig::validate() const {
    if (!(learning_rate > 0.0)) throw Error(ErrorCode::ConfigError, "learning_rate must be > 0");
    if (batch_size < 1) throw Error(ErrorCode::ConfigError, "batch_size must be >= 1");
    if (epochs < 1) throw Error(ErrorCode::ConfigError, "epochs must be >= 1");
    if (stride < 0) throw Error(ErrorCode::ConfigError, "stride must be >= 0");
}

int TrainConfig::effective_stride(const Architecture& arch) const {
    if (arch.family == NetFamily::FFNN) return 1;
    if (stride > 0) return stride;
    return std::max(1, arch.lookback() / 2);
}

nlohmann::json to_json(const TrainConfig& c) {
    return {{"optimizer", to_string(c.optimizer)}, {"learning_rate", c.learning_rate}, {"batch_size", c.batch_size},
            {"epochs", c.epochs},                  {"seed", c.seed},                   {"shuffle", c.shuffle},
            {"stride", c.stride}};
}

TrainConfig train_config_from_json(const nlohmann::json& j, TrainConfig base) {
    try {
        if (j.contains("optimizer")) base.optimizer = optimizer_kind_from_string(j.at("optimizer").get<std::string>());
        base.learning_rate = j.value("learning_rate", base.learning_rate);
        base.batch_size = j.value("batch_size", base.batch_size);
        base.epochs = j.value("epochs", base.epochs);
        base.seed = j.value("seed", base.seed);
        base.shuffle = j.value("shuffle", base.shuffle);
        base.stride = j.value("stride", base.stride);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ConfigError, std::string("training block: ") + e.what());
    }
    base.validate();
    return base;
}

double dataset_mse(const Network& net, const WindowedDataset& data) {
    if (data.empty()) return std::numeric_limits<double>::quiet_NaN();
    constexpr std::size_t kChunk = 512;
    double sse = 0.0;
    std::vector<std::size_t> idx;
    for (std::size_t begin = 0; begin < data.size(); begin += kChunk) {
        idx.resize(std::min(kChunk, data.size() - begin));
        std::iota(idx.begin(), idx.end(), begin);
        const Batch batch = data.gather(idx);
        sse += (net.forward(batch.inputs) - batch.targets).squaredNorm();
    }
    return sse / static_cast<double>(data.targets.size());
}

TrainResult train(const Architecture& arch, const TrainConfig& config, const WindowedDataset& train_data,
                  const WindowedDataset& val_data) {
    config.validate();
    if (train_data.empty()) throw Error(ErrorCode::EmptyDataset, "no training windows");
    if (train_data.lookback != arch.lookback() || train_data.num_features != arch.input_dim()) {
        throw Error(ErrorCode::DimensionMismatch, "training windows do not match the architecture");
    }
    std::mt19937_64 init_rng(derive_seed(config.seed, "init"));
    std::mt19937_64 shuffle_rng(derive_seed(config.seed, "shuffle"));
    TrainResult result{Network(arch, init_rng), {}, {}, 0};
    OptimizerState state = make_optimizer_state(config.optimizer, result.net.params());

    std::vector<std::size_t> order(train_data.size());
    std::iota(order.begin(), order.end(), 0);
    Tensors grads;
    const auto bs = static_cast<std::size_t>(config.batch_size);
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        if (config.shuffle) std::shuffle(order.begin(), order.end(), shuffle_rng);
        for (std::size_t begin = 0; begin < order.size(); begin += bs) {
            const std::span<const std::size_t> idx(order.data() + begin, std::min(bs, order.size() - begin));
            const Batch batch = train_data.gather(idx);
            result.net.loss_and_gradient(batch, grads);
            optimizer_step(result.net.params(), grads, state, config.learning_rate);
        }
        result.train_mse.push_back(dataset_mse(result.net, train_data));
        result.val_mse.push_back(dataset_mse(result.net, val_data));
    }
    result.optimizer_steps = state.steps;
    return result;
}

std::string architecture_fingerprint(const Architecture& arch, std::span<const std::string> features,
                                     const std::string& target) {
    const nlohmann::json j = {{"architecture", to_json(arch)},
                              {"features", std::vector<std::string>(features.begin(), features.end())},
                              {"target", target}};
    return sha256_hex(j.dump());
}

std::string TrainedNet::fingerprint() const { return architecture_fingerprint(architecture(), features, target); }

namespace {

Eigen::MatrixXd scaled_columns(const FlightRecord& flight, const ScalerParams& scaler,
                               std::span<const std::string> names) {
    Eigen::MatrixXd x(static_cast<Eigen::Index>(flight.length()), static_cast<Eigen::Index>(names.size()));
    for (std::size_t f = 0; f < names.size(); ++f) {
        const auto s = flight.samples(names[f]);
        for (std::size_t i = 0; i < s.size(); ++i) {
            x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(f)) = scaler.scale(names[f], s[i]);
        }
    }
    return x;
}

}  // namespace

WindowedDataset build_windows(std::span<const FlightRecord> flights, const ScalerParams& scaler,
                              std::span<const std::string> features, const std::string& target, int lookback,
                              int stride) {
    WindowedDataset all;
    all.lookback = lookback;
    all.stride = stride;
    all.num_features = static_cast<int>(features.size());
    for (const auto& flight : flights) {
        const Eigen::MatrixXd x = scaled_columns(flight, scaler, features);
        const auto raw_y = flight.samples(target);
        std::vector<double> y(raw_y.size());
        for (std::size_t i = 0; i < y.size(); ++i) y[i] = scaler.scale(target, raw_y[i]);
        for (const auto& seg : flight.active_maneuvers()) {
            if (seg.length() < static_cast<std::size_t>(lookback)) continue;
            all.append(make_windows(x.middleRows(static_cast<Eigen::Index>(seg.start_index),
                                                 static_cast<Eigen::Index>(seg.length())),
                                    std::span<const double>(y).subspan(seg.start_index, seg.length()), lookback,
                                    stride));
        }
    }
    return all;
}

TrainedNet fit_network(Architecture arch, const TrainConfig& config, std::vector<std::string> features,
                       const std::string& target, std::span<const FlightRecord> train_flights,
                       std::span<const FlightRecord> val_flights) {
    if (features.empty()) throw Error(ErrorCode::ConfigError, "no input features selected");
    arch.set_input_dim(static_cast<int>(features.size()));
    arch.validate();
    config.validate();
    if (train_flights.empty()) throw Error(ErrorCode::EmptyDataset, "no training flights");

    std::vector<std::string> channels = features;
    channels.push_back(target);
    TrainedNet out;
    out.scaler = flightdata::fit_minmax(train_flights, channels);
    const int stride = config.effective_stride(arch);
    const WindowedDataset train_ds = build_windows(train_flights, out.scaler, features, target, arch.lookback(), stride);
    const WindowedDataset val_ds = build_windows(val_flights, out.scaler, features, target, arch.lookback(), stride);
    TrainResult r = train(arch, config, train_ds, val_ds);
    out.net = std::move(r.net);
    out.features = std::move(features);
    out.target = target;
    out.train = config;
    out.train_mse = std::move(r.train_mse);
    out.val_mse = std::move(r.val_mse);
    out.optimizer_steps = r.optimizer_steps;
    return out;
}

std::vector<double> predict_series(const TrainedNet& net, const FlightRecord& flight) {
    const Eigen::MatrixXd x = scaled_columns(flight, net.scaler, net.features);
    const auto m = static_cast<std::size_t>(x.rows());
    std::vector<double> scaled(m);
    const int L = net.architecture().lookback();
    if (net.architecture().family == NetFamily::FFNN) {
        const Eigen::MatrixXd y = net.net.forward({x.transpose()});
        for (std::size_t i = 0; i < m; ++i) scaled[i] = y(0, static_cast<Eigen::Index>(i));
    } else {
        const auto starts = window_starts(m, L, 1);
        constexpr std::size_t kChunk = 256;
        for (std::size_t begin = 0; begin < starts.size(); begin += kChunk) {
            const std::size_t n = std::min(kChunk, starts.size() - begin);
            Sequence window(static_cast<std::size_t>(L), Eigen::MatrixXd(x.cols(), static_cast<Eigen::Index>(n)));
            for (std::size_t w = 0; w < n; ++w) {
                for (int t = 0; t < L; ++t) {
                    window[static_cast<std::size_t>(t)].col(static_cast<Eigen::Index>(w)) =
                        x.row(static_cast<Eigen::Index>(starts[begin + w]) + t).transpose();
                }
            }
            const Eigen::MatrixXd y = net.net.forward(window);
            for (std::size_t w = 0; w < n; ++w) {
                scaled[starts[begin + w] + static_cast<std::size_t>(L) - 1] = y(L - 1, static_cast<Eigen::Index>(w));
            }
            if (begin == 0) {
                for (int t = 0; t + 1 < L; ++t) scaled[static_cast<std::size_t>(t)] = y(t, 0);
            }
        }
    }
    std::vector<double> out(m);
    for (std::size_t i = 0; i < m; ++i) out[i] = net.scaler.unscale(net.target, scaled[i]);
    return out;
}

std::vector<GridResult> grid_search(std::span<const GridCandidate> grid, std::span<const std::string> features,
                                    const std::string& target, std::span<const FlightRecord> train_flights,
                                    std::span<const FlightRecord> val_flights) {
    if (grid.empty()) throw Error(ErrorCode::EmptyGrid, "hyperparameter grid is empty");
    std::vector<GridResult> results;
    for (const auto& c : grid) {
        const TrainedNet net = fit_network(c.arch, c.train, {features.begin(), features.end()}, target, train_flights,
                                           val_flights);
        results.push_back({c.name, net.architecture(), c.train, net.train_mse.back(), net.val_mse.back()});
    }
    std::stable_sort(results.begin(), results.end(), [](const GridResult& a, const GridResult& b) {
        // NaN scores sort last.
        if (std::isnan(a.val_mse)) return false;
        if (std::isnan(b.val_mse)) return true;
        return a.val_mse < b.val_mse;
    });
    return results;
}

namespace {

nlohmann::json nullable(const std::vector<double>& v) {
    nlohmann::json a = nlohmann::json::array();
    for (double x : v) a.push_back(std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr));
    return a;
}

std::vector<double> from_nullable(const nlohmann::json& a) {
    std::vector<double> v;
    for (const auto& x : a) v.push_back(x.is_null() ? std::numeric_limits<double>::quiet_NaN() : x.get<double>());
    return v;
}

}  // namespace

nlohmann::json to_json(const TrainedNet& net) {
    nlohmann::json tensors = nlohmann::json::array();
    for (const auto& p : net.net.params()) {
        std::vector<double> values;
        values.reserve(static_cast<std::size_t>(p.size()));
        for (Eigen::Index r = 0; r < p.rows(); ++r) {
            for (Eigen::Index c = 0; c < p.cols(); ++c) values.push_back(p(r, c));
        }
        tensors.push_back({{"shape", {p.rows(), p.cols()}}, {"values", values}});
    }
    nlohmann::json scaler = nlohmann::json::object();
    for (const auto& [name, range] : net.scaler.ranges()) scaler[name] = {range.min, range.max};
    return {{"kind", "network"},
            {"architecture", to_json(net.architecture())},
            {"features", net.features},
            {"target", net.target},
            {"fingerprint", net.fingerprint()},
            {"scaler", scaler},
            {"train", to_json(net.train)},
            {"train_mse", nullable(net.train_mse)},
            {"val_mse", nullable(net.val_mse)},
            {"optimizer_steps", net.optimizer_steps},
            {"tensors", tensors}};
}

TrainedNet trained_net_from_json(const nlohmann::json& j) {
    TrainedNet out;
    try {
        const Architecture arch = architecture_from_json(j.at("architecture"));
        out.net = Network(arch);
        out.features = j.at("features").get<std::vector<std::string>>();
        out.target = j.at("target").get<std::string>();
        if (static_cast<int>(out.features.size()) != arch.input_dim()) {
            throw Error(ErrorCode::ModelMismatch, "feature count differs from the architecture input size");
        }
        if (j.at("fingerprint").get<std::string>() != out.fingerprint()) {
            throw Error(ErrorCode::ModelMismatch, "architecture fingerprint does not match the file content");
        }
        std::map<std::string, flightdata::Range> ranges;
        for (const auto& [name, mm] : j.at("scaler").items()) ranges[name] = {mm.at(0).get<double>(), mm.at(1).get<double>()};
        out.scaler = ScalerParams(std::move(ranges));
        out.train = train_config_from_json(j.at("train"));
        out.train_mse = from_nullable(j.at("train_mse"));
        out.val_mse = from_nullable(j.at("val_mse"));
        out.optimizer_steps = j.at("optimizer_steps").get<long long>();

        const auto& tensors = j.at("tensors");
        auto& params = out.net.params();
        if (tensors.size() != params.size()) throw Error(ErrorCode::ModelMismatch, "tensor count mismatch");
        for (std::size_t k = 0; k < params.size(); ++k) {
            const auto shape = tensors[k].at("shape").get<std::vector<Eigen::Index>>();
            const auto values = tensors[k].at("values").get<std::vector<double>>();
            if (shape.size() != 2 || shape[0] != params[k].rows() || shape[1] != params[k].cols() ||
                static_cast<Eigen::Index>(values.size()) != params[k].size()) {
                throw Error(ErrorCode::ModelMismatch, "tensor " + std::to_string(k) + " shape does not match architecture");
            }
            std::size_t n = 0;
            for (Eigen::Index r = 0; r < params[k].rows(); ++r) {
                for (Eigen::Index c = 0; c < params[k].cols(); ++c) params[k](r, c) = values[n++];
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ModelMismatch, std::string("bad network file: ") + e.what());
    }
    return out;
}

}  // namespace tssid::neural
