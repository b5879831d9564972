#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "tssid/error.hpp"
#include "tssid/neural/init.hpp"
#include "tssid/neural/lstm.hpp"
#include "tssid/neural/mlp.hpp"
#include "tssid/neural/network.hpp"
#include "tssid/neural/optim.hpp"
#include "tssid/neural/train.hpp"
#include "tssid/neural/windows.hpp"
#include "tssid/synthgen/synthgen.hpp"

using namespace tssid;
using namespace tssid::neural;

TEST(Init, XavierBoundsAndShape) {
    std::mt19937_64 rng(1);
    const auto w = init_xavier(30, 10, rng);
    EXPECT_EQ(w.rows(), 10);
    EXPECT_EQ(w.cols(), 30);
    const double bound = std::sqrt(6.0 / 40.0);
    EXPECT_LE(w.cwiseAbs().maxCoeff(), bound);
    EXPECT_GT(w.cwiseAbs().maxCoeff(), 0.9 * bound);
    EXPECT_NEAR(w.mean(), 0.0, 0.05);
    EXPECT_EQ(init_xavier(3, 4, 7), init_xavier(3, 4, 7));
    EXPECT_THROW(init_xavier(0, 4, 7), Error);
}

TEST(Mlp, ZeroNetworkAndShapes) {
    MLP net(MLPConfig{3, {5, 4}, 2});
    ASSERT_EQ(net.params().size(), 6u);
    EXPECT_EQ(net.params()[0].rows(), 5);
    EXPECT_EQ(net.params()[0].cols(), 3);
    EXPECT_EQ(net.params()[5].rows(), 2);
    const Eigen::MatrixXd x = Eigen::MatrixXd::Ones(3, 7);
    EXPECT_TRUE(net.forward(x).isZero(0.0));
    Tensors g;
    const Eigen::MatrixXd y = Eigen::MatrixXd::Constant(2, 7, 2.0);
    EXPECT_DOUBLE_EQ(net.loss_and_gradient(x, y, g), 4.0);
    // Only the output bias sees a gradient: d/db mean((b - 2)^2) = -4 / (2*7) * 7 per unit.
    EXPECT_TRUE(g[0].isZero(0.0));
    EXPECT_DOUBLE_EQ(g[5](0, 0), -2.0);
}

TEST(Mlp, GradientMatchesFiniteDifferences) {
    for (std::uint64_t s = 0; s < 10; ++s) EXPECT_LE(oracle::mlp_gradient_check(s).max_rel, 1e-5) << "seed " << s;
}

TEST(Lstm, ShapesAndForgetBias) {
    std::mt19937_64 rng(2);
    LSTM net(LSTMConfig{2, 2, 3, 4}, rng);
    ASSERT_EQ(net.params().size(), 8u);
    EXPECT_EQ(net.params()[0].rows(), 12);
    EXPECT_EQ(net.params()[0].cols(), 2);
    EXPECT_EQ(net.params()[4].cols(), 3);
    const auto& b = net.params()[2];
    for (int k = 0; k < 12; ++k) EXPECT_EQ(b(k, 0), (k >= 3 && k < 6) ? 1.0 : 0.0);
    Sequence w(7, Eigen::MatrixXd::Ones(2, 5));
    EXPECT_EQ(net.forward(w).rows(), 7);
    EXPECT_EQ(net.forward(w).cols(), 5);
    Tensors g;
    EXPECT_THROW(net.loss_and_gradient(w, Eigen::MatrixXd::Zero(7, 5), g), Error);
}

TEST(Lstm, GradientMatchesFiniteDifferences) {
    for (std::uint64_t s = 0; s < 10; ++s) EXPECT_LE(oracle::lstm_gradient_check(s).max_rel, 1e-5) << "seed " << s;
}

TEST(Lstm, OutputIsCausal) {
    std::mt19937_64 rng(3);
    LSTM net(LSTMConfig{1, 2, 4, 6}, rng);
    Sequence a(6, Eigen::MatrixXd::Constant(1, 1, 0.3));
    Sequence b = a;
    b[5](0, 0) = 0.9;
    const auto ya = net.forward(a), yb = net.forward(b);
    for (int t = 0; t < 5; ++t) EXPECT_EQ(ya(t, 0), yb(t, 0));
    EXPECT_NE(ya(5, 0), yb(5, 0));
}

TEST(Optim, RmspropFirstStep) {
    Tensors p = {Eigen::MatrixXd::Constant(1, 2, 1.0)};
    Tensors g = {Eigen::MatrixXd(1, 2)};
    g[0] << 0.5, -2.0;
    auto st = make_optimizer_state(OptimizerKind::RMSprop, p);
    step_rmsprop(p, g, st, 0.01);
    // v = 0.01 g^2, so the step is lr * g / (0.1 |g| + eps).
    EXPECT_NEAR(p[0](0, 0), 1.0 - 0.01 * 0.5 / (0.1 * 0.5 + 1e-8), 1e-15);
    EXPECT_NEAR(p[0](0, 1), 1.0 + 0.01 * 2.0 / (0.1 * 2.0 + 1e-8), 1e-15);
}

TEST(Optim, AdamStepsHaveLearningRateMagnitude) {
    Tensors p = {Eigen::MatrixXd::Zero(1, 1)};
    auto st = make_optimizer_state(OptimizerKind::Adam, p);
    Tensors g = {Eigen::MatrixXd::Constant(1, 1, 3.0)};
    for (int k = 1; k <= 5; ++k) {
        optimizer_step(p, g, st, 0.1);
        EXPECT_NEAR(p[0](0, 0), -0.1 * k, 1e-7);
    }
    EXPECT_EQ(st.steps, 5);
    Tensors wrong = {Eigen::MatrixXd::Zero(2, 1)};
    EXPECT_THROW(optimizer_step(p, wrong, st, 0.1), Error);
    EXPECT_EQ(optimizer_kind_from_string(to_string(OptimizerKind::Adam)), OptimizerKind::Adam);
}

TEST(Windows, Counts) {
    EXPECT_EQ(window_starts(100, 20, 20).size(), 5u);
    EXPECT_EQ(window_starts(20, 20, 1).size(), 1u);
    EXPECT_EQ(window_starts(25, 20, 2), (std::vector<std::size_t>{0, 2, 4}));
    EXPECT_THROW(window_starts(19, 20, 1), Error);
    EXPECT_THROW(window_starts(30, 20, 0), Error);

    std::vector<flightdata::Channel> ch = {{"TRQ", "", std::vector<double>(70, 1.0)}, {"COL", "", std::vector<double>(70, 2.0)}};
    const flightdata::FlightRecord f("A", 10.0, ch, {{"a", 0, 30}, {"short", 30, 40}, {"b", 40, 70}});
    const std::vector<std::string> feats = {"COL"};
    const auto ds = make_windows(f, feats, "TRQ", 20, 10);
    EXPECT_EQ(ds.size(), 4u);
}

TEST(Windows, GatherLayout) {
    Eigen::MatrixXd feats(6, 2);
    std::vector<double> target;
    for (int i = 0; i < 6; ++i) {
        feats(i, 0) = i;
        feats(i, 1) = 10 + i;
        target.push_back(100 + i);
    }
    const auto ds = make_windows(feats, target, 3, 1);
    ASSERT_EQ(ds.size(), 4u);
    const std::vector<std::size_t> idx = {2, 0};
    const Batch b = ds.gather(idx);
    ASSERT_EQ(b.inputs.size(), 3u);
    EXPECT_EQ(b.inputs[1](0, 0), 3.0);
    EXPECT_EQ(b.inputs[1](1, 0), 13.0);
    EXPECT_EQ(b.inputs[2](1, 1), 12.0);
    EXPECT_EQ(b.targets(2, 0), 104.0);
    EXPECT_EQ(b.targets(0, 1), 100.0);
}

namespace {

std::vector<flightdata::FlightRecord> small_corpus(int n, const std::string& prefix) {
    std::vector<flightdata::FlightRecord> out;
    for (int i = 0; i < n; ++i) {
        auto spec = fixture::flight_spec(prefix + std::to_string(i), synthgen::GroundTruthParams{});
        spec.profiles[0].level = 250.0 + 35.0 * i;
        out.push_back(synthgen::generate_flight(spec));
    }
    return out;
}

}  // namespace

TEST(Train, LossDecreasesAndIsDeterministic) {
    const auto train = small_corpus(3, "T");
    const auto val = small_corpus(1, "V");
    Architecture arch;
    arch.mlp.hidden_layers = {8, 8};
    TrainConfig tc;
    tc.optimizer = OptimizerKind::Adam;
    tc.learning_rate = 1e-3;
    tc.epochs = 8;
    tc.seed = 11;
    const std::vector<std::string> feats = {"COL", "NR"};
    const auto a = fit_network(arch, tc, feats, "TRQ", train, val);
    const auto b = fit_network(arch, tc, feats, "TRQ", train, val);
    ASSERT_EQ(a.train_mse.size(), 8u);
    EXPECT_LT(a.train_mse.back(), a.train_mse.front());
    EXPECT_EQ(to_json(a).dump(), to_json(b).dump());
    EXPECT_EQ(a.optimizer_steps, 8 * ((3 * 480 + 63) / 64));

    const auto back = trained_net_from_json(to_json(a));
    EXPECT_EQ(predict_series(back, val[0]), predict_series(a, val[0]));
    EXPECT_EQ(predict_series(a, val[0]).size(), val[0].length());
}

TEST(Train, LstmPredictionCoversEverySample) {
    const auto train = small_corpus(2, "T");
    Architecture arch;
    arch.family = NetFamily::LSTM;
    arch.lstm = LSTMConfig{1, 1, 3, 10};
    TrainConfig tc;
    tc.optimizer = OptimizerKind::Adam;
    tc.epochs = 2;
    const std::vector<std::string> feats = {"COL", "T1"};
    const auto net = fit_network(arch, tc, feats, "TRQ", train, {});
    EXPECT_EQ(net.architecture().lstm.input_dim, 2);
    EXPECT_TRUE(std::isnan(net.val_mse.back()));
    const auto pred = predict_series(net, train[0]);
    ASSERT_EQ(pred.size(), train[0].length());
    for (double v : pred) EXPECT_TRUE(std::isfinite(v));
}

TEST(Train, FingerprintGuardsWeights) {
    const auto train = small_corpus(1, "T");
    Architecture arch;
    arch.mlp.hidden_layers = {4};
    TrainConfig tc;
    tc.epochs = 1;
    const std::vector<std::string> feats = {"COL"};
    const auto net = fit_network(arch, tc, feats, "TRQ", train, {});
    auto j = to_json(net);
    j["features"] = {"NR"};
    EXPECT_THROW(trained_net_from_json(j), Error);
    auto k = to_json(net);
    k["tensors"][0]["shape"] = {2, 2};
    EXPECT_THROW(trained_net_from_json(k), Error);
}

TEST(Train, GridRanksByValidation) {
    const auto train = small_corpus(2, "T");
    const auto val = small_corpus(1, "V");
    GridCandidate tiny{"tiny", Architecture{}, TrainConfig{}};
    tiny.arch.mlp.hidden_layers = {2};
    tiny.train.epochs = 1;
    tiny.train.learning_rate = 1e-6;
    GridCandidate wide = tiny;
    wide.name = "wide";
    wide.arch.mlp.hidden_layers = {16, 16};
    wide.train.optimizer = OptimizerKind::Adam;
    wide.train.learning_rate = 3e-3;
    wide.train.epochs = 10;
    const std::vector<GridCandidate> grid = {tiny, wide};
    const std::vector<std::string> feats = {"COL"};
    const auto r = grid_search(grid, feats, "TRQ", train, val);
    ASSERT_EQ(r.size(), 2u);
    EXPECT_EQ(r[0].name, "wide");
    EXPECT_LE(r[0].val_mse, r[1].val_mse);
    EXPECT_THROW(grid_search(std::vector<GridCandidate>{}, feats, "TRQ", train, val), Error);
}

TEST(Windows, CountFormulaProperty) {
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<int> len(1, 60), step(1, 15);
    for (int trial = 0; trial < 500; ++trial) {
        const int lookback = len(rng);
        const int stride = step(rng);
        const std::size_t m = static_cast<std::size_t>(lookback + len(rng) - 1);
        const auto starts = window_starts(m, lookback, stride);
        ASSERT_EQ(starts.size(), (m - static_cast<std::size_t>(lookback)) / static_cast<std::size_t>(stride) + 1);
        EXPECT_EQ(starts.front(), 0u);
        EXPECT_LE(starts.back() + static_cast<std::size_t>(lookback), m);
        for (std::size_t k = 1; k < starts.size(); ++k) EXPECT_EQ(starts[k] - starts[k - 1], static_cast<std::size_t>(stride));
    }
}
