#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "tssid/error.hpp"
#include "tssid/sindy/derivative.hpp"
#include "tssid/sindy/library.hpp"
#include "tssid/sindy/model.hpp"
#include "tssid/sindy/stlsq.hpp"
#include "tssid/synthgen/synthgen.hpp"

using namespace tssid;
using namespace tssid::sindy;

namespace {

std::vector<flightdata::FlightRecord> first_order_corpus(int n, double rate_hz) {
    std::vector<flightdata::FlightRecord> out;
    for (int i = 0; i < n; ++i) {
        auto spec = fixture::flight_spec("F" + std::to_string(i), fixture::first_order_truth(), rate_hz);
        spec.profiles[0].level = 260.0 + 30.0 * i;
        spec.profiles[1].level = spec.profiles[0].level;
        spec.profiles[1].target = 500.0 - 20.0 * i;
        spec.profiles.pop_back();  // steps put a kink in the derivative
        out.push_back(synthgen::generate_flight(spec));
    }
    return out;
}

}  // namespace

TEST(Derivative, CentralDifferenceOfSine) {
    const double dt = 0.01;
    std::vector<double> s;
    for (int k = 0; k <= 1000; ++k) s.push_back(std::sin(dt * k));
    const auto d = differentiate(s, dt, DerivativeMethod::Central);
    // Interior: central stencil, error h^2/6. Ends: one-sided stencil, h^2/3.
    double worst = 0.0;
    for (std::size_t k = 1; k + 1 < d.size(); ++k) worst = std::max(worst, std::abs(d[k] - std::cos(dt * static_cast<double>(k))));
    EXPECT_LT(worst, 2e-5);
    EXPECT_LT(std::abs(d.front() - 1.0), 3.4e-5);
    EXPECT_LT(std::abs(d.back() - std::cos(10.0)), 3.4e-5);
    const auto ds = differentiate(s, dt, DerivativeMethod::SmoothedCentral);
    for (std::size_t k = 0; k < ds.size(); ++k) EXPECT_NEAR(ds[k], std::cos(dt * static_cast<double>(k)), 1e-4);
}

TEST(Derivative, ExactOnQuadratics) {
    std::vector<double> s;
    for (int k = 0; k < 12; ++k) s.push_back(3.0 * k * k - 2.0 * k + 1.0);
    const auto d = differentiate(s, 1.0, DerivativeMethod::Central);
    for (int k = 0; k < 12; ++k) EXPECT_NEAR(d[k], 6.0 * k - 2.0, 1e-10);
    EXPECT_THROW(differentiate(std::vector<double>{1.0, 2.0}, 1.0), Error);
}

TEST(Derivative, SmootherKeepsCubicsAndDampsNoise) {
    std::vector<double> cubic;
    for (int k = 0; k < 30; ++k) cubic.push_back(0.01 * k * k * k - k + 4.0);
    const auto sm = savgol_smooth(cubic);
    for (std::size_t k = 0; k < cubic.size(); ++k) EXPECT_NEAR(sm[k], cubic[k], 1e-9);

    std::mt19937_64 rng(2);
    std::normal_distribution<double> n(0.0, 1.0);
    std::vector<double> noise;
    for (int k = 0; k < 2000; ++k) noise.push_back(n(rng));
    double raw = 0.0, smooth = 0.0;
    const auto s2 = savgol_smooth(noise);
    for (std::size_t k = 0; k < noise.size(); ++k) {
        raw += noise[k] * noise[k];
        smooth += s2[k] * s2[k];
    }
    EXPECT_LT(smooth, 0.7 * raw);
}

TEST(Library, CanonicalOrderAndCount) {
    const LibrarySpec spec{2, true, false, true};
    const CandidateLibrary lib(spec, {"TRQ"}, {"WF"});
    EXPECT_EQ(lib.labels(), (std::vector<std::string>{"1", "TRQ", "TRQ²", "WF", "WF²", "TRQ·WF"}));
    EXPECT_EQ(lib.find("WF"), 3);
    EXPECT_EQ(lib.find("sin(WF)"), -1);

    const LibrarySpec no_cross{3, false, false, false};
    EXPECT_EQ(CandidateLibrary(no_cross, {"x"}, {"u"}).size(), 6u);
    const LibrarySpec trig{1, true, true, true};
    EXPECT_NE(CandidateLibrary(trig, {"x"}, {"u"}).find("sin(x)·sin(u)"), -1);
    LibrarySpec deep;
    deep.polynomial_degree = 6;
    EXPECT_THROW(deep.validate(), Error);
}

TEST(Library, EvaluatesTerms) {
    Eigen::MatrixXd X(2, 2), U(2, 1);
    X << 2.0, 3.0, -1.0, 0.5;
    U << 4.0, 1.0;
    const auto dm = build_library(X, U, LibrarySpec{2, true, false, true}, {"a", "b"}, {"u"});
    const auto col = [&](const std::string& label) {
        const auto it = std::find(dm.labels.begin(), dm.labels.end(), label);
        EXPECT_NE(it, dm.labels.end()) << label;
        return static_cast<Eigen::Index>(it - dm.labels.begin());
    };
    EXPECT_EQ(dm.values(0, col("1")), 1.0);
    EXPECT_EQ(dm.values(0, col("a·b")), 6.0);
    EXPECT_EQ(dm.values(1, col("b·u")), 0.5);
    EXPECT_EQ(dm.values(1, col("a²")), 1.0);
}

TEST(Stlsq, RecoversSparseLinearSystem) {
    // dx/dt = -2x + 3u sampled at random states.
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::MatrixXd X(200, 1), U(200, 1), Y(200, 1);
    for (int i = 0; i < 200; ++i) {
        X(i, 0) = u(rng);
        U(i, 0) = u(rng);
        Y(i, 0) = -2.0 * X(i, 0) + 3.0 * U(i, 0);
    }
    const auto dm = build_library(X, U, LibrarySpec{3, true, false, true}, {"x"}, {"u"});
    const auto r = stlsq(dm.values, Y, StlsqOptions{});
    for (std::size_t k = 0; k < dm.labels.size(); ++k) {
        const double expected = dm.labels[k] == "x" ? -2.0 : dm.labels[k] == "u" ? 3.0 : 0.0;
        EXPECT_NEAR(r.coefficients(0, static_cast<Eigen::Index>(k)), expected, 1e-10) << dm.labels[k];
    }
    EXPECT_EQ(r.active_history.back()[0], 2);
}

TEST(Stlsq, ZeroTargetAndOverThreshold) {
    Eigen::MatrixXd theta = Eigen::MatrixXd::Random(50, 3);
    const auto zero = stlsq(theta, Eigen::MatrixXd::Zero(50, 1), StlsqOptions{});
    EXPECT_TRUE(zero.coefficients.isZero(0.0));
    const Eigen::MatrixXd y = theta.col(0);
    try {
        stlsq(theta, y, StlsqOptions{1e6, 20, 1e-12});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NoActiveTerms);
    }
    Eigen::MatrixXd twin(50, 2);
    twin << theta.col(0), theta.col(0);
    EXPECT_THROW(stlsq(twin, y, StlsqOptions{0.0, 5, 0.0}), Error);
}

TEST(Fit, FirstOrderRecoveryOnCleanCorpus) {
    const auto flights = first_order_corpus(4, 50.0);
    SINDyConfig cfg;
    const auto m = fit_first_order(flights, cfg);
    const auto lib = m.candidate_library();
    for (std::size_t k = 0; k < lib.size(); ++k) {
        const std::string label = lib.labels()[k];
        const double c = m.coefficients(0, static_cast<Eigen::Index>(k));
        if (label == "1") {
            EXPECT_NEAR(c, -10.0, 1e-2);
        } else if (label == "TRQ") {
            EXPECT_NEAR(c, -0.5, 5e-4);
        } else if (label == "WF") {
            EXPECT_NEAR(c, 0.2, 2e-4);
        } else {
            EXPECT_EQ(c, 0.0) << label;
        }
    }
    EXPECT_EQ(m.coefficient(0, "WF"), m.coefficients(0, lib.find("WF")));
}

TEST(Fit, SecondOrderStructureAndSimulation) {
    std::vector<flightdata::FlightRecord> flights;
    for (int i = 0; i < 3; ++i) {
        auto spec = fixture::flight_spec("S" + std::to_string(i), synthgen::GroundTruthParams{}, 50.0);
        spec.profiles[0].level = 280.0 + 40.0 * i;
        spec.profiles[1].level = spec.profiles[0].level;
        spec.profiles.pop_back();
        flights.push_back(synthgen::generate_flight(spec));
    }
    SINDyConfig cfg;
    cfg.library.polynomial_degree = 1;
    const auto m = fit_second_order(flights, cfg);
    EXPECT_EQ(m.state_names, (std::vector<std::string>{"TRQ", "TRQ'"}));
    EXPECT_EQ(m.coefficient(0, "TRQ'"), 1.0);
    EXPECT_EQ(m.coefficients.row(0).cwiseAbs().sum(), 1.0);
    EXPECT_LT(m.coefficient(1, "TRQ"), 0.0);
    EXPECT_LT(m.coefficient(1, "TRQ'"), 0.0);
    EXPECT_GT(m.coefficient(1, "WF"), 0.0);

    const auto eq = format_equations(m);
    EXPECT_EQ(eq.substr(0, eq.find('\n')), "d(TRQ)/dt = 1.000·TRQ'");

    const auto pred = predict_flight(m, flights[0], cfg.derivative_method);
    const auto trq = flights[0].samples("TRQ");
    for (std::size_t i = 0; i < pred.size(); ++i) EXPECT_NEAR(pred[i], trq[i], 0.02 * trq[i]);
}

TEST(Fit, SegmentsMustBeLongEnough) {
    auto f = first_order_corpus(1, 50.0)[0].with_maneuvers({{"tiny", 0, 2}});
    const std::vector<flightdata::FlightRecord> flights = {f};
    EXPECT_THROW(fit_first_order(flights, SINDyConfig{}), Error);
    const auto g = f.with_maneuvers({{"tiny", 0, 4}});
    const std::vector<flightdata::FlightRecord> g_flights = {g};
    EXPECT_THROW(augment_second_order(g_flights, SINDyConfig{}), Error);
}

TEST(Simulate, KnownLinearModel) {
    SparseModel m;
    m.state_names = {"TRQ"};
    m.input_names = {"WF"};
    m.library = LibrarySpec{1, true, false, true};
    m.term_labels = m.candidate_library().labels();
    m.coefficients = Eigen::MatrixXd::Zero(1, 3);
    m.coefficients(0, 1) = -1.0;
    m.coefficients(0, 2) = 1.0;
    m.column_scale = Eigen::VectorXd::Ones(3);
    const Eigen::MatrixXd u = Eigen::MatrixXd::Ones(1, 501);
    const auto x = simulate(m, u, 0.0, std::nullopt, 0.01);
    EXPECT_NEAR(x(0, 500), 1.0 - std::exp(-5.0), 1e-9);
    EXPECT_EQ(format_equations(m), "d(TRQ)/dt = −1.000·TRQ + 1.000·WF\n");

    const auto back = sparse_model_from_json(to_json(m));
    EXPECT_EQ(back.coefficients, m.coefficients);
    EXPECT_EQ(back.term_labels, m.term_labels);
}

TEST(Simulate, SecondOrderNeedsInitialDerivative) {
    SparseModel m;
    m.order = ModelOrder::Second;
    m.state_names = {"TRQ", "TRQ'"};
    m.input_names = {"WF", "WF'"};
    m.library = LibrarySpec{1, true, false, false};
    m.term_labels = m.candidate_library().labels();
    m.coefficients = Eigen::MatrixXd::Zero(2, 4);
    m.coefficients(0, 1) = 1.0;
    try {
        simulate(m, Eigen::MatrixXd::Zero(2, 10), 0.0, std::nullopt, 0.1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::MissingInitialDerivative);
    }
}

TEST(Reduction, ResidualVanishesForFittedModel) {
    std::vector<flightdata::FlightRecord> flights;
    auto spec = fixture::flight_spec("R", synthgen::GroundTruthParams{}, 50.0);
    flights.push_back(synthgen::generate_flight(spec));
    SINDyConfig cfg;
    const auto m = fit_second_order(flights, cfg);
    const auto& f = flights[0];
    const auto wf = f.samples("WF");
    const auto wfd = differentiate(wf, f.dt(), cfg.derivative_method);
    Eigen::MatrixXd inputs(2, static_cast<Eigen::Index>(wf.size()));
    for (std::size_t i = 0; i < wf.size(); ++i) {
        inputs(0, static_cast<Eigen::Index>(i)) = wf[i];
        inputs(1, static_cast<Eigen::Index>(i)) = wfd[i];
    }
    const auto r = reduction_residual(m, inputs, f.samples("TRQ")[0], 0.0, f.dt());
    for (double v : r) EXPECT_LT(std::abs(v), 1e-6);
}
