#include <gtest/gtest.h>

#include <random>
#include <set>
#include <sstream>

#include "oracles.hpp"
#include "fixtures.hpp"
#include "tssid/error.hpp"
#include "tssid/flightdata/analysis.hpp"
#include "tssid/flightdata/csv.hpp"
#include "tssid/flightdata/scaler.hpp"
#include "tssid/flightdata/split.hpp"

using namespace tssid;
using namespace tssid::flightdata;

namespace {

FlightRecord two_channel(std::vector<double> trq, std::vector<double> col, std::string id = "A") {
    return FlightRecord(std::move(id), 10.0, {{"TRQ", "Nm", std::move(trq)}, {"COL", "%", std::move(col)}});
}

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no tssid::Error thrown";
    return ErrorCode::ConfigError;
}

}  // namespace

TEST(Record, UnitsComeFromTheVariableTable) {
    EXPECT_EQ(unit_for("TRQ"), "Nm");
    EXPECT_EQ(unit_for("WF"), "lb/h");
    EXPECT_EQ(unit_for("XYZ"), "");
    EXPECT_EQ(known_channels().size(), 14u);
}

TEST(Record, RejectsMalformedRecords) {
    EXPECT_EQ(code_of([] { two_channel({1, 2, 3}, {1, 2}); }), ErrorCode::LengthMismatch);
    EXPECT_EQ(code_of([] { two_channel({1}, {1}); }), ErrorCode::LengthMismatch);
    EXPECT_EQ(code_of([] { FlightRecord("A", 0.0, {{"TRQ", "", {1, 2}}}); }), ErrorCode::InvalidRecord);
    EXPECT_EQ(code_of([] { FlightRecord("A", 1.0, {{"TRQ", "", {1, 2}}, {"TRQ", "", {1, 2}}}); }),
              ErrorCode::InvalidRecord);
    EXPECT_EQ(code_of([] { two_channel({1, 2, 3, 4}, {1, 2, 3, 4}).with_maneuvers({{"a", 0, 3}, {"b", 2, 4}}); }),
              ErrorCode::InvalidRecord);
    EXPECT_EQ(code_of([] { two_channel({1, 2}, {1, 2}).channel("WF"); }), ErrorCode::MissingChannel);
}

TEST(Record, UnannotatedFlightIsOneSegment) {
    const auto f = two_channel({1, 2, 3}, {3, 2, 1});
    const auto active = f.active_maneuvers();
    ASSERT_EQ(active.size(), 1u);
    EXPECT_EQ(active[0].start_index, 0u);
    EXPECT_EQ(active[0].end_index, 3u);
}

TEST(Record, FilterMarksButKeepsSamples) {
    const auto f = two_channel({1, 2, 3, 4}, {1, 2, 3, 4}).with_maneuvers({{"taxiing", 0, 2}, {"hover", 2, 4}});
    const std::vector<std::string> excluded = {"taxiing"};
    const auto g = filter_maneuvers(f, excluded);
    EXPECT_EQ(g.length(), 4u);
    EXPECT_TRUE(g.maneuvers()[0].excluded);
    ASSERT_EQ(g.active_maneuvers().size(), 1u);
    EXPECT_EQ(g.active_maneuvers()[0].label, "hover");
}

TEST(Csv, FormatDoubleRoundTrips) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int i = 0; i < 1000; ++i) {
        const double v = u(rng) * std::pow(10.0, static_cast<double>(i % 20) - 10.0);
        double back = 0.0;
        ASSERT_TRUE(parse_double(format_double(v), back));
        EXPECT_EQ(back, v);
    }
    double x = 0.0;
    EXPECT_FALSE(parse_double("1.5x", x));
    EXPECT_FALSE(parse_double("", x));
    EXPECT_FALSE(parse_double("nan", x));
}

TEST(Csv, FlightRoundTrip) {
    const auto f = synthgen::generate_flight(fixture::flight_spec("F1", fixture::first_order_truth()));
    std::stringstream ss;
    emit_csv(f, ss);
    const auto back = ingest_csv(ss, {}, "F1", f.sample_rate_hz());
    EXPECT_EQ(back.channel_names(), f.channel_names());
    for (const auto& ch : f.channels()) {
        EXPECT_EQ(back.channel(ch.name).samples, ch.samples) << ch.name;
    }
}

TEST(Csv, SchemaSelectsAndOrdersColumns) {
    std::istringstream in("time_s,WF,TRQ,COL\n0,1,2,3\n0.1,4,5,6\n");
    const std::vector<std::string> schema = {"TRQ", "WF"};
    const auto f = ingest_csv(in, schema, "A", 10.0);
    EXPECT_EQ(f.channel_names(), schema);
    EXPECT_EQ(f.channel("WF").samples, (std::vector<double>{1, 4}));
}

TEST(Csv, ReportsBadCells) {
    std::istringstream bad("time_s,TRQ\n0,1\n0.1,abc\n");
    try {
        ingest_csv(bad, {}, "A", 10.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NonNumericCell);
        EXPECT_NE(std::string(e.what()).find("row=2"), std::string::npos) << e.what();
    }
    std::istringstream missing("time_s,TRQ\n0,1\n0.1,2\n");
    const std::vector<std::string> schema = {"TRQ", "WF"};
    EXPECT_EQ(code_of([&] { ingest_csv(missing, schema, "A", 10.0); }), ErrorCode::MissingChannel);
}

TEST(Csv, ManeuverTimesMapToIndices) {
    const auto f = two_channel(std::vector<double>(40, 1.0), std::vector<double>(40, 2.0));
    std::istringstream in("flight_id,label,start_s,end_s\nA,climb,1.5,3\nB,hover,0,1\nA,taxiing,0,1\n");
    const auto entries = ingest_maneuvers_csv(in);
    const auto g = attach_maneuvers(f, entries);
    ASSERT_EQ(g.maneuvers().size(), 2u);
    EXPECT_EQ(g.maneuvers()[0], (ManeuverSegment{"taxiing", 0, 10, false}));
    EXPECT_EQ(g.maneuvers()[1], (ManeuverSegment{"climb", 15, 30, false}));

    std::stringstream ss;
    const std::vector<FlightRecord> recs = {g};
    emit_maneuvers_csv(recs, ss);
    EXPECT_EQ(attach_maneuvers(f, ingest_maneuvers_csv(ss)).maneuvers(), g.maneuvers());
}

TEST(Correlation, MatchesTwoPassOracle) {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> n(0.0, 1.0);
    std::vector<FlightRecord> flights;
    for (int k = 0; k < 3; ++k) {
        std::vector<Channel> chans = {{"TRQ", "", {}}, {"COL", "", {}}, {"T1", "", {}}};
        for (int i = 0; i < 200; ++i) {
            const double a = n(rng), b = n(rng);
            chans[0].samples.push_back(1e4 + a);
            chans[1].samples.push_back(2.0 * a + 0.3 * b);
            chans[2].samples.push_back(b - 5.0);
        }
        flights.emplace_back("F" + std::to_string(k), 10.0, chans);
    }
    const std::vector<std::string> names = {"TRQ", "COL", "T1"};
    const auto corr = correlation_matrix(flights, names);
    std::vector<std::vector<double>> pooled(3);
    for (const auto& f : flights) {
        for (std::size_t c = 0; c < 3; ++c) {
            const auto s = f.samples(names[c]);
            pooled[c].insert(pooled[c].end(), s.begin(), s.end());
        }
    }
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_EQ(corr.values(i, i), 1.0);
        for (std::size_t k = 0; k < 3; ++k) {
            EXPECT_NEAR(corr.values(i, k), oracle::pearson(pooled[i], pooled[k]), 1e-12);
            EXPECT_EQ(corr.values(i, k), corr.values(k, i));
        }
    }
}

TEST(Correlation, ConstantChannelIsReported) {
    const std::vector<FlightRecord> flights = {two_channel({1, 2, 3}, {4, 4, 4})};
    const std::vector<std::string> names = {"TRQ", "COL"};
    try {
        correlation_matrix(flights, names);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ZeroVariance);
        EXPECT_NE(std::string(e.what()).find("COL"), std::string::npos);
    }
}

TEST(FeatureSelection, AppliesRules) {
    CorrelationMatrix corr;
    corr.names = {"TRQ", "COL", "T1", "WF", "NR"};
    corr.values = Eigen::MatrixXd::Identity(5, 5);
    corr.values(0, 1) = corr.values(1, 0) = 0.9;
    corr.values(0, 2) = corr.values(2, 0) = -0.2;
    corr.values(0, 3) = corr.values(3, 0) = 0.99;
    corr.values(0, 4) = corr.values(4, 0) = 0.01;

    EXPECT_EQ(select_features(corr, "TRQ", FeatureRules::defaults()), (std::vector<std::string>{"COL", "T1", "NR"}));
    FeatureRules band;
    band.min_abs_corr = 0.1;
    band.max_abs_corr = 0.95;
    EXPECT_EQ(select_features(corr, "TRQ", band), (std::vector<std::string>{"COL", "T1"}));
    FeatureRules only;
    only.include = {"NR"};
    EXPECT_EQ(select_features(corr, "TRQ", only), (std::vector<std::string>{"NR"}));
    FeatureRules bad;
    bad.exclude = {"TRQ"};
    EXPECT_EQ(code_of([&] { select_features(corr, "TRQ", bad); }), ErrorCode::TargetExcluded);
}

TEST(Scaler, RoundTripAndTrainRange) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-300.0, 900.0);
    std::vector<double> a, b;
    for (int i = 0; i < 500; ++i) {
        a.push_back(u(rng));
        b.push_back(u(rng) * 1e-3);
    }
    const std::vector<FlightRecord> train = {two_channel(a, b)};
    const std::vector<std::string> names = {"TRQ", "COL"};
    const auto params = fit_minmax(train, names);
    const auto scaled = apply_minmax(params, train[0]);
    for (const auto& ch : scaled.channels()) {
        const auto [lo, hi] = std::minmax_element(ch.samples.begin(), ch.samples.end());
        EXPECT_EQ(*lo, 0.0);
        EXPECT_EQ(*hi, 1.0);
    }
    const auto back = invert_minmax(params, scaled);
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_NEAR(back.samples("TRQ")[i], a[i], 1e-12 * 900.0);
        EXPECT_NEAR(back.samples("COL")[i], b[i], 1e-12);
    }
}

TEST(Scaler, ConstantChannelIsDegenerate) {
    const std::vector<FlightRecord> train = {two_channel({1, 2}, {3, 3})};
    const std::vector<std::string> names = {"COL"};
    EXPECT_EQ(code_of([&] { fit_minmax(train, names); }), ErrorCode::DegenerateChannel);
}

TEST(Split, FractionsAreSeededAndDisjoint) {
    std::vector<std::string> ids;
    for (int i = 0; i < 30; ++i) ids.push_back("F" + std::to_string(100 + i));
    const SplitFractions fr{0.6, 0.2, 0.2};
    const auto s1 = split_dataset(ids, fr, 42);
    const auto s2 = split_dataset(ids, fr, 42);
    const auto s3 = split_dataset(ids, fr, 43);
    EXPECT_EQ(s1, s2);
    EXPECT_NE(s1, s3);
    EXPECT_EQ(s1.train_ids.size(), 18u);
    EXPECT_EQ(s1.val_ids.size(), 6u);
    EXPECT_EQ(s1.test_ids.size(), 6u);
    std::set<std::string> all(s1.train_ids.begin(), s1.train_ids.end());
    all.insert(s1.val_ids.begin(), s1.val_ids.end());
    all.insert(s1.test_ids.begin(), s1.test_ids.end());
    EXPECT_EQ(all.size(), ids.size());
    EXPECT_EQ(split_from_json(to_json(s1)), s1);
}

TEST(Split, ExplicitListsAreChecked) {
    const std::vector<std::string> ids = {"A", "B", "C"};
    EXPECT_EQ(code_of([&] { split_dataset(ids, {"A", "B"}, {"B"}, {"C"}); }), ErrorCode::OverlappingIds);
    EXPECT_EQ(code_of([&] { split_dataset(ids, {"A"}, {}, {"C"}); }), ErrorCode::ConfigError);
    EXPECT_EQ(split_dataset(ids, {"A"}, {"B"}, {"C"}).val_ids, (std::vector<std::string>{"B"}));
}

TEST(Split, FractionPartitionProperty) {
    std::mt19937_64 rng(23);
    std::uniform_int_distribution<int> count(3, 60);
    std::uniform_real_distribution<double> frac(0.05, 0.45);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<std::string> ids;
        const int n = count(rng);
        for (int i = 0; i < n; ++i) ids.push_back("F" + std::to_string(i));
        const double val = frac(rng), test = frac(rng);
        const auto s = split_dataset(ids, SplitFractions{1.0 - val - test, val, test}, rng());
        std::multiset<std::string> all(s.train_ids.begin(), s.train_ids.end());
        all.insert(s.val_ids.begin(), s.val_ids.end());
        all.insert(s.test_ids.begin(), s.test_ids.end());
        ASSERT_EQ(all.size(), ids.size());
        EXPECT_EQ(std::set<std::string>(all.begin(), all.end()).size(), ids.size());
    }
}
