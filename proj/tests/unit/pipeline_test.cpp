#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fixtures.hpp"
#include "tssid/hash.hpp"
#include "tssid/pipeline/commands.hpp"

using namespace tssid;
using namespace tssid::pipeline;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json flight(const std::string& id, double level) {
    return {{"flight_id", id},
            {"sample_rate_hz", 10},
            {"ground_truth", {{"order", 1}}},
            {"maneuvers",
             {{{"kind", "hold"}, {"label", "taxiing"}, {"duration_s", 2}, {"level", 200}},
              {{"kind", "ramp"}, {"label", "climb"}, {"duration_s", 6}, {"level", level}, {"target", level + 150}},
              {{"kind", "hold"}, {"label", "cruise"}, {"duration_s", 6}, {"level", level + 150}}}}};
}

json tiny_config() {
    return {{"seed", 3},
            {"paths", {{"output_dir", "out"}}},
            {"synthetic", {{"flights", {flight("A1", 260), flight("A2", 300), flight("A3", 340), flight("A4", 380)}}}},
            {"split", {{"train", {"A1", "A2"}}, {"val", {"A3"}}, {"test", {"A4"}}}},
            {"features", {{"include", {"COL", "NR"}}}},
            {"sindy", {{"library", {{"polynomial_degree", 1}}}}},
            {"ffnn", {{"architecture", {{"hidden_layers", {4}}}}, {"train", {{"epochs", 3}}}}},
            {"lstm", {{"architecture", {{"num_layers", 1}, {"hidden_size", 2}, {"lookback", 5}}}, {"train", {{"epochs", 2}}}}}};
}

fs::path write_config(const fs::path& dir, const json& j) {
    const fs::path p = dir / "config.json";
    std::ofstream(p) << j.dump(2);
    return p;
}

int run(const std::string& command, const fs::path& config, std::vector<std::string> models = {},
        std::optional<fs::path> out = {}) {
    CommandOptions o;
    o.command = command;
    o.config = config;
    o.models = std::move(models);
    o.out = std::move(out);
    std::ostringstream log;
    const int rc = run_command(o, log);
    if (rc != 0) std::cerr << command << ": " << log.str();
    return rc;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST(ExitCodes, Mapping) {
    EXPECT_EQ(exit_code_for(ErrorCode::ConfigError), 2);
    EXPECT_EQ(exit_code_for(ErrorCode::ZeroVariance), 2);
    EXPECT_EQ(exit_code_for(ErrorCode::IoError), 3);
    EXPECT_EQ(exit_code_for(ErrorCode::NonNumericCell), 3);
    EXPECT_EQ(exit_code_for(ErrorCode::NoActiveTerms), 4);
    EXPECT_EQ(exit_code_for(ErrorCode::MissingModel), 4);
    EXPECT_EQ(exit_code_for(ErrorCode::ModelMismatch), 4);
}

TEST(Hash, DerivedSeedsAreStable) {
    EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    EXPECT_EQ(derive_seed(1, "split"), derive_seed(1, "split"));
    EXPECT_NE(derive_seed(1, "split"), derive_seed(2, "split"));
    EXPECT_NE(derive_seed(1, "split"), derive_seed(1, "train:ffnn"));
}

TEST(Config, ErrorsAreConfigErrors) {
    const auto dir = fixture::temp_dir("config");
    EXPECT_EQ(run("generate", dir / "absent.json"), 2);
    std::ofstream(dir / "broken.json") << "{ not json";
    EXPECT_EQ(run("generate", dir / "broken.json"), 2);
    auto j = tiny_config();
    j.erase("seed");
    EXPECT_EQ(run("generate", write_config(dir, j)), 2);
    j = tiny_config();
    j["bogus_section"] = 1;
    EXPECT_EQ(run("generate", write_config(dir, j)), 2);
    EXPECT_EQ(run("frobnicate", write_config(dir, tiny_config())), 2);
}

TEST(Config, OverridesTakePrecedence) {
    const auto dir = fixture::temp_dir("overrides");
    const auto path = write_config(dir, tiny_config());
    const auto base = load_config(path);
    EXPECT_EQ(base.seed, 3u);
    EXPECT_EQ(base.output_dir, dir / "out");
    EXPECT_EQ(base.data_dir, dir / "out" / "data");
    const auto over = load_config(path, 9, dir / "elsewhere");
    EXPECT_EQ(over.seed, 9u);
    EXPECT_EQ(over.output_dir, dir / "elsewhere");
    EXPECT_NE(over.fingerprint, base.fingerprint);
    EXPECT_EQ(load_config(path).fingerprint, base.fingerprint);
}

TEST(Generate, WritesFlightsManeuversAndManifest) {
    const auto dir = fixture::temp_dir("generate");
    auto j = tiny_config();
    j["synthetic"]["flights"] = {flight("B1", 250), flight("B2", 300), flight("B3", 350)};
    const auto cfg = write_config(dir, j);
    ASSERT_EQ(run("generate", cfg), 0);
    const fs::path data = dir / "out" / "data";
    int csvs = 0;
    for (const auto& e : fs::directory_iterator(data / "flights")) csvs += e.path().extension() == ".csv";
    EXPECT_EQ(csvs, 3);
    EXPECT_TRUE(fs::exists(data / "maneuvers.csv"));
    const auto manifest = json::parse(slurp(data / "manifest.json"));
    EXPECT_EQ(manifest["command"], "generate");
    EXPECT_EQ(manifest["config_fingerprint"], load_config(cfg).fingerprint);
    EXPECT_FALSE(manifest.contains("timings_s"));
    for (const auto& entry : manifest["outputs"]) {
        EXPECT_EQ(sha256_hex(slurp(data / entry["path"].get<std::string>())), entry["sha256"]);
    }
    EXPECT_EQ(manifest["outputs"].size(), 5u);

    const auto before = slurp(data / "flights" / "B2.csv");
    ASSERT_EQ(run("generate", cfg), 0);
    EXPECT_EQ(slurp(data / "flights" / "B2.csv"), before);
}

TEST(Generate, UnwritableOutputIsAnIoError) {
    const auto dir = fixture::temp_dir("unwritable");
    std::ofstream(dir / "blocker") << "x";
    EXPECT_EQ(run("generate", write_config(dir, tiny_config()), {}, dir / "blocker" / "out"), 3);
}

TEST(Ingest, MissingDataIsAnIoError) {
    const auto dir = fixture::temp_dir("nodata");
    EXPECT_EQ(run("ingest", write_config(dir, tiny_config())), 3);
}

TEST(Correlate, ConstantChannelIsAConfigError) {
    const auto dir = fixture::temp_dir("constant");
    const auto cfg = write_config(dir, tiny_config());
    ASSERT_EQ(run("generate", cfg), 0);
    const fs::path f = dir / "out" / "data" / "flights" / "A1.csv";
    std::ofstream(f) << "time_s,TRQ,COL\n0,1,5\n0.1,2,5\n0.2,3,5\n";
    fs::remove(dir / "out" / "data" / "maneuvers.csv");
    for (const auto id : {"A2", "A3", "A4"}) fs::copy_file(f, f.parent_path() / (std::string(id) + ".csv"), fs::copy_options::overwrite_existing);
    EXPECT_EQ(run("correlate", cfg), 2);
}

TEST(Pipeline, EndToEndAndFailureCodes) {
    const auto dir = fixture::temp_dir("pipeline");
    const auto cfg = write_config(dir, tiny_config());
    const fs::path out = dir / "out";
    EXPECT_EQ(run("evaluate", cfg), 3);  // no corpus yet
    ASSERT_EQ(run("generate", cfg), 0);
    EXPECT_EQ(run("evaluate", cfg), 4);  // no models yet
    for (const auto c : {"ingest", "correlate", "split", "fit-sindy", "train", "simulate", "evaluate",
                         "retrain-experiment", "report"}) {
        ASSERT_EQ(run(c, cfg), 0) << c;
    }
    const auto split = json::parse(slurp(out / "split" / "split.json"));
    EXPECT_EQ(split["test"], json({"A4"}));
    std::ifstream loss(out / "train" / "ffnn_loss.csv");
    int rows = 0;
    for (std::string line; std::getline(loss, line);) ++rows;
    EXPECT_EQ(rows, 4);
    EXPECT_TRUE(fs::exists(out / "simulate" / "lstm" / "A4.csv"));
    EXPECT_TRUE(fs::exists(out / "report" / "summary.txt"));
    const auto retrain = json::parse(slurp(out / "retrain-experiment" / "manifest.json"));
    EXPECT_EQ(retrain["runs"].size(), 4u);
    EXPECT_NE(retrain["runs"][0]["fingerprint"], retrain["runs"][1]["fingerprint"]);

    // A model trained for another architecture is rejected.
    auto j = tiny_config();
    j["ffnn"]["architecture"]["hidden_layers"] = {5};
    const auto changed = write_config(dir, j);
    EXPECT_EQ(run("evaluate", changed, {"ffnn"}), 4);
    EXPECT_EQ(run("evaluate", changed, {"sindy1"}), 0);
    EXPECT_EQ(run("evaluate", changed, {"gru"}), 2);

    j = tiny_config();
    j["sindy"]["threshold"] = 1e9;
    EXPECT_EQ(run("fit-sindy", write_config(dir, j)), 4);
}
