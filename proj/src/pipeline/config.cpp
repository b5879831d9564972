#include "tssid/pipeline/config.hpp"

#include <fstream>
#include <set>

#include "tssid/error.hpp"
#include "tssid/hash.hpp"

namespace tssid::pipeline {

namespace fs = std::filesystem;

namespace {

fs::path resolve(const fs::path& base, const std::string& p) {
    const fs::path path(p);
    return (path.is_absolute() ? path : base / path).lexically_normal();
}

flightdata::FeatureRules parse_features(const nlohmann::json& j) {
    flightdata::FeatureRules r = flightdata::FeatureRules::defaults();
    r.include = j.value("include", r.include);
    r.exclude = j.value("exclude", r.exclude);
    r.min_abs_corr = j.value("min_abs_corr", r.min_abs_corr);
    r.max_abs_corr = j.value("max_abs_corr", r.max_abs_corr);
    return r;
}

SplitSpec parse_split(const nlohmann::json& j) {
    SplitSpec s;
    if (j.contains("prefixes")) {
        s.mode = SplitSpec::Mode::Prefixes;
        const auto& p = j.at("prefixes");
        s.train = p.value("train", std::vector<std::string>{});
        s.val = p.value("val", std::vector<std::string>{});
        s.test = p.value("test", std::vector<std::string>{});
    } else if (j.contains("train") || j.contains("test")) {
        s.mode = SplitSpec::Mode::Lists;
        s.train = j.value("train", std::vector<std::string>{});
        s.val = j.value("val", std::vector<std::string>{});
        s.test = j.value("test", std::vector<std::string>{});
    } else if (j.contains("fractions")) {
        const auto& f = j.at("fractions");
        s.fractions = {f.value("train", 0.8), f.value("val", 0.1), f.value("test", 0.1)};
    }
    return s;
}

NetworkSection parse_network(const nlohmann::json& j, neural::NetFamily family, NetworkSection base) {
    base.arch.family = family;
    if (j.contains("architecture")) {
        nlohmann::json a = j.at("architecture");
        a["family"] = neural::to_string(family);
        base.arch = neural::architecture_from_json(a);
    }
    if (j.contains("train")) base.train = neural::train_config_from_json(j.at("train"), base.train);
    if (j.contains("grid")) {
        int index = 0;
        for (const auto& g : j.at("grid")) {
            neural::GridCandidate c;
            c.name = g.value("name", neural::to_string(family) + "_" + std::to_string(index));
            nlohmann::json a = neural::to_json(base.arch);
            if (g.contains("architecture")) a.update(g.at("architecture"));
            a["family"] = neural::to_string(family);
            c.arch = neural::architecture_from_json(a);
            c.train = g.contains("train") ? neural::train_config_from_json(g.at("train"), base.train) : base.train;
            base.grid.push_back(std::move(c));
            ++index;
        }
    }
    return base;
}

}  // namespace

PipelineConfig parse_config(const nlohmann::json& j, const fs::path& base_dir) {
    PipelineConfig c;
    try {
        if (!j.is_object()) throw Error(ErrorCode::ConfigError, "config root must be an object");
        static const std::set<std::string> kSections = {"seed",  "paths", "data",  "synthetic", "excluded_maneuvers",
                                                        "split", "features", "sindy", "ffnn", "lstm",
                                                        "evaluate", "retrain"};
        for (const auto& [key, value] : j.items()) {
            if (!kSections.count(key)) throw Error(ErrorCode::ConfigError, "unknown config section '" + key + "'");
        }
        if (!j.contains("seed")) throw Error(ErrorCode::ConfigError, "config needs a 'seed'");
        c.seed = j.at("seed").get<std::uint64_t>();

        const auto paths = j.value("paths", nlohmann::json::object());
        c.output_dir = resolve(base_dir, paths.value("output_dir", std::string("out")));
        c.data_dir = paths.contains("data_dir") ? resolve(base_dir, paths.at("data_dir").get<std::string>())
                                                : c.output_dir / "data";

        const auto data = j.value("data", nlohmann::json::object());
        if (data.contains("sample_rate_hz")) {
            c.sample_rate_hz = data.at("sample_rate_hz").get<double>();
            if (!(*c.sample_rate_hz > 0.0)) throw Error(ErrorCode::ConfigError, "sample_rate_hz must be > 0");
        }
        c.channels = data.value("channels", c.channels);

        if (j.contains("synthetic")) {
            const auto& s = j.at("synthetic");
            if (s.contains("groups")) {
                for (const auto& g : s.at("groups")) c.synthetic_groups.push_back(synthgen::corpus_group_from_json(g));
            }
            if (s.contains("flights")) {
                for (const auto& f : s.at("flights")) c.synthetic_flights.push_back(synthgen::flight_spec_from_json(f));
            }
        }

        c.excluded_maneuvers = j.value("excluded_maneuvers", c.excluded_maneuvers);
        if (j.contains("split")) c.split = parse_split(j.at("split"));
        if (j.contains("features")) {
            c.features = parse_features(j.at("features"));
            c.target = j.at("features").value("target", c.target);
        }
        if (j.contains("sindy")) c.sindy = sindy::sindy_config_from_json(j.at("sindy"));
        c.sindy.state_channel = c.target;
        c.sindy.validate();

        NetworkSection ffnn;
        ffnn.arch.family = neural::NetFamily::FFNN;
        NetworkSection lstm;
        lstm.arch.family = neural::NetFamily::LSTM;
        lstm.train.optimizer = neural::OptimizerKind::Adam;
        lstm.train.learning_rate = 5e-4;
        lstm.train.epochs = 100;
        c.ffnn = parse_network(j.value("ffnn", nlohmann::json::object()), neural::NetFamily::FFNN, ffnn);
        c.lstm = parse_network(j.value("lstm", nlohmann::json::object()), neural::NetFamily::LSTM, lstm);

        if (j.contains("evaluate")) c.models = j.at("evaluate").value("models", c.models);
        if (j.contains("retrain")) {
            c.augment_ids = j.at("retrain").value("augment_ids", c.augment_ids);
            c.retrain_models = j.at("retrain").value("models", c.retrain_models);
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ConfigError, e.what());
    } catch (const Error& e) {
        // Invalid values inside the config are configuration errors.
        if (e.code() == ErrorCode::ConfigError) throw;
        throw Error(ErrorCode::ConfigError, e.what());
    }
    c.source = j;
    c.fingerprint = sha256_hex(j.dump());
    return c;
}

PipelineConfig load_config(const fs::path& path, std::optional<std::uint64_t> seed, std::optional<fs::path> out) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ConfigError, "cannot read config " + path.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ConfigError, path.string() + ": " + e.what());
    }
    if (seed) j["seed"] = *seed;
    if (out) j["paths"]["output_dir"] = fs::absolute(*out).lexically_normal().string();
    return parse_config(j, fs::absolute(path).parent_path());
}

}  // namespace tssid::pipeline
