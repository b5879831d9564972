#include "tssid/pipeline/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "tssid/eval/score.hpp"
#include "tssid/flightdata/analysis.hpp"
#include "tssid/flightdata/csv.hpp"
#include "tssid/hash.hpp"
#include "tssid/synthgen/synthgen.hpp"

namespace tssid::pipeline {

namespace fs = std::filesystem;
using flightdata::FlightRecord;
using flightdata::format_double;

int exit_code_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::ConfigError:
        case ErrorCode::ZeroVariance:
        case ErrorCode::UnknownChannel:
        case ErrorCode::TargetExcluded:
        case ErrorCode::OverlappingIds:
        case ErrorCode::InvalidProfile:
        case ErrorCode::InvalidFrequencyBand:
        case ErrorCode::UnstableParameters:
        case ErrorCode::DegreeTooHigh:
        case ErrorCode::DegenerateChannel:
            return 2;
        case ErrorCode::IoError:
        case ErrorCode::MissingChannel:
        case ErrorCode::NonNumericCell:
        case ErrorCode::LengthMismatch:
        case ErrorCode::InvalidRecord:
            return 3;
        default:
            return 4;
    }
}

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names = {"generate", "ingest",   "correlate", "split",
                                                   "fit-sindy", "train",   "simulate",  "evaluate",
                                                   "retrain-experiment", "report"};
    return names;
}

namespace {

class Log {
public:
    explicit Log(std::ostream& out) : out_(out) {
        const char* level = std::getenv("TSSID_LOG");
        quiet_ = level != nullptr && std::string(level) == "quiet";
    }
    void info(const std::string& msg) {
        if (!quiet_) out_ << msg << '\n';
    }
    void error(const std::string& msg) { out_ << "error: " << msg << '\n'; }

private:
    std::ostream& out_;
    bool quiet_ = false;
};

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Files written by one command, listed in its manifest.
class Outputs {
public:
    explicit Outputs(fs::path root) : root_(std::move(root)) {}

    const fs::path& root() const { return root_; }

    void write(const fs::path& rel, const std::string& content) {
        const fs::path path = root_ / rel;
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
        if (ec) throw Error(ErrorCode::IoError, "cannot create " + path.parent_path().string() + ": " + ec.message());
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
        out << content;
        out.close();
        if (!out) throw Error(ErrorCode::IoError, "failed writing " + path.string());
        files_[rel.generic_string()] = sha256_hex(content);
    }

    void write_json(const fs::path& rel, const nlohmann::json& j) { write(rel, j.dump(2) + "\n"); }

    nlohmann::json listing() const {
        nlohmann::json a = nlohmann::json::array();
        for (const auto& [path, digest] : files_) a.push_back({{"path", path}, {"sha256", digest}});
        return a;
    }

private:
    fs::path root_;
    std::map<std::string, std::string> files_;
};

struct Timer {
    std::vector<std::pair<std::string, double>> stages;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

    void lap(const std::string& name) {
        const auto now = std::chrono::steady_clock::now();
        stages.emplace_back(name, std::chrono::duration<double>(now - start).count());
        start = now;
    }
};

void write_manifest(Outputs& outputs, const fs::path& rel, const std::string& command, const PipelineConfig& config,
                    const CommandOptions& options, const Timer& timer, nlohmann::json extra = {}) {
    nlohmann::json m = {{"command", command},
                        {"tool_version", kToolVersion},
                        {"config_fingerprint", config.fingerprint},
                        {"seed", config.seed},
                        {"outputs", outputs.listing()}};
    if (!extra.is_null()) m.update(extra);
    if (options.timings) {
        nlohmann::json t = nlohmann::json::object();
        for (const auto& [name, s] : timer.stages) t[name] = s;
        m["timings_s"] = t;
    }
    // The manifest does not list itself.
    outputs.write_json(rel, m);
}

std::string join(const std::vector<std::string>& v, const std::string& sep) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? sep : "") + v[i];
    return s;
}

double infer_rate(const std::string& text, const fs::path& path) {
    std::istringstream in(text);
    std::string header, row0, row1;
    std::getline(in, header);
    std::getline(in, row0);
    std::getline(in, row1);
    double t0 = 0.0, t1 = 0.0;
    if (!flightdata::parse_double(row0.substr(0, row0.find(',')), t0) ||
        !flightdata::parse_double(row1.substr(0, row1.find(',')), t1) || !(t1 > t0)) {
        throw Error(ErrorCode::InvalidRecord, path.string() + ": cannot infer the sample rate from time_s");
    }
    return std::round(1e6 / (t1 - t0)) / 1e6;
}

}  // namespace

std::vector<FlightRecord> load_corpus(const PipelineConfig& config) {
    const fs::path dir = config.data_dir / "flights";
    if (!fs::is_directory(dir)) throw Error(ErrorCode::IoError, "no flight directory " + dir.string());
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".csv") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw Error(ErrorCode::IoError, "no flight CSVs in " + dir.string());

    std::vector<flightdata::ManeuverEntry> entries;
    const fs::path maneuvers = config.data_dir / "maneuvers.csv";
    if (fs::exists(maneuvers)) {
        std::istringstream in(read_file(maneuvers));
        entries = flightdata::ingest_maneuvers_csv(in);
    }
    std::vector<FlightRecord> corpus;
    for (const auto& path : files) {
        const std::string text = read_file(path);
        const double rate = config.sample_rate_hz ? *config.sample_rate_hz : infer_rate(text, path);
        std::istringstream in(text);
        FlightRecord rec = flightdata::ingest_csv(in, config.channels, path.stem().string(), rate);
        rec = flightdata::attach_maneuvers(rec, entries);
        corpus.push_back(flightdata::filter_maneuvers(rec, config.excluded_maneuvers));
    }
    return corpus;
}

flightdata::DatasetSplit compute_split(const PipelineConfig& config, const std::vector<FlightRecord>& corpus) {
    std::vector<std::string> ids;
    for (const auto& f : corpus) ids.push_back(f.flight_id());
    std::sort(ids.begin(), ids.end());
    const SplitSpec& s = config.split;
    switch (s.mode) {
        case SplitSpec::Mode::Fractions:
            return flightdata::split_dataset(ids, s.fractions, derive_seed(config.seed, "split"));
        case SplitSpec::Mode::Lists:
            return flightdata::split_dataset(ids, s.train, s.val, s.test);
        case SplitSpec::Mode::Prefixes: {
            std::vector<std::string> train, val, test;
            auto matches = [](const std::string& id, const std::vector<std::string>& prefixes) {
                return std::any_of(prefixes.begin(), prefixes.end(),
                                   [&](const std::string& p) { return id.rfind(p, 0) == 0; });
            };
            for (const auto& id : ids) {
                if (matches(id, s.train)) {
                    train.push_back(id);
                } else if (matches(id, s.val)) {
                    val.push_back(id);
                } else if (matches(id, s.test)) {
                    test.push_back(id);
                }
            }
            return flightdata::split_dataset(ids, train, val, test);
        }
    }
    throw Error(ErrorCode::ConfigError, "unknown split mode");
}

std::vector<FlightRecord> select_flights(const std::vector<FlightRecord>& corpus, const std::vector<std::string>& ids) {
    std::vector<FlightRecord> out;
    for (const auto& id : ids) {
        const auto it = std::find_if(corpus.begin(), corpus.end(), [&](const FlightRecord& f) { return f.flight_id() == id; });
        if (it == corpus.end()) throw Error(ErrorCode::ConfigError, "flight " + id + " is not in the corpus");
        out.push_back(*it);
    }
    return out;
}

std::vector<std::string> select_model_features(const PipelineConfig& config, const std::vector<FlightRecord>& flights) {
    if (flights.empty()) throw Error(ErrorCode::EmptyDataset, "no flights for feature selection");
    const auto& rules = config.features;
    std::vector<std::string> names;
    for (const auto& name : flights.front().channel_names()) {
        const bool wanted = name == config.target ||
                            (rules.include.empty() ? std::find(rules.exclude.begin(), rules.exclude.end(), name) ==
                                                         rules.exclude.end()
                                                   : std::find(rules.include.begin(), rules.include.end(), name) !=
                                                         rules.include.end());
        if (wanted) names.push_back(name);
    }
    const auto corr = flightdata::correlation_matrix(flights, names);
    auto features = flightdata::select_features(corr, config.target, rules);
    if (features.empty()) throw Error(ErrorCode::ConfigError, "feature rules left no input channels");
    return features;
}

namespace {

struct Context {
    const CommandOptions& options;
    PipelineConfig config;
    Log& log;
    Timer timer;
};

std::vector<std::string> net_models(const std::vector<std::string>& requested) {
    const std::vector<std::string> models = requested.empty() ? std::vector<std::string>{"ffnn", "lstm"} : requested;
    for (const auto& m : models) {
        if (m != "ffnn" && m != "lstm") throw Error(ErrorCode::ConfigError, "unknown network model '" + m + "'");
    }
    return models;
}

void check_model_ids(const std::vector<std::string>& models) {
    static const std::set<std::string> known = {"sindy1", "sindy2", "ffnn", "lstm"};
    for (const auto& m : models) {
        if (!known.count(m)) throw Error(ErrorCode::ConfigError, "unknown model '" + m + "'");
    }
    if (models.empty()) throw Error(ErrorCode::ConfigError, "no models selected");
}

neural::NetFamily family_of(const std::string& model) {
    return model == "lstm" ? neural::NetFamily::LSTM : neural::NetFamily::FFNN;
}

fs::path model_path(const PipelineConfig& config, const std::string& model) {
    if (model == "sindy1" || model == "sindy2") {
        return config.output_dir / "fit-sindy" / ("sindy_order" + model.substr(5) + ".json");
    }
    return config.output_dir / "train" / (model + ".json");
}

nlohmann::json read_json(const fs::path& path) {
    try {
        return nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::IoError, path.string() + ": " + e.what());
    }
}

LoadedModel load_model(const PipelineConfig& config, const std::string& model,
                       const std::vector<std::string>& expected_features) {
    const fs::path path = model_path(config, model);
    if (!fs::exists(path)) throw Error(ErrorCode::MissingModel, "model file " + path.string() + " does not exist");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ModelMismatch, path.string() + ": " + e.what());
    }
    if (model == "sindy1" || model == "sindy2") {
        sindy::SparseModel m = sindy::sparse_model_from_json(j);
        const bool order_ok = (model == "sindy1") == (m.order == sindy::ModelOrder::First);
        if (!order_ok || m.library != config.sindy.library || m.state_names.front() != config.sindy.state_channel ||
            m.input_names.front() != config.sindy.control_channel) {
            throw Error(ErrorCode::ModelMismatch, path.string() + " does not match the configured SINDy model");
        }
        return m;
    }
    neural::TrainedNet net = neural::trained_net_from_json(j);
    neural::Architecture expected = config.network(family_of(model)).arch;
    expected.set_input_dim(static_cast<int>(expected_features.size()));
    if (net.fingerprint() != neural::architecture_fingerprint(expected, expected_features, config.target)) {
        throw Error(ErrorCode::ModelMismatch, path.string() + ": architecture fingerprint differs from the config");
    }
    return net;
}

std::string series_csv(const FlightRecord& flight, const std::vector<double>& pred, const std::string& target) {
    std::ostringstream out;
    out << "time_s,actual,predicted\n";
    const auto actual = flight.samples(target);
    for (std::size_t i = 0; i < pred.size(); ++i) {
        out << format_double(flight.start_time_s() + static_cast<double>(i) * flight.dt()) << ','
            << format_double(actual[i]) << ',' << format_double(pred[i]) << '\n';
    }
    return out.str();
}

std::string loss_csv(const neural::TrainedNet& net) {
    std::ostringstream out;
    out << "epoch,train_mse,val_mse\n";
    for (std::size_t e = 0; e < net.train_mse.size(); ++e) {
        out << e + 1 << ',' << format_double(net.train_mse[e]) << ',' << format_double(net.val_mse[e]) << '\n';
    }
    return out.str();
}

// ---------------------------------------------------------------- commands

int cmd_generate(Context& ctx) {
    const auto& config = ctx.config;
    std::vector<synthgen::SyntheticFlightSpec> specs = config.synthetic_flights;
    const auto grouped = synthgen::build_corpus(config.synthetic_groups, derive_seed(config.seed, "generate"));
    specs.insert(specs.end(), grouped.begin(), grouped.end());
    if (specs.empty()) throw Error(ErrorCode::ConfigError, "the synthetic section describes no flights");
    std::set<std::string> ids;
    for (const auto& s : specs) {
        if (!ids.insert(s.flight_id).second) throw Error(ErrorCode::ConfigError, "duplicate flight id " + s.flight_id);
    }
    Outputs outputs(config.data_dir);
    std::vector<FlightRecord> records;
    nlohmann::json spec_json = nlohmann::json::array();
    for (const auto& spec : specs) {
        records.push_back(synthgen::generate_flight(spec));
        std::ostringstream csv;
        flightdata::emit_csv(records.back(), csv);
        outputs.write(fs::path("flights") / (spec.flight_id + ".csv"), csv.str());
        spec_json.push_back(synthgen::to_json(spec));
    }
    std::ostringstream man;
    flightdata::emit_maneuvers_csv(records, man);
    outputs.write("maneuvers.csv", man.str());
    outputs.write_json("ground_truth.json", spec_json);
    ctx.timer.lap("generate");
    write_manifest(outputs, "manifest.json", "generate", config, ctx.options, ctx.timer);
    ctx.log.info("generate: " + std::to_string(records.size()) + " flights -> " + config.data_dir.string());
    return 0;
}

int cmd_ingest(Context& ctx) {
    const auto corpus = load_corpus(ctx.config);
    Outputs outputs(ctx.config.output_dir / "ingest");
    std::ostringstream summary;
    summary << "flight_id,samples,sample_rate_hz,duration_s,channels,maneuvers,active_maneuvers\n";
    for (const auto& f : corpus) {
        summary << f.flight_id() << ',' << f.length() << ',' << format_double(f.sample_rate_hz()) << ','
                << format_double(static_cast<double>(f.length()) * f.dt()) << ',' << join(f.channel_names(), ";") << ','
                << f.maneuvers().size() << ',' << (f.maneuvers().empty() ? 0 : f.active_maneuvers().size()) << '\n';
    }
    outputs.write("summary.csv", summary.str());
    std::ostringstream segs;
    segs << "flight_id,label,start_index,end_index,excluded\n";
    for (const auto& f : corpus) {
        for (const auto& s : f.maneuvers()) {
            segs << f.flight_id() << ',' << s.label << ',' << s.start_index << ',' << s.end_index << ','
                 << (s.excluded ? 1 : 0) << '\n';
        }
    }
    outputs.write("segments.csv", segs.str());
    ctx.timer.lap("ingest");
    write_manifest(outputs, "manifest.json", "ingest", ctx.config, ctx.options, ctx.timer);
    ctx.log.info("ingest: " + std::to_string(corpus.size()) + " flights");
    return 0;
}

int cmd_correlate(Context& ctx) {
    const auto corpus = load_corpus(ctx.config);
    const auto split = compute_split(ctx.config, corpus);
    const auto train = select_flights(corpus, split.train_ids);
    const auto names = train.front().channel_names();
    const auto corr = flightdata::correlation_matrix(train, names);
    std::ostringstream csv;
    csv << "channel";
    for (const auto& n : names) csv << ',' << n;
    csv << '\n';
    for (std::size_t i = 0; i < names.size(); ++i) {
        csv << names[i];
        for (std::size_t k = 0; k < names.size(); ++k) {
            csv << ',' << format_double(corr.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)));
        }
        csv << '\n';
    }
    Outputs outputs(ctx.config.output_dir / "correlate");
    outputs.write("correlation.csv", csv.str());
    outputs.write_json("features.json",
                       {{"target", ctx.config.target}, {"features", select_model_features(ctx.config, train)}});
    ctx.timer.lap("correlate");
    write_manifest(outputs, "manifest.json", "correlate", ctx.config, ctx.options, ctx.timer);
    ctx.log.info("correlate: " + std::to_string(names.size()) + " channels");
    return 0;
}

int cmd_split(Context& ctx) {
    const auto corpus = load_corpus(ctx.config);
    const auto split = compute_split(ctx.config, corpus);
    Outputs outputs(ctx.config.output_dir / "split");
    outputs.write_json("split.json", flightdata::to_json(split));
    ctx.timer.lap("split");
    write_manifest(outputs, "manifest.json", "split", ctx.config, ctx.options, ctx.timer);
    ctx.log.info("split: train " + std::to_string(split.train_ids.size()) + ", val " +
                 std::to_string(split.val_ids.size()) + ", test " + std::to_string(split.test_ids.size()));
    return 0;
}

int cmd_fit_sindy(Context& ctx) {
    std::vector<int> orders = {1, 2};
    if (ctx.options.order) {
        if (*ctx.options.order != 1 && *ctx.options.order != 2) throw Error(ErrorCode::ConfigError, "--order must be 1 or 2");
        orders = {*ctx.options.order};
    }
    const auto corpus = load_corpus(ctx.config);
    const auto split = compute_split(ctx.config, corpus);
    const auto train = select_flights(corpus, split.train_ids);
    Outputs outputs(ctx.config.output_dir / "fit-sindy");
    std::string variant;
    for (int order : orders) {
        const auto model = order == 1 ? sindy::fit_first_order(train, ctx.config.sindy)
                                      : sindy::fit_second_order(train, ctx.config.sindy);
        const std::string stem = "sindy_order" + std::to_string(order);
        outputs.write_json(stem + ".json", sindy::to_json(model));
        const std::string eq = sindy::format_equations(model);
        outputs.write(stem + "_equations.txt", eq);
        ctx.log.info(eq.substr(0, eq.size() - 1));
        variant += "_order" + std::to_string(order);
        ctx.timer.lap("fit_order" + std::to_string(order));
    }
    write_manifest(outputs, "manifest" + variant + ".json", "fit-sindy", ctx.config, ctx.options, ctx.timer);
    return 0;
}

int cmd_train(Context& ctx) {
    const auto models = net_models(ctx.options.models);
    const auto corpus = load_corpus(ctx.config);
    const auto split = compute_split(ctx.config, corpus);
    const auto train = select_flights(corpus, split.train_ids);
    const auto val = select_flights(corpus, split.val_ids);
    const auto features = select_model_features(ctx.config, train);
    Outputs outputs(ctx.config.output_dir / "train");
    for (const auto& model : models) {
        const auto& section = ctx.config.network(family_of(model));
        if (ctx.options.grid && !section.grid.empty()) {
            std::vector<neural::GridCandidate> grid = section.grid;
            for (auto& c : grid) c.train.seed = derive_seed(ctx.config.seed, "grid:" + model + ":" + c.name);
            const auto ranking = neural::grid_search(grid, features, ctx.config.target, train, val);
            std::ostringstream csv;
            csv << "rank,name,architecture,train_mse,val_mse\n";
            for (std::size_t r = 0; r < ranking.size(); ++r) {
                std::string arch = neural::to_json(ranking[r].arch).dump();
                std::replace(arch.begin(), arch.end(), ',', ';');
                csv << r + 1 << ',' << ranking[r].name << ',' << arch << ',' << format_double(ranking[r].train_mse)
                    << ',' << format_double(ranking[r].val_mse) << '\n';
            }
            outputs.write("grid_" + model + ".csv", csv.str());
            ctx.timer.lap("grid_" + model);
        }
        neural::TrainConfig tc = section.train;
        tc.seed = derive_seed(ctx.config.seed, "train:" + model);
        ctx.log.info("train: " + model + " on " + std::to_string(train.size()) + " flights, features " + join(features, ","));
        const auto net = neural::fit_network(section.arch, tc, features, ctx.config.target, train, val);
        outputs.write_json(model + ".json", neural::to_json(net));
        outputs.write(model + "_loss.csv", loss_csv(net));
        ctx.log.info("train: " + model + " final train MSE " + format_double(net.train_mse.back()) + ", val MSE " +
                     format_double(net.val_mse.back()));
        ctx.timer.lap("train_" + model);
    }
    write_manifest(outputs, "manifest_" + join(models, "_") + ".json", "train", ctx.config, ctx.options, ctx.timer);
    return 0;
}

struct TestSet {
    std::vector<FlightRecord> train;
    std::vector<FlightRecord> test;
    std::vector<std::string> features;
};

TestSet test_set(const PipelineConfig& config) {
    const auto corpus = load_corpus(config);
    const auto split = compute_split(config, corpus);
    TestSet t;
    t.train = select_flights(corpus, split.train_ids);
    t.test = select_flights(corpus, split.test_ids);
    if (t.test.empty()) throw Error(ErrorCode::ConfigError, "the split has no test flights");
    return t;
}

std::vector<std::string> features_if_needed(const PipelineConfig& config, const std::vector<std::string>& models,
                                            const std::vector<FlightRecord>& train) {
    const bool nets = std::any_of(models.begin(), models.end(), [](const auto& m) { return m == "ffnn" || m == "lstm"; });
    return nets ? select_model_features(config, train) : std::vector<std::string>{};
}

int cmd_simulate(Context& ctx) {
    const auto models = ctx.options.models.empty() ? ctx.config.models : ctx.options.models;
    check_model_ids(models);
    TestSet t = test_set(ctx.config);
    t.features = features_if_needed(ctx.config, models, t.train);
    Outputs outputs(ctx.config.output_dir / "simulate");
    for (const auto& model : models) {
        const LoadedModel loaded = load_model(ctx.config, model, t.features);
        for (const auto& flight : t.test) {
            outputs.write(fs::path(model) / (flight.flight_id() + ".csv"),
                          series_csv(flight, predict(loaded, ctx.config, flight), ctx.config.target));
        }
        ctx.timer.lap("simulate_" + model);
    }
    write_manifest(outputs, "manifest_" + join(models, "_") + ".json", "simulate", ctx.config, ctx.options, ctx.timer);
    ctx.log.info("simulate: " + std::to_string(models.size()) + " models x " + std::to_string(t.test.size()) + " flights");
    return 0;
}

int cmd_evaluate(Context& ctx) {
    const auto models = ctx.options.models.empty() ? ctx.config.models : ctx.options.models;
    check_model_ids(models);
    TestSet t = test_set(ctx.config);
    t.features = features_if_needed(ctx.config, models, t.train);
    Outputs outputs(ctx.config.output_dir / "evaluate");
    std::vector<eval::EvalReport> reports;
    std::vector<eval::Predictions> predictions;
    for (const auto& model : models) {
        const LoadedModel loaded = load_model(ctx.config, model, t.features);
        eval::Predictions preds;
        for (const auto& flight : t.test) preds[flight.flight_id()] = predict(loaded, ctx.config, flight);
        reports.push_back(eval::score_model(model, preds, t.test, ctx.config.target));
        predictions.push_back(std::move(preds));
        outputs.write_json("report_" + model + ".json", eval::to_json(reports.back()));
        ctx.log.info("evaluate: " + model + " overall rMAE " + format_double(reports.back().overall));
        ctx.timer.lap("evaluate_" + model);
    }
    std::ostringstream cmp, man, overlay;
    eval::write_comparison_csv(eval::compare_models(reports), cmp);
    eval::write_maneuver_csv(reports, man);
    eval::write_overlay_csv(t.test, models, predictions, overlay, ctx.config.target);
    outputs.write("comparison.csv", cmp.str());
    outputs.write("maneuvers.csv", man.str());
    outputs.write("overlay.csv", overlay.str());
    write_manifest(outputs, "manifest_" + join(models, "_") + ".json", "evaluate", ctx.config, ctx.options, ctx.timer);
    return 0;
}

int cmd_retrain(Context& ctx) {
    const auto& config = ctx.config;
    const auto models = net_models(ctx.options.models.empty() ? config.retrain_models : ctx.options.models);
    const auto corpus = load_corpus(config);
    const auto split = compute_split(config, corpus);
    for (const auto& id : config.augment_ids) {
        if (std::find(split.test_ids.begin(), split.test_ids.end(), id) == split.test_ids.end()) {
            throw Error(ErrorCode::ConfigError, "augmentation flight " + id + " is not a test flight");
        }
    }
    const auto train = select_flights(corpus, split.train_ids);
    const auto val = select_flights(corpus, split.val_ids);
    const auto test = select_flights(corpus, split.test_ids);
    auto augmented = train;
    const auto extra = select_flights(corpus, config.augment_ids);
    augmented.insert(augmented.end(), extra.begin(), extra.end());
    // Features stay those of the base training set so both runs differ only
    // in their training flights.
    const auto features = select_model_features(config, train);

    Outputs outputs(config.output_dir / "retrain-experiment");
    nlohmann::json runs = nlohmann::json::array();
    std::vector<eval::EvalReport> reports;
    std::ostringstream summary;
    summary << "model,before_rmae,after_rmae,augmented_flights\n";
    for (const auto& model : models) {
        const auto& section = config.network(family_of(model));
        neural::TrainConfig tc = section.train;
        tc.seed = derive_seed(config.seed, "train:" + model);
        double scores[2] = {0.0, 0.0};
        for (int phase = 0; phase < 2; ++phase) {
            const std::string run = model + (phase == 0 ? "_before" : "_after");
            const auto& flights = phase == 0 ? train : augmented;
            std::vector<std::string> ids;
            for (const auto& f : flights) ids.push_back(f.flight_id());
            const auto net = neural::fit_network(section.arch, tc, features, config.target, flights, val);
            eval::Predictions preds;
            for (const auto& flight : test) preds[flight.flight_id()] = neural::predict_series(net, flight);
            auto report = eval::score_model(run, preds, test, config.target);
            scores[phase] = report.overall;
            outputs.write_json(run + ".json", neural::to_json(net));
            outputs.write_json("report_" + run + ".json", eval::to_json(report));
            runs.push_back({{"name", run},
                            {"fingerprint", sha256_hex(config.fingerprint + ":" + run + ":" + join(ids, ","))},
                            {"train_ids", ids}});
            reports.push_back(std::move(report));
            ctx.log.info("retrain: " + run + " overall rMAE " + format_double(scores[phase]));
            ctx.timer.lap(run);
        }
        summary << model << ',' << format_double(scores[0]) << ',' << format_double(scores[1]) << ','
                << config.augment_ids.size() << '\n';
    }
    outputs.write("retrain.csv", summary.str());
    std::ostringstream cmp;
    eval::write_comparison_csv(eval::compare_models(reports), cmp);
    outputs.write("comparison.csv", cmp.str());
    write_manifest(outputs, "manifest.json", "retrain-experiment", config, ctx.options, ctx.timer,
                   {{"runs", runs}, {"augment_ids", config.augment_ids}});
    return 0;
}

int cmd_report(Context& ctx) {
    const auto& config = ctx.config;
    const auto models = ctx.options.models.empty() ? config.models : ctx.options.models;
    check_model_ids(models);
    std::vector<eval::EvalReport> reports;
    for (const auto& model : models) {
        const fs::path path = config.output_dir / "evaluate" / ("report_" + model + ".json");
        if (!fs::exists(path)) throw Error(ErrorCode::MissingModel, "no evaluation report " + path.string());
        reports.push_back(eval::eval_report_from_json(read_json(path)));
    }
    const auto table = eval::compare_models(reports);
    std::ostringstream txt;
    txt << "Overall test rMAE (%)\n";
    for (std::size_t m = 0; m < table.model_ids.size(); ++m) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "  %-8s %8.3f\n", table.model_ids[m].c_str(), 100.0 * table.overall[m]);
        txt << buf;
    }
    txt << "\nPer-flight rMAE (%)\n  flight  ";
    for (const auto& m : table.model_ids) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), " %8s", m.c_str());
        txt << buf;
    }
    txt << '\n';
    for (std::size_t j = 0; j < table.flight_ids.size(); ++j) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "  %-8s", table.flight_ids[j].c_str());
        txt << buf;
        for (double v : table.flight_scores[j]) {
            std::snprintf(buf, sizeof(buf), " %8.3f", 100.0 * v);
            txt << buf;
        }
        txt << '\n';
    }
    for (int order : {1, 2}) {
        const fs::path eq = config.output_dir / "fit-sindy" / ("sindy_order" + std::to_string(order) + "_equations.txt");
        if (fs::exists(eq)) txt << "\nSINDy order " << order << ":\n" << read_file(eq);
    }
    const fs::path retrain = config.output_dir / "retrain-experiment" / "retrain.csv";
    if (fs::exists(retrain)) txt << "\nRe-training experiment:\n" << read_file(retrain);
    Outputs outputs(config.output_dir / "report");
    outputs.write("summary.txt", txt.str());
    std::ostringstream bars;
    eval::write_comparison_csv(table, bars);
    outputs.write("flight_bars.csv", bars.str());
    ctx.timer.lap("report");
    write_manifest(outputs, "manifest.json", "report", config, ctx.options, ctx.timer);
    ctx.log.info(txt.str());
    return 0;
}

}  // namespace

std::vector<double> predict(const LoadedModel& model, const PipelineConfig& config, const FlightRecord& flight) {
    if (const auto* s = std::get_if<sindy::SparseModel>(&model)) {
        return sindy::predict_flight(*s, flight, config.sindy.derivative_method);
    }
    return neural::predict_series(std::get<neural::TrainedNet>(model), flight);
}

int run_command(const CommandOptions& options, std::ostream& log_stream) {
    Log log(log_stream);
    try {
        const auto& names = command_names();
        if (std::find(names.begin(), names.end(), options.command) == names.end()) {
            throw Error(ErrorCode::ConfigError, "unknown command '" + options.command + "'");
        }
        Context ctx{options, load_config(options.config, options.seed, options.out), log, {}};
        const std::string& c = options.command;
        if (c == "generate") return cmd_generate(ctx);
        if (c == "ingest") return cmd_ingest(ctx);
        if (c == "correlate") return cmd_correlate(ctx);
        if (c == "split") return cmd_split(ctx);
        if (c == "fit-sindy") return cmd_fit_sindy(ctx);
        if (c == "train") return cmd_train(ctx);
        if (c == "simulate") return cmd_simulate(ctx);
        if (c == "evaluate") return cmd_evaluate(ctx);
        if (c == "retrain-experiment") return cmd_retrain(ctx);
        return cmd_report(ctx);
    } catch (const Error& e) {
        log.error(e.what());
        return exit_code_for(e.code());
    } catch (const fs::filesystem_error& e) {
        log.error(e.what());
        return 3;
    } catch (const nlohmann::json::exception& e) {
        log.error(e.what());
        return 2;
    }
}

}  // namespace tssid::pipeline
