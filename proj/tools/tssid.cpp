#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "tssid/pipeline/commands.hpp"

using tssid::pipeline::CommandOptions;

int main(int argc, char** argv) {
    CLI::App app{"Turboshaft torque system identification"};
    app.set_version_flag("--version", std::string(tssid::pipeline::kToolVersion));
    app.require_subcommand(1);

    CommandOptions options;
    std::string config;
    std::uint64_t seed = 0;
    std::string out;

    const std::map<std::string, std::string> help = {
        {"generate", "write a synthetic corpus"},
        {"ingest", "load flights and summarize segments"},
        {"correlate", "channel correlations and feature selection"},
        {"split", "assign flights to train/val/test"},
        {"fit-sindy", "fit sparse ODE models"},
        {"train", "train the networks"},
        {"simulate", "predict torque on test flights"},
        {"evaluate", "score models by relative MAE"},
        {"retrain-experiment", "compare networks before and after augmenting training data"},
        {"report", "summary tables from evaluate outputs"},
    };
    for (const auto& name : tssid::pipeline::command_names()) {
        CLI::App* sub = app.add_subcommand(name, help.at(name));
        sub->add_option("--config", config, "pipeline config (JSON)")->required();
        sub->add_option("--seed", seed, "override the config seed");
        sub->add_option("--out", out, "override the output directory");
        sub->add_flag("--timings", options.timings, "record wall-clock timings in the manifest");
        if (name == "train" || name == "simulate" || name == "evaluate" || name == "retrain-experiment" ||
            name == "report") {
            sub->add_option("--model", options.models, "model id (repeatable)");
        }
        if (name == "fit-sindy") {
            sub->add_option("--order", options.order, "1 or 2; both when omitted")->check(CLI::Range(1, 2));
        }
        if (name == "train") sub->add_flag("--grid", options.grid, "also rank the configured grid");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    CLI::App* sub = app.get_subcommands().front();
    options.command = sub->get_name();
    options.config = config;
    if (sub->count("--seed")) options.seed = seed;
    if (sub->count("--out")) options.out = out;
    return tssid::pipeline::run_command(options, std::cerr);
}
