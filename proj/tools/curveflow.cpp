#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "curveflow/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"curveflow: curve flows in Minkowski space"};
    app.require_subcommand(1);

    std::string scenario;
    std::string out;
    int levels = 3;

    auto* run = app.add_subcommand("run", "evolve a scenario, write timeseries, frames and report");
    run->add_option("scenario", scenario, "scenario JSON file")->required();
    run->add_option("--out", out, "output directory (default: the scenario's output.directory)");

    auto* conv = app.add_subcommand("convergence", "rerun at doubled resolution and fit observed orders");
    conv->add_option("scenario", scenario, "scenario JSON file")->required();
    conv->add_option("--levels", levels, "number of resolutions, at least 2");
    conv->add_option("--out", out, "output directory");

    auto* fr = app.add_subcommand("frenet", "Frenet apparatus of the scenario's initial curve");
    fr->add_option("scenario", scenario, "scenario JSON file")->required();
    fr->add_option("--out", out, "output directory");

    auto* cat = app.add_subcommand("list-catalog", "print the built-in curves and flows");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : curveflow::cli::kUsage;
    }

    const std::optional<std::string> dir = out.empty() ? std::nullopt : std::optional<std::string>(out);
    if (*run) return curveflow::cli::run(scenario, dir, std::cout);
    if (*conv) return curveflow::cli::convergence(scenario, levels, dir, std::cout);
    if (*fr) return curveflow::cli::frenet(scenario, dir, std::cout);
    if (*cat) return curveflow::cli::list_catalog(std::cout);
    return curveflow::cli::kUsage;
}
