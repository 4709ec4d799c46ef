#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "regobs/commands.hpp"
#include "regobs/errors.hpp"

namespace {

struct CliArgs {
    std::string config;
    std::string out;
    int resolution = 0;
    std::optional<std::uint64_t> seed;
    unsigned workers = 0;
};

void add_common(CLI::App* cmd, CliArgs& args, bool config_required) {
    auto* opt = cmd->add_option("--config", args.config, "scenario file");
    if (config_required) opt->required();
    cmd->add_option("--out", args.out, "output directory for report.json and CSV files");
    cmd->add_option("--seed", args.seed, "override the scenario seed");
    cmd->add_option("--workers", args.workers, "scan worker count (0 = hardware)");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"regional observability analysis for 2D Neumann diffusion"};
    app.require_subcommand(1);

    CliArgs args;
    auto* check = app.add_subcommand("check", "strategic rank analysis, both bases");
    add_common(check, args, true);
    auto* simulate = app.add_subcommand("simulate", "design an estimator and run it");
    add_common(simulate, args, true);
    auto* counter = app.add_subcommand(
        "counterexample", "globally non-strategic, regionally strategic demonstration");
    add_common(counter, args, false);
    auto* scan = app.add_subcommand("scan", "margin sweep of sensor positions");
    add_common(scan, args, true);
    scan->add_option("--resolution", args.resolution, "grid resolution override");
    auto* verify = app.add_subcommand("verify", "estimator residual check");
    add_common(verify, args, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    regobs::cli::CommandOptions opts;
    opts.out_dir = args.out;
    opts.resolution = args.resolution;
    opts.seed = args.seed;
    opts.workers = args.workers;

    try {
        if (check->parsed()) {
            regobs::cli::cmd_check(regobs::cli::load_scenario(args.config), opts);
        } else if (simulate->parsed()) {
            regobs::cli::cmd_simulate(regobs::cli::load_scenario(args.config), opts);
        } else if (counter->parsed()) {
            std::optional<regobs::cli::Scenario> scenario;
            if (!args.config.empty()) scenario = regobs::cli::load_scenario(args.config);
            regobs::cli::cmd_counterexample(scenario, opts);
        } else if (scan->parsed()) {
            regobs::cli::cmd_scan(regobs::cli::load_scenario(args.config), opts);
        } else if (verify->parsed()) {
            regobs::cli::cmd_verify(regobs::cli::load_scenario(args.config), opts);
        }
    } catch (const regobs::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const regobs::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
