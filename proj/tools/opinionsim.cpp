#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "opinion/commands.hpp"
#include "opinion/config.hpp"

namespace {

struct CommonArgs
{
    std::string config;
    std::string out;
    std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, CommonArgs& args)
{
    cmd->add_option("--config", args.config, "Scenario file (TOML)")->required()->check(CLI::ExistingFile);
    cmd->add_option("--out", args.out, "Output directory")->required();
    cmd->add_option("--override", args.overrides, "Dotted-path override KEY=VALUE, e.g. leaders.1.psi=0.8")
        ->take_all();
}

}  // namespace

int main(int argc, char** argv)
{
    using namespace opinion;

    CLI::App app{"Kinetic Monte Carlo simulator for controlled leader-follower opinion dynamics"};
    app.require_subcommand(1);

    CommonArgs args;
    auto* run_cmd = app.add_subcommand("run", "Simulate a scenario and write moments and histograms");
    auto* oracle_cmd = app.add_subcommand("compare-oracle", "Compare simulated means against the mean-opinion ODE");
    auto* steady_cmd = app.add_subcommand("steady", "Compare the long-time histogram with the stationary densities");
    for (auto* cmd : {run_cmd, oracle_cmd, steady_cmd})
        add_common(cmd, args);

    try
    {
        app.parse(argc, argv);
    }
    catch (CLI::ParseError const& e)
    {
        int const code = app.exit(e);
        return code == 0 ? 0 : static_cast<int>(ExitCode::ValidationFailure);
    }

    ScenarioConfig config;
    try
    {
        config = load_config(args.config, args.overrides);
    }
    catch (ConfigError const& e)
    {
        std::cerr << e.what() << '\n';
        return static_cast<int>(ExitCode::ValidationFailure);
    }
    catch (std::exception const& e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return static_cast<int>(ExitCode::RuntimeFailure);
    }

    ExitCode code = ExitCode::Success;
    if (run_cmd->parsed())
        code = cmd_run(config, args.out, std::cerr);
    else if (oracle_cmd->parsed())
        code = cmd_compare_oracle(config, args.out, std::cerr);
    else
        code = cmd_steady(config, args.out, std::cerr);
    return static_cast<int>(code);
}
