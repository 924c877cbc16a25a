#include "holonet/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "holonet/errors.hpp"
#include "holonet/experiment.hpp"
#include "holonet/verification.hpp"

namespace holonet
{

namespace
{

struct RunOptions
{
    std::string config;
    std::optional<double> dt;
    std::optional<double> horizon;
    std::optional<double> penalty;
    std::optional<std::string> out;
};

std::filesystem::path resolve_output_dir(const RunOptions& options, const ExperimentConfig& config)
{
    if (options.out)
        return *options.out;
    if (!config.output_dir.empty())
        return config.output_dir;
    if (const char* env = std::getenv(output_dir_env); env && *env)
        return env;
    return "holonet_out";
}

int run_command(const RunOptions& options, std::ostream& out, std::ostream& err)
{
    ExperimentConfig config;
    std::filesystem::path dir;
    try
    {
        config = load_config(options.config);
        if (options.dt)
            config.params.dt = *options.dt;
        if (options.horizon)
            config.params.horizon = *options.horizon;
        if (options.penalty)
            config.params.penalty = *options.penalty;
        validate(config.params);
        dir = resolve_output_dir(options, config);
        // network and signals are validated before anything touches the disk
        build_network(config.network);
        build_drive(config);
    }
    catch (const ConfigError& e)
    {
        err << "config error: " << e.what() << '\n';
        return exit_config_error;
    }

    const bool limit = config.preset == Preset::limit;
    const auto table_path = dir / (limit ? "limit.csv" : "trajectory.csv");
    const auto summary_path = dir / "summary.txt";
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    std::ofstream csv(table_path);
    if (!csv)
    {
        err << "config error: cannot write " << table_path << '\n';
        return exit_config_error;
    }

    ExperimentResult result;
    try
    {
        result = run_experiment(config, csv);
    }
    catch (const ConfigError& e)
    {
        err << "config error: " << e.what() << '\n';
        return exit_config_error;
    }
    catch (const NumericalError& e)
    {
        err << "numerical failure: " << e.what() << '\n';
        return exit_numerical_failure;
    }

    std::ofstream summary(summary_path);
    write_summary(summary, config, result);
    write_summary(out, config, result);
    if (limit)
        write_limit_table(out, result.limit_rows);
    out << "wrote " << table_path.string() << " and " << summary_path.string() << '\n';
    return exit_ok;
}

int verify_command(std::uint64_t seed, std::ostream& out, std::ostream& err)
{
    std::vector<CheckResult> checks;
    try
    {
        out << "limit table (preset 'limit'):\n";
        checks = run_verification(seed, &out);
    }
    catch (const std::exception& e)
    {
        err << "verification aborted: " << e.what() << '\n';
        return exit_numerical_failure;
    }
    out << "seed = " << seed << '\n';
    print_checks(out, checks);
    for (const auto& c : checks)
        if (!c.passed)
            return exit_numerical_failure;
    return exit_ok;
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Learning as constrained Lagrangian dynamics"};
    app.require_subcommand(1);

    RunOptions run;
    auto* run_cmd = app.add_subcommand("run", "Run a preset or custom experiment");
    run_cmd->add_option("--config", run.config, "Experiment config (JSON)")->required();
    run_cmd->add_option("--dt", run.dt, "Override the RK4 step");
    run_cmd->add_option("--horizon", run.horizon, "Override the final time");
    run_cmd->add_option("--penalty", run.penalty, "Override the constraint penalty coefficient c_p");
    run_cmd->add_option("--out", run.out, std::string("Output directory (default: $") + output_dir_env + ")");

    std::uint64_t seed = 20190101;
    auto* verify_cmd = app.add_subcommand("verify", "Run the invariant suite and print a pass/fail table");
    verify_cmd->add_option("--seed", seed, "Seed for random networks");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        return app.exit(e, out, err) == 0 ? exit_ok : exit_config_error;
    }

    if (*run_cmd)
        return run_command(run, out, err);
    return verify_command(seed, out, err);
}

} // namespace holonet
