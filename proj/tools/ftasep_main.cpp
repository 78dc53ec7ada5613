// Command-line driver: ftasep <experiment> --config <path> [--seed S] [--trials N] [--out DIR] [--workers W]
#include "ftasep/experiments.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <thread>

int main(int argc, char** argv)
{
    CLI::App app{"Facilitated exclusion process experiments"};
    std::string experiment;
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> trials;
    std::optional<std::string> out_dir;
    std::size_t workers = std::max(1u, std::thread::hardware_concurrency());

    app.add_option("experiment", experiment,
                   "simulate | ring-exact | invariance-check | limit-table | critical-absorption | freezing-scan | "
                   "subcritical-compare")
        ->required();
    app.add_option("--config", config_path, "JSON experiment configuration")->required();
    app.add_option("--seed", seed, "Override the configured seed");
    app.add_option("--trials", trials, "Override the configured trial count");
    app.add_option("--out", out_dir, "Override the output directory");
    app.add_option("--workers", workers, "Worker threads (results do not depend on this)")->check(CLI::PositiveNumber);

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        const int code = app.exit(e);
        return code == 0 ? 0 : ftasep::kExitConfig;
    }

    ftasep::ExperimentConfig config;
    try
    {
        if (!ftasep::parse_experiment_kind(experiment))
            throw ftasep::ConfigError("unknown experiment '" + experiment + "'", 0);
        config = ftasep::load_config(config_path);
        if (ftasep::to_string(config.experiment) != experiment)
            throw ftasep::ConfigError("config describes '" + std::string(ftasep::to_string(config.experiment)) +
                                          "' but '" + experiment + "' was requested",
                                      0);
        if (seed)
            config.seed = *seed;
        if (trials)
            config.trials = *trials;
        if (out_dir)
            config.output.dir = *out_dir;
        ftasep::validate_config(config);
    }
    catch (const ftasep::ConfigError& e)
    {
        std::cerr << config_path << ": " << e.what() << '\n';
        return ftasep::kExitConfig;
    }

    std::string log;
    const int code = ftasep::run_experiment(config, workers, log);
    std::cerr << log;
    return code;
}
