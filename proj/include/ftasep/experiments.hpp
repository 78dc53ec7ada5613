#pragma once

#include "ftasep/lattice.hpp"

#include <cstdint>
#include <filesystem>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ftasep
{
    enum class ExperimentKind : std::uint8_t
    {
        Simulate,
        RingExact,
        InvarianceCheck,
        LimitTable,
        CriticalAbsorption,
        FreezingScan,
        SubcriticalCompare,
    };

    std::string_view to_string(ExperimentKind kind) noexcept;
    std::optional<ExperimentKind> parse_experiment_kind(std::string_view name) noexcept;

    inline constexpr int kExitOk = 0;
    inline constexpr int kExitConfig = 1;
    inline constexpr int kExitNumerical = 2;

    // Invalid configuration; line is 1-based, 0 when no location applies.
    class ConfigError : public std::runtime_error
    {
    public:
        ConfigError(const std::string& message, std::size_t line)
            : std::runtime_error(line ? "line " + std::to_string(line) + ": " + message : message), line_(line)
        {
        }
        std::size_t line() const noexcept { return line_; }

    private:
        std::size_t line_;
    };

    struct ExperimentConfig
    {
        ExperimentKind experiment = ExperimentKind::Simulate;

        struct Lattice
        {
            TopologyKind topology = TopologyKind::Ring;
            std::size_t length = 0;
            std::optional<std::size_t> particles;
            std::optional<double> rho;
        } lattice;

        struct Dynamics
        {
            double t_max = std::numeric_limits<double>::infinity();
            std::uint64_t max_events = std::numeric_limits<std::uint64_t>::max();
            std::uint64_t snapshot_stride = 0;
            double sample_dt = 0.0;
            std::uint64_t sample_stride = 0;
        } dynamics;

        std::size_t trials = 1;
        std::uint64_t seed = 0;

        struct Output
        {
            std::string dir = "out";
            bool trajectories = true;
        } output;

        // Experiment-specific knobs.
        struct Analysis
        {
            std::size_t n_max = 10;
            std::size_t pattern_max = 3;
            std::size_t width_max = 5;
            std::vector<double> rhos;
            double horizon = 1.0e4;
            std::int64_t initial_half_width = 64;
            std::int64_t max_half_width = 8192;
            double buffer_fraction = 0.25;
            std::string mode = "auto";  // freezing-scan: auto, freezing, height
            std::vector<double> checkpoints;
        } analysis;
    };

    /// Strict JSON parse: unknown keys, wrong types and inconsistent parameters are
    /// reported with the line of the offending key.
    ExperimentConfig parse_config(std::string_view text);
    ExperimentConfig load_config(const std::filesystem::path& path);
    // Canonical JSON echo of a parsed configuration.
    std::string config_to_json(const ExperimentConfig& config);
    void validate_config(const ExperimentConfig& config);

    struct ExperimentOutput
    {
        int exit_code = kExitOk;
        std::string message;
        std::map<std::string, std::string> files;  // name -> content
        std::vector<std::uint64_t> stream_ids;     // per trial
    };

    /// Run the experiment in memory. Trial i draws from RngStream(seed, 0).substream(i);
    /// the payloads depend only on the configuration, not on the worker count.
    ExperimentOutput execute(const ExperimentConfig& config, std::size_t workers = 1);

    /// Execute, then write the payloads and manifest.json to a staging directory that is
    /// renamed onto config.output.dir. Returns the process exit code; diagnostics go to
    /// `log`.
    int run_experiment(const ExperimentConfig& config, std::size_t workers, std::string& log);

    std::string sha256_hex(std::string_view data);
}  // namespace ftasep
