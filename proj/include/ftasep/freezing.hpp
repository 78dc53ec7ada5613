#pragma once

#include "ftasep/lattice.hpp"
#include "ftasep/rng.hpp"

#include <cstdint>
#include <functional>
#include <string_view>
#include <vector>

namespace ftasep
{
    enum class FreezeVerdict : std::uint8_t
    {
        Frozen,
        ActiveAtHorizon,
        NoRecord,      // window too small to contain a record left of the origin
        Inconclusive,  // doubling did not reach agreement before the size cap
    };

    std::string_view to_string(FreezeVerdict v) noexcept;

    // Occupancy of lattice coordinate x in the initial state (must be deterministic in x).
    using SiteLaw = std::function<int(std::int64_t)>;

    // nu_rho keyed by coordinate: nested windows see the same sites.
    SiteLaw bernoulli_site_law(double rho, const RngStream& stream);

    struct WindowRun
    {
        FreezeVerdict verdict = FreezeVerdict::ActiveAtHorizon;
        std::int64_t half_width = 0;
        std::int64_t record_site = 0;
        double freezing_time = 0.0;  // last change of site 0 seen by this run
        double end_time = 0.0;
        int origin_value = 0;
        std::uint64_t events = 0;
    };

    /// Simulate one segment window with the rightmost record x_r <= 0 as a wall and an
    /// open right edge, using per-site Poisson clocks keyed by lattice coordinate (so runs
    /// on nested windows are coupled). Stops as soon as the region from x_r to the first
    /// pair m >= 0 with eta(m-1) eta(m) = 0 holds no active bond, which freezes it forever.
    WindowRun freeze_window(const Configuration& initial, const RngStream& clocks, double horizon,
                            std::int64_t right_buffer);

    struct FreezingParams
    {
        std::int64_t initial_half_width = 64;
        std::int64_t max_half_width = 8192;
        double horizon = 1.0e4;
        double buffer_fraction = 0.25;
    };

    struct FreezingResult
    {
        FreezeVerdict verdict = FreezeVerdict::Inconclusive;
        double freezing_time = 0.0;
        int origin_value = 0;
        std::int64_t half_width = 0;
        std::int64_t record_site = 0;
        std::vector<WindowRun> runs;

        bool conclusive() const noexcept
        {
            return verdict == FreezeVerdict::Frozen || verdict == FreezeVerdict::ActiveAtHorizon;
        }
    };

    /// Doubling-window protocol for the freezing time of site 0: windows [-M, M] with M
    /// doubled until two consecutive windows agree on verdict, freezing time and final
    /// value of site 0.
    FreezingResult freezing_time_origin(const SiteLaw& law, const RngStream& rng, const FreezingParams& params = {});

    struct HeightProbeResult
    {
        std::vector<double> checkpoints;
        std::vector<std::int64_t> heights;  // h(t, 0) at each checkpoint
        double last_origin_change = 0.0;
        double horizon = 0.0;
        double f11_near_origin = 0.0;  // pair frequency of "11" in the central half window at the horizon
        std::uint64_t events = 0;

        // Site 0 did not change during the last quarter of the horizon.
        bool looks_frozen() const noexcept { return last_origin_change < 0.75 * horizon; }
    };

    /// Gillespie run on [-W, W] with W = ceil(speed_factor * horizon), initial state
    /// from the site law, recording h(t,0) at the checkpoints (the last one is the horizon).
    HeightProbeResult height_probe_trial(const SiteLaw& law, const RngStream& rng, std::vector<double> checkpoints,
                                         double speed_factor = 4.0);
}  // namespace ftasep
