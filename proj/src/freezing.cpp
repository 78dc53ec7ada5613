#include "ftasep/freezing.hpp"

#include "ftasep/dynamics.hpp"
#include "ftasep/mappings.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <queue>
#include <stdexcept>

namespace ftasep
{
    std::string_view to_string(FreezeVerdict v) noexcept
    {
        switch (v)
        {
        case FreezeVerdict::Frozen:
            return "frozen";
        case FreezeVerdict::ActiveAtHorizon:
            return "active_at_horizon";
        case FreezeVerdict::NoRecord:
            return "no_record";
        case FreezeVerdict::Inconclusive:
            return "inconclusive";
        }
        return "unknown";
    }

    namespace
    {
        constexpr std::uint64_t zigzag(std::int64_t x) noexcept
        {
            return x >= 0 ? 2 * static_cast<std::uint64_t>(x) : 2 * static_cast<std::uint64_t>(-(x + 1)) + 1;
        }

        Configuration sample_window(const SiteLaw& law, std::int64_t half_width)
        {
            Configuration c(Topology::segment(static_cast<std::size_t>(2 * half_width + 1)), -half_width);
            for (std::int64_t x = -half_width; x <= half_width; ++x)
                c.set(static_cast<std::size_t>(x + half_width), law(x));
            return c;
        }

        // Wall-plus-open-edge dynamics on [wall, right] driven by per-coordinate clocks.
        class ClockEngine
        {
        public:
            ClockEngine(const Configuration& initial, std::int64_t wall, const RngStream& clocks)
                : wall_(wall), right_(initial.origin_offset() + static_cast<std::int64_t>(initial.size()) - 1),
                  master_(clocks)
            {
                const auto n = static_cast<std::size_t>(right_ - wall_ + 1);
                eta_.resize(n);
                for (std::size_t i = 0; i < n; ++i)
                    eta_[i] = static_cast<std::uint8_t>(*initial.at_coordinate(wall_ + static_cast<std::int64_t>(i)));
                active_.assign(n, 0);
                next_ring_.assign(n, 0.0);
                clock_.resize(n);
                for (std::int64_t x = wall_ + 1; x <= right_; ++x)
                    refresh(x, 0.0);
            }

            int eta(std::int64_t x) const noexcept { return eta_[idx(x)]; }
            bool active(std::int64_t x) const noexcept { return active_[idx(x)] != 0; }

            // Next valid ring among active bonds, or nullopt if none.
            std::optional<std::pair<double, std::int64_t>> peek()
            {
                while (!queue_.empty())
                {
                    const auto [t, x] = queue_.top();
                    if (active(x) && next_ring_[idx(x)] == t)
                        return queue_.top();
                    queue_.pop();
                }
                return std::nullopt;
            }

            void fire(double t, std::int64_t x)
            {
                queue_.pop();
                eta_[idx(x)] = 0;
                if (x < right_)
                    eta_[idx(x + 1)] = 1;
                advance(x, t);
                for (std::int64_t y = std::max(wall_ + 1, x - 2); y <= std::min(right_, x + 2); ++y)
                    refresh(y, t);
            }

        private:
            std::size_t idx(std::int64_t x) const noexcept { return static_cast<std::size_t>(x - wall_); }

            bool rate_factor(std::int64_t x) const noexcept
            {
                if (x <= wall_)
                    return false;
                if (!eta(x - 1) || !eta(x))
                    return false;
                return x == right_ || !eta(x + 1);
            }

            RngStream& clock(std::int64_t x)
            {
                auto& c = clock_[idx(x)];
                if (!c)
                {
                    c.emplace(master_.substream(zigzag(x)));
                    next_ring_[idx(x)] = c->exponential(1.0);
                }
                return *c;
            }

            // Move the clock of x to its first ring strictly after t.
            void advance(std::int64_t x, double t)
            {
                RngStream& c = clock(x);
                double& r = next_ring_[idx(x)];
                while (r <= t)
                    r += c.exponential(1.0);
            }

            void refresh(std::int64_t x, double t)
            {
                const bool now = rate_factor(x);
                const bool before = active_[idx(x)] != 0;
                active_[idx(x)] = now ? 1 : 0;
                if (now && !before)
                {
                    advance(x, t);
                    queue_.emplace(next_ring_[idx(x)], x);
                }
            }

            using Entry = std::pair<double, std::int64_t>;
            std::int64_t wall_;
            std::int64_t right_;
            RngStream master_;
            std::vector<std::uint8_t> eta_;
            std::vector<std::uint8_t> active_;
            std::vector<double> next_ring_;
            std::vector<std::optional<RngStream>> clock_;
            std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue_;
        };

        // First pair (m-1, m) with m >= 0 that is not "11"; the region [wall, m] is frozen
        // forever once no bond strictly between wall and m is active.
        struct Certificate
        {
            std::int64_t candidate = 0;
            bool holds = false;
        };

        Certificate certify(const ClockEngine& e, std::int64_t wall, std::int64_t limit)
        {
            Certificate c{limit, false};
            for (std::int64_t x = std::max<std::int64_t>(0, wall + 1); x <= limit; ++x)
                if (!(e.eta(x - 1) && e.eta(x)))
                {
                    c.candidate = x;
                    c.holds = true;
                    break;
                }
            if (!c.holds)
                return c;
            for (std::int64_t x = wall + 1; x < c.candidate; ++x)
                if (e.active(x))
                {
                    c.holds = false;
                    break;
                }
            return c;
        }
    }  // namespace

    SiteLaw bernoulli_site_law(double rho, const RngStream& stream)
    {
        const RngStream lane = stream.substream(0x1417);
        return [rho, lane](std::int64_t x) { return lane.uniform_at(zigzag(x)) < rho ? 1 : 0; };
    }

    WindowRun freeze_window(const Configuration& initial, const RngStream& clocks, double horizon,
                            std::int64_t right_buffer)
    {
        if (initial.is_ring())
            throw std::invalid_argument("freeze_window needs a segment");
        const std::int64_t a = initial.origin_offset();
        const std::int64_t b = a + static_cast<std::int64_t>(initial.size()) - 1;
        if (a > -1 || b < 1)
            throw std::invalid_argument("freeze_window needs sites on both sides of the origin");

        WindowRun run;
        run.half_width = std::min(-a, b);
        run.origin_value = *initial.at_coordinate(0);

        // Rightmost record x_r <= 0 with at least one site of the window to its left.
        const HeightProfile profile = height_from_config(initial, 0);
        std::optional<std::int64_t> wall;
        for (std::int64_t x : record_sites(profile))
            if (x >= a + 1 && x <= 0)
                wall = x;
        if (!wall)
        {
            run.verdict = FreezeVerdict::NoRecord;
            return run;
        }
        run.record_site = *wall;

        ClockEngine engine(initial, *wall, clocks);
        const std::int64_t limit = b - right_buffer;
        double last_origin_change = 0.0;
        double now = 0.0;
        Certificate cert = certify(engine, *wall, limit);
        while (!cert.holds)
        {
            const auto next = engine.peek();
            if (!next)
            {
                // Whole window absorbed.
                cert = certify(engine, *wall, b);
                break;
            }
            const auto [t, x] = *next;
            if (t > horizon)
            {
                now = horizon;
                break;
            }
            now = t;
            engine.fire(t, x);
            ++run.events;
            if (x == 0 || x + 1 == 0)
                last_origin_change = t;
            // Sites beyond the candidate pair cannot change the certificate.
            if (x <= cert.candidate)
                cert = certify(engine, *wall, limit);
        }
        run.verdict = cert.holds ? FreezeVerdict::Frozen : FreezeVerdict::ActiveAtHorizon;
        run.freezing_time = last_origin_change;
        run.end_time = now;
        run.origin_value = engine.eta(0);
        return run;
    }

    FreezingResult freezing_time_origin(const SiteLaw& law, const RngStream& rng, const FreezingParams& params)
    {
        if (params.initial_half_width < 2 || params.max_half_width < params.initial_half_width)
            throw std::invalid_argument("invalid window sizes for the freezing protocol");
        const RngStream clocks = rng.substream(0xC10C);
        auto run_at = [&](std::int64_t m) {
            const auto buffer = static_cast<std::int64_t>(std::floor(params.buffer_fraction * static_cast<double>(m)));
            return freeze_window(sample_window(law, m), clocks, params.horizon, buffer);
        };

        FreezingResult result;
        std::int64_t m = params.initial_half_width;
        result.runs.push_back(run_at(m));
        while (2 * m <= params.max_half_width)
        {
            m *= 2;
            result.runs.push_back(run_at(m));
            const WindowRun& prev = result.runs[result.runs.size() - 2];
            const WindowRun& cur = result.runs.back();
            const bool decided = cur.verdict == FreezeVerdict::Frozen || cur.verdict == FreezeVerdict::ActiveAtHorizon;
            if (decided && prev.verdict == cur.verdict && prev.freezing_time == cur.freezing_time &&
                prev.origin_value == cur.origin_value)
            {
                result.verdict = cur.verdict;
                result.freezing_time = cur.freezing_time;
                result.origin_value = cur.origin_value;
                result.half_width = cur.half_width;
                result.record_site = cur.record_site;
                return result;
            }
        }
        const WindowRun& last = result.runs.back();
        result.verdict = last.verdict == FreezeVerdict::NoRecord ? FreezeVerdict::NoRecord : FreezeVerdict::Inconclusive;
        result.half_width = last.half_width;
        result.record_site = last.record_site;
        result.freezing_time = last.freezing_time;
        result.origin_value = last.origin_value;
        return result;
    }

    HeightProbeResult height_probe_trial(const SiteLaw& law, const RngStream& rng, std::vector<double> checkpoints,
                                         double speed_factor)
    {
        if (checkpoints.empty() || !std::is_sorted(checkpoints.begin(), checkpoints.end()))
            throw std::invalid_argument("checkpoints must be nonempty and ascending");
        HeightProbeResult out;
        out.horizon = checkpoints.back();
        const auto w = static_cast<std::int64_t>(std::ceil(speed_factor * out.horizon)) + 2;
        SimState state(sample_window(law, w));
        RngStream dyn = rng.substream(0xD1A);
        out.heights = height_growth_probe(state, dyn, checkpoints);
        out.checkpoints = std::move(checkpoints);
        out.last_origin_change = state.last_origin_change();
        out.events = state.event_count();

        // "11" frequency over the central half of the window.
        const auto& c = state.config();
        const std::size_t lo = static_cast<std::size_t>(w / 2);
        const std::size_t hi = static_cast<std::size_t>(w + w / 2);
        std::size_t n11 = 0;
        for (std::size_t i = lo; i < hi; ++i)
            n11 += (c[i] && c[i + 1]) ? 1 : 0;
        out.f11_near_origin = static_cast<double>(n11) / static_cast<double>(hi - lo);
        return out;
    }
}  // namespace ftasep
