#include "ftasep/dynamics.hpp"

#include "ftasep/text.hpp"

#include <algorithm>
#include <stdexcept>

namespace ftasep
{
    std::vector<std::size_t> IndexedSiteSet::sorted() const
    {
        std::vector<std::size_t> out(items_.begin(), items_.end());
        std::sort(out.begin(), out.end());
        return out;
    }

    std::vector<std::size_t> active_bonds(const Configuration& config)
    {
        std::vector<std::size_t> out;
        const FrozenCheck range = frozen_check(config);
        if (range.first_center > range.last_center || (!config.is_ring() && config.size() < 3))
            return out;
        for (std::size_t x = range.first_center; x <= range.last_center; ++x)
        {
            const auto xi = static_cast<std::int64_t>(x);
            if (config.wrapped(xi - 1) && config[x] && !config.wrapped(xi + 1))
                out.push_back(x);
        }
        return out;
    }

    SimState::SimState(Configuration config) : config_(std::move(config)), active_(config_.size())
    {
        if (config_.is_ring())
        {
            origin_index_ = 0;
        }
        else
        {
            const std::int64_t i0 = -config_.origin_offset();
            if (i0 >= 0 && i0 < static_cast<std::int64_t>(config_.size()))
                origin_index_ = static_cast<std::size_t>(i0);
        }
        for (std::size_t x = 0; x < config_.size(); ++x)
            refresh(x);
    }

    bool SimState::rate_factor(std::size_t x) const noexcept
    {
        const std::size_t n = config_.size();
        if (config_.is_ring())
        {
            const auto xi = static_cast<std::int64_t>(x);
            return config_.wrapped(xi - 1) && config_[x] && !config_.wrapped(xi + 1);
        }
        if (x == 0)
            return false;
        if (x == n - 1)
            return config_[x - 1] && config_[x];
        return config_[x - 1] && config_[x] && !config_[x + 1];
    }

    void SimState::refresh(std::size_t x) noexcept
    {
        if (rate_factor(x))
            active_.insert(x);
        else
            active_.erase(x);
    }

    bool SimState::is_active(std::size_t x) const noexcept { return x < config_.size() && active_.contains(x); }

    void SimState::apply_jump(std::size_t x)
    {
        if (!is_active(x))
            throw std::invalid_argument("apply_jump: site is not an active bond");
        const std::size_t n = config_.size();
        const bool ring = config_.is_ring();
        const bool exits = !ring && x == n - 1;
        const std::size_t right = ring ? (x + 1) % n : x + 1;

        config_.set(x, 0);
        if (exits)
            ++exits_;
        else
            config_.set(right, 1);

        if (origin_index_)
        {
            if (x == *origin_index_)
                ++crossings_;
            if (x == *origin_index_ || (!exits && right == *origin_index_))
                last_origin_change_ = time_;
        }
        ++events_;

        const auto xi = static_cast<std::int64_t>(x);
        for (std::int64_t y = xi - 2; y <= xi + 2; ++y)
        {
            if (ring)
            {
                const auto ni = static_cast<std::int64_t>(n);
                refresh(static_cast<std::size_t>(((y % ni) + ni) % ni));
            }
            else if (y >= 0 && y < static_cast<std::int64_t>(n))
            {
                refresh(static_cast<std::size_t>(y));
            }
        }
    }

    std::optional<std::size_t> SimState::step(RngStream& rng, double t_max)
    {
        if (active_.empty())
            return std::nullopt;
        const double dt = rng.exponential(static_cast<double>(active_.size()));
        if (time_ + dt > t_max)
        {
            time_ = t_max;
            return std::nullopt;
        }
        const std::size_t x = active_.at(rng.below(active_.size()));
        time_ += dt;
        apply_jump(x);
        return x;
    }

    std::vector<std::size_t> SimState::recompute_active() const
    {
        std::vector<std::size_t> out;
        for (std::size_t x = 0; x < config_.size(); ++x)
            if (rate_factor(x))
                out.push_back(x);
        return out;
    }

    SimState apply_jump(SimState state, std::size_t x)
    {
        state.apply_jump(x);
        return state;
    }

    namespace
    {
        TrajectorySample sample_of(const SimState& s)
        {
            return {s.time(), pair_counts_any(s.config()), s.active().size(), s.crossings()};
        }

        void push_sample(TrajectoryRecord& rec, const SimState& s, const SamplingPlan& plan)
        {
            if (!rec.samples.empty() && !(s.time() > rec.samples.back().time))
                return;
            if (plan.snapshot_stride > 0 && rec.samples.size() % plan.snapshot_stride == 0)
                rec.snapshots.emplace_back(s.time(), s.config().to_string());
            rec.samples.push_back(sample_of(s));
        }
    }  // namespace

    TrajectoryRecord run_until(SimState& state, const StopCondition& stop, RngStream& rng, const SamplingPlan& plan,
                               const EventObserver& on_event)
    {
        TrajectoryRecord rec;
        push_sample(rec, state, plan);
        const double t0 = state.time();
        std::uint64_t grid_index = 1;
        std::uint64_t events = 0;

        while (events < stop.max_events)
        {
            double limit = stop.t_max;
            bool grid_stop = false;
            if (plan.dt > 0.0)
            {
                const double next_grid = t0 + static_cast<double>(grid_index) * plan.dt;
                if (next_grid < limit)
                {
                    limit = next_grid;
                    grid_stop = true;
                }
            }
            const auto site = state.step(rng, limit);
            if (site)
            {
                ++events;
                if (on_event)
                    on_event(state, *site);
                if (plan.event_stride > 0 && state.event_count() % plan.event_stride == 0)
                    push_sample(rec, state, plan);
                continue;
            }
            if (state.absorbed())
            {
                rec.absorbed = true;
                rec.absorption_time = state.time();
                break;
            }
            if (grid_stop)
            {
                push_sample(rec, state, plan);
                ++grid_index;
                continue;
            }
            break;  // horizon
        }
        push_sample(rec, state, plan);
        rec.final_time = state.time();
        rec.events = events;
        rec.final_config = state.config();
        return rec;
    }

    std::string TrajectoryRecord::to_csv() const
    {
        std::string out = "time,n11,n10,n01,n00,n_active,N_t\n";
        for (const auto& s : samples)
        {
            out += fmt_double(s.time);
            out += ',' + std::to_string(s.pairs.n11) + ',' + std::to_string(s.pairs.n10) + ',' +
                   std::to_string(s.pairs.n01) + ',' + std::to_string(s.pairs.n00) + ',' + std::to_string(s.n_active) +
                   ',' + std::to_string(s.crossings) + '\n';
        }
        return out;
    }

    std::string TrajectoryRecord::snapshots_text() const
    {
        std::string out;
        for (const auto& [t, cfg] : snapshots)
            out += fmt_double(t) + ' ' + cfg + '\n';
        return out;
    }

    std::vector<std::int64_t> height_growth_probe(SimState& state, RngStream& rng, const std::vector<double>& checkpoints)
    {
        std::vector<std::int64_t> out;
        out.reserve(checkpoints.size());
        for (double c : checkpoints)
        {
            while (state.step(rng, c))
            {
            }
            out.push_back(2 * state.crossings());
        }
        return out;
    }

    std::vector<std::int64_t> record_sites(const HeightProfile& profile)
    {
        std::vector<std::int64_t> out;
        if (profile.heights.empty())
            return out;
        std::int64_t running_max = profile.heights.front();
        out.push_back(profile.window_start);
        for (std::size_t j = 1; j < profile.heights.size(); ++j)
        {
            if (profile.heights[j] >= running_max)
            {
                out.push_back(profile.window_start + static_cast<std::int64_t>(j));
                running_max = profile.heights[j];
            }
        }
        return out;
    }
}  // namespace ftasep
