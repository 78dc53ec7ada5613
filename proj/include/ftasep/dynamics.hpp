#pragma once

#include "ftasep/lattice.hpp"
#include "ftasep/mappings.hpp"
#include "ftasep/rng.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace ftasep
{
    /// Set of site indices with O(1) insert, erase and uniform sampling
    /// (swap-remove array plus position map).
    class IndexedSiteSet
    {
    public:
        IndexedSiteSet() = default;
        explicit IndexedSiteSet(std::size_t capacity) : pos_(capacity, kAbsent) {}

        bool contains(std::size_t x) const noexcept { return pos_[x] != kAbsent; }
        std::size_t size() const noexcept { return items_.size(); }
        bool empty() const noexcept { return items_.empty(); }
        std::size_t at(std::size_t i) const noexcept { return items_[i]; }

        void insert(std::size_t x)
        {
            if (contains(x))
                return;
            pos_[x] = static_cast<std::uint32_t>(items_.size());
            items_.push_back(static_cast<std::uint32_t>(x));
        }

        void erase(std::size_t x)
        {
            const std::uint32_t p = pos_[x];
            if (p == kAbsent)
                return;
            const std::uint32_t last = items_.back();
            items_[p] = last;
            pos_[last] = p;
            items_.pop_back();
            pos_[x] = kAbsent;
        }

        std::vector<std::size_t> sorted() const;

    private:
        static constexpr std::uint32_t kAbsent = std::numeric_limits<std::uint32_t>::max();
        std::vector<std::uint32_t> items_;
        std::vector<std::uint32_t> pos_;
    };

    /// Sites x with eta(x-1) = eta(x) = 1 and eta(x+1) = 0. On a segment only interior
    /// sites are reported (neighbors outside the window are unknown).
    std::vector<std::size_t> active_bonds(const Configuration& config);

    /// Evolving state of the exclusion process under exact Gillespie dynamics.
    ///
    /// On a segment the site left of the window is treated as empty (no facilitation of
    /// the first site) and the site right of the window as an empty sink: a particle on
    /// the last site with an occupied left neighbor leaves the window at rate one and is
    /// counted in exits().
    class SimState
    {
    public:
        explicit SimState(Configuration config);

        const Configuration& config() const noexcept { return config_; }
        double time() const noexcept { return time_; }
        std::uint64_t event_count() const noexcept { return events_; }
        // Jumps across the bond between lattice coordinates 0 and 1 (N_t).
        std::int64_t crossings() const noexcept { return crossings_; }
        std::uint64_t exits() const noexcept { return exits_; }
        const IndexedSiteSet& active() const noexcept { return active_; }
        bool absorbed() const noexcept { return active_.empty(); }
        // Time of the last change of the site with lattice coordinate 0 (0 if never).
        double last_origin_change() const noexcept { return last_origin_change_; }

        bool is_active(std::size_t x) const noexcept;

        /// Swap sites x and x+1. Throws std::invalid_argument if x is not active.
        void apply_jump(std::size_t x);

        /// One Gillespie event. Returns the jumped site, or nullopt if absorbed
        /// (or if the next event would fall after t_max; time is then set to t_max).
        std::optional<std::size_t> step(RngStream& rng, double t_max = std::numeric_limits<double>::infinity());

        // From-scratch recomputation, for coherence checks.
        std::vector<std::size_t> recompute_active() const;

    private:
        bool rate_factor(std::size_t x) const noexcept;
        void refresh(std::size_t x) noexcept;

        Configuration config_;
        IndexedSiteSet active_;
        double time_ = 0.0;
        std::uint64_t events_ = 0;
        std::int64_t crossings_ = 0;
        std::uint64_t exits_ = 0;
        double last_origin_change_ = 0.0;
        std::optional<std::size_t> origin_index_;
    };

    SimState apply_jump(SimState state, std::size_t x);

    struct StopCondition
    {
        double t_max = std::numeric_limits<double>::infinity();
        std::uint64_t max_events = std::numeric_limits<std::uint64_t>::max();
    };

    /// Either a regular time grid (dt > 0) or every event_stride-th event.
    struct SamplingPlan
    {
        double dt = 0.0;
        std::uint64_t event_stride = 0;
        std::uint64_t snapshot_stride = 0;  // every n-th sample also stores the configuration
    };

    struct TrajectorySample
    {
        double time = 0.0;
        PairCounts pairs;
        std::size_t n_active = 0;
        std::int64_t crossings = 0;
    };

    struct TrajectoryRecord
    {
        std::vector<TrajectorySample> samples;
        std::vector<std::pair<double, std::string>> snapshots;
        bool absorbed = false;
        double absorption_time = 0.0;
        double final_time = 0.0;
        std::uint64_t events = 0;
        Configuration final_config;

        std::string to_csv() const;
        std::string snapshots_text() const;
    };

    using EventObserver = std::function<void(const SimState&, std::size_t site)>;

    /// Step until absorption, t_max or max_events, whichever comes first.
    TrajectoryRecord run_until(SimState& state, const StopCondition& stop, RngStream& rng, const SamplingPlan& plan = {},
                               const EventObserver& on_event = {});

    /// Height at the origin, h(t,0) = 2 N_t, at each checkpoint (ascending).
    std::vector<std::int64_t> height_growth_probe(SimState& state, RngStream& rng, const std::vector<double>& checkpoints);

    /// Sites x whose height is >= every height to its left inside the window,
    /// in lattice coordinates of the height profile.
    std::vector<std::int64_t> record_sites(const HeightProfile& profile);
}  // namespace ftasep
