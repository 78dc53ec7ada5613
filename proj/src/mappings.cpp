#include "ftasep/mappings.hpp"

#include <numeric>
#include <stdexcept>

namespace ftasep
{
    HeightProfile height_from_config(const Configuration& config, std::int64_t crossing_anchor)
    {
        if (config.is_ring())
            throw std::invalid_argument("height profiles are defined on segments only");
        const std::int64_t o = config.origin_offset();
        const auto n = static_cast<std::int64_t>(config.size());
        if (0 < o - 1 || 0 > o + n - 1)
            throw std::invalid_argument("height window must contain coordinate 0");

        HeightProfile p;
        p.window_start = o - 1;
        p.crossing_anchor = crossing_anchor;
        p.heights.resize(config.size() + 1);
        p.heights[0] = 0;
        for (std::size_t j = 1; j <= config.size(); ++j)
            p.heights[j] = p.heights[j - 1] + 1 - 2 * config[j - 1];
        const std::int64_t lift = 2 * crossing_anchor - p.heights[static_cast<std::size_t>(-p.window_start)];
        for (auto& h : p.heights)
            h += lift;
        return p;
    }

    bool has_unit_increments(const HeightProfile& profile)
    {
        for (std::size_t j = 1; j < profile.heights.size(); ++j)
        {
            const std::int64_t d = profile.heights[j] - profile.heights[j - 1];
            if (d != 1 && d != -1)
                return false;
        }
        return true;
    }

    std::pair<Configuration, std::int64_t> config_from_height(const HeightProfile& profile)
    {
        if (profile.heights.size() < 2)
            throw std::invalid_argument("height profile needs at least two entries");
        if (!has_unit_increments(profile))
            throw std::invalid_argument("height profile has a non-unit increment");
        if (0 < profile.window_start || 0 > profile.window_end())
            throw std::invalid_argument("height window must contain coordinate 0");
        const std::int64_t h0 = profile.at(0);
        if (h0 % 2 != 0)
            throw std::invalid_argument("height at the origin must be even");

        Configuration c(Topology::segment(profile.heights.size() - 1), profile.window_start + 1);
        for (std::size_t j = 1; j < profile.heights.size(); ++j)
            c.set(j - 1, profile.heights[j] < profile.heights[j - 1] ? 1 : 0);
        return {std::move(c), h0 / 2};
    }

    std::vector<std::int64_t> height_jump_sites(const HeightProfile& profile)
    {
        std::vector<std::int64_t> out;
        for (std::int64_t x = profile.window_start + 2; x <= profile.window_end() - 1; ++x)
        {
            const std::int64_t hx = profile.at(x);
            if (profile.at(x - 2) == hx + 2 && profile.at(x + 1) == hx + 1)
                out.push_back(x);
        }
        return out;
    }

    HeightProfile grow_at(HeightProfile profile, std::int64_t x)
    {
        if (x < profile.window_start + 2 || x > profile.window_end() - 1)
            throw std::invalid_argument("growth site outside the evaluable window");
        const std::int64_t hx = profile.at(x);
        if (profile.at(x - 2) != hx + 2 || profile.at(x + 1) != hx + 1)
            throw std::invalid_argument("height cannot grow at this site");
        profile.heights[static_cast<std::size_t>(x - profile.window_start)] += 2;
        if (x == 0)
            ++profile.crossing_anchor;
        return profile;
    }

    std::string ZeroRangeState::to_string() const
    {
        std::string out;
        for (std::size_t i = 0; i < occupancy.size(); ++i)
        {
            if (i)
                out += ' ';
            out += std::to_string(occupancy[i]);
        }
        return out;
    }

    ZeroRangeState zero_range_from_config(const Configuration& config, std::size_t tagged_hole)
    {
        if (!config.is_ring())
            throw std::invalid_argument("zero-range mapping is implemented on rings");
        if (tagged_hole >= config.size())
            throw std::out_of_range("tagged hole outside the ring");
        if (config[tagged_hole] != 0)
            throw std::invalid_argument("tagged site is occupied");

        const auto n = static_cast<std::int64_t>(config.size());
        const auto tag = static_cast<std::int64_t>(tagged_hole);
        ZeroRangeState zr;
        for (std::int64_t d = 0; d < n; ++d)
            if (config.wrapped(tag + d) == 0)
                zr.hole_positions.push_back(tag + d);
        const std::size_t m = zr.hole_positions.size();
        zr.occupancy.resize(m);
        for (std::size_t j = 0; j < m; ++j)
        {
            const std::int64_t next = j + 1 < m ? zr.hole_positions[j + 1] : zr.hole_positions[0] + n;
            zr.occupancy[j] = next - zr.hole_positions[j] - 1;
        }
        return zr;
    }

    Configuration config_from_zero_range(const ZeroRangeState& zr, const Topology& topology)
    {
        if (!topology.is_ring())
            throw std::invalid_argument("zero-range mapping is implemented on rings");
        const std::size_t m = zr.occupancy.size();
        const auto n = static_cast<std::int64_t>(topology.length);
        if (m == 0 || zr.hole_positions.size() != m)
            throw std::invalid_argument("zero-range state needs one hole per label");
        std::int64_t total = static_cast<std::int64_t>(m);
        for (auto v : zr.occupancy)
        {
            if (v < 0)
                throw std::invalid_argument("negative zero-range occupancy");
            total += v;
        }
        if (total != n)
            throw std::invalid_argument("inconsistent totals: particles plus holes must equal ring length");
        if (zr.hole_positions[0] < 0 || zr.hole_positions[0] >= n)
            throw std::invalid_argument("tagged hole outside the ring");
        for (std::size_t j = 0; j + 1 < m; ++j)
            if (zr.hole_positions[j + 1] != zr.hole_positions[j] + zr.occupancy[j] + 1)
                throw std::invalid_argument("hole positions inconsistent with occupancies");

        Configuration c(topology);
        for (std::size_t i = 0; i < topology.length; ++i)
            c.set(i, 1);
        for (auto h : zr.hole_positions)
            c.set(static_cast<std::size_t>(h % n), 0);
        return c;
    }

    ZeroRangeMove zero_range_move_correspondence(const Configuration& config, std::size_t tagged_hole, std::size_t x)
    {
        const auto xi = static_cast<std::int64_t>(x);
        if (!config.is_ring() || x >= config.size() ||
            !(config.wrapped(xi - 1) && config[x] && !config.wrapped(xi + 1)))
            throw std::invalid_argument("site is not an active bond");
        const ZeroRangeState zr = zero_range_from_config(config, tagged_hole);
        const auto n = static_cast<std::int64_t>(config.size());
        const std::int64_t h0 = zr.hole_positions[0];
        const std::int64_t d = ((xi - h0) % n + n) % n;
        const std::size_t m = zr.occupancy.size();
        std::size_t gap = m - 1;
        for (std::size_t j = 0; j + 1 < m; ++j)
        {
            if (d < zr.hole_positions[j + 1] - h0)
            {
                gap = j;
                break;
            }
        }
        return {gap, (gap + 1) % m};
    }

    ZeroRangeState apply_zero_range_move(ZeroRangeState zr, const ZeroRangeMove& move, std::size_t ring_length)
    {
        const std::size_t m = zr.occupancy.size();
        if (move.from >= m || move.to != (move.from + 1) % m)
            throw std::invalid_argument("zero-range moves go to the next label");
        if (zr.occupancy[move.from] < 2)
            throw std::invalid_argument("a gap needs at least two particles to release one");
        --zr.occupancy[move.from];
        ++zr.occupancy[move.to];
        --zr.hole_positions[move.to];
        if (zr.hole_positions[0] < 0)
            for (auto& h : zr.hole_positions)
                h += static_cast<std::int64_t>(ring_length);
        return zr;
    }
}  // namespace ftasep
