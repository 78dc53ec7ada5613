#pragma once

#include "ftasep/lattice.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace ftasep
{
    /// Height function on a segment window.
    ///
    /// heights[j] is the height at lattice coordinate window_start + j. For a configuration
    /// on coordinates [o, o+L-1] the profile covers [o-1, o+L-1], and the coordinate 0 must
    /// lie inside it: h(0) = 2 * crossing_anchor.
    struct HeightProfile
    {
        std::int64_t window_start = 0;
        std::vector<std::int64_t> heights;
        std::int64_t crossing_anchor = 0;

        std::int64_t window_end() const noexcept
        {
            return window_start + static_cast<std::int64_t>(heights.size()) - 1;
        }
        std::int64_t at(std::int64_t x) const { return heights.at(static_cast<std::size_t>(x - window_start)); }

        friend bool operator==(const HeightProfile&, const HeightProfile&) = default;
    };

    HeightProfile height_from_config(const Configuration& config, std::int64_t crossing_anchor);
    std::pair<Configuration, std::int64_t> config_from_height(const HeightProfile& profile);
    bool has_unit_increments(const HeightProfile& profile);

    /// Sites where the height may grow by two: h(x-2) = h(x)+2 and h(x+1) = h(x)+1.
    /// Growth at x is the exclusion jump across the bond (x, x+1).
    std::vector<std::int64_t> height_jump_sites(const HeightProfile& profile);

    /// Raise the height at lattice coordinate x by two (the anchor follows when x = 0).
    HeightProfile grow_at(HeightProfile profile, std::int64_t x);

    /// Gap representation of a ring: occupancy[j] is the number of particles between hole j
    /// and hole j+1 (cyclically), holes listed from the tagged hole to the right.
    /// With the hole labels H_1..H_m this is xi(j+1) = H_{j+1} - H_j - 1.
    struct ZeroRangeState
    {
        std::vector<std::int64_t> occupancy;
        // Unwrapped hole coordinates: hole_positions[0] in [0, L) is the tagged hole and the
        // rest increase strictly below hole_positions[0] + L.
        std::vector<std::int64_t> hole_positions;

        std::string to_string() const;

        friend bool operator==(const ZeroRangeState&, const ZeroRangeState&) = default;
    };

    ZeroRangeState zero_range_from_config(const Configuration& config, std::size_t tagged_hole);
    Configuration config_from_zero_range(const ZeroRangeState& zr, const Topology& topology);

    struct ZeroRangeMove
    {
        std::size_t from = 0;  // gap losing one particle
        std::size_t to = 0;    // next gap, cyclically
    };

    /// The exclusion jump at active bond x seen in the gap representation.
    ZeroRangeMove zero_range_move_correspondence(const Configuration& config, std::size_t tagged_hole, std::size_t x);

    /// Apply a gap move; the hole closing the source gap moves one site left
    /// (the tagged hole wraps cyclically when it is that hole).
    ZeroRangeState apply_zero_range_move(ZeroRangeState zr, const ZeroRangeMove& move, std::size_t ring_length);
}  // namespace ftasep
