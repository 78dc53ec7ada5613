#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ftasep
{
    enum class TopologyKind : std::uint8_t
    {
        Ring,
        Segment,
    };

    struct Topology
    {
        TopologyKind kind = TopologyKind::Ring;
        std::size_t length = 0;

        static Topology ring(std::size_t length) { return {TopologyKind::Ring, length}; }
        static Topology segment(std::size_t length) { return {TopologyKind::Segment, length}; }

        bool is_ring() const noexcept { return kind == TopologyKind::Ring; }

        friend bool operator==(const Topology&, const Topology&) = default;
    };

    // A finite 0/1 word. Index 0 is the leftmost site.
    struct Pattern
    {
        std::vector<std::uint8_t> word;

        Pattern() = default;
        explicit Pattern(std::vector<std::uint8_t> w);
        static Pattern parse(std::string_view text);

        std::size_t size() const noexcept { return word.size(); }
        std::uint8_t operator[](std::size_t i) const noexcept { return word[i]; }
        std::string to_string() const;

        // Most significant bit is word[0], so numeric order is lexicographic order.
        std::uint64_t index() const;
        static Pattern from_index(std::uint64_t index, std::size_t length);

        bool contains(const Pattern& needle) const;

        friend bool operator==(const Pattern&, const Pattern&) = default;
    };

    /// Occupancy of a ring or of a segment window embedded in Z.
    ///
    /// Sites are addressed by array index 0..L-1; the lattice coordinate of index i
    /// is origin_offset() + i. Storage is bit-packed in 64-site blocks.
    class Configuration
    {
    public:
        Configuration() = default;
        explicit Configuration(Topology topology, std::int64_t origin_offset = 0);

        static Configuration parse(std::string_view text, TopologyKind kind, std::int64_t origin_offset = 0);
        static Configuration ring(std::string_view text) { return parse(text, TopologyKind::Ring); }
        static Configuration segment(std::string_view text, std::int64_t origin_offset = 0)
        {
            return parse(text, TopologyKind::Segment, origin_offset);
        }
        static Configuration ring_from_bits(std::uint64_t bits, std::size_t length);

        const Topology& topology() const noexcept { return topology_; }
        std::size_t size() const noexcept { return topology_.length; }
        bool is_ring() const noexcept { return topology_.is_ring(); }
        std::int64_t origin_offset() const noexcept { return origin_; }

        int operator[](std::size_t i) const noexcept
        {
            return static_cast<int>((bits_[i >> 6] >> (i & 63)) & 1u);
        }
        int get(std::size_t i) const noexcept { return (*this)[i]; }
        // Index taken modulo L (ring arithmetic; also used by pattern scans).
        int wrapped(std::int64_t i) const noexcept;
        // Occupancy at a lattice coordinate; nullopt outside a segment window.
        std::optional<int> at_coordinate(std::int64_t x) const noexcept;

        void set(std::size_t i, int value) noexcept
        {
            const std::uint64_t mask = std::uint64_t{1} << (i & 63);
            if (value)
                bits_[i >> 6] |= mask;
            else
                bits_[i >> 6] &= ~mask;
        }

        std::size_t particle_count() const noexcept;
        std::string to_string() const;
        // Only valid for L <= 64.
        std::uint64_t low_bits() const;

        friend bool operator==(const Configuration& a, const Configuration& b) noexcept
        {
            return a.topology_ == b.topology_ && a.origin_ == b.origin_ && a.bits_ == b.bits_;
        }

    private:
        Topology topology_{};
        std::int64_t origin_ = 0;
        std::vector<std::uint64_t> bits_;
    };

    struct PairCounts
    {
        std::size_t n11 = 0;
        std::size_t n10 = 0;
        std::size_t n01 = 0;
        std::size_t n00 = 0;

        friend bool operator==(const PairCounts&, const PairCounts&) = default;
    };

    // Evaluated range of centers for predicates that need both neighbors.
    struct FrozenCheck
    {
        bool frozen = true;
        std::size_t first_center = 0;
        std::size_t last_center = 0;  // inclusive; empty when first_center > last_center
    };

    Configuration shift(const Configuration& config, std::int64_t x);
    std::size_t count_pattern(const Configuration& config, const Pattern& pattern);
    PairCounts pair_counts(const Configuration& config);
    // Adjacent pairs fully inside a segment (L-1 pairs); wraps on a ring.
    PairCounts pair_counts_any(const Configuration& config);
    Configuration alternating_config(std::size_t length, bool even);
    bool is_frozen(const Configuration& config);
    FrozenCheck frozen_check(const Configuration& config);
    bool is_no_adjacent_zeros(const Configuration& config);
    // Least lattice coordinate m > 0 with eta(m-1) = eta(m) = 0 inside the window.
    std::optional<std::int64_t> first_double_zero(const Configuration& config);
}  // namespace ftasep
