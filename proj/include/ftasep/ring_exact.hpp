#pragma once

#include "ftasep/lattice.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ftasep
{
    /// Generator of the exclusion dynamics restricted to the ring sector (L, k).
    struct RingGeneratorMatrix
    {
        struct Entry
        {
            std::uint32_t to = 0;
            std::uint32_t rate = 0;
        };

        std::size_t length = 0;
        std::size_t particles = 0;
        std::vector<std::uint64_t> states;            // occupancy bits, bit i = site i
        std::vector<std::int32_t> index_of;           // 2^L lookup, -1 outside the sector
        std::vector<std::vector<Entry>> transitions;  // off-diagonal entries per row
        std::vector<std::int64_t> diagonal;

        std::size_t size() const noexcept { return states.size(); }
        Configuration state(std::size_t i) const { return Configuration::ring_from_bits(states[i], length); }
    };

    inline constexpr std::size_t kMaxExactRing = 14;

    RingGeneratorMatrix ring_generator_build(std::size_t length, std::size_t particles);

    struct RecurrentClass
    {
        std::vector<std::uint32_t> states;  // indices into the generator, ascending
        std::vector<double> stationary;     // aligned with states
        double residual = 0.0;              // max |pi Q| over the class
    };

    struct RingAnalysis
    {
        std::vector<std::vector<std::uint32_t>> classes;  // every communicating class
        std::vector<RecurrentClass> recurrent;
        // hitting[c][i]: probability that the chain started at state i ends in recurrent class c.
        std::vector<std::vector<double>> hitting;
        std::vector<double> absorption;  // per recurrent class, from the initial distribution
        double max_residual = 0.0;
    };

    /// Communicating classes (strongly connected components of the transition digraph),
    /// the stationary law of each closed class, and absorption probabilities from
    /// `initial` (uniform over the sector when omitted). Throws std::runtime_error when a
    /// linear solve leaves a residual above 1e-10.
    RingAnalysis stationary_and_classes(const RingGeneratorMatrix& gen,
                                        const std::optional<std::vector<double>>& initial = std::nullopt);

    // Total variation distance between a class's stationary law and the uniform law on it.
    double tv_from_uniform(const RecurrentClass& cls);

    // Ring arrangements of L sites, k particles with no two adjacent holes / particles.
    std::uint64_t maximal_island_count(std::size_t length, std::size_t particles);
    std::uint64_t no_adjacent_ones_count(std::size_t length, std::size_t particles);

    std::string stationary_csv(const RingGeneratorMatrix& gen, const RingAnalysis& analysis);
}  // namespace ftasep
