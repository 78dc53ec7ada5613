#pragma once

#include <array>
#include <cstdint>

namespace ftasep
{
    /// Philox4x32-10 block function (Salmon et al., Random123).
    std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter, std::array<std::uint32_t, 2> key) noexcept;

    /// SplitMix64 finalizer; used to derive substream ids from (id, tag) pairs.
    constexpr std::uint64_t mix64(std::uint64_t z) noexcept
    {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Counter-based random stream.
    ///
    /// The key is the 64-bit root seed; the 128-bit counter is (block, stream_id), so the
    /// output is a pure function of (root_seed, stream_id) and streams with different ids
    /// never share a counter value.
    class RngStream
    {
    public:
        RngStream(std::uint64_t root_seed, std::uint64_t stream_id) noexcept : seed_(root_seed), stream_(stream_id) {}

        std::uint64_t root_seed() const noexcept { return seed_; }
        std::uint64_t stream_id() const noexcept { return stream_; }
        std::uint64_t blocks_used() const noexcept { return block_; }

        // Independent stream for a (stream, tag) pair; deterministic.
        RngStream substream(std::uint64_t tag) const noexcept
        {
            return RngStream(seed_, mix64(stream_ ^ mix64(tag + 0x632be59bd9b4e019ULL)));
        }

        std::uint32_t next_u32() noexcept
        {
            if (lane_ == 4)
            {
                buffer_ = block(block_++);
                lane_ = 0;
            }
            return buffer_[lane_++];
        }

        std::uint64_t next_u64() noexcept
        {
            const std::uint64_t hi = next_u32();
            return (hi << 32) | next_u32();
        }

        // Uniform on [0, 1) with 53 random bits.
        double uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

        // Uniform on (0, 1].
        double uniform_pos() noexcept { return 1.0 - uniform(); }

        double exponential(double rate) noexcept;

        // Uniform integer in [0, n), n >= 1 (Lemire's method with rejection).
        std::uint64_t below(std::uint64_t n) noexcept;

        // Random access: the i-th uniform of this stream's random-access lane.
        // Does not disturb the sequential state.
        double uniform_at(std::uint64_t index) const noexcept;

    private:
        std::array<std::uint32_t, 4> block(std::uint64_t b) const noexcept;

        std::uint64_t seed_;
        std::uint64_t stream_;
        std::uint64_t block_ = 0;
        std::array<std::uint32_t, 4> buffer_{};
        unsigned lane_ = 4;
    };
}  // namespace ftasep
