#include "ftasep/rng.hpp"

#include <cmath>

namespace ftasep
{
    namespace
    {
        constexpr std::uint32_t kMul0 = 0xD2511F53u;
        constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
        constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
        constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

        inline void philox_round(std::array<std::uint32_t, 4>& c, const std::array<std::uint32_t, 2>& k) noexcept
        {
            const std::uint64_t p0 = std::uint64_t{kMul0} * c[0];
            const std::uint64_t p1 = std::uint64_t{kMul1} * c[2];
            const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const auto lo0 = static_cast<std::uint32_t>(p0);
            const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
            const auto lo1 = static_cast<std::uint32_t>(p1);
            c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
        }

        constexpr std::uint64_t kRandomAccessLane = std::uint64_t{1} << 63;
    }  // namespace

    std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter, std::array<std::uint32_t, 2> key) noexcept
    {
        for (int r = 0; r < 10; ++r)
        {
            if (r > 0)
            {
                key[0] += kWeyl0;
                key[1] += kWeyl1;
            }
            philox_round(counter, key);
        }
        return counter;
    }

    std::array<std::uint32_t, 4> RngStream::block(std::uint64_t b) const noexcept
    {
        return philox4x32({static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32),
                           static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)},
                          {static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)});
    }

    double RngStream::exponential(double rate) noexcept { return -std::log(uniform_pos()) / rate; }

    std::uint64_t RngStream::below(std::uint64_t n) noexcept
    {
        std::uint64_t x = next_u64();
        unsigned __int128 m = static_cast<unsigned __int128>(x) * n;
        auto low = static_cast<std::uint64_t>(m);
        if (low < n)
        {
            const std::uint64_t threshold = (0 - n) % n;
            while (low < threshold)
            {
                x = next_u64();
                m = static_cast<unsigned __int128>(x) * n;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    double RngStream::uniform_at(std::uint64_t index) const noexcept
    {
        const auto out = block(kRandomAccessLane | index);
        const std::uint64_t bits = (std::uint64_t{out[0]} << 32) | out[1];
        return static_cast<double>(bits >> 11) * 0x1.0p-53;
    }
}  // namespace ftasep
