#include "ftasep/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

using namespace ftasep;

TEST_CASE("philox4x32-10 known answers")
{
    using A4 = std::array<std::uint32_t, 4>;
    CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) == A4{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
          A4{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
          A4{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("streams are pure functions of seed and id")
{
    RngStream a(42, 7), b(42, 7), c(42, 8), d(43, 7);
    std::vector<std::uint64_t> va, vb, vc, vd;
    for (int i = 0; i < 100; ++i)
    {
        va.push_back(a.next_u64());
        vb.push_back(b.next_u64());
        vc.push_back(c.next_u64());
        vd.push_back(d.next_u64());
    }
    CHECK(va == vb);
    CHECK(va != vc);
    CHECK(va != vd);
    CHECK(RngStream(1, 2).substream(3).stream_id() == RngStream(1, 2).substream(3).stream_id());
    CHECK(RngStream(1, 2).substream(3).stream_id() != RngStream(1, 2).substream(4).stream_id());
}

TEST_CASE("random access lane does not disturb the sequence")
{
    RngStream a(5, 1), b(5, 1);
    const double u = a.uniform_at(12345);
    CHECK(u == b.uniform_at(12345));
    CHECK(a.next_u64() == b.next_u64());
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
}

TEST_CASE("uniform and exponential moments")
{
    RngStream r(2024, 0);
    const int n = 200000;
    double s = 0.0, e = 0.0;
    for (int i = 0; i < n; ++i)
    {
        const double u = r.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        s += u;
        e += r.exponential(5.0);
    }
    // 5 standard errors.
    CHECK(std::abs(s / n - 0.5) < 5.0 * std::sqrt(1.0 / 12.0 / n));
    CHECK(std::abs(e / n - 0.2) < 5.0 * 0.2 / std::sqrt(n));
}

TEST_CASE("below is uniform on small ranges")
{
    RngStream r(9, 9);
    std::vector<int> counts(7, 0);
    const int n = 70000;
    for (int i = 0; i < n; ++i)
    {
        const auto v = r.below(7);
        REQUIRE(v < 7);
        ++counts[v];
    }
    double chi2 = 0.0;
    for (int c : counts)
        chi2 += (c - n / 7.0) * (c - n / 7.0) / (n / 7.0);
    CHECK(chi2 < 22.46);  // chi-square 6 dof, p = 0.001
}
