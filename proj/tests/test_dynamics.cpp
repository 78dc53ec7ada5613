#include "ftasep/dynamics.hpp"
#include "ftasep/measures.hpp"

#include "oracles.hpp"

#include <stdexcept>
#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace ftasep;

namespace
{
    std::vector<std::size_t> sorted_active(const SimState& s)
    {
        return s.active().sorted();
    }
}

TEST_CASE("active bonds on rings")
{
    CHECK(active_bonds(Configuration::ring("1110")) == std::vector<std::size_t>{2});
    CHECK(active_bonds(Configuration::ring("0101")).empty());
    // Only bond 1 carries the pattern 110 here (site 2 is empty, so bond 3 is not facilitated).
    CHECK(active_bonds(Configuration::ring("110100")) == std::vector<std::size_t>{1});
    CHECK(active_bonds(Configuration::ring("110100")) == oracle::ring_active("110100"));
}

TEST_CASE("apply_jump swaps and updates the active set")
{
    SimState s(Configuration::ring("1110"));
    s.apply_jump(2);
    CHECK(s.config().to_string() == "1101");
    CHECK(s.event_count() == 1);

    SimState t(Configuration::ring("110100"));
    const SimState u = apply_jump(t, 1);
    CHECK(u.config().to_string() == "101100");
    CHECK(sorted_active(u) == std::vector<std::size_t>{3});
    CHECK(sorted_active(u) == u.recompute_active());
    CHECK_THROWS_AS(t.apply_jump(3), std::invalid_argument);
}

TEST_CASE("incremental active set matches recomputation on random states")
{
    RngStream rng(11, 0);
    for (int trial = 0; trial < 10000; ++trial)
    {
        const std::size_t n = 3 + rng.below(30);
        const double rho = rng.uniform();
        SimState s(bernoulli_sample(rho, Topology::ring(n), rng));
        if (s.absorbed())
            continue;
        const std::string before = s.config().to_string();
        const std::size_t x = s.active().at(rng.below(s.active().size()));
        s.apply_jump(x);
        REQUIRE(s.config().to_string() == oracle::ring_jump(before, x));
        REQUIRE(sorted_active(s) == oracle::ring_active(s.config().to_string()));
        REQUIRE(s.config().particle_count() == std::count(before.begin(), before.end(), '1'));
    }
}

TEST_CASE("segment boundary: left edge not facilitated, right edge is an exit")
{
    SimState s(Configuration::segment("1101"));
    // Interior bond 1 (sites 0,1 occupied, 2 empty) and the exit at site 3 need site 2 occupied.
    CHECK(sorted_active(s) == std::vector<std::size_t>{1});
    SimState e(Configuration::segment("0011"));
    CHECK(sorted_active(e) == std::vector<std::size_t>{3});
    e.apply_jump(3);
    CHECK(e.config().to_string() == "0010");
    CHECK(e.exits() == 1);
    CHECK(e.absorbed());
    SimState l(Configuration::segment("1000"));
    CHECK(l.absorbed());
}

TEST_CASE("crossing counter counts jumps across bond (0,1)")
{
    SimState s(Configuration::segment("11100", -2));  // coordinates -2..2
    CHECK(sorted_active(s) == std::vector<std::size_t>{2});  // coordinate 0
    s.apply_jump(2);
    CHECK(s.crossings() == 1);
    CHECK(s.config().to_string() == "11010");
}

TEST_CASE("step with a single active bond")
{
    RngStream rng(3, 3);
    double total = 0.0;
    for (int i = 0; i < 2000; ++i)
    {
        SimState s(Configuration::ring("11000"));
        const auto x = s.step(rng);
        REQUIRE(x.has_value());
        REQUIRE(*x == 1);
        total += s.time();
    }
    CHECK(std::abs(total / 2000 - 1.0) < 5.0 / std::sqrt(2000.0));
}

TEST_CASE("holding time at constant activity 5")
{
    // Five isolated 110 blocks on a ring: each jump leaves 101 followed by a hole, so
    // rebuild the state after every step to keep |A| = 5.
    RngStream rng(77, 1);
    const std::string block = "11000";
    std::string text;
    for (int i = 0; i < 5; ++i)
        text += block;
    const auto start = Configuration::ring(text);
    double total = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i)
    {
        SimState s(start);
        REQUIRE(s.active().size() == 5);
        s.step(rng);
        total += s.time();
    }
    CHECK(std::abs(total / n - 0.2) < 3.0 * 0.2 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("run_until: absorption, frozen start, non-absorbing sector")
{
    RngStream rng(1, 1);
    SimState a(Configuration::ring("1100"));
    const auto ra = run_until(a, {}, rng);
    CHECK(ra.absorbed);
    CHECK(ra.events == 1);
    CHECK(ra.final_config.to_string() == "1010");

    SimState b(alternating_config(6, false));
    const auto rb = run_until(b, {10.0, 100}, rng);
    CHECK(rb.events == 0);
    CHECK(rb.absorbed);

    SimState c(Configuration::ring("111100"));
    const auto rc = run_until(c, {std::numeric_limits<double>::infinity(), 20000}, rng);
    CHECK_FALSE(rc.absorbed);
    CHECK(rc.events == 20000);
}

TEST_CASE("trajectory samples are strictly increasing")
{
    RngStream rng(5, 5);
    SimState s(bernoulli_sample(0.7, Topology::ring(100), rng));
    const auto rec = run_until(s, {50.0}, rng, SamplingPlan{0.5, 0, 10});
    REQUIRE(rec.samples.size() > 10);
    for (std::size_t i = 1; i < rec.samples.size(); ++i)
        REQUIRE(rec.samples[i].time > rec.samples[i - 1].time);
    CHECK(rec.to_csv().rfind("time,n11,n10,n01,n00,n_active,N_t\n", 0) == 0);
    CHECK_FALSE(rec.snapshots.empty());

    SimState t(bernoulli_sample(0.7, Topology::ring(50), rng));
    const auto rec2 = run_until(t, {std::numeric_limits<double>::infinity(), 500}, rng, SamplingPlan{0.0, 7, 0});
    for (std::size_t i = 1; i < rec2.samples.size(); ++i)
        REQUIRE(rec2.samples[i].time > rec2.samples[i - 1].time);
}

TEST_CASE("replay is bit-identical")
{
    auto run = [] {
        RngStream init(99, 4), dyn(99, 5);
        SimState s(bernoulli_sample(0.6, Topology::ring(200), init));
        return run_until(s, {20.0}, dyn, SamplingPlan{0.25, 0, 0}).to_csv();
    };
    CHECK(run() == run());
}

TEST_CASE("trajectory invariants: conservation, coherence, monotone pairs")
{
    RngStream rng(2, 8);
    for (int trial = 0; trial < 20; ++trial)
    {
        SimState s(uniform_sector_sample(60, 30, rng));
        const std::size_t k = s.config().particle_count();
        auto last = pair_counts(s.config());
        std::uint64_t events = 0;
        run_until(s, {}, rng, {}, [&](const SimState& st, std::size_t) {
            ++events;
            const auto pc = pair_counts(st.config());
            REQUIRE(st.config().particle_count() == k);
            REQUIRE(pc.n00 <= last.n00);
            REQUIRE(pc.n11 == pc.n00);
            if ((events & (events - 1)) == 0)
                REQUIRE(st.active().sorted() == st.recompute_active());
            last = pc;
        });
        CHECK(s.absorbed());
    }
}

TEST_CASE("records persist and stay empty")
{
    RngStream rng(31, 0);
    for (int trial = 0; trial < 50; ++trial)
    {
        Configuration c = bernoulli_sample(0.3, Topology::segment(81), rng);
        c = shift(c, 40);  // coordinates -40..40
        SimState s(c);
        const auto initial_records = record_sites(height_from_config(c, 0));
        const auto rec = run_until(s, {30.0}, rng, SamplingPlan{1.0, 0, 1});
        for (const auto& [t, snap] : rec.snapshots)
        {
            const auto cfg = Configuration::segment(snap, -40);
            const auto records = record_sites(height_from_config(cfg, 0));
            for (auto x : initial_records)
            {
                if (x < -40)
                    continue;  // the height point left of the window has no site
                REQUIRE(std::find(records.begin(), records.end(), x) != records.end());
                REQUIRE(*cfg.at_coordinate(x) == 0);
            }
        }
    }
}

TEST_CASE("record sites")
{
    HeightProfile up{0, {0, 1, 2, 3}, 0};
    CHECK(record_sites(up) == std::vector<std::int64_t>{0, 1, 2, 3});
    const auto ones = height_from_config(Configuration::segment("1111", 1), 0);
    CHECK(record_sites(ones) == std::vector<std::int64_t>{0});
    // 0 1 1 0 0 on sites 1..5: heights 0,1,0,-1,0,1 on 0..5.
    const auto p = height_from_config(Configuration::segment("01100", 1), 0);
    CHECK(p.heights == std::vector<std::int64_t>{0, 1, 0, -1, 0, 1});
    CHECK(record_sites(p) == std::vector<std::int64_t>{0, 1, 5});
}

TEST_CASE("height growth probe")
{
    RngStream rng(4, 4);
    SimState frozen(Configuration::segment("0101010", -3));
    const auto h = height_growth_probe(frozen, rng, {1.0, 2.0, 5.0});
    CHECK(h == std::vector<std::int64_t>{0, 0, 0});
}
