#include "ftasep/dynamics.hpp"
#include "ftasep/limits.hpp"
#include "ftasep/ring_exact.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace ftasep;

TEST_CASE("ballot probability")
{
    CHECK(ballot_prob(1e-9) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(ballot_prob(0.5 - 1e-12) < 1e-10);
    CHECK(std::abs(ballot_prob(0.3) - 0.4 / 0.49) < 1e-15);
    CHECK_THROWS(ballot_prob(0.5));
    CHECK_THROWS(ballot_prob(0.0));
    for (double rho : {0.1, 0.2, 0.3, 0.4})
    {
        double tail = 0.0;
        const double enumerated = oracle::ballot_spatial(rho, 60, tail);
        CHECK(tail < 1e-10);
        CHECK(std::abs(ballot_prob(rho) - enumerated) <= 1e-9);
        CHECK(std::abs(ballot_prob(rho) - (1.0 - std::pow(rho / (1.0 - rho), 2))) < 1e-15);
    }
}

TEST_CASE("limit probabilities: worked values")
{
    CHECK(std::abs(limit_prob(0.3, Pattern::parse("00")) - 0.4) < 1e-15);
    CHECK(limit_prob(0.3, Pattern::parse("11")) == 0.0);
    CHECK(limit_prob(0.1, Pattern::parse("0110")) == 0.0);
    CHECK(std::abs(limit_prob(0.3, Pattern::parse("10")) - 0.3) < 1e-15);
    CHECK(std::abs(limit_prob(0.3, Pattern::parse("101")) - 0.18) < 1e-15);
    CHECK(std::abs(limit_prob(0.3, Pattern::parse("10")) - limit_prob(0.3, Pattern::parse("100")) -
                   limit_prob(0.3, Pattern::parse("101"))) < 1e-15);
    for (double rho : {0.05, 0.2, 0.45})
        CHECK(limit_prob(rho, Pattern::parse("1")) == rho);
    CHECK_THROWS(limit_prob(0.6, Pattern::parse("1")));
    CHECK_THROWS(limit_prob(0.3, Pattern{}));
}

TEST_CASE("case (a) equals the ballot chain identity")
{
    for (double rho : {0.1, 0.2, 0.3, 0.4})
        for (const char* tail : {"", "0", "1", "01", "10", "0101", "1001"})
        {
            const std::string text = std::string("00") + tail;
            double prod = 1.0;
            for (const char* c = tail; *c; ++c)
                prod *= *c == '1' ? rho : 1.0 - rho;
            const double chain = (1.0 - rho) * (1.0 - rho) * ballot_prob(rho) * prod;
            CHECK(std::abs(limit_prob(rho, Pattern::parse(text)) - chain) < 1e-15);
        }
}

TEST_CASE("limit table marginals and consistency")
{
    const auto t = limit_table(0.3, 3);
    CHECK(std::abs(t.get(Pattern::parse("00")) - 0.4) < 1e-15);
    CHECK(std::abs(t.get(Pattern::parse("01")) - 0.3) < 1e-15);
    CHECK(std::abs(t.get(Pattern::parse("10")) - 0.3) < 1e-15);
    CHECK(t.get(Pattern::parse("11")) == 0.0);
    double s3 = 0.0;
    for (double v : t.by_length[3])
        s3 += v;
    CHECK(std::abs(s3 - 1.0) < 1e-12);
    CHECK(std::abs(t.get(Pattern::parse("00")) + t.get(Pattern::parse("10")) - t.get(Pattern::parse("0"))) < 1e-15);
    CHECK(t.to_csv().rfind("pattern,probability\n0,", 0) == 0);

    for (int i = 1; i <= 9; ++i)
    {
        const double rho = 0.05 * i;
        const auto table = limit_table(rho, 16);
        const auto r = consistency_check(table);
        REQUIRE(r.min_value >= 0.0);
        REQUIRE(r.max_value <= 1.0);
        REQUIRE(r.max_eleven == 0.0);
        // Through length 3 the recursion is additive in both directions.
        REQUIRE(consistency_check(limit_table(rho, 3)).max_violation() <= 1e-12);
        // From length 4 it is not: case (a) keeps P(001) but drops the "0011" half of it.
        const double gap = table.get(Pattern::parse("001")) - table.get(Pattern::parse("0010")) -
                           table.get(Pattern::parse("0011"));
        REQUIRE(std::abs(gap - (1 - 2 * rho) * rho * rho) <= 1e-15);
        REQUIRE(r.max_violation() >= gap - 1e-15);
        LimitCalculator calc(rho);
        for (std::uint64_t j = 0; j < table.by_length[12].size(); j += 37)
            REQUIRE(table.by_length[12][j] == calc.prob(Pattern::from_index(j, 12)));
    }
    CHECK_THROWS(limit_table(0.3, 25));
}

TEST_CASE("length 24 patterns stay in range")
{
    RngStream rng(6, 6);
    for (double rho : {0.1, 0.25, 0.4})
    {
        LimitCalculator calc(rho);
        for (int i = 0; i < 2000; ++i)
        {
            const auto p = Pattern::from_index(rng.next_u64() & ((1u << 24) - 1), 24);
            const double v = calc.prob(p);
            REQUIRE(v >= 0.0);
            REQUIRE(v <= 1.0);
        }
    }
}

TEST_CASE("consistency check detects a perturbation")
{
    auto t = limit_table(0.3, 3);
    const auto p = Pattern::parse("010");
    t.set(p, t.get(p) + 1e-6);
    const auto r = consistency_check(t);
    CHECK(r.max_violation() == doctest::Approx(1e-6).epsilon(1e-6));
}

TEST_CASE("critical absorption")
{
    RngStream rng(1, 1);
    SimState s(Configuration::ring("1100"));
    const auto rec = run_until(s, {}, rng);
    CHECK(rec.events == 1);
    CHECK(rec.final_config == alternating_config(4, true));
    CHECK_THROWS(critical_absorption_stats(9, 10, rng));

    const auto stats = critical_absorption_stats(12, 300, RngStream(4, 0), 2);
    CHECK(stats.non_alternating == 0);
    CHECK(stats.monotone_violations == 0);
    CHECK(stats.pair_decay_csv().rfind("t,f11,f10,f01,f00\n", 0) == 0);
    CHECK(stats.grid.size() == 62);
    const auto decay = stats.pair_decay();
    for (std::size_t g = 1; g < decay.size(); ++g)
        REQUIRE(decay[g][0] <= decay[g - 1][0]);
    CHECK(decay.back()[0] == 0.0);
    // Same payload with one worker.
    const auto again = critical_absorption_stats(12, 300, RngStream(4, 0), 1);
    CHECK(again.absorption_csv() == stats.absorption_csv());
    CHECK(again.pair_decay_csv() == stats.pair_decay_csv());
}

TEST_CASE("parity split is symmetric under the one-site shift")
{
    for (std::size_t n : {6, 8, 10, 12})
    {
        const auto g = ring_generator_build(n, n / 2);
        const auto a = stationary_and_classes(g);
        const auto even = alternating_config(n, true).low_bits();
        const auto odd = alternating_config(n, false).low_bits();
        std::size_t ce = 0, co = 0;
        for (std::size_t c = 0; c < a.recurrent.size(); ++c)
        {
            const auto b = g.states[a.recurrent[c].states[0]];
            if (b == even)
                ce = c;
            if (b == odd)
                co = c;
        }
        REQUIRE(a.recurrent.size() == 2);
        for (std::size_t i = 0; i < g.size(); ++i)
        {
            const auto shifted = shift(g.state(i), 1).low_bits();
            const auto j = static_cast<std::size_t>(g.index_of[shifted]);
            REQUIRE(std::abs(a.hitting[ce][i] - a.hitting[co][j]) < 1e-12);
        }
        CHECK(std::abs(a.absorption[ce] - 0.5) < 1e-12);
    }
}

TEST_CASE("subcritical comparison on a small ring")
{
    const auto rep = subcritical_empirical_compare(0.3, 200, 40, RngStream(7, 0), 3, 2);
    CHECK(rep.particles == 60);
    CHECK(rep.unabsorbed == 0);
    REQUIRE(rep.patterns.size() == 14);
    for (const auto& p : rep.patterns)
    {
        if (p.pattern.contains(Pattern::parse("11")))
            CHECK(p.observed == 0.0);
        CHECK(p.pooled.lower <= p.pooled.point);
        CHECK(p.pooled.upper >= p.pooled.point);
    }
    CHECK(rep.patterns[2].pattern.to_string() == "00");
    CHECK(std::abs(rep.patterns[2].observed - 0.4) < 1e-12);
    CHECK(rep.patterns[2].z == 0.0);
}
