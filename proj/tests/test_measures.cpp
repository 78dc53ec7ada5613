#include "ftasep/measures.hpp"

#include <doctest.h>

#include <cmath>
#include <map>

using namespace ftasep;

namespace
{
    std::vector<std::uint8_t> word_of(std::uint64_t idx, std::size_t n)
    {
        std::vector<std::uint8_t> w(n);
        for (std::size_t i = 0; i < n; ++i)
            w[i] = static_cast<std::uint8_t>((idx >> (n - 1 - i)) & 1u);
        return w;
    }

    // Independent evaluation of the integral of L f: sum over words on a window padded by
    // `pad` sites on each side, applying every bond whose rate and swap fit in the window.
    double brute_generator(const CylinderProbability& mu, const CylinderFunction& f, std::size_t pad)
    {
        const std::size_t n = f.width + 2 * pad;
        double total = 0.0;
        for (std::uint64_t e = 0; e < (std::uint64_t{1} << n); ++e)
        {
            auto w = word_of(e, n);
            const double p = mu(w);
            if (p == 0.0)
                continue;
            auto fval = [&](const std::vector<std::uint8_t>& v) {
                std::uint64_t idx = 0;
                for (std::size_t i = 0; i < f.width; ++i)
                    idx = (idx << 1) | v[pad + i];
                return f.weights[idx];
            };
            const double base = fval(w);
            for (std::size_t x = 1; x + 1 < n; ++x)
                if (w[x - 1] && w[x] && !w[x + 1])
                {
                    auto v = w;
                    v[x] = 0;
                    v[x + 1] = 1;
                    total += p * (fval(v) - base);
                }
        }
        return total;
    }

    // Covariance by summing over every word on the joined window [f.start, g.end + x].
    double brute_covariance(double rho, const CylinderFunction& f, const CylinderFunction& g, std::int64_t x)
    {
        const auto mu = mu_measure(rho);
        const std::int64_t lo = f.start;
        const std::int64_t hi = g.end() + x;
        const auto n = static_cast<std::size_t>(hi - lo + 1);
        double ef = 0.0, eg = 0.0, efg = 0.0;
        for (std::uint64_t e = 0; e < (std::uint64_t{1} << n); ++e)
        {
            const auto w = word_of(e, n);
            const double p = mu(w);
            if (p == 0.0)
                continue;
            auto eval = [&](const CylinderFunction& h, std::int64_t off) {
                std::uint64_t idx = 0;
                for (std::size_t i = 0; i < h.width; ++i)
                    idx = (idx << 1) | w[static_cast<std::size_t>(h.start + off - lo) + i];
                return h.weights[idx];
            };
            const double a = eval(f, 0), b = eval(g, x);
            ef += p * a;
            eg += p * b;
            efg += p * a * b;
        }
        return efg - ef * eg;
    }
}

TEST_CASE("phi and the chain")
{
    CHECK(phi(0.75) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(phi(0.9) == doctest::Approx(8.0 / 9.0).epsilon(1e-15));
    CHECK(phi(0.5 + 1e-12) < 1e-11);
    CHECK_THROWS(phi(0.5));
    CHECK_THROWS(phi(1.0));
    for (double rho : {0.55, 0.6, 0.75, 0.9, 0.99})
    {
        const auto s = MarkovMeasureSpec::make(rho);
        CHECK(s.p[0][0] + s.p[0][1] == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(s.p[1][0] + s.p[1][1] == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(s.pi[0] * s.p[0][1] + s.pi[1] * s.p[1][1] == doctest::Approx(s.pi[1]).epsilon(1e-14));
        CHECK(1.0 / (1.0 - s.phi) + 1.0 == doctest::Approx(1.0 / (1.0 - rho)).epsilon(1e-13));
    }
}

TEST_CASE("mu cylinder probabilities")
{
    CHECK(mu_cylinder_prob(0.75, Pattern::parse("1")) == 0.75);
    CHECK(mu_cylinder_prob(0.75, Pattern::parse("00")) == 0.0);
    CHECK(std::abs(mu_cylinder_prob(0.75, Pattern::parse("010")) - 1.0 / 12.0) < 1e-15);
    CHECK_THROWS(mu_cylinder_prob(0.3, Pattern::parse("1")));
    // Kolmogorov consistency on both sides.
    for (double rho : {0.6, 0.75, 0.9})
        for (std::size_t n = 1; n <= 8; ++n)
            for (std::uint64_t i = 0; i < (std::uint64_t{1} << n); ++i)
            {
                const auto p = Pattern::from_index(i, n);
                const double v = mu_cylinder_prob(rho, p);
                auto right0 = p.word, right1 = p.word, left0 = p.word, left1 = p.word;
                right0.push_back(0);
                right1.push_back(1);
                left0.insert(left0.begin(), 0);
                left1.insert(left1.begin(), 1);
                REQUIRE(std::abs(v - mu_cylinder_prob(rho, Pattern(right0)) - mu_cylinder_prob(rho, Pattern(right1))) < 1e-15);
                REQUIRE(std::abs(v - mu_cylinder_prob(rho, Pattern(left0)) - mu_cylinder_prob(rho, Pattern(left1))) < 1e-15);
            }
}

TEST_CASE("generator expectation: closed-form values and invariance")
{
    const auto mu = mu_measure(0.75);
    const auto f00 = CylinderFunction::indicator(Pattern::parse("00"));
    CHECK(generator_expectation(mu, f00) == 0.0);
    for (double rho : {0.2, 0.5, 0.8})
    {
        const auto nu = product_measure(rho);
        CHECK(std::abs(generator_expectation(nu, f00) + rho * rho * (1 - rho) * (1 - rho)) < 1e-15);
        CHECK(generator_expectation(nu, f00) == doctest::Approx(-nu(Pattern::parse("1100").word)).epsilon(1e-14));
    }
    CHECK(generator_expectation(mu, CylinderFunction::constant(3.0, 3)) == 0.0);
    for (double rho : {0.6, 0.75, 0.9})
    {
        const auto m = mu_measure(rho);
        for (std::size_t w = 1; w <= 5; ++w)
            for (std::uint64_t i = 0; i < (std::uint64_t{1} << w); ++i)
            {
                const auto f = CylinderFunction::indicator(Pattern::from_index(i, w));
                const double v = generator_expectation(m, f);
                REQUIRE(std::abs(v) <= 1e-12);
                REQUIRE(std::abs(v - brute_generator(m, f, 3)) <= 1e-14);
            }
    }
    // The same routine finds non-zero values under a non-invariant measure.
    const auto nu = product_measure(0.6);
    for (std::uint64_t i = 0; i < 16; ++i)
    {
        const auto f = CylinderFunction::indicator(Pattern::from_index(i, 4));
        REQUIRE(std::abs(generator_expectation(nu, f) - brute_generator(nu, f, 3)) <= 1e-14);
    }
}

TEST_CASE("forbidden pattern probabilities")
{
    for (double v : forbidden_pattern_probs(mu_measure(0.8), 4))
        CHECK(v == 0.0);
    const auto nu = forbidden_pattern_probs(product_measure(0.5), 1);
    CHECK(nu[0] == 1.0 / 16.0);
    CHECK(nu[1] == 1.0 / 64.0);
}

TEST_CASE("correlation decay")
{
    const auto c = CylinderFunction::constant(1.0, 2);
    CHECK(std::abs(correlation_decay(0.75, c, c, 5)) < 1e-15);
    const auto f = CylinderFunction::indicator(Pattern::parse("10"));
    const auto g = CylinderFunction::indicator(Pattern::parse("011"));
    for (std::int64_t x = 3; x <= 15; ++x)
        REQUIRE(std::abs(correlation_decay(0.7, f, g, x) - brute_covariance(0.7, f, g, x)) < 1e-14);
    CHECK_THROWS(correlation_decay(0.7, f, g, 1));
    // Unit-bounded f, g at lag 30: geometric bound ((1-rho)/rho)^30.
    RngStream rng(1, 1);
    CylinderFunction a{0, 3, {}}, b{0, 2, {}};
    for (int i = 0; i < 8; ++i)
        a.weights.push_back(2.0 * rng.uniform() - 1.0);
    for (int i = 0; i < 4; ++i)
        b.weights.push_back(2.0 * rng.uniform() - 1.0);
    const double cov = correlation_decay(0.75, a, b, 30);
    CHECK(std::abs(cov) <= 1e-9);
    CHECK(std::abs(cov) <= 4.0 * std::pow(1.0 / 3.0, 30 - 3));
}

TEST_CASE("samplers")
{
    RngStream rng(3, 1);
    CHECK(bernoulli_sample(0.0, Topology::ring(50), rng).particle_count() == 0);
    CHECK(bernoulli_sample(1.0, Topology::ring(50), rng).particle_count() == 50);
    const std::size_t n = 100000;
    const double d = static_cast<double>(bernoulli_sample(0.5, Topology::ring(n), rng).particle_count()) / n;
    CHECK(std::abs(d - 0.5) <= 3.0 * std::sqrt(0.25 / n));

    const auto m = mu_sample(0.75, n, rng);
    CHECK(is_no_adjacent_zeros(Configuration::segment(m.to_string())));
    CHECK(count_pattern(m, Pattern::parse("00")) == 0);
    // Density: runs of ones have mean 1/(1-phi) = 3, so density = 3/4; chain variance
    // gives sd about 0.0035 / sqrt(n/1000).
    const double md = static_cast<double>(m.particle_count()) / n;
    CHECK(std::abs(md - 0.75) <= 0.01);

    // Gap histogram (runs of ones between holes) against Geometric(1 - phi) on {1, 2, ...}.
    std::map<std::size_t, std::size_t> hist;
    std::size_t run = 0, runs = 0;
    bool started = false;
    for (std::size_t i = 0; i < n; ++i)
    {
        if (m[i])
        {
            ++run;
            continue;
        }
        if (started && run > 0)
        {
            ++hist[std::min<std::size_t>(run, 8)];
            ++runs;
        }
        started = true;
        run = 0;
    }
    const double ph = 2.0 / 3.0;
    double chi2 = 0.0;
    for (std::size_t r = 1; r <= 8; ++r)
    {
        const double p = r < 8 ? std::pow(ph, static_cast<double>(r - 1)) * (1 - ph) : std::pow(ph, 7.0);
        const double e = p * static_cast<double>(runs);
        chi2 += (static_cast<double>(hist[r]) - e) * (static_cast<double>(hist[r]) - e) / e;
    }
    CHECK(chi2 < 24.32);  // chi-square 7 dof, p = 0.001

    const auto u = uniform_sector_sample(30, 11, rng);
    CHECK(u.particle_count() == 11);
    CHECK(u.is_ring());
}
