#include "ftasep/measures.hpp"

#include <array>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace ftasep
{
    namespace
    {
        void require_supercritical(double rho)
        {
            if (!(rho > 0.5 && rho < 1.0))
                throw std::domain_error("rho must lie in (1/2, 1)");
        }

        std::uint64_t word_index(std::span<const std::uint8_t> w)
        {
            std::uint64_t idx = 0;
            for (auto v : w)
                idx = (idx << 1) | v;
            return idx;
        }

        void fill_word(std::uint64_t index, std::span<std::uint8_t> w)
        {
            const std::size_t n = w.size();
            for (std::size_t i = 0; i < n; ++i)
                w[n - 1 - i] = static_cast<std::uint8_t>((index >> i) & 1u);
        }

        using Mat2 = std::array<std::array<double, 2>, 2>;

        Mat2 mul(const Mat2& a, const Mat2& b)
        {
            Mat2 c{};
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j)
                    c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            return c;
        }

        Mat2 power(Mat2 m, std::uint64_t e)
        {
            Mat2 r{{{1.0, 0.0}, {0.0, 1.0}}};
            while (e)
            {
                if (e & 1u)
                    r = mul(r, m);
                m = mul(m, m);
                e >>= 1;
            }
            return r;
        }
    }  // namespace

    double phi(double rho)
    {
        require_supercritical(rho);
        return (2.0 * rho - 1.0) / rho;
    }

    MarkovMeasureSpec MarkovMeasureSpec::make(double rho)
    {
        MarkovMeasureSpec s;
        s.rho = rho;
        s.phi = ftasep::phi(rho);
        s.p[0][0] = 0.0;
        s.p[0][1] = 1.0;
        s.p[1][1] = s.phi;
        s.p[1][0] = (1.0 - rho) / rho;
        s.pi[1] = rho;
        s.pi[0] = 1.0 - rho;
        return s;
    }

    double mu_cylinder_prob(double rho, const Pattern& pattern)
    {
        if (pattern.size() == 0)
            throw std::invalid_argument("empty pattern");
        return mu_measure(rho)(pattern.word);
    }

    CylinderProbability mu_measure(double rho)
    {
        const MarkovMeasureSpec s = MarkovMeasureSpec::make(rho);
        return [s](std::span<const std::uint8_t> w) {
            if (w.empty())
                return 1.0;
            double prob = s.pi[w[0]];
            for (std::size_t j = 0; j + 1 < w.size() && prob != 0.0; ++j)
                prob *= s.p[w[j]][w[j + 1]];
            return prob;
        };
    }

    CylinderProbability product_measure(double rho)
    {
        if (!(rho >= 0.0 && rho <= 1.0))
            throw std::domain_error("rho must lie in [0, 1]");
        return [rho](std::span<const std::uint8_t> w) {
            double prob = 1.0;
            for (auto v : w)
                prob *= v ? rho : 1.0 - rho;
            return prob;
        };
    }

    CylinderProbability translation_averaged(std::vector<std::pair<Configuration, double>> distribution)
    {
        return [dist = std::move(distribution)](std::span<const std::uint8_t> w) {
            if (w.empty())
                return 1.0;
            const Pattern pat(std::vector<std::uint8_t>(w.begin(), w.end()));
            double total = 0.0;
            for (const auto& [config, p] : dist)
            {
                if (p == 0.0)
                    continue;
                total += p * static_cast<double>(count_pattern(config, pat)) / static_cast<double>(config.size());
            }
            return total;
        };
    }

    CylinderFunction CylinderFunction::indicator(const Pattern& pattern, std::int64_t start)
    {
        CylinderFunction f;
        f.start = start;
        f.width = pattern.size();
        f.weights.assign(std::size_t{1} << f.width, 0.0);
        f.weights[pattern.index()] = 1.0;
        return f;
    }

    CylinderFunction CylinderFunction::constant(double value, std::size_t width, std::int64_t start)
    {
        CylinderFunction f;
        f.start = start;
        f.width = width;
        f.weights.assign(std::size_t{1} << width, value);
        return f;
    }

    double generator_expectation(const CylinderProbability& measure, const CylinderFunction& f)
    {
        if (f.width == 0 || f.weights.size() != (std::size_t{1} << f.width))
            throw std::invalid_argument("malformed cylinder function");
        // Extension [start-2, end+1]: bonds x in [start-1, end] can change f, and their
        // rate reads x-1..x+1.
        const std::size_t w = f.width;
        const std::size_t ext = w + 3;
        std::vector<std::uint8_t> word(ext);
        std::vector<std::uint8_t> swapped(ext);
        double total = 0.0;
        for (std::uint64_t e = 0; e < (std::uint64_t{1} << ext); ++e)
        {
            fill_word(e, word);
            const double p = measure(word);
            if (p == 0.0)
                continue;
            const double base = f.value(word_index(std::span(word).subspan(2, w)));
            double delta = 0.0;
            for (std::size_t j = 1; j <= w + 1; ++j)
            {
                if (!(word[j - 1] && word[j] && !word[j + 1]))
                    continue;
                swapped = word;
                swapped[j] = 0;
                swapped[j + 1] = 1;
                delta += f.value(word_index(std::span(swapped).subspan(2, w))) - base;
            }
            total += p * delta;
        }
        return total;
    }

    std::vector<double> forbidden_pattern_probs(const CylinderProbability& measure, std::size_t k_max)
    {
        std::vector<double> out;
        for (std::size_t k = 0; k <= k_max; ++k)
        {
            std::vector<std::uint8_t> w{1, 1};
            for (std::size_t i = 0; i < k; ++i)
            {
                w.push_back(0);
                w.push_back(1);
            }
            w.push_back(0);
            w.push_back(0);
            out.push_back(measure(w));
        }
        return out;
    }

    double correlation_decay(double rho, const CylinderFunction& f, const CylinderFunction& g, std::int64_t x)
    {
        const std::int64_t gap = g.start + x - f.end();
        if (gap < 1)
            throw std::invalid_argument("supports of f and the shifted g overlap");
        const MarkovMeasureSpec s = MarkovMeasureSpec::make(rho);
        const Mat2 bridge = power({{{s.p[0][0], s.p[0][1]}, {s.p[1][0], s.p[1][1]}}}, static_cast<std::uint64_t>(gap));
        const auto mu = mu_measure(rho);

        std::vector<std::uint8_t> u(f.width);
        std::vector<std::uint8_t> v(g.width);
        // Conditional weight of g given its first site: sum_v g(v) prod p(v).
        double g_given_first[2] = {0.0, 0.0};
        double mean_g = 0.0;
        for (std::uint64_t j = 0; j < g.weights.size(); ++j)
        {
            if (g.weights[j] == 0.0)
                continue;
            fill_word(j, v);
            const double pv = mu(v);
            mean_g += g.weights[j] * pv;
            g_given_first[v[0]] += g.weights[j] * pv / s.pi[v[0]];
        }
        double joint = 0.0;
        double mean_f = 0.0;
        for (std::uint64_t i = 0; i < f.weights.size(); ++i)
        {
            if (f.weights[i] == 0.0)
                continue;
            fill_word(i, u);
            const double pu = mu(u);
            mean_f += f.weights[i] * pu;
            const int last = u.back();
            joint += f.weights[i] * pu * (bridge[last][0] * g_given_first[0] + bridge[last][1] * g_given_first[1]);
        }
        return joint - mean_f * mean_g;
    }

    Configuration bernoulli_sample(double rho, const Topology& topology, RngStream& rng)
    {
        if (!(rho >= 0.0 && rho <= 1.0))
            throw std::domain_error("rho must lie in [0, 1]");
        Configuration c(topology);
        for (std::size_t i = 0; i < topology.length; ++i)
            c.set(i, rng.uniform() < rho ? 1 : 0);
        return c;
    }

    Configuration mu_sample(double rho, std::size_t length, RngStream& rng)
    {
        const MarkovMeasureSpec s = MarkovMeasureSpec::make(rho);
        Configuration c(Topology::segment(length));
        const double log_phi = s.phi > 0.0 ? std::log(s.phi) : 0.0;
        // Length of a run of particles entered from state 1: 1 + Geometric(phi) failures,
        // drawn by inverse CDF.
        auto run_length = [&]() -> std::size_t {
            if (s.phi <= 0.0)
                return 1;
            return 1 + static_cast<std::size_t>(std::floor(std::log(rng.uniform_pos()) / log_phi));
        };
        std::size_t i = 0;
        int state = rng.uniform() < s.pi[1] ? 1 : 0;
        while (i < length)
        {
            if (state == 0)
            {
                c.set(i++, 0);
                state = 1;
                continue;
            }
            const std::size_t run = run_length();
            for (std::size_t r = 0; r < run && i < length; ++r)
                c.set(i++, 1);
            state = 0;
        }
        return c;
    }

    Configuration uniform_sector_sample(std::size_t length, std::size_t k, RngStream& rng)
    {
        if (k > length)
            throw std::invalid_argument("more particles than sites");
        std::vector<std::size_t> sites(length);
        std::iota(sites.begin(), sites.end(), std::size_t{0});
        Configuration c(Topology::ring(length));
        for (std::size_t i = 0; i < k; ++i)
        {
            const std::size_t j = i + static_cast<std::size_t>(rng.below(length - i));
            std::swap(sites[i], sites[j]);
            c.set(sites[i], 1);
        }
        return c;
    }
}  // namespace ftasep
