#include "ftasep/limits.hpp"

#include "ftasep/dynamics.hpp"
#include "ftasep/measures.hpp"
#include "ftasep/parallel.hpp"
#include "ftasep/text.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ftasep
{
    namespace
    {
        void require_subcritical(double rho)
        {
            if (!(rho > 0.0 && rho < 0.5))
                throw std::domain_error("rho must lie in (0, 1/2)");
        }

        bool has_eleven(std::uint64_t bits) noexcept { return (bits & (bits >> 1)) != 0; }

        std::uint64_t top_bit(std::uint64_t bits, std::size_t length, std::size_t i) noexcept
        {
            return (bits >> (length - 1 - i)) & 1u;
        }
    }  // namespace

    double ballot_prob(double rho)
    {
        require_subcritical(rho);
        return (1.0 - 2.0 * rho) / ((1.0 - rho) * (1.0 - rho));
    }

    LimitCalculator::LimitCalculator(double rho) : rho_(rho) { require_subcritical(rho); }

    double LimitCalculator::prob(const Pattern& pattern) { return prob(pattern.word); }

    double LimitCalculator::prob(std::span<const std::uint8_t> word)
    {
        if (word.empty())
            throw std::invalid_argument("empty pattern");
        if (word.size() > 32)
            throw std::invalid_argument("pattern longer than 32 sites");
        std::uint64_t bits = 0;
        for (auto v : word)
            bits = (bits << 1) | (v ? 1u : 0u);
        return eval(bits, word.size());
    }

    // bits holds the pattern most-significant-first: lambda_0 is bit length-1.
    double LimitCalculator::eval(std::uint64_t bits, std::size_t length)
    {
        if (has_eleven(bits))
            return 0.0;
        if (length == 1)
            return bits ? rho_ : 1.0 - rho_;
        const std::uint64_t key = (static_cast<std::uint64_t>(length) << 32) | bits;
        if (auto it = memo_.find(key); it != memo_.end())
            return it->second;

        const std::uint64_t l0 = top_bit(bits, length, 0);
        const std::uint64_t l1 = top_bit(bits, length, 1);
        const std::uint64_t tail_mask = (std::uint64_t{1} << (length - 1)) - 1;
        const std::uint64_t tail = bits & tail_mask;  // lambda_1 .. lambda_{n-1}
        double p = 0.0;
        if (!l0 && !l1)
        {
            p = 1.0 - 2.0 * rho_;
            for (std::size_t k = 2; k < length; ++k)
                p *= top_bit(bits, length, k) ? rho_ : 1.0 - rho_;
        }
        else if (l0 && !l1)
        {
            // P(1 0 u) = P(0 u) - P(0 0 u); the second term has the same length.
            p = eval(tail, length - 1) - eval(tail, length);
        }
        else
        {
            p = eval(tail, length - 1);
        }
        memo_.emplace(key, p);
        return p;
    }

    double limit_prob(double rho, const Pattern& pattern)
    {
        LimitCalculator calc(rho);
        return calc.prob(pattern);
    }

    double LimitMeasureTable::get(const Pattern& pattern) const
    {
        if (pattern.size() == 0 || pattern.size() > n_max)
            throw std::out_of_range("pattern length outside the table");
        return by_length[pattern.size()][pattern.index()];
    }

    void LimitMeasureTable::set(const Pattern& pattern, double value)
    {
        if (pattern.size() == 0 || pattern.size() > n_max)
            throw std::out_of_range("pattern length outside the table");
        by_length[pattern.size()][pattern.index()] = value;
    }

    std::string LimitMeasureTable::to_csv() const
    {
        std::string out = "pattern,probability\n";
        for (std::size_t n = 1; n <= n_max; ++n)
            for (std::uint64_t i = 0; i < by_length[n].size(); ++i)
                out += Pattern::from_index(i, n).to_string() + ',' + fmt_double(by_length[n][i]) + '\n';
        return out;
    }

    LimitMeasureTable limit_table(double rho, std::size_t n_max)
    {
        require_subcritical(rho);
        if (n_max == 0 || n_max > kMaxLimitPattern)
            throw std::invalid_argument("n_max must lie in [1, 24]");
        LimitMeasureTable table;
        table.rho = rho;
        table.n_max = n_max;
        table.by_length.resize(n_max + 1);
        for (std::size_t n = 1; n <= n_max; ++n)
        {
            auto& row = table.by_length[n];
            row.resize(std::size_t{1} << n);
            // The recursion only refers to length n-1 and to smaller indices of length n.
            for (std::uint64_t i = 0; i < row.size(); ++i)
            {
                if (has_eleven(i))
                {
                    row[i] = 0.0;
                    continue;
                }
                const std::uint64_t l0 = (i >> (n - 1)) & 1u;
                const std::uint64_t l1 = n >= 2 ? (i >> (n - 2)) & 1u : 0;
                const std::uint64_t tail = i & ((std::uint64_t{1} << (n - 1)) - 1);
                if (n == 1)
                    row[i] = i ? rho : 1.0 - rho;
                else if (!l0 && !l1)
                {
                    double p = 1.0 - 2.0 * rho;
                    for (std::size_t k = 2; k < n; ++k)
                        p *= ((i >> (n - 1 - k)) & 1u) ? rho : 1.0 - rho;
                    row[i] = p;
                }
                else if (l0 && !l1)
                    row[i] = table.by_length[n - 1][tail] - row[tail];  // tail < i starts with 00
                else
                    row[i] = table.by_length[n - 1][tail];
            }
        }
        return table;
    }

    double ConsistencyReport::max_violation() const noexcept { return std::max({max_right, max_left, max_total}); }

    ConsistencyReport consistency_check(const LimitMeasureTable& table)
    {
        ConsistencyReport r;
        r.min_value = 1.0;
        r.max_value = 0.0;
        double worst = -1.0;
        auto note = [&](double v, std::uint64_t i, std::size_t n) {
            if (v > worst)
            {
                worst = v;
                r.worst_pattern = Pattern::from_index(i, n).to_string();
            }
        };
        for (std::size_t n = 1; n <= table.n_max; ++n)
        {
            const auto& row = table.by_length[n];
            double total = 0.0;
            for (std::uint64_t i = 0; i < row.size(); ++i)
            {
                total += row[i];
                r.min_value = std::min(r.min_value, row[i]);
                r.max_value = std::max(r.max_value, row[i]);
                if (has_eleven(i))
                    r.max_eleven = std::max(r.max_eleven, std::abs(row[i]));
                if (n == table.n_max)
                    continue;
                const auto& next = table.by_length[n + 1];
                const double right = std::abs(row[i] - next[i << 1] - next[(i << 1) | 1u]);
                const double left = std::abs(row[i] - next[i] - next[i | (std::uint64_t{1} << n)]);
                r.max_right = std::max(r.max_right, right);
                r.max_left = std::max(r.max_left, left);
                note(std::max(right, left), i, n);
            }
            r.max_total = std::max(r.max_total, std::abs(1.0 - total));
        }
        return r;
    }

    std::vector<double> pair_decay_grid()
    {
        std::vector<double> grid{0.0};
        for (int j = 0; j <= 60; ++j)
            grid.push_back(std::pow(10.0, -1.0 + j / 10.0));
        return grid;
    }

    CriticalTrial critical_trial(std::size_t length, const RngStream& stream, const std::vector<double>& grid)
    {
        if (length % 2 != 0)
            throw std::invalid_argument("critical absorption needs an even ring length");
        RngStream init = stream.substream(0);
        RngStream dyn = stream.substream(1);
        SimState state(uniform_sector_sample(length, length / 2, init));
        CriticalTrial trial;
        for (double t : grid)
        {
            while (state.step(dyn, t))
                ;
            trial.series.push_back(pair_counts(state.config()));
            if (trial.series.size() > 1 && trial.series.back().n11 > trial.series[trial.series.size() - 2].n11)
                trial.f11_monotone = false;
        }
        while (state.step(dyn))
            ;
        trial.absorbed = state.absorbed();
        trial.absorption_time = state.time();
        trial.events = state.event_count();
        const Configuration& final_config = state.config();
        trial.even = final_config == alternating_config(length, true);
        trial.alternating = trial.even || final_config == alternating_config(length, false);
        if (pair_counts(final_config).n11 > trial.series.back().n11)
            trial.f11_monotone = false;
        return trial;
    }

    CriticalAbsorptionStats critical_absorption_stats(std::size_t length, std::size_t trials, const RngStream& rng,
                                                      std::size_t workers)
    {
        if (length % 2 != 0)
            throw std::invalid_argument("critical absorption needs an even ring length");
        if (trials == 0)
            throw std::invalid_argument("need at least one trial");
        CriticalAbsorptionStats s;
        s.length = length;
        s.grid = pair_decay_grid();
        s.trials = run_trials(trials, workers, [&](std::size_t i) { return critical_trial(length, rng.substream(i), s.grid); });
        std::vector<double> times;
        for (const auto& t : s.trials)
        {
            s.even_count += t.even ? 1 : 0;
            s.non_alternating += t.alternating ? 0 : 1;
            s.monotone_violations += t.f11_monotone ? 0 : 1;
            times.push_back(t.absorption_time);
        }
        s.even_fraction = estimate_proportion(s.even_count, trials, 0.5);
        s.absorption_time = estimate_mean(times);
        return s;
    }

    std::vector<std::array<double, 4>> CriticalAbsorptionStats::pair_decay() const
    {
        std::vector<std::array<double, 4>> out(grid.size(), {0.0, 0.0, 0.0, 0.0});
        const double scale = 1.0 / (static_cast<double>(length) * static_cast<double>(trials.size()));
        for (std::size_t g = 0; g < grid.size(); ++g)
        {
            std::uint64_t c[4] = {0, 0, 0, 0};
            for (const auto& t : trials)
            {
                c[0] += t.series[g].n11;
                c[1] += t.series[g].n10;
                c[2] += t.series[g].n01;
                c[3] += t.series[g].n00;
            }
            for (int j = 0; j < 4; ++j)
                out[g][static_cast<std::size_t>(j)] = static_cast<double>(c[j]) * scale;
        }
        return out;
    }

    std::string CriticalAbsorptionStats::absorption_csv() const
    {
        std::string out = "trial,absorbed,parity,absorption_time,events\n";
        for (std::size_t i = 0; i < trials.size(); ++i)
        {
            const auto& t = trials[i];
            const char* parity = !t.alternating ? "other" : (t.even ? "even" : "odd");
            out += std::to_string(i) + ',' + (t.absorbed ? "1" : "0") + ',' + parity + ',' +
                   fmt_double(t.absorption_time) + ',' + std::to_string(t.events) + '\n';
        }
        return out;
    }

    std::string CriticalAbsorptionStats::pair_decay_csv() const
    {
        std::string out = "t,f11,f10,f01,f00\n";
        const auto decay = pair_decay();
        for (std::size_t g = 0; g < grid.size(); ++g)
            out += fmt_double(grid[g]) + ',' + fmt_double(decay[g][0]) + ',' + fmt_double(decay[g][1]) + ',' +
                   fmt_double(decay[g][2]) + ',' + fmt_double(decay[g][3]) + '\n';
        return out;
    }

    double SubcriticalReport::max_abs_z() const noexcept
    {
        double m = 0.0;
        for (const auto& p : patterns)
            m = std::max(m, std::abs(p.z));
        return m;
    }

    std::string SubcriticalReport::patterns_csv() const
    {
        std::string out = "pattern,expected,observed,se,z,ci_lower,ci_upper\n";
        for (const auto& p : patterns)
            out += p.pattern.to_string() + ',' + fmt_double(p.expected) + ',' + fmt_double(p.observed) + ',' +
                   fmt_double(p.se) + ',' + fmt_double(p.z) + ',' + fmt_double(p.pooled.lower) + ',' +
                   fmt_double(p.pooled.upper) + '\n';
        return out;
    }

    SubcriticalReport subcritical_empirical_compare(double rho, std::size_t length, std::size_t trials,
                                                    const RngStream& rng, std::size_t pattern_max, std::size_t workers)
    {
        require_subcritical(rho);
        if (trials == 0)
            throw std::invalid_argument("need at least one trial");
        if (pattern_max == 0 || pattern_max > 16 || pattern_max > length)
            throw std::invalid_argument("pattern_max must lie in [1, min(16, L)]");
        SubcriticalReport report;
        report.rho = rho;
        report.length = length;
        report.particles = static_cast<std::size_t>(std::llround(rho * static_cast<double>(length)));
        report.trials = trials;
        report.pattern_max = pattern_max;
        report.caveat = "absorbed states of a finite ring stand in for the infinite-volume limit; "
                        "expect O(1/L) bias";

        struct TrialCounts
        {
            bool absorbed = false;
            std::vector<std::vector<std::uint64_t>> counts;  // [length][index]
        };
        const std::size_t k = report.particles;
        auto per_trial = run_trials(trials, workers, [&](std::size_t i) {
            const RngStream stream = rng.substream(i);
            RngStream init = stream.substream(0);
            RngStream dyn = stream.substream(1);
            SimState state(uniform_sector_sample(length, k, init));
            while (state.step(dyn))
                ;
            TrialCounts tc;
            tc.absorbed = state.absorbed();
            tc.counts.resize(pattern_max + 1);
            const Configuration& c = state.config();
            for (std::size_t n = 1; n <= pattern_max; ++n)
            {
                tc.counts[n].assign(std::size_t{1} << n, 0);
                const std::uint64_t mask = (std::uint64_t{1} << n) - 1;
                std::uint64_t w = 0;
                for (std::size_t j = 0; j + 1 < n; ++j)
                    w = (w << 1) | static_cast<std::uint64_t>(c[j]);
                for (std::size_t s = 0; s < length; ++s)
                {
                    w = ((w << 1) | static_cast<std::uint64_t>(c.wrapped(static_cast<std::int64_t>(s + n - 1)))) & mask;
                    ++tc.counts[n][w];
                }
            }
            return tc;
        });

        LimitCalculator calc(rho);
        const double positions = static_cast<double>(length);
        for (const auto& t : per_trial)
            report.unabsorbed += t.absorbed ? 0 : 1;
        for (std::size_t n = 1; n <= pattern_max; ++n)
            for (std::uint64_t i = 0; i < (std::uint64_t{1} << n); ++i)
            {
                PatternComparison pc;
                pc.pattern = Pattern::from_index(i, n);
                pc.expected = calc.prob(pc.pattern);
                std::vector<double> freq;
                std::uint64_t total = 0;
                for (const auto& t : per_trial)
                {
                    freq.push_back(static_cast<double>(t.counts[n][i]) / positions);
                    total += t.counts[n][i];
                }
                const MeanEstimate m = estimate_mean(freq);
                pc.observed = m.mean;
                pc.se = m.se;
                pc.z = z_score(m.mean, pc.expected, m.se);
                pc.pooled = estimate_proportion(total, static_cast<std::uint64_t>(length) * trials);
                report.patterns.push_back(std::move(pc));
            }
        return report;
    }
}  // namespace ftasep
