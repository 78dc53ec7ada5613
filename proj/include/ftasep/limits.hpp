#pragma once

#include "ftasep/estimators.hpp"
#include "ftasep/lattice.hpp"
#include "ftasep/rng.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace ftasep
{
    /// P(S_N <= 1 for all N) for the walk with up-steps of probability rho:
    /// (1 - 2 rho) / (1 - rho)^2. Requires 0 < rho < 1/2.
    double ballot_prob(double rho);

    /// Cylinder probabilities of the subcritical limit measure, by the induction on the
    /// first two letters of the pattern. Values are memoized per pattern.
    class LimitCalculator
    {
    public:
        explicit LimitCalculator(double rho);

        double rho() const noexcept { return rho_; }
        double prob(const Pattern& pattern);
        double prob(std::span<const std::uint8_t> word);

    private:
        double eval(std::uint64_t bits, std::size_t length);
        double rho_;
        std::unordered_map<std::uint64_t, double> memo_;
    };

    double limit_prob(double rho, const Pattern& pattern);

    /// Every pattern of length 1..n_max. by_length[n][i] is the probability of the word of
    /// length n whose most-significant-first index is i.
    struct LimitMeasureTable
    {
        double rho = 0.25;
        std::size_t n_max = 0;
        std::vector<std::vector<double>> by_length;

        double get(const Pattern& pattern) const;
        void set(const Pattern& pattern, double value);
        std::string to_csv() const;
    };

    inline constexpr std::size_t kMaxLimitPattern = 24;

    LimitMeasureTable limit_table(double rho, std::size_t n_max);

    struct ConsistencyReport
    {
        double max_right = 0.0;  // max |P(w) - P(w0) - P(w1)|
        double max_left = 0.0;   // max |P(w) - P(0w) - P(1w)|
        double max_total = 0.0;  // max |1 - sum over a length|
        double min_value = 0.0;
        double max_value = 0.0;
        double max_eleven = 0.0;  // largest value on a pattern containing "11"
        std::string worst_pattern;

        double max_violation() const noexcept;
    };

    ConsistencyReport consistency_check(const LimitMeasureTable& table);

    struct CriticalTrial
    {
        bool absorbed = false;
        bool alternating = false;
        bool even = false;  // absorbed in the state with particles on the even sites
        bool f11_monotone = true;
        double absorption_time = 0.0;
        std::uint64_t events = 0;
        std::vector<PairCounts> series;  // pair counts at the grid times
    };

    struct CriticalAbsorptionStats
    {
        std::size_t length = 0;
        std::vector<double> grid;
        std::vector<CriticalTrial> trials;
        std::uint64_t even_count = 0;
        std::uint64_t non_alternating = 0;
        std::uint64_t monotone_violations = 0;
        EstimatorResult even_fraction;
        MeanEstimate absorption_time;

        // Trial average of n_ab / L at grid index g, in the order 11, 10, 01, 00.
        std::vector<std::array<double, 4>> pair_decay() const;
        std::string absorption_csv() const;
        std::string pair_decay_csv() const;
    };

    // {0} and 10^(-1 + j/10) for j = 0..60.
    std::vector<double> pair_decay_grid();

    /// Half-filled ring of even length from the uniform sector law, run to absorption.
    /// Trial i uses rng.substream(i).
    CriticalTrial critical_trial(std::size_t length, const RngStream& stream, const std::vector<double>& grid);
    CriticalAbsorptionStats critical_absorption_stats(std::size_t length, std::size_t trials, const RngStream& rng,
                                                      std::size_t workers = 1);

    struct PatternComparison
    {
        Pattern pattern;
        double expected = 0.0;
        double observed = 0.0;  // mean over trials of the per-trial frequency
        double se = 0.0;        // trial-level standard error
        double z = 0.0;
        EstimatorResult pooled;  // Wilson interval on occurrences over all positions of all trials
    };

    struct SubcriticalReport
    {
        double rho = 0.0;
        std::size_t length = 0;
        std::size_t particles = 0;
        std::size_t trials = 0;
        std::size_t pattern_max = 0;
        std::uint64_t unabsorbed = 0;
        std::vector<PatternComparison> patterns;
        std::string caveat;

        double max_abs_z() const noexcept;
        std::string patterns_csv() const;
    };

    /// Ring of length L with k = round(rho L) from the uniform sector law, run to
    /// absorption; absorbed-state pattern frequencies against the limit recursion.
    SubcriticalReport subcritical_empirical_compare(double rho, std::size_t length, std::size_t trials,
                                                    const RngStream& rng, std::size_t pattern_max,
                                                    std::size_t workers = 1);
}  // namespace ftasep
