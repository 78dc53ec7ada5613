#pragma once

#include <cstdint>
#include <optional>
#include <span>

namespace ftasep
{
    inline constexpr double kWilsonZ95 = 1.959963984540054;

    /// Proportion estimate with a Wilson 95% score interval.
    struct EstimatorResult
    {
        double point = 0.0;
        double lower = 0.0;
        double upper = 0.0;
        std::uint64_t successes = 0;
        std::uint64_t trials = 0;
        std::optional<double> target;
        std::optional<double> z;  // (point - target) / sqrt(target (1 - target) / trials)
    };

    EstimatorResult estimate_proportion(std::uint64_t successes, std::uint64_t trials,
                                        std::optional<double> target = std::nullopt);

    struct MeanEstimate
    {
        double mean = 0.0;
        double se = 0.0;  // standard error of the mean (sample sd / sqrt n)
        std::size_t n = 0;
    };

    MeanEstimate estimate_mean(std::span<const double> values);

    // Signed distance in standard errors; 0 when se is 0 and the values agree to 1e-12.
    double z_score(double observed, double expected, double se);
}  // namespace ftasep
