#include "ftasep/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ftasep
{
    EstimatorResult estimate_proportion(std::uint64_t successes, std::uint64_t trials, std::optional<double> target)
    {
        if (trials == 0)
            throw std::invalid_argument("estimate_proportion needs at least one trial");
        if (successes > trials)
            throw std::invalid_argument("more successes than trials");
        const double n = static_cast<double>(trials);
        const double p = static_cast<double>(successes) / n;
        const double z2 = kWilsonZ95 * kWilsonZ95;
        const double denom = 1.0 + z2 / n;
        const double center = (p + z2 / (2.0 * n)) / denom;
        const double half = kWilsonZ95 * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;

        EstimatorResult r;
        r.point = p;
        r.successes = successes;
        r.trials = trials;
        // Clamp so the interval always contains the point despite rounding at p = 0 or 1.
        r.lower = std::clamp(center - half, 0.0, p);
        r.upper = std::clamp(center + half, p, 1.0);
        if (target)
        {
            r.target = target;
            r.z = z_score(p, *target, std::sqrt(*target * (1.0 - *target) / n));
        }
        return r;
    }

    MeanEstimate estimate_mean(std::span<const double> values)
    {
        MeanEstimate m;
        m.n = values.size();
        if (values.empty())
            return m;
        if (std::all_of(values.begin(), values.end(), [&](double v) { return v == values.front(); }))
        {
            m.mean = values.front();
            return m;
        }
        double sum = 0.0;
        for (double v : values)
            sum += v;
        m.mean = sum / static_cast<double>(m.n);
        if (m.n < 2)
            return m;
        double ss = 0.0;
        for (double v : values)
            ss += (v - m.mean) * (v - m.mean);
        m.se = std::sqrt(ss / static_cast<double>(m.n - 1) / static_cast<double>(m.n));
        return m;
    }

    double z_score(double observed, double expected, double se)
    {
        const double diff = observed - expected;
        if (se > 0.0)
            return diff / se;
        if (std::abs(diff) <= 1e-12)
            return 0.0;
        return std::copysign(std::numeric_limits<double>::infinity(), diff);
    }
}  // namespace ftasep
