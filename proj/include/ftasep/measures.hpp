#pragma once

#include "ftasep/lattice.hpp"
#include "ftasep/rng.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace ftasep
{
    /// phi(rho) = (2 rho - 1) / rho, the continuation probability of a run of particles
    /// under the renewal measure mu_rho. Requires 1/2 < rho < 1.
    double phi(double rho);

    /// {0,1}-valued Markov chain whose stationary law is mu_rho:
    /// p(0,1) = 1, p(1,1) = phi, p(1,0) = (1-rho)/rho, pi(1) = rho.
    struct MarkovMeasureSpec
    {
        double rho = 0.75;
        double phi = 0.0;
        double p[2][2] = {{0.0, 1.0}, {0.0, 0.0}};
        double pi[2] = {0.0, 0.0};

        static MarkovMeasureSpec make(double rho);
    };

    // Probability that consecutive sites read the given word (translation invariant measures).
    using CylinderProbability = std::function<double(std::span<const std::uint8_t>)>;

    double mu_cylinder_prob(double rho, const Pattern& pattern);
    CylinderProbability mu_measure(double rho);
    CylinderProbability product_measure(double rho);
    // Average over positions of a distribution on ring states.
    CylinderProbability translation_averaged(std::vector<std::pair<Configuration, double>> distribution);

    /// Function of the sites [start, start + width). weights[i] is the value on the word
    /// whose most-significant-first index is i.
    struct CylinderFunction
    {
        std::int64_t start = 0;
        std::size_t width = 1;
        std::vector<double> weights;

        static CylinderFunction indicator(const Pattern& pattern, std::int64_t start = 0);
        static CylinderFunction constant(double value, std::size_t width = 1, std::int64_t start = 0);

        double value(std::uint64_t index) const { return weights[index]; }
        std::int64_t end() const noexcept { return start + static_cast<std::int64_t>(width) - 1; }
    };

    /// Exact integral of the generator applied to f, summed over all words on the support
    /// of f widened by two sites on the left and one on the right.
    double generator_expectation(const CylinderProbability& measure, const CylinderFunction& f);

    /// mu(11 (01)^k 00) for k = 0..k_max.
    std::vector<double> forbidden_pattern_probs(const CylinderProbability& measure, std::size_t k_max);

    /// Covariance of f and g shifted by x under mu_rho, computed through the chain.
    double correlation_decay(double rho, const CylinderFunction& f, const CylinderFunction& g, std::int64_t x);

    Configuration bernoulli_sample(double rho, const Topology& topology, RngStream& rng);
    Configuration mu_sample(double rho, std::size_t length, RngStream& rng);
    // Uniform over the ring configurations with exactly k particles.
    Configuration uniform_sector_sample(std::size_t length, std::size_t k, RngStream& rng);
}  // namespace ftasep
