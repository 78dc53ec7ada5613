#include "ftasep/ring_exact.hpp"

#include "ftasep/text.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace ftasep
{
    namespace
    {
        std::uint64_t binomial(std::uint64_t n, std::uint64_t k)
        {
            if (k > n)
                return 0;
            k = std::min(k, n - k);
            std::uint64_t r = 1;
            for (std::uint64_t i = 1; i <= k; ++i)
                r = r * (n - k + i) / i;
            return r;
        }

        // Circular arrangements of L sites with `marked` marked sites, no two marked adjacent.
        std::uint64_t circular_non_adjacent(std::uint64_t length, std::uint64_t marked)
        {
            if (marked == 0)
                return 1;
            if (marked > length - marked)
                return 0;
            return length * binomial(length - marked, marked) / (length - marked);
        }

        // Iterative Tarjan; component ids come out in reverse topological order.
        std::vector<std::int32_t> strongly_connected(const RingGeneratorMatrix& gen, std::size_t& count)
        {
            const std::size_t n = gen.size();
            std::vector<std::int32_t> index(n, -1), low(n, 0), comp(n, -1);
            std::vector<std::uint8_t> on_stack(n, 0);
            std::vector<std::uint32_t> stack;
            std::vector<std::pair<std::uint32_t, std::size_t>> call;
            std::int32_t counter = 0;
            count = 0;
            for (std::uint32_t root = 0; root < n; ++root)
            {
                if (index[root] >= 0)
                    continue;
                call.emplace_back(root, 0);
                index[root] = low[root] = counter++;
                stack.push_back(root);
                on_stack[root] = 1;
                while (!call.empty())
                {
                    auto& [v, next] = call.back();
                    const auto& edges = gen.transitions[v];
                    if (next < edges.size())
                    {
                        const std::uint32_t w = edges[next++].to;
                        if (index[w] < 0)
                        {
                            index[w] = low[w] = counter++;
                            stack.push_back(w);
                            on_stack[w] = 1;
                            call.emplace_back(w, 0);
                        }
                        else if (on_stack[w])
                        {
                            low[v] = std::min(low[v], index[w]);
                        }
                        continue;
                    }
                    if (low[v] == index[v])
                    {
                        std::uint32_t w;
                        do
                        {
                            w = stack.back();
                            stack.pop_back();
                            on_stack[w] = 0;
                            comp[w] = static_cast<std::int32_t>(count);
                        } while (w != v);
                        ++count;
                    }
                    const std::uint32_t done = v;
                    call.pop_back();
                    if (!call.empty())
                        low[call.back().first] = std::min(low[call.back().first], low[done]);
                }
            }
            return comp;
        }

        constexpr double kResidualTolerance = 1e-10;
    }  // namespace

    RingGeneratorMatrix ring_generator_build(std::size_t length, std::size_t particles)
    {
        if (length < 3)
            throw std::invalid_argument("a ring needs at least 3 sites");
        if (length > kMaxExactRing)
            throw std::invalid_argument("sector too large for exact analysis");
        if (particles > length)
            throw std::invalid_argument("more particles than sites");

        RingGeneratorMatrix gen;
        gen.length = length;
        gen.particles = particles;
        gen.index_of.assign(std::size_t{1} << length, -1);
        for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << length); ++bits)
        {
            if (static_cast<std::size_t>(std::popcount(bits)) != particles)
                continue;
            gen.index_of[bits] = static_cast<std::int32_t>(gen.states.size());
            gen.states.push_back(bits);
        }
        const std::size_t n = gen.states.size();
        gen.transitions.resize(n);
        gen.diagonal.assign(n, 0);
        auto bit = [](std::uint64_t s, std::size_t i) { return (s >> i) & 1u; };
        for (std::size_t i = 0; i < n; ++i)
        {
            const std::uint64_t s = gen.states[i];
            for (std::size_t x = 0; x < length; ++x)
            {
                const std::size_t left = (x + length - 1) % length;
                const std::size_t right = (x + 1) % length;
                if (!(bit(s, left) && bit(s, x) && !bit(s, right)))
                    continue;
                const std::uint64_t t = (s & ~(std::uint64_t{1} << x)) | (std::uint64_t{1} << right);
                const auto j = static_cast<std::uint32_t>(gen.index_of[t]);
                auto& row = gen.transitions[i];
                auto it = std::find_if(row.begin(), row.end(), [j](const auto& e) { return e.to == j; });
                if (it == row.end())
                    row.push_back({j, 1});
                else
                    ++it->rate;
                --gen.diagonal[i];
            }
        }
        return gen;
    }

    RingAnalysis stationary_and_classes(const RingGeneratorMatrix& gen, const std::optional<std::vector<double>>& initial)
    {
        const std::size_t n = gen.size();
        std::size_t ncomp = 0;
        const std::vector<std::int32_t> comp = strongly_connected(gen, ncomp);

        RingAnalysis out;
        out.classes.resize(ncomp);
        for (std::uint32_t i = 0; i < n; ++i)
            out.classes[static_cast<std::size_t>(comp[i])].push_back(i);

        std::vector<std::uint8_t> closed(ncomp, 1);
        for (std::uint32_t i = 0; i < n; ++i)
            for (const auto& e : gen.transitions[i])
                if (comp[e.to] != comp[i])
                    closed[static_cast<std::size_t>(comp[i])] = 0;

        // Order classes by their smallest state for reproducible output.
        std::vector<std::size_t> order(ncomp);
        for (std::size_t c = 0; c < ncomp; ++c)
            order[c] = c;
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return out.classes[a].front() < out.classes[b].front(); });
        std::vector<std::vector<std::uint32_t>> sorted_classes;
        std::vector<std::uint8_t> sorted_closed;
        for (auto c : order)
        {
            sorted_classes.push_back(out.classes[c]);
            sorted_closed.push_back(closed[c]);
        }
        out.classes = std::move(sorted_classes);

        std::vector<std::int32_t> recurrent_of(n, -1);
        for (std::size_t c = 0; c < out.classes.size(); ++c)
        {
            if (!sorted_closed[c])
                continue;
            const auto& members = out.classes[c];
            const std::size_t m = members.size();
            RecurrentClass rc;
            rc.states = members;
            std::vector<std::int32_t> local(n, -1);
            for (std::size_t a = 0; a < m; ++a)
                local[members[a]] = static_cast<std::int32_t>(a);

            // pi Q = 0 on the class with the last equation replaced by sum(pi) = 1.
            Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
            for (std::size_t r = 0; r < m; ++r)
            {
                const auto i = members[r];
                a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(r)) += static_cast<double>(gen.diagonal[i]);
                for (const auto& e : gen.transitions[i])
                    a(local[e.to], static_cast<Eigen::Index>(r)) += static_cast<double>(e.rate);
            }
            a.row(static_cast<Eigen::Index>(m - 1)).setOnes();
            Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
            b(static_cast<Eigen::Index>(m - 1)) = 1.0;
            const Eigen::VectorXd pi = a.partialPivLu().solve(b);
            rc.stationary.assign(pi.data(), pi.data() + m);

            std::vector<double> flow(m, 0.0);
            for (std::size_t r = 0; r < m; ++r)
            {
                const auto i = members[r];
                flow[r] += rc.stationary[r] * static_cast<double>(gen.diagonal[i]);
                for (const auto& e : gen.transitions[i])
                    flow[static_cast<std::size_t>(local[e.to])] += rc.stationary[r] * static_cast<double>(e.rate);
            }
            for (double v : flow)
                rc.residual = std::max(rc.residual, std::abs(v));
            if (!(rc.residual <= kResidualTolerance))
                throw std::runtime_error("stationary solve residual above tolerance");
            out.max_residual = std::max(out.max_residual, rc.residual);
            for (auto i : members)
                recurrent_of[i] = static_cast<std::int32_t>(out.recurrent.size());
            out.recurrent.push_back(std::move(rc));
        }

        // Absorption into each recurrent class from the transient states.
        std::vector<std::uint32_t> transient;
        std::vector<std::int32_t> tindex(n, -1);
        for (std::uint32_t i = 0; i < n; ++i)
            if (recurrent_of[i] < 0)
            {
                tindex[i] = static_cast<std::int32_t>(transient.size());
                transient.push_back(i);
            }
        const std::size_t nr = out.recurrent.size();
        out.hitting.assign(nr, std::vector<double>(n, 0.0));
        for (std::uint32_t i = 0; i < n; ++i)
            if (recurrent_of[i] >= 0)
                out.hitting[static_cast<std::size_t>(recurrent_of[i])][i] = 1.0;

        if (!transient.empty() && nr > 0)
        {
            const auto nt = static_cast<Eigen::Index>(transient.size());
            Eigen::MatrixXd m = Eigen::MatrixXd::Zero(nt, nt);
            Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(nt, static_cast<Eigen::Index>(nr));
            for (Eigen::Index r = 0; r < nt; ++r)
            {
                const auto i = transient[static_cast<std::size_t>(r)];
                m(r, r) = -static_cast<double>(gen.diagonal[i]);
                for (const auto& e : gen.transitions[i])
                {
                    if (tindex[e.to] >= 0)
                        m(r, tindex[e.to]) -= static_cast<double>(e.rate);
                    else
                        rhs(r, recurrent_of[e.to]) += static_cast<double>(e.rate);
                }
            }
            const Eigen::MatrixXd h = m.partialPivLu().solve(rhs);
            const double residual = (m * h - rhs).cwiseAbs().maxCoeff();
            if (!(residual <= kResidualTolerance))
                throw std::runtime_error("absorption solve residual above tolerance");
            out.max_residual = std::max(out.max_residual, residual);
            for (Eigen::Index r = 0; r < nt; ++r)
                for (std::size_t c = 0; c < nr; ++c)
                    out.hitting[c][transient[static_cast<std::size_t>(r)]] = h(r, static_cast<Eigen::Index>(c));
        }

        std::vector<double> init = initial.value_or(std::vector<double>(n, n ? 1.0 / static_cast<double>(n) : 0.0));
        if (init.size() != n)
            throw std::invalid_argument("initial distribution has the wrong size");
        out.absorption.assign(nr, 0.0);
        for (std::size_t c = 0; c < nr; ++c)
            for (std::size_t i = 0; i < n; ++i)
                out.absorption[c] += init[i] * out.hitting[c][i];
        return out;
    }

    double tv_from_uniform(const RecurrentClass& cls)
    {
        const double u = 1.0 / static_cast<double>(cls.states.size());
        double tv = 0.0;
        for (double p : cls.stationary)
            tv += std::abs(p - u);
        return 0.5 * tv;
    }

    std::uint64_t maximal_island_count(std::size_t length, std::size_t particles)
    {
        return circular_non_adjacent(length, length - particles);
    }

    std::uint64_t no_adjacent_ones_count(std::size_t length, std::size_t particles)
    {
        return circular_non_adjacent(length, particles);
    }

    std::string stationary_csv(const RingGeneratorMatrix& gen, const RingAnalysis& analysis)
    {
        std::string out = "class,state,probability\n";
        for (std::size_t c = 0; c < analysis.recurrent.size(); ++c)
        {
            const auto& rc = analysis.recurrent[c];
            for (std::size_t a = 0; a < rc.states.size(); ++a)
                out += std::to_string(c) + ',' + gen.state(rc.states[a]).to_string() + ',' +
                       fmt_double(rc.stationary[a]) + '\n';
        }
        return out;
    }
}  // namespace ftasep
