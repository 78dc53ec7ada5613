#pragma once
// Brute-force reference computations, written against strings and plain loops
// rather than the library's data structures.

#include <cmath>
#include <cstdint>
#include <functional>
#include <set>
#include <string>
#include <vector>

namespace oracle
{
    inline char at(const std::string& s, long i)
    {
        const long n = static_cast<long>(s.size());
        return s[static_cast<std::size_t>(((i % n) + n) % n)];
    }

    inline std::vector<std::size_t> ring_active(const std::string& s)
    {
        std::vector<std::size_t> out;
        for (long x = 0; x < static_cast<long>(s.size()); ++x)
            if (at(s, x - 1) == '1' && at(s, x) == '1' && at(s, x + 1) == '0')
                out.push_back(static_cast<std::size_t>(x));
        return out;
    }

    inline std::string ring_jump(std::string s, std::size_t x)
    {
        const std::size_t y = (x + 1) % s.size();
        s[x] = '0';
        s[y] = '1';
        return s;
    }

    inline std::size_t ring_count(const std::string& s, const std::string& pat)
    {
        std::size_t c = 0;
        for (long i = 0; i < static_cast<long>(s.size()); ++i)
        {
            bool ok = true;
            for (long j = 0; j < static_cast<long>(pat.size()); ++j)
                ok = ok && at(s, i + j) == pat[static_cast<std::size_t>(j)];
            c += ok ? 1 : 0;
        }
        return c;
    }

    inline std::string bits_to_string(std::uint64_t bits, std::size_t n)
    {
        std::string s(n, '0');
        for (std::size_t i = 0; i < n; ++i)
            if ((bits >> i) & 1u)
                s[i] = '1';
        return s;
    }

    // All ring states of length n with k particles, as strings.
    inline std::vector<std::string> ring_sector(std::size_t n, std::size_t k)
    {
        std::vector<std::string> out;
        for (std::uint64_t b = 0; b < (std::uint64_t{1} << n); ++b)
        {
            std::size_t c = 0;
            for (std::size_t i = 0; i < n; ++i)
                c += (b >> i) & 1u;
            if (c == k)
                out.push_back(bits_to_string(b, n));
        }
        return out;
    }

    // States reachable from s (including s) under ring jumps.
    inline std::set<std::string> reachable(const std::string& s)
    {
        std::set<std::string> seen{s};
        std::vector<std::string> todo{s};
        while (!todo.empty())
        {
            const std::string u = todo.back();
            todo.pop_back();
            for (auto x : ring_active(u))
            {
                const std::string v = ring_jump(u, x);
                if (seen.insert(v).second)
                    todo.push_back(v);
            }
        }
        return seen;
    }

    /// P(walk with up-probability rho never reaches +2) by distributing probability mass
    /// over levels -depth..1 step by step; mass leaving below -depth is dropped and its
    /// escape bound (rho/(1-rho))^(depth+2) is returned in `tail`.
    inline double ballot_spatial(double rho, int depth, double& tail)
    {
        const int lo = -depth;
        const int hi = 1;
        std::vector<double> mass(static_cast<std::size_t>(hi - lo + 1), 0.0);
        auto slot = [&](int level) -> double& { return mass[static_cast<std::size_t>(level - lo)]; };
        slot(0) = 1.0;
        double hit = 0.0, dropped = 0.0;
        for (int iter = 0; iter < 10000000; ++iter)
        {
            std::vector<double> next(mass.size(), 0.0);
            double remaining = 0.0;
            for (int level = lo; level <= hi; ++level)
            {
                const double m = slot(level);
                if (m == 0.0)
                    continue;
                if (level + 1 > hi)
                    hit += rho * m;
                else
                    next[static_cast<std::size_t>(level + 1 - lo)] += rho * m;
                if (level - 1 < lo)
                    dropped += (1.0 - rho) * m;
                else
                    next[static_cast<std::size_t>(level - 1 - lo)] += (1.0 - rho) * m;
            }
            mass.swap(next);
            for (double m : mass)
                remaining += m;
            if (remaining < 1e-15)
                break;
        }
        // From level -depth-1 the walk must climb depth+3 levels to reach +2.
        tail = dropped * std::pow(rho / (1.0 - rho), depth + 3);
        return 1.0 - hit;  // mass dropped below the floor counted as never reaching +2
    }
}  // namespace oracle
