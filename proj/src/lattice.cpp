#include "ftasep/lattice.hpp"

#include <bit>
#include <stdexcept>

namespace ftasep
{
    Pattern::Pattern(std::vector<std::uint8_t> w) : word(std::move(w))
    {
        if (word.empty())
            throw std::invalid_argument("pattern must be nonempty");
        for (auto v : word)
            if (v > 1)
                throw std::invalid_argument("pattern entries must be 0 or 1");
    }

    Pattern Pattern::parse(std::string_view text)
    {
        std::vector<std::uint8_t> w;
        w.reserve(text.size());
        for (char c : text)
        {
            if (c != '0' && c != '1')
                throw std::invalid_argument("pattern text must consist of '0'/'1'");
            w.push_back(static_cast<std::uint8_t>(c - '0'));
        }
        return Pattern(std::move(w));
    }

    std::string Pattern::to_string() const
    {
        std::string s;
        s.reserve(word.size());
        for (auto v : word)
            s.push_back(static_cast<char>('0' + v));
        return s;
    }

    std::uint64_t Pattern::index() const
    {
        if (word.size() > 63)
            throw std::length_error("pattern too long to index");
        std::uint64_t idx = 0;
        for (auto v : word)
            idx = (idx << 1) | v;
        return idx;
    }

    Pattern Pattern::from_index(std::uint64_t index, std::size_t length)
    {
        std::vector<std::uint8_t> w(length);
        for (std::size_t i = 0; i < length; ++i)
            w[length - 1 - i] = static_cast<std::uint8_t>((index >> i) & 1u);
        return Pattern(std::move(w));
    }

    bool Pattern::contains(const Pattern& needle) const
    {
        if (needle.size() > size())
            return false;
        for (std::size_t i = 0; i + needle.size() <= size(); ++i)
        {
            bool hit = true;
            for (std::size_t j = 0; j < needle.size() && hit; ++j)
                hit = word[i + j] == needle.word[j];
            if (hit)
                return true;
        }
        return false;
    }

    Configuration::Configuration(Topology topology, std::int64_t origin_offset)
        : topology_(topology), origin_(origin_offset), bits_((topology.length + 63) / 64, 0)
    {
        if (topology.length == 0)
            throw std::invalid_argument("configuration length must be positive");
        if (topology.is_ring() && topology.length < 3)
            throw std::invalid_argument("a ring needs at least 3 sites");
        if (topology.is_ring() && origin_offset != 0)
            throw std::invalid_argument("ring configurations have origin 0");
    }

    Configuration Configuration::parse(std::string_view text, TopologyKind kind, std::int64_t origin_offset)
    {
        Configuration c(Topology{kind, text.size()}, origin_offset);
        for (std::size_t i = 0; i < text.size(); ++i)
        {
            const char ch = text[i];
            if (ch != '0' && ch != '1')
                throw std::invalid_argument("configuration text must consist of '0'/'1'");
            c.set(i, ch - '0');
        }
        return c;
    }

    Configuration Configuration::ring_from_bits(std::uint64_t bits, std::size_t length)
    {
        if (length > 64)
            throw std::invalid_argument("ring_from_bits supports at most 64 sites");
        Configuration c(Topology::ring(length));
        c.bits_[0] = length == 64 ? bits : (bits & ((std::uint64_t{1} << length) - 1));
        return c;
    }

    int Configuration::wrapped(std::int64_t i) const noexcept
    {
        const auto n = static_cast<std::int64_t>(size());
        std::int64_t r = i % n;
        if (r < 0)
            r += n;
        return (*this)[static_cast<std::size_t>(r)];
    }

    std::optional<int> Configuration::at_coordinate(std::int64_t x) const noexcept
    {
        if (is_ring())
            return wrapped(x);
        const std::int64_t i = x - origin_;
        if (i < 0 || i >= static_cast<std::int64_t>(size()))
            return std::nullopt;
        return (*this)[static_cast<std::size_t>(i)];
    }

    std::size_t Configuration::particle_count() const noexcept
    {
        std::size_t k = 0;
        for (auto w : bits_)
            k += static_cast<std::size_t>(std::popcount(w));
        return k;
    }

    std::string Configuration::to_string() const
    {
        std::string s(size(), '0');
        for (std::size_t i = 0; i < size(); ++i)
            if ((*this)[i])
                s[i] = '1';
        return s;
    }

    std::uint64_t Configuration::low_bits() const
    {
        if (size() > 64)
            throw std::length_error("configuration wider than 64 sites");
        return bits_[0];
    }

    Configuration shift(const Configuration& config, std::int64_t x)
    {
        if (!config.is_ring())
        {
            // (tau_x eta)(y) = eta(x + y): same occupancy, coordinates move by -x.
            Configuration moved(config.topology(), config.origin_offset() - x);
            for (std::size_t i = 0; i < config.size(); ++i)
                moved.set(i, config[i]);
            return moved;
        }
        Configuration out(config.topology());
        for (std::size_t y = 0; y < config.size(); ++y)
            out.set(y, config.wrapped(static_cast<std::int64_t>(y) + x));
        return out;
    }

    std::size_t count_pattern(const Configuration& config, const Pattern& pattern)
    {
        const std::size_t n = config.size();
        const std::size_t m = pattern.size();
        std::size_t positions = n;
        if (!config.is_ring())
        {
            if (m > n)
                throw std::invalid_argument("pattern longer than segment");
            positions = n - m + 1;
        }
        std::size_t count = 0;
        for (std::size_t i = 0; i < positions; ++i)
        {
            bool hit = true;
            for (std::size_t j = 0; j < m && hit; ++j)
                hit = config.wrapped(static_cast<std::int64_t>(i + j)) == pattern[j];
            count += hit ? 1 : 0;
        }
        return count;
    }

    PairCounts pair_counts_any(const Configuration& config)
    {
        PairCounts pc;
        const std::size_t n = config.size();
        const std::size_t pairs = config.is_ring() ? n : n - 1;
        for (std::size_t i = 0; i < pairs; ++i)
        {
            const int a = config[i];
            const int b = config.wrapped(static_cast<std::int64_t>(i + 1));
            if (a && b)
                ++pc.n11;
            else if (a)
                ++pc.n10;
            else if (b)
                ++pc.n01;
            else
                ++pc.n00;
        }
        return pc;
    }

    PairCounts pair_counts(const Configuration& config)
    {
        if (!config.is_ring())
            throw std::invalid_argument("pair_counts requires a ring");
        return pair_counts_any(config);
    }

    Configuration alternating_config(std::size_t length, bool even)
    {
        if (length % 2 != 0)
            throw std::invalid_argument("alternating configuration needs even length");
        Configuration c(Topology::ring(length));
        for (std::size_t x = 0; x < length; ++x)
            c.set(x, (x % 2 == 0) == even ? 1 : 0);
        return c;
    }

    FrozenCheck frozen_check(const Configuration& config)
    {
        const std::size_t n = config.size();
        FrozenCheck fc;
        if (config.is_ring())
        {
            fc.first_center = 0;
            fc.last_center = n - 1;
        }
        else
        {
            // Centers need both neighbors inside the window.
            fc.first_center = 1;
            fc.last_center = n >= 2 ? n - 2 : 0;
            if (n < 3)
                return fc;
        }
        for (std::size_t x = fc.first_center; x <= fc.last_center; ++x)
        {
            const auto xi = static_cast<std::int64_t>(x);
            if (config.wrapped(xi - 1) && config[x] && !config.wrapped(xi + 1))
            {
                fc.frozen = false;
                break;
            }
        }
        return fc;
    }

    bool is_frozen(const Configuration& config) { return frozen_check(config).frozen; }

    bool is_no_adjacent_zeros(const Configuration& config) { return pair_counts_any(config).n00 == 0; }

    std::optional<std::int64_t> first_double_zero(const Configuration& config)
    {
        const std::int64_t first = config.origin_offset();
        const std::int64_t last = first + static_cast<std::int64_t>(config.size()) - 1;
        for (std::int64_t m = std::max<std::int64_t>(1, first + 1); m <= last; ++m)
        {
            if (*config.at_coordinate(m - 1) == 0 && *config.at_coordinate(m) == 0)
                return m;
        }
        return std::nullopt;
    }
}  // namespace ftasep
