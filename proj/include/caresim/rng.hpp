#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace caresim {

/// SplitMix64 finalizer; used to derive independent seeds and for
/// counter-based draws.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Hash a base seed together with a list of integer keys into a new seed.
/// Different key tuples give statistically independent streams.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> keys) noexcept
{
    std::uint64_t h = splitmix64(base);
    for (auto k : keys) {
        h = splitmix64(h ^ splitmix64(k + 0x632be59bd9b4e019ULL));
    }
    return h;
}

/// Map 64 random bits to [0, 1) with 53-bit resolution.
constexpr double bits_to_unit(std::uint64_t bits) noexcept
{
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Stateless uniform draw keyed by (seed, keys...). Identical keys give the
/// identical value regardless of call order.
constexpr double keyed_uniform(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) noexcept
{
    return bits_to_unit(derive_seed(seed, keys));
}

/// Seeded generator. The engine is std::mt19937_64; the conversions to
/// doubles and bounded integers are done here so streams are identical
/// across standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed)
        : engine_(seed)
    {
    }

    std::uint64_t next() { return engine_(); }

    double uniform() { return bits_to_unit(engine_()); }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    bool bernoulli(double p) { return uniform() < p; }

    /// Uniform integer in [0, n). Lemire-style rejection keeps it unbiased.
    std::uint64_t below(std::uint64_t n)
    {
        if (n <= 1) {
            return 0;
        }
        const std::uint64_t limit = (~std::uint64_t{0}) - (~std::uint64_t{0}) % n;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % n;
    }

    /// Uniform integer in [lo, hi].
    std::int64_t integer(std::int64_t lo, std::int64_t hi)
    {
        return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo) + 1));
    }

    /// Fisher-Yates shuffle driven by below().
    template <class T>
    void shuffle(std::vector<T>& v)
    {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[below(i)]);
        }
    }

private:
    std::mt19937_64 engine_;
};

} // namespace caresim
