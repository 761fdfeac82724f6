#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace grc {

/// Seeded generator with platform-stable derived draws.
///
/// std::mt19937_64 output is fixed by the standard, but the std distributions are not,
/// so bounded and real draws are derived here from raw engine output.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform integer in [0, bound); bound must be positive.
    std::uint64_t below(std::uint64_t bound)
    {
        // Rejection on the top partial block keeps the draw unbiased.
        const std::uint64_t limit = bound * (UINT64_MAX / bound);
        std::uint64_t x;
        do
            x = engine_();
        while (x >= limit);
        return x % bound;
    }

    /// Uniform double in [0, 1) with 53 bits of precision.
    double unit() { return double(engine_() >> 11) * 0x1.0p-53; }

    /// True with probability num/den, exactly.
    bool chance(std::uint64_t num, std::uint64_t den) { return below(den) < num; }

    /// Derives an independent stream seed (splitmix64 finalizer).
    static std::uint64_t mix(std::uint64_t seed, std::uint64_t salt)
    {
        std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

private:
    std::mt19937_64 engine_;
};

/// Fisher-Yates on Rng::below, so the permutation is platform-stable.
template <class T>
void shuffle(Rng & rng, std::vector<T> & v)
{
    for (std::size_t i = v.size(); i > 1; --i)
        std::swap(v[i - 1], v[rng.below(i)]);
}

template <class T>
const T & pick(Rng & rng, const std::vector<T> & v)
{
    return v[rng.below(v.size())];
}

} // namespace grc
