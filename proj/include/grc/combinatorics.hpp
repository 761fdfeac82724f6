#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

namespace grc {

using Vertex = std::uint32_t;

inline constexpr std::uint64_t kSaturated = std::numeric_limits<std::uint64_t>::max();

/// Multiplication that clamps to kSaturated instead of wrapping.
constexpr std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b)
{
    if (a == 0 || b == 0)
        return 0;
    if (a > kSaturated / b)
        return kSaturated;
    return a * b;
}

constexpr std::uint64_t sat_add(std::uint64_t a, std::uint64_t b)
{
    return a > kSaturated - b ? kSaturated : a + b;
}

/// Exact C(n, r); saturates at 2^64-1 when the value does not fit.
constexpr std::uint64_t binomial(std::uint64_t n, std::uint64_t r)
{
    if (r > n)
        return 0;
    r = std::min(r, n - r);
    unsigned __int128 acc = 1;
    for (std::uint64_t i = 0; i < r; ++i) {
        acc = acc * (n - i) / (i + 1);
        if (acc > kSaturated)
            return kSaturated;
    }
    return static_cast<std::uint64_t>(acc);
}

constexpr std::uint64_t factorial(std::uint64_t n)
{
    std::uint64_t acc = 1;
    for (std::uint64_t i = 2; i <= n; ++i)
        acc = sat_mul(acc, i);
    return acc;
}

/// n (n-1) ... (n-t+1)
constexpr std::uint64_t falling(std::uint64_t n, std::uint64_t t)
{
    if (t > n)
        return 0;
    std::uint64_t acc = 1;
    for (std::uint64_t i = 0; i < t; ++i)
        acc = sat_mul(acc, n - i);
    return acc;
}

/// Dense table of C(i, j) for i < rows, j < cols. Used in hot ranking loops.
class BinomialTable {
public:
    BinomialTable() = default;
    BinomialTable(std::uint32_t rows, std::uint32_t cols) : rows_(rows), cols_(cols), table_(std::size_t(rows) * cols)
    {
        for (std::uint32_t i = 0; i < rows; ++i)
            for (std::uint32_t j = 0; j < cols; ++j)
                table_[std::size_t(i) * cols + j] = binomial(i, j);
    }

    std::uint64_t operator()(std::uint32_t i, std::uint32_t j) const
    {
        if (i < rows_ && j < cols_)
            return table_[std::size_t(i) * cols_ + j];
        return binomial(i, j);
    }

private:
    std::uint32_t rows_ = 0;
    std::uint32_t cols_ = 0;
    std::vector<std::uint64_t> table_;
};

/// Colexicographic rank of a strictly increasing vertex set.
inline std::uint64_t colex_rank(std::span<const Vertex> sorted)
{
    std::uint64_t r = 0;
    for (std::size_t i = 0; i < sorted.size(); ++i)
        r += binomial(sorted[i], i + 1);
    return r;
}

inline std::uint64_t colex_rank(std::span<const Vertex> sorted, const BinomialTable & table)
{
    std::uint64_t r = 0;
    for (std::size_t i = 0; i < sorted.size(); ++i)
        r += table(sorted[i], std::uint32_t(i + 1));
    return r;
}

/// Inverse of colex_rank over size-element subsets of {0..universe-1}; writes ascending.
inline void colex_unrank(std::uint64_t rank, std::uint32_t size, std::uint32_t universe, std::span<Vertex> out)
{
    std::uint32_t hi = universe;
    for (std::uint32_t pos = size; pos-- > 0;) {
        // largest v < hi with C(v, pos+1) <= rank
        std::uint32_t lo = pos, top = hi;
        while (top - lo > 1) {
            std::uint32_t mid = lo + (top - lo) / 2;
            if (binomial(mid, pos + 1) <= rank)
                lo = mid;
            else
                top = mid;
        }
        out[pos] = lo;
        rank -= binomial(lo, pos + 1);
        hi = lo;
    }
}

/// Lehmer-code unranking: permutation of {0..len-1} with lexicographic index `index` < len!.
inline std::vector<std::uint32_t> unrank_permutation(std::uint32_t len, std::uint64_t index)
{
    std::vector<std::uint32_t> pool(len);
    std::iota(pool.begin(), pool.end(), 0u);
    std::vector<std::uint32_t> perm;
    perm.reserve(len);
    for (std::uint32_t i = len; i > 0; --i) {
        std::uint64_t block = factorial(i - 1);
        std::uint64_t pick = index / block;
        index %= block;
        perm.push_back(pool[pick]);
        pool.erase(pool.begin() + std::ptrdiff_t(pick));
    }
    return perm;
}

/// Arrangements of {0..len-1} whose first entry is smaller than the last; there are len!/2 of them (len >= 2).
/// Index decomposes as (endpoint pair in colex order, middle permutation).
inline std::vector<std::uint32_t> unrank_first_lt_last(std::uint32_t len, std::uint64_t index)
{
    std::uint64_t middle_count = factorial(len - 2);
    std::uint64_t pair = index / middle_count;
    std::uint64_t middle = index % middle_count;
    Vertex ends[2];
    colex_unrank(pair, 2, len, ends);
    std::vector<std::uint32_t> rest;
    for (std::uint32_t v = 0; v < len; ++v)
        if (v != ends[0] && v != ends[1])
            rest.push_back(v);
    auto mid = unrank_permutation(len - 2, middle);
    std::vector<std::uint32_t> out;
    out.reserve(len);
    out.push_back(ends[0]);
    for (auto m : mid)
        out.push_back(rest[m]);
    out.push_back(ends[1]);
    return out;
}

/// Calls f(span) for every size-element ascending subset of `pool`, in lexicographic order.
/// Stops early when f returns false; returns false in that case.
template <class F>
bool for_each_subset(std::span<const Vertex> pool, std::uint32_t size, F && f)
{
    if (size > pool.size())
        return true;
    std::vector<std::uint32_t> idx(size);
    std::iota(idx.begin(), idx.end(), 0u);
    std::vector<Vertex> cur(size);
    const std::uint32_t m = std::uint32_t(pool.size());
    while (true) {
        for (std::uint32_t i = 0; i < size; ++i)
            cur[i] = pool[idx[i]];
        if (!f(std::span<const Vertex>(cur)))
            return false;
        std::int64_t i = std::int64_t(size) - 1;
        while (i >= 0 && idx[i] == m - size + std::uint32_t(i))
            --i;
        if (i < 0)
            return true;
        ++idx[i];
        for (std::uint32_t j = std::uint32_t(i) + 1; j < size; ++j)
            idx[j] = idx[j - 1] + 1;
    }
}

} // namespace grc
