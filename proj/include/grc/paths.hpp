#pragma once

// Explicit colorings for short paths: K_4 and K_6 packings, and the colorings built on them.

#include <grc/core.hpp>
#include <grc/rng.hpp>

#include <algorithm>
#include <cstdint>
#include <vector>

namespace grc {

struct CliquePacking {
    std::uint32_t n = 0, s = 0;
    std::vector<std::vector<Vertex>> blocks; ///< sorted s-sets
    std::vector<EdgeId> leftover;            ///< edges in no block, ascending
    /// A decomposition was attempted and the search budget ran out; blocks come from the fallback.
    bool fell_back = false;
    std::uint64_t nodes = 0;
};

/// Whether the divisibility conditions for an S(2, s, n) design hold.
inline bool decomposition_admissible(std::uint32_t n, std::uint32_t s)
{
    return n >= s && (n - 1) % (s - 1) == 0 && (std::uint64_t(n) * (n - 1)) % (std::uint64_t(s) * (s - 1)) == 0;
}

struct PackCliquesConfig {
    std::uint64_t seed = 1;
    bool exact_when_possible = true;
    std::uint64_t node_budget = 200000; ///< per attempt
    int attempts = 5;
    int greedy_rounds = 50;
};

namespace detail {

class CliqueSearch {
public:
    CliqueSearch(std::uint32_t n, std::uint32_t s, Rng & rng) :
        n_(n), s_(s), rng_(rng), covered_(std::size_t(n) * n, 0)
    {
    }

    /// Backtracking through the lowest uncovered edge. Returns true on a full decomposition.
    bool decompose(std::uint64_t budget)
    {
        budget_ = budget;
        return step();
    }

    /// Branch and bound for a largest packing: like decompose(), but the lowest open edge may
    /// also be given up. Keeps the largest packing seen.
    void maximize(std::uint64_t budget)
    {
        budget_ = budget;
        skipped_.assign(covered_.size(), 0);
        open_ = 0;
        for (Vertex v = 1; v < n_; ++v)
            for (Vertex u = 0; u < v; ++u)
                open_ += !covered(u, v);
        grow();
    }

    /// Adds random blocks until none fits.
    void greedy()
    {
        std::vector<std::pair<Vertex, Vertex>> open;
        for (Vertex v = 1; v < n_; ++v)
            for (Vertex u = 0; u < v; ++u)
                if (!covered(u, v))
                    open.push_back({u, v});
        shuffle(rng_, open);
        for (auto [u, v] : open) {
            if (covered(u, v))
                continue;
            auto cands = blocks_through(u, v, 64);
            if (!cands.empty())
                place(pick(rng_, cands));
        }
    }

    const std::vector<std::vector<Vertex>> & blocks() const { return blocks_; }
    const std::vector<std::vector<Vertex>> & best() const { return best_; }
    std::uint64_t nodes() const { return nodes_; }

private:
    bool covered(Vertex u, Vertex v) const { return covered_[std::size_t(u) * n_ + v]; }

    void grow()
    {
        if (++nodes_ > budget_)
            return;
        const std::size_t per = std::size_t(s_) * (s_ - 1) / 2;
        if (blocks_.size() + open_ / per <= best_.size())
            return;
        Vertex lu = 0, lv = 0;
        bool found = false;
        for (Vertex v = 1; v < n_ && !found; ++v)
            for (Vertex u = 0; u < v && !found; ++u)
                if (!covered(u, v) && !skipped_[std::size_t(u) * n_ + v]) {
                    lu = u;
                    lv = v;
                    found = true;
                }
        if (!found)
            return;
        auto cands = blocks_through(lu, lv, ~std::size_t(0));
        shuffle(rng_, cands);
        for (const auto & b : cands) {
            // every pair of b is open: none skipped, since skipped edges precede uv
            bool clean = true;
            for (std::size_t i = 0; i < b.size() && clean; ++i)
                for (std::size_t j = i + 1; j < b.size() && clean; ++j)
                    clean = !skipped_[std::size_t(b[i]) * n_ + b[j]];
            if (!clean)
                continue;
            place(b);
            open_ -= per;
            grow();
            open_ += per;
            unplace();
            if (nodes_ > budget_)
                return;
        }
        skipped_[std::size_t(lu) * n_ + lv] = 1;
        --open_;
        grow();
        ++open_;
        skipped_[std::size_t(lu) * n_ + lv] = 0;
    }

    void set_block(const std::vector<Vertex> & b, char value)
    {
        for (std::size_t i = 0; i < b.size(); ++i)
            for (std::size_t j = 0; j < b.size(); ++j)
                if (i != j)
                    covered_[std::size_t(b[i]) * n_ + b[j]] = value;
    }

    void place(const std::vector<Vertex> & b)
    {
        set_block(b, 1);
        blocks_.push_back(b);
        if (blocks_.size() > best_.size())
            best_ = blocks_;
    }

    void unplace()
    {
        set_block(blocks_.back(), 0);
        blocks_.pop_back();
    }

    // Up to `limit` s-sets through uv whose pairs are all uncovered.
    std::vector<std::vector<Vertex>> blocks_through(Vertex u, Vertex v, std::size_t limit)
    {
        std::vector<Vertex> common;
        for (Vertex w = 0; w < n_; ++w)
            if (w != u && w != v && !covered(u, w) && !covered(v, w))
                common.push_back(w);
        std::vector<std::vector<Vertex>> out;
        std::vector<Vertex> cur{u, v};
        extend(common, 0, cur, out, limit);
        for (auto & b : out)
            std::sort(b.begin(), b.end());
        return out;
    }

    void extend(const std::vector<Vertex> & pool, std::size_t from, std::vector<Vertex> & cur,
        std::vector<std::vector<Vertex>> & out, std::size_t limit)
    {
        if (out.size() >= limit)
            return;
        if (cur.size() == s_) {
            out.push_back(cur);
            return;
        }
        for (std::size_t i = from; i < pool.size(); ++i) {
            const Vertex w = pool[i];
            bool ok = true;
            for (std::size_t j = 2; j < cur.size() && ok; ++j)
                ok = !covered(cur[j], w);
            if (!ok)
                continue;
            cur.push_back(w);
            extend(pool, i + 1, cur, out, limit);
            cur.pop_back();
        }
    }

    bool step()
    {
        if (++nodes_ > budget_)
            return false;
        Vertex lu = 0, lv = 0;
        bool found = false;
        // lowest uncovered edge in colex order
        for (Vertex v = 1; v < n_ && !found; ++v)
            for (Vertex u = 0; u < v && !found; ++u)
                if (!covered(u, v)) {
                    lu = u;
                    lv = v;
                    found = true;
                }
        if (!found)
            return true;
        auto cands = blocks_through(lu, lv, ~std::size_t(0));
        shuffle(rng_, cands);
        for (const auto & b : cands) {
            place(b);
            if (step())
                return true;
            unplace();
            if (nodes_ > budget_)
                return false;
        }
        return false;
    }

    std::uint32_t n_, s_;
    Rng & rng_;
    std::vector<char> covered_, skipped_;
    std::size_t open_ = 0;
    std::vector<std::vector<Vertex>> blocks_, best_;
    std::uint64_t budget_ = 0, nodes_ = 0;
};

} // namespace detail

/// Edge-disjoint K_s packing of K_n. Admissible (n, s) get a backtracking search for a
/// decomposition; otherwise, or when the budget runs out, the largest packing found by random
/// greedy rounds and a budgeted branch and bound.
inline CliquePacking pack_cliques(std::uint32_t n, std::uint32_t s, const PackCliquesConfig & cfg = {})
{
    if (s != 4 && s != 6)
        throw ConfigError("clique packing supports s = 4 and s = 6");
    if (n < s)
        throw ConfigError("clique packing needs n >= s");
    CliquePacking out{n, s, {}, {}, false, 0};
    Rng rng(cfg.seed);
    std::vector<std::vector<Vertex>> best;
    bool done = false;
    if (cfg.exact_when_possible && decomposition_admissible(n, s)) {
        for (int a = 0; a < cfg.attempts && !done; ++a) {
            detail::CliqueSearch search(n, s, rng);
            done = search.decompose(cfg.node_budget);
            out.nodes += search.nodes();
            if (done)
                best = search.blocks();
        }
        out.fell_back = !done;
    }
    if (!done) {
        for (int r = 0; r < cfg.greedy_rounds; ++r) {
            detail::CliqueSearch search(n, s, rng);
            search.greedy();
            if (search.blocks().size() > best.size())
                best = search.blocks();
        }
        for (int a = 0; a < cfg.attempts; ++a) {
            detail::CliqueSearch search(n, s, rng);
            search.maximize(cfg.node_budget);
            out.nodes += search.nodes();
            if (search.best().size() > best.size())
                best = search.best();
        }
    }
    std::sort(best.begin(), best.end());
    out.blocks = std::move(best);
    const HostSpec host = HostSpec::complete(n);
    EdgeRanker ranker(host);
    std::vector<char> used(host.edge_count(), 0);
    for (const auto & b : out.blocks)
        for (std::size_t i = 0; i < b.size(); ++i)
            for (std::size_t j = i + 1; j < b.size(); ++j)
                used[ranker.pair(b[i], b[j])] = 1;
    for (EdgeId e = 0; e < used.size(); ++e)
        if (!used[e])
            out.leftover.push_back(e);
    return out;
}

/// Blocks pairwise share at most one vertex and the leftover list is exactly the uncovered edges.
inline bool packing_consistent(const CliquePacking & p)
{
    const HostSpec host = HostSpec::complete(p.n);
    EdgeRanker ranker(host);
    std::vector<int> hits(host.edge_count(), 0);
    for (const auto & b : p.blocks) {
        if (b.size() != p.s)
            return false;
        for (std::size_t i = 0; i < b.size(); ++i)
            for (std::size_t j = i + 1; j < b.size(); ++j)
                if (++hits[ranker.pair(b[i], b[j])] > 1)
                    return false;
    }
    std::vector<EdgeId> left;
    for (EdgeId e = 0; e < hits.size(); ++e)
        if (!hits[e])
            left.push_back(e);
    return left == p.leftover;
}

namespace detail {

inline void singleton_colors(Coloring & c, const CliquePacking & p, Color & next)
{
    for (EdgeId e : p.leftover)
        c.set_color(e, next++);
}

} // namespace detail

/// (P_7, 5): the rainbow coloring.
inline Coloring color_p7(std::uint32_t n)
{
    Coloring c(HostSpec::complete(n));
    for (EdgeId e = 0; e < c.edge_count(); ++e)
        c.set_color(e, Color(e));
    return c;
}

/// (P_6, 4): each K_4 block gets three colors, one per perfect matching; leftover edges get their own colors.
inline Coloring color_p6(const CliquePacking & p)
{
    if (p.s != 4)
        throw ConfigError("color_p6 needs a K_4 packing");
    const HostSpec host = HostSpec::complete(p.n);
    EdgeRanker r(host);
    Coloring c(host);
    Color next = 0;
    for (const auto & b : p.blocks) {
        const Vertex w = b[0], x = b[1], y = b[2], z = b[3];
        c.set_color(r.pair(w, x), next);
        c.set_color(r.pair(y, z), next++);
        c.set_color(r.pair(w, y), next);
        c.set_color(r.pair(x, z), next++);
        c.set_color(r.pair(w, z), next);
        c.set_color(r.pair(x, y), next++);
    }
    detail::singleton_colors(c, p, next);
    return c;
}

inline Coloring color_p6(std::uint32_t n, std::uint64_t seed)
{
    if (n < 4)
        return color_p7(n);
    PackCliquesConfig cfg;
    cfg.seed = seed;
    return color_p6(pack_cliques(n, 4, cfg));
}

/// Proper (P_8, 5): block vertices a1 b1 a2 b2 a3 b3 in sorted order; one color on the a_i b_i
/// matching, and for i < j one color on {a_i a_j, b_i b_j} and one on {a_i b_j, b_i a_j}.
inline Coloring color_p8_proper(const CliquePacking & p)
{
    if (p.s != 6)
        throw ConfigError("color_p8_proper needs a K_6 packing");
    const HostSpec host = HostSpec::complete(p.n);
    EdgeRanker r(host);
    Coloring c(host);
    Color next = 0;
    for (const auto & blk : p.blocks) {
        const Vertex a[3] = {blk[0], blk[2], blk[4]}, b[3] = {blk[1], blk[3], blk[5]};
        for (int i = 0; i < 3; ++i)
            c.set_color(r.pair(a[i], b[i]), next);
        ++next;
        for (int i = 0; i < 3; ++i)
            for (int j = i + 1; j < 3; ++j) {
                c.set_color(r.pair(a[i], a[j]), next);
                c.set_color(r.pair(b[i], b[j]), next++);
                c.set_color(r.pair(a[i], b[j]), next);
                c.set_color(r.pair(b[i], a[j]), next++);
            }
    }
    detail::singleton_colors(c, p, next);
    return c;
}

inline Coloring color_p8_proper(std::uint32_t n, std::uint64_t seed)
{
    if (n < 6)
        return color_p7(n);
    PackCliquesConfig cfg;
    cfg.seed = seed;
    return color_p8_proper(pack_cliques(n, 6, cfg));
}

} // namespace grc
