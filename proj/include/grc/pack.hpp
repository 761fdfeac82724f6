#pragma once

// Stage 1: randomized greedy packing of monochromatic tiles under explicit conflict predicates.
//
//   pack_complete   K_n,   monochromatic K_{k-1} tiles, no 2-colored cycle of length in [k, ell]
//   pack_bipartite  K_n,n, monochromatic K_{a,k-1} tiles (either orientation), no 2-colored C_2k
//   pack_hyper      K_n^k, K_{k+1}^k tiles with k colors, no K_{k+2}^k with a color deficit of 2

#include <grc/bounds.hpp>
#include <grc/combinatorics.hpp>
#include <grc/core.hpp>
#include <grc/rng.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

namespace grc {

enum class TileKind { Clique, Bipartite, Hyper };

struct Tile {
    TileKind kind = TileKind::Clique;
    /// Clique: the k-1 vertices. Bipartite: the left side. Hyper: the k+1 vertices.
    std::vector<Vertex> a;
    /// Bipartite: the right side. Empty otherwise.
    std::vector<Vertex> b;
    /// Clique, Bipartite: one color. Hyper: colors[j] is the color of the edge a minus a[j].
    std::vector<Color> colors;

    friend bool operator==(const Tile &, const Tile &) = default;
};

/// Uniform: a uniform vertex set and color per candidate, rejected unless feasible.
/// Anchored: a uniform uncolored edge grown into a tile through uncolored edges and free slots,
/// with a color drawn from those still free at every tile vertex.
enum class Sampling { Anchored, Uniform };

struct PackConfig {
    std::uint64_t seed = 1;
    Sampling sampling = Sampling::Anchored;
    std::uint32_t ell = 0; ///< 0 means ell = k
    double delta = 0.15;
    std::uint64_t stall_limit = 0; ///< 0 means 50 n
    std::uint64_t max_candidates = 0; ///< 0 means 5000 n
};

struct PackStats {
    std::uint64_t candidates = 0;
    std::uint64_t accepted = 0;
    std::uint64_t rejected_overlap = 0;
    std::uint64_t rejected_slot = 0;
    std::uint64_t rejected_conflict = 0;
};

struct PackState {
    Coloring coloring;
    std::vector<Tile> tiles;
    Color palette = 0;
    PackStats stats;
    /// Target parameters: forbidden cycle lengths [k, ell] (complete), C_2k (bipartite), K_{k+2}^k (uniform).
    std::uint32_t k = 0;
    std::uint32_t ell = 0;

    double coverage() const
    {
        return coloring.edge_count() ? double(coloring.colored_count()) / double(coloring.edge_count()) : 1.0;
    }

    friend bool operator==(const PackState & x, const PackState & y)
    {
        return x.coloring == y.coloring && x.tiles == y.tiles && x.palette == y.palette;
    }
};

namespace detail {

inline void sample_distinct(Rng & rng, Vertex lo, Vertex hi, std::uint32_t count, std::vector<Vertex> & out)
{
    out.clear();
    while (out.size() < count) {
        Vertex v = lo + Vertex(rng.below(hi - lo));
        if (std::find(out.begin(), out.end(), v) == out.end())
            out.push_back(v);
    }
    std::sort(out.begin(), out.end());
}

// Uncolored edges with O(1) removal and uniform draws.
class EdgePool {
public:
    explicit EdgePool(const Coloring & coloring) : pos_(coloring.edge_count(), kAbsent)
    {
        for (EdgeId e = 0; e < coloring.edge_count(); ++e)
            if (!coloring.is_colored(e)) {
                pos_[e] = items_.size();
                items_.push_back(e);
            }
    }

    bool empty() const { return items_.empty(); }
    std::size_t size() const { return items_.size(); }
    EdgeId sample(Rng & rng) const { return items_[rng.below(items_.size())]; }

    void remove(EdgeId e)
    {
        const std::size_t i = pos_[e];
        if (i == kAbsent)
            return;
        items_[i] = items_.back();
        pos_[items_[i]] = i;
        items_.pop_back();
        pos_[e] = kAbsent;
    }

private:
    static constexpr std::size_t kAbsent = ~std::size_t(0);
    std::vector<std::size_t> pos_;
    std::vector<EdgeId> items_;
};

inline void resolve_limits(PackConfig & cfg, std::uint32_t n, std::uint32_t k)
{
    if (cfg.ell == 0)
        cfg.ell = k;
    if (cfg.stall_limit == 0)
        cfg.stall_limit = 50ull * n;
    if (cfg.max_candidates == 0)
        cfg.max_candidates = 5000ull * n;
    if (!(cfg.delta > 0 && cfg.delta < 0.5))
        throw ConfigError("delta must lie in (0, 1/2)");
}

// Graph tile packing shared by the complete and bipartite hosts. Each vertex lies in at most
// one tile per color, so color-c neighbours of v are the other side(s) of tile_of[v][c].
class GraphTiles {
public:
    GraphTiles(const HostSpec & host, Color palette) :
        host_(host), ranker_(host), palette_(palette), tile_of_(std::size_t(host.vertex_count()) * palette, kNone)
    {
    }

    static constexpr std::uint32_t kNone = ~std::uint32_t(0);

    std::uint32_t tile_at(Vertex v, Color c) const { return tile_of_[std::size_t(v) * palette_ + c]; }
    const std::vector<Tile> & tiles() const { return tiles_; }
    const EdgeRanker & ranker() const { return ranker_; }

    void push(const Tile & t)
    {
        const std::uint32_t id = std::uint32_t(tiles_.size());
        tiles_.push_back(t);
        for (Vertex v : t.a)
            tile_of_[std::size_t(v) * palette_ + t.colors[0]] = id;
        for (Vertex v : t.b)
            tile_of_[std::size_t(v) * palette_ + t.colors[0]] = id;
    }

    void pop()
    {
        const Tile & t = tiles_.back();
        for (Vertex v : t.a)
            tile_of_[std::size_t(v) * palette_ + t.colors[0]] = kNone;
        for (Vertex v : t.b)
            tile_of_[std::size_t(v) * palette_ + t.colors[0]] = kNone;
        tiles_.pop_back();
    }

    // Calls f(w) for each color-c neighbour of v.
    template <class F>
    void neighbours(Vertex v, Color c, F && f) const
    {
        std::uint32_t id = tile_at(v, c);
        if (id == kNone)
            return;
        const Tile & t = tiles_[id];
        if (t.kind == TileKind::Clique) {
            for (Vertex w : t.a)
                if (w != v)
                    f(w);
        }
        else {
            const auto & other = std::find(t.a.begin(), t.a.end(), v) != t.a.end() ? t.b : t.a;
            for (Vertex w : other)
                f(w);
        }
    }

    // True if the (already pushed) last tile closes a cycle with colors {i, j} of length in [lo, hi]
    // through one of its edges.
    bool closes_two_colored_cycle(std::uint32_t lo, std::uint32_t hi)
    {
        const Tile & t = tiles_.back();
        const Color i = t.colors[0];
        std::vector<Color> others;
        auto collect = [&](Vertex v) {
            for (Color c = 0; c < palette_; ++c)
                if (c != i && tile_at(v, c) != kNone)
                    others.push_back(c);
        };
        for (Vertex v : t.a)
            collect(v);
        for (Vertex v : t.b)
            collect(v);
        std::sort(others.begin(), others.end());
        others.erase(std::unique(others.begin(), others.end()), others.end());
        if (others.empty())
            return false;
        used_.assign(host_.vertex_count(), 0);
        // Edges of the tile, as (x, y) pairs.
        std::vector<std::pair<Vertex, Vertex>> edges;
        if (t.kind == TileKind::Clique) {
            for (std::size_t p = 0; p < t.a.size(); ++p)
                for (std::size_t q = p + 1; q < t.a.size(); ++q)
                    edges.push_back({t.a[p], t.a[q]});
        }
        else
            for (Vertex x : t.a)
                for (Vertex y : t.b)
                    edges.push_back({x, y});
        for (Color j : others)
            for (auto [x, y] : edges) {
                // simple paths y -> x of length lo-1 .. hi-1 avoiding edge xy, colors {i, j}
                used_[y] = 1;
                bool found = path_search(y, x, 1, lo, hi, i, j, x, y);
                used_[y] = 0;
                if (found)
                    return true;
            }
        return false;
    }

private:
    bool path_search(Vertex w, Vertex target, std::uint32_t len, std::uint32_t lo, std::uint32_t hi, Color i, Color j,
        Vertex ex, Vertex ey)
    {
        // len counts edges of the cycle so far, including the tile edge (ex, ey)
        bool found = false;
        for (Color c : {i, j}) {
            neighbours(w, c, [&](Vertex z) {
                if (found)
                    return;
                if (z == target) {
                    if (!(w == ey && z == ex) && len + 1 >= lo && len + 1 <= hi)
                        found = true;
                    return;
                }
                if (used_[z] || len + 2 > hi)
                    return;
                used_[z] = 1;
                found = path_search(z, target, len + 1, lo, hi, i, j, ex, ey);
                used_[z] = 0;
            });
            if (found)
                return true;
        }
        return false;
    }

    HostSpec host_;
    EdgeRanker ranker_;
    Color palette_;
    std::vector<std::uint32_t> tile_of_;
    std::vector<Tile> tiles_;
    std::vector<char> used_;
};

} // namespace detail

/// Palette for K_{k-1} tiles: ceil(n / (k - 2)).
inline Color complete_palette(std::uint32_t n, std::uint32_t k) { return Color((n + k - 3) / (k - 2)); }

inline PackState pack_complete(std::uint32_t n, std::uint32_t k, PackConfig cfg)
{
    if (k < 4)
        throw ConfigError("cycle packing needs k >= 4");
    if (n < 2 * (k - 1))
        throw ConfigError("cycle packing needs n >= 2(k-1)");
    detail::resolve_limits(cfg, n, k);
    if (cfg.ell < k)
        throw ConfigError("ell must be at least k");
    const auto host = HostSpec::complete(n);
    PackState st{Coloring(host), {}, complete_palette(n, k), {}, k, cfg.ell};
    st.coloring.reserve_palette(st.palette);
    detail::GraphTiles tiles(host, st.palette);
    detail::EdgePool pool(st.coloring);
    Rng rng(cfg.seed);
    std::vector<Vertex> verts, cand;
    std::vector<Color> free;
    std::uint64_t stall = 0;
    while (st.stats.candidates < cfg.max_candidates && stall < cfg.stall_limit) {
        ++st.stats.candidates;
        ++stall;
        Color c = 0;
        if (cfg.sampling == Sampling::Uniform) {
            detail::sample_distinct(rng, 0, n, k - 1, verts);
            c = Color(rng.below(st.palette));
        }
        else {
            if (pool.empty())
                break;
            verts = unrank_edge(host, pool.sample(rng));
            while (verts.size() < k - 1) {
                cand.clear();
                for (Vertex w = 0; w < n; ++w)
                    if (std::all_of(verts.begin(), verts.end(),
                            [&](Vertex v) { return v != w && !st.coloring.is_colored(tiles.ranker().pair(v, w)); }))
                        cand.push_back(w);
                if (cand.empty())
                    break;
                verts.push_back(pick(rng, cand));
            }
            free.clear();
            if (verts.size() == k - 1)
                for (Color x = 0; x < st.palette; ++x)
                    if (std::all_of(verts.begin(), verts.end(),
                            [&](Vertex v) { return tiles.tile_at(v, x) == detail::GraphTiles::kNone; }))
                        free.push_back(x);
            if (free.empty()) {
                ++st.stats.rejected_overlap;
                continue;
            }
            std::sort(verts.begin(), verts.end());
            shuffle(rng, free);
            c = free[0];
        }
        if (cfg.sampling == Sampling::Uniform)
            free.assign(1, c);
        bool ok = true;
        for (std::size_t p = 0; p < verts.size() && ok; ++p) {
            if (tiles.tile_at(verts[p], c) != detail::GraphTiles::kNone)
                ok = false;
            for (std::size_t q = p + 1; q < verts.size() && ok; ++q)
                if (st.coloring.is_colored(tiles.ranker().pair(verts[p], verts[q])))
                    ok = false;
        }
        if (!ok) {
            ++st.stats.rejected_overlap;
            continue;
        }
        // the first free color that closes no short 2-colored cycle
        bool placed = false;
        for (Color x : free) {
            tiles.push(Tile{TileKind::Clique, verts, {}, {x}});
            if (!tiles.closes_two_colored_cycle(k, cfg.ell)) {
                c = x;
                placed = true;
                break;
            }
            tiles.pop();
        }
        if (!placed) {
            ++st.stats.rejected_conflict;
            continue;
        }
        for (std::size_t p = 0; p < verts.size(); ++p)
            for (std::size_t q = p + 1; q < verts.size(); ++q) {
                const EdgeId e = tiles.ranker().pair(verts[p], verts[q]);
                st.coloring.set_color(e, c);
                pool.remove(e);
            }
        ++st.stats.accepted;
        stall = 0;
    }
    st.tiles = tiles.tiles();
    return st;
}

/// Palette for K_{a,k-1} tiles: ceil((1/(2(k-1)) + 1/(2a)) n).
inline Color bipartite_palette(std::uint32_t n, std::uint32_t k)
{
    return Color(static_cast<std::uint64_t>(ceil_of(bipartite_bounds(n, k).upper)));
}

inline PackState pack_bipartite(std::uint32_t n, std::uint32_t k, PackConfig cfg)
{
    if (k < 3)
        throw ConfigError("bipartite packing needs k >= 3");
    const std::uint32_t a = std::uint32_t(a_of_k(k));
    if (n < a)
        throw ConfigError("bipartite packing needs n >= a(k)");
    detail::resolve_limits(cfg, n, k);
    const auto host = HostSpec::bipartite(n);
    PackState st{Coloring(host), {}, bipartite_palette(n, k), {}, k, 2 * k};
    st.coloring.reserve_palette(st.palette);
    detail::GraphTiles tiles(host, st.palette);
    Rng rng(cfg.seed);

    // E': same-side pairs kept independently with probability p; consumed once used by a tile.
    const Rational p = p_of_k(k);
    const auto p_num = static_cast<std::uint64_t>(boost::multiprecision::numerator(p));
    const auto p_den = static_cast<std::uint64_t>(boost::multiprecision::denominator(p));
    const Vertex V = 2 * n;
    std::vector<char> eprime(std::size_t(V) * V, 0), consumed(std::size_t(V) * V, 0);
    for (int side = 0; side < 2; ++side)
        for (Vertex v = 1; v < n; ++v)
            for (Vertex u = 0; u < v; ++u) {
                const Vertex x = u + side * n, y = v + side * n;
                if (rng.chance(p_num, p_den))
                    eprime[std::size_t(x) * V + y] = eprime[std::size_t(y) * V + x] = 1;
            }

    detail::EdgePool pool(st.coloring);
    std::vector<Vertex> left, right, cand;
    std::vector<Color> free;
    std::uint64_t stall = 0;
    auto pairs_free = [&](const std::vector<Vertex> & side) {
        for (std::size_t i = 0; i < side.size(); ++i)
            for (std::size_t j = i + 1; j < side.size(); ++j) {
                const std::size_t idx = std::size_t(side[i]) * V + side[j];
                if (!eprime[idx] || consumed[idx])
                    return false;
            }
        return true;
    };
    auto consume = [&](const std::vector<Vertex> & side) {
        for (std::size_t i = 0; i < side.size(); ++i)
            for (std::size_t j = i + 1; j < side.size(); ++j)
                consumed[std::size_t(side[i]) * V + side[j]] = consumed[std::size_t(side[j]) * V + side[i]] = 1;
    };
    while (st.stats.candidates < cfg.max_candidates && stall < cfg.stall_limit) {
        ++st.stats.candidates;
        ++stall;
        const bool wide_left = rng.below(2) == 0;
        const std::uint32_t need_left = wide_left ? a : k - 1, need_right = wide_left ? k - 1 : a;
        Color c = 0;
        if (cfg.sampling == Sampling::Uniform) {
            detail::sample_distinct(rng, 0, n, need_left, left);
            detail::sample_distinct(rng, n, 2 * n, need_right, right);
            c = Color(rng.below(st.palette));
        }
        else {
            if (pool.empty())
                break;
            auto ev = unrank_edge(host, pool.sample(rng));
            left.assign(1, ev[0]);
            right.assign(1, ev[1]);
            bool stuck = false;
            while (!stuck && (left.size() < need_left || right.size() < need_right)) {
                bool grow_left = left.size() < need_left;
                if (grow_left && right.size() < need_right)
                    grow_left = rng.below(2) == 0;
                auto & mine = grow_left ? left : right;
                const auto & theirs = grow_left ? right : left;
                const Vertex lo = grow_left ? 0 : n;
                cand.clear();
                for (Vertex w = lo; w < lo + n; ++w) {
                    if (std::find(mine.begin(), mine.end(), w) != mine.end())
                        continue;
                    bool fits = std::all_of(theirs.begin(), theirs.end(),
                        [&](Vertex z) { return !st.coloring.is_colored(tiles.ranker().pair(w, z)); });
                    for (std::size_t i = 0; fits && i < mine.size(); ++i) {
                        const std::size_t idx = std::size_t(w) * V + mine[i];
                        fits = eprime[idx] && !consumed[idx];
                    }
                    if (fits)
                        cand.push_back(w);
                }
                if (cand.empty())
                    stuck = true;
                else
                    mine.push_back(pick(rng, cand));
            }
            free.clear();
            if (!stuck)
                for (Color x = 0; x < st.palette; ++x) {
                    auto open = [&](Vertex v) { return tiles.tile_at(v, x) == detail::GraphTiles::kNone; };
                    if (std::all_of(left.begin(), left.end(), open) && std::all_of(right.begin(), right.end(), open))
                        free.push_back(x);
                }
            if (free.empty()) {
                ++st.stats.rejected_overlap;
                continue;
            }
            std::sort(left.begin(), left.end());
            std::sort(right.begin(), right.end());
            shuffle(rng, free);
            c = free[0];
        }
        if (cfg.sampling == Sampling::Uniform)
            free.assign(1, c);
        bool ok = true;
        for (Vertex x : left) {
            if (tiles.tile_at(x, c) != detail::GraphTiles::kNone)
                ok = false;
            for (Vertex y : right)
                if (st.coloring.is_colored(tiles.ranker().pair(x, y)))
                    ok = false;
        }
        for (Vertex y : right)
            if (tiles.tile_at(y, c) != detail::GraphTiles::kNone)
                ok = false;
        if (!ok) {
            ++st.stats.rejected_overlap;
            continue;
        }
        if (!pairs_free(left) || !pairs_free(right)) {
            ++st.stats.rejected_slot;
            continue;
        }
        bool placed = false;
        for (Color x : free) {
            tiles.push(Tile{TileKind::Bipartite, left, right, {x}});
            if (!tiles.closes_two_colored_cycle(2 * k, 2 * k)) {
                c = x;
                placed = true;
                break;
            }
            tiles.pop();
        }
        if (!placed) {
            ++st.stats.rejected_conflict;
            continue;
        }
        consume(left);
        consume(right);
        for (Vertex x : left)
            for (Vertex y : right) {
                const EdgeId e = tiles.ranker().pair(x, y);
                st.coloring.set_color(e, c);
                pool.remove(e);
            }
        ++st.stats.accepted;
        stall = 0;
    }
    st.tiles = tiles.tiles();
    return st;
}

// ---------------------------------------------------------------------------

/// Host for the uniform construction; k = 2 falls back to K_n.
inline HostSpec hyper_host(std::uint32_t n, std::uint32_t k)
{
    return k == 2 ? HostSpec::complete(n) : HostSpec::uniform(n, k);
}

/// rho = n^-delta.
inline double hyper_rho(std::uint32_t n, double delta) { return std::pow(double(n), -delta); }

/// Palette ceil((1 + rho) (k^2 + k - 1) / (k^2 + k) n).
inline Color hyper_palette(std::uint32_t n, std::uint32_t k, double delta)
{
    const double coeff = double(k * k + k - 1) / double(k * k + k);
    return Color(std::ceil((1.0 + hyper_rho(n, delta)) * coeff * double(n) - 1e-9));
}

namespace detail {

class HyperPacker {
public:
    HyperPacker(std::uint32_t n, std::uint32_t k, const PackConfig & cfg) :
        n_(n), k_(k), host_(hyper_host(n, k)), ranker_(host_), sets_(std::uint32_t(binomial(n, k - 1))),
        rng_(cfg.seed), cfg_(cfg)
    {
        st_.coloring = Coloring(host_);
        st_.k = k;
        st_.ell = k + 2;
        st_.palette = hyper_palette(n, k, cfg.delta);
        st_.coloring.reserve_palette(st_.palette);
        if (st_.palette < k)
            throw ConfigError("palette smaller than k");
        // Slot (S, i) alive with probability 1 - p, p = rho / (1 + rho).
        const double rho = hyper_rho(n, cfg.delta);
        const double p = rho / (1.0 + rho);
        const std::uint64_t scale = std::uint64_t(1) << 32;
        const std::uint64_t dead_num = std::uint64_t(std::llround(p * double(scale)));
        slot_.assign(std::size_t(sets_) * st_.palette, kAlive);
        for (auto & s : slot_)
            if (rng_.chance(dead_num, scale))
                s = kDead;
        centers_.resize(sets_);
        pool_ = EdgePool(st_.coloring);
    }

    PackState run()
    {
        std::vector<Vertex> X;
        std::uint64_t stall = 0;
        const std::uint32_t edges_in_tile = k_ + 1;
        std::vector<Color> colors(edges_in_tile);
        while (st_.stats.candidates < cfg_.max_candidates && stall < cfg_.stall_limit) {
            ++st_.stats.candidates;
            ++stall;
            // repeated pair (r1, r2) of edge indices, then k distinct colors
            std::uint32_t r1 = std::uint32_t(rng_.below(edges_in_tile));
            std::uint32_t r2 = std::uint32_t(rng_.below(edges_in_tile - 1));
            if (r2 >= r1)
                ++r2;
            if (cfg_.sampling == Sampling::Uniform) {
                sample_distinct(rng_, 0, n_, k_ + 1, X);
                std::vector<Color> pick;
                while (pick.size() < k_) {
                    Color c = Color(rng_.below(st_.palette));
                    if (std::find(pick.begin(), pick.end(), c) == pick.end())
                        pick.push_back(c);
                }
                std::size_t next = 1;
                for (std::uint32_t j = 0; j < edges_in_tile; ++j)
                    colors[j] = (j == r1 || j == r2) ? pick[0] : pick[next++];
            }
            else {
                if (pool_.empty())
                    break;
                if (!anchored(X, colors, r1, r2)) {
                    ++st_.stats.rejected_slot;
                    continue;
                }
            }
            Tile t{TileKind::Hyper, X, {}, colors};
            if (!try_accept(t, r1, r2))
                continue;
            stall = 0;
        }
        return std::move(st_);
    }

private:
    static constexpr char kAlive = 0, kDead = 1, kUsed = 2;

    // Grows a uniform uncolored edge by one vertex into an uncolored K_{k+1}^k and assigns
    // colors whose slots are open on every edge.
    bool anchored(std::vector<Vertex> & X, std::vector<Color> & colors, std::uint32_t r1, std::uint32_t r2)
    {
        X = unrank_edge(host_, pool_.sample(rng_));
        std::vector<Vertex> cand, buf;
        for (Vertex w = 0; w < n_; ++w) {
            if (std::binary_search(X.begin(), X.end(), w))
                continue;
            bool open = true;
            for (std::uint32_t drop = 0; drop < k_ && open; ++drop) {
                buf.clear();
                for (std::uint32_t m = 0; m < k_; ++m)
                    if (m != drop)
                        buf.push_back(X[m]);
                buf.push_back(w);
                open = !st_.coloring.is_colored(ranker_.unsorted(buf));
            }
            if (open)
                cand.push_back(w);
        }
        if (cand.empty())
            return false;
        X.push_back(pick(rng_, cand));
        std::sort(X.begin(), X.end());
        // feasible colors per edge
        const std::uint32_t m = k_ + 1;
        std::vector<std::vector<Color>> feasible(m);
        std::vector<std::uint32_t> ranks;
        for (std::uint32_t j = 0; j < m; ++j) {
            buf.clear();
            for (std::uint32_t t = 0; t < m; ++t)
                if (t != j)
                    buf.push_back(X[t]);
            ranks.clear();
            for_each_subset(buf, k_ - 1, [&](std::span<const Vertex> s) {
                ranks.push_back(set_rank(s));
                return true;
            });
            for (Color c = 0; c < st_.palette; ++c)
                if (std::all_of(ranks.begin(), ranks.end(),
                        [&](std::uint32_t r) { return slot_[std::size_t(r) * st_.palette + c] == kAlive; }))
                    feasible[j].push_back(c);
        }
        std::vector<Color> common;
        std::set_intersection(feasible[r1].begin(), feasible[r1].end(), feasible[r2].begin(), feasible[r2].end(),
            std::back_inserter(common));
        if (common.empty())
            return false;
        const Color rep = pick(rng_, common);
        std::vector<Color> taken{rep};
        for (std::uint32_t j = 0; j < m; ++j) {
            if (j == r1 || j == r2) {
                colors[j] = rep;
                continue;
            }
            cand.clear();
            std::vector<Color> options;
            for (Color c : feasible[j])
                if (std::find(taken.begin(), taken.end(), c) == taken.end())
                    options.push_back(c);
            if (options.empty())
                return false;
            colors[j] = pick(rng_, options);
            taken.push_back(colors[j]);
        }
        return true;
    }

    EdgeId tile_edge(const Tile & t, std::uint32_t j, std::vector<Vertex> & buf) const
    {
        buf.clear();
        for (std::uint32_t m = 0; m < t.a.size(); ++m)
            if (m != j)
                buf.push_back(t.a[m]);
        return ranker_.sorted(buf);
    }

    std::uint32_t set_rank(std::span<const Vertex> s) const { return std::uint32_t(colex_rank(s)); }

    bool try_accept(const Tile & t, std::uint32_t r1, std::uint32_t r2)
    {
        const std::uint32_t m = k_ + 1;
        std::vector<Vertex> buf;
        std::vector<EdgeId> edges(m);
        for (std::uint32_t j = 0; j < m; ++j) {
            edges[j] = tile_edge(t, j, buf);
            if (st_.coloring.is_colored(edges[j])) {
                ++st_.stats.rejected_overlap;
                return false;
            }
        }
        // slots: every (k-1)-subset of every edge, with that edge's color
        std::vector<std::size_t> slots;
        for (std::uint32_t j = 0; j < m; ++j) {
            tile_edge(t, j, buf);
            for_each_subset(buf, k_ - 1, [&](std::span<const Vertex> s) {
                slots.push_back(std::size_t(set_rank(s)) * st_.palette + t.colors[j]);
                return true;
            });
        }
        std::sort(slots.begin(), slots.end());
        slots.erase(std::unique(slots.begin(), slots.end()), slots.end());
        for (auto s : slots)
            if (slot_[s] != kAlive) {
                ++st_.stats.rejected_slot;
                return false;
            }
        // center of the repeated pair: X minus the two excluded vertices
        std::vector<Vertex> center;
        for (std::uint32_t j = 0; j < m; ++j)
            if (j != r1 && j != r2)
                center.push_back(t.a[j]);
        const std::uint32_t center_rank = set_rank(center);
        const Color rep = t.colors[r1];
        if (!property_two_ok(t, edges, center, rep)) {
            ++st_.stats.rejected_conflict;
            return false;
        }
        // tentatively color, then inspect every (k+2)-set that contains a tile edge
        for (std::uint32_t j = 0; j < m; ++j)
            st_.coloring.set_color(edges[j], t.colors[j]);
        if (!clique_sets_ok(t)) {
            for (std::uint32_t j = 0; j < m; ++j)
                st_.coloring.set_color(edges[j], kUncolored);
            ++st_.stats.rejected_conflict;
            return false;
        }
        for (auto s : slots)
            slot_[s] = kUsed;
        for (EdgeId e : edges)
            pool_.remove(e);
        centers_[center_rank].push_back(std::uint32_t(st_.tiles.size()));
        st_.tiles.push_back(t);
        ++st_.stats.accepted;
        return true;
    }

    // The repeated pair's center may not lie in an edge of the tile's other colors, and the new
    // tile's edges may not contain an existing center together with one of that tile's other colors.
    bool property_two_ok(const Tile & t, const std::vector<EdgeId> & edges, const std::vector<Vertex> & center, Color rep)
    {
        std::vector<Color> others;
        for (Color c : t.colors)
            if (c != rep)
                others.push_back(c);
        std::vector<Vertex> buf(k_);
        for (Vertex w = 0; w < n_; ++w) {
            if (std::binary_search(t.a.begin(), t.a.end(), w))
                continue;
            std::copy(center.begin(), center.end(), buf.begin());
            buf[k_ - 1] = w;
            Color c = st_.coloring.color(ranker_.unsorted(buf));
            if (c != kUncolored && std::find(others.begin(), others.end(), c) != others.end())
                return false;
        }
        std::vector<Vertex> ev;
        for (std::uint32_t j = 0; j < edges.size(); ++j) {
            tile_edge(t, j, ev);
            bool bad = false;
            for_each_subset(ev, k_ - 1, [&](std::span<const Vertex> s) {
                for (std::uint32_t id : centers_[set_rank(s)]) {
                    const Tile & old = st_.tiles[id];
                    const Color old_rep = repeated_color(old);
                    if (t.colors[j] != old_rep &&
                        std::find(old.colors.begin(), old.colors.end(), t.colors[j]) != old.colors.end()) {
                        bad = true;
                        return false;
                    }
                }
                return true;
            });
            if (bad)
                return false;
        }
        return true;
    }

    static Color repeated_color(const Tile & t)
    {
        for (std::size_t i = 0; i < t.colors.size(); ++i)
            for (std::size_t j = i + 1; j < t.colors.size(); ++j)
                if (t.colors[i] == t.colors[j])
                    return t.colors[i];
        return kUncolored;
    }

    // Every (k+2)-set meeting the tile in a full edge: colored edges minus distinct colors
    // must stay below 2, since later fresh colors can never repair a deficit of 2.
    bool clique_sets_ok(const Tile & t)
    {
        const std::uint32_t m = k_ + 1;
        std::vector<Vertex> Y, buf;
        std::vector<Color> seen;
        auto deficit_ok = [&](std::vector<Vertex> & y) {
            std::sort(y.begin(), y.end());
            seen.clear();
            std::uint32_t colored = 0;
            for_each_subset(y, k_, [&](std::span<const Vertex> e) {
                Color c = st_.coloring.color(ranker_.sorted(e));
                if (c != kUncolored) {
                    ++colored;
                    seen.push_back(c);
                }
                return true;
            });
            std::sort(seen.begin(), seen.end());
            const std::uint32_t distinct = std::uint32_t(std::unique(seen.begin(), seen.end()) - seen.begin());
            return colored - distinct < 2;
        };
        for (Vertex w = 0; w < n_; ++w) {
            if (std::binary_search(t.a.begin(), t.a.end(), w))
                continue;
            Y = t.a;
            Y.push_back(w);
            if (!deficit_ok(Y))
                return false;
        }
        for (std::uint32_t j = 0; j < m; ++j) {
            tile_edge(t, j, buf);
            for (Vertex w1 = 0; w1 < n_; ++w1) {
                if (std::binary_search(t.a.begin(), t.a.end(), w1))
                    continue;
                for (Vertex w2 = w1 + 1; w2 < n_; ++w2) {
                    if (std::binary_search(t.a.begin(), t.a.end(), w2))
                        continue;
                    Y = buf;
                    Y.push_back(w1);
                    Y.push_back(w2);
                    if (!deficit_ok(Y))
                        return false;
                }
            }
        }
        return true;
    }

    std::uint32_t n_, k_;
    HostSpec host_;
    EdgeRanker ranker_;
    std::uint32_t sets_;
    Rng rng_;
    PackConfig cfg_;
    PackState st_;
    std::vector<char> slot_;
    std::vector<std::vector<std::uint32_t>> centers_;
    EdgePool pool_{Coloring()};
};

} // namespace detail

inline PackState pack_hyper(std::uint32_t n, std::uint32_t k, PackConfig cfg)
{
    if (k < 2)
        throw ConfigError("uniform packing needs k >= 2");
    if (n < k + 2)
        throw ConfigError("uniform packing needs n >= k + 2");
    detail::resolve_limits(cfg, n, k);
    return detail::HyperPacker(n, k, cfg).run();
}

// ---------------------------------------------------------------------------
// Structural checks on stage-1 output

/// Every color class is a union of vertex-disjoint K_{k-1} (complete) or K_{a,k-1} (bipartite) tiles,
/// and the coloring is exactly the union of the tiles.
inline bool tiles_match_coloring(const PackState & st)
{
    const HostSpec & host = st.coloring.host();
    Coloring rebuilt(host);
    EdgeRanker ranker(host);
    std::vector<Vertex> buf;
    for (const Tile & t : st.tiles) {
        auto paint = [&](EdgeId e, Color c) {
            if (rebuilt.is_colored(e))
                return false;
            rebuilt.set_color(e, c);
            return true;
        };
        if (t.kind == TileKind::Clique) {
            for (std::size_t i = 0; i < t.a.size(); ++i)
                for (std::size_t j = i + 1; j < t.a.size(); ++j)
                    if (!paint(ranker.pair(t.a[i], t.a[j]), t.colors[0]))
                        return false;
        }
        else if (t.kind == TileKind::Bipartite) {
            for (Vertex x : t.a)
                for (Vertex y : t.b)
                    if (!paint(ranker.pair(x, y), t.colors[0]))
                        return false;
        }
        else
            for (std::size_t j = 0; j < t.a.size(); ++j) {
                buf.clear();
                for (std::size_t m = 0; m < t.a.size(); ++m)
                    if (m != j)
                        buf.push_back(t.a[m]);
                if (!paint(ranker.sorted(buf), t.colors[j]))
                    return false;
            }
    }
    for (EdgeId e = 0; e < host.edge_count(); ++e)
        if (rebuilt.color(e) != st.coloring.color(e))
            return false;
    return true;
}

/// Same-colored graph tiles are vertex-disjoint.
inline bool same_color_tiles_disjoint(const PackState & st)
{
    const Vertex V = st.coloring.host().vertex_count();
    std::vector<char> used(std::size_t(V) * std::max<Color>(st.palette, 1), 0);
    for (const Tile & t : st.tiles) {
        if (t.kind == TileKind::Hyper)
            continue;
        for (const auto * side : {&t.a, &t.b})
            for (Vertex v : *side) {
                char & u = used[std::size_t(v) * st.palette + t.colors[0]];
                if (u)
                    return false;
                u = 1;
            }
    }
    return true;
}

/// Any two tiles share at most one vertex.
inline bool tiles_share_at_most_one_vertex(const PackState & st)
{
    std::vector<std::vector<Vertex>> sets;
    for (const Tile & t : st.tiles) {
        std::vector<Vertex> s(t.a);
        s.insert(s.end(), t.b.begin(), t.b.end());
        std::sort(s.begin(), s.end());
        sets.push_back(std::move(s));
    }
    std::vector<Vertex> common;
    for (std::size_t i = 0; i < sets.size(); ++i)
        for (std::size_t j = i + 1; j < sets.size(); ++j) {
            common.clear();
            std::set_intersection(sets[i].begin(), sets[i].end(), sets[j].begin(), sets[j].end(), std::back_inserter(common));
            if (common.size() > 1)
                return false;
        }
    return true;
}

/// Each color class consists of single edges and pairs of edges meeting in k-1 vertices, and
/// edges from different components meet in at most k-2 vertices.
inline bool hyper_classes_ok(const Coloring & coloring)
{
    const HostSpec & host = coloring.host();
    const std::uint32_t k = host.k;
    std::vector<std::vector<EdgeId>> classes(coloring.palette_size());
    for (EdgeId e = 0; e < coloring.edge_count(); ++e)
        if (coloring.is_colored(e))
            classes[coloring.color(e)].push_back(e);
    std::vector<Vertex> x(k), y(k), common;
    for (const auto & cls : classes) {
        // adjacency: meeting in k-1 vertices
        std::vector<std::uint32_t> degree(cls.size(), 0);
        for (std::size_t i = 0; i < cls.size(); ++i) {
            unrank_edge(host, cls[i], x);
            for (std::size_t j = i + 1; j < cls.size(); ++j) {
                unrank_edge(host, cls[j], y);
                common.clear();
                std::set_intersection(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(common));
                if (common.size() == k - 1) {
                    ++degree[i];
                    ++degree[j];
                }
            }
        }
        // components of size <= 2 means every degree <= 1
        for (auto d : degree)
            if (d > 1)
                return false;
    }
    return true;
}

/// For every hyper tile, the center of the repeated pair lies in no edge of the tile's other colors.
inline bool hyper_property_two(const PackState & st)
{
    const HostSpec & host = st.coloring.host();
    EdgeRanker ranker(host);
    const std::uint32_t k = host.k;
    std::vector<Vertex> buf(k);
    for (const Tile & t : st.tiles) {
        if (t.kind != TileKind::Hyper)
            continue;
        std::size_t r1 = 0, r2 = 0;
        for (std::size_t i = 0; i < t.colors.size(); ++i)
            for (std::size_t j = i + 1; j < t.colors.size(); ++j)
                if (t.colors[i] == t.colors[j]) {
                    r1 = i;
                    r2 = j;
                }
        std::vector<Vertex> center;
        for (std::size_t j = 0; j < t.a.size(); ++j)
            if (j != r1 && j != r2)
                center.push_back(t.a[j]);
        for (Vertex w = 0; w < host.n; ++w) {
            if (std::find(center.begin(), center.end(), w) != center.end())
                continue;
            std::copy(center.begin(), center.end(), buf.begin());
            buf[k - 1] = w;
            Color c = st.coloring.color(ranker.unsorted(buf));
            if (c == kUncolored || c == t.colors[r1])
                continue;
            if (std::find(t.colors.begin(), t.colors.end(), c) != t.colors.end())
                return false;
        }
    }
    return true;
}

} // namespace grc
