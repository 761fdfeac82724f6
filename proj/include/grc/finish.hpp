#pragma once

// Stage 2: color the edges left uncolored by stage 1 from a fresh palette, resampling
// the leftover edges of any bad event until none fires.
//
// Graph hosts (cycle lengths [k, ell] in K_n, 2k in K_n,n):
//   A   two adjacent leftover edges share a color
//   B   an all-leftover cycle, properly colored with two fresh colors
//   C   a mixed cycle whose leftover edges share one color and stage-1 edges share another
// Uniform hosts:
//   HK  a K_{k+2}^k with at most C(k+2, k) - 2 colors
//
// Stage-1 edges hold no 2-colored forbidden cycle, so no event firing means every forbidden
// cycle sees three colors, and the leftover edges are properly colored.

#include <grc/core.hpp>
#include <grc/enumerate.hpp>
#include <grc/pack.hpp>
#include <grc/rng.hpp>

#include <cmath>
#include <deque>
#include <optional>
#include <vector>

namespace grc {

/// Uniform: textbook resampling. Avoiding: a resampled graph edge draws uniformly from the fresh
/// colors missing at both endpoints (uniform when none is), a hyperedge uniformly from the colors
/// that complete the fewest deficient (k+2)-sets.
enum class Resample { Uniform, Avoiding };

struct FinishConfig {
    std::uint64_t seed = 1;
    Resample resample = Resample::Avoiding;
    Color c2 = 0; ///< 0 means ceil(n^(1 - delta))
    double delta = 0.15;
    std::uint64_t max_resamples = 1000000;
};

enum class EventType { A, B, C, HK };

inline const char * event_name(EventType t)
{
    switch (t) {
    case EventType::A: return "A";
    case EventType::B: return "B";
    case EventType::C: return "C";
    case EventType::HK: return "HK";
    }
    return "?";
}

struct BadEvent {
    EventType type;
    /// A: the shared vertex. B, C: the cycle in vertex order. HK: the vertex set.
    std::vector<Vertex> verts;
    std::vector<EdgeId> edges;
};

struct FinishResult {
    Coloring coloring;
    bool finished = false;
    std::uint64_t resamples = 0;
    Color stage1_palette = 0;
    Color c2 = 0;
    /// Set when the resample cap was hit: events still firing at that point.
    std::uint64_t remaining_events = 0;
};

struct NotFinished : Error {
    std::uint64_t remaining_events;
    NotFinished(std::uint64_t remaining) :
        Error("resample cap exceeded with " + std::to_string(remaining) + " events firing"), remaining_events(remaining)
    {
    }
};

inline Color default_c2(std::uint32_t n, double delta)
{
    return std::max<Color>(2, Color(std::ceil(std::pow(double(n), 1.0 - delta) - 1e-9)));
}

/// floor(factor * n^exponent): a fresh palette sized for desk-scale n, where n^(1 - delta) is
/// below the leftover degree.
inline Color scaled_c2(std::uint32_t n, double factor = 2.5, double exponent = 0.9)
{
    return std::max<Color>(2, Color(factor * std::pow(double(n), exponent)));
}

/// Forbidden cycle lengths for graph targets.
inline std::pair<std::uint32_t, std::uint32_t> cycle_range(const PackState & st)
{
    if (st.coloring.host().mode == HostMode::Bipartite)
        return {2 * st.k, 2 * st.k};
    return {st.k, std::max(st.ell, st.k)};
}

namespace detail {

class Finisher {
public:
    Finisher(const PackState & st, const FinishConfig & cfg) :
        host_(st.coloring.host()), ranker_(host_), coloring_(st.coloring), p1_(st.palette), rng_(cfg.seed), cfg_(cfg),
        k_(st.k)
    {
        c2_ = cfg.c2 ? cfg.c2 : default_c2(host_.n, cfg.delta);
        if (c2_ < 2)
            throw ConfigError("fresh palette needs at least 2 colors");
        const Vertex V = host_.vertex_count();
        leftover_.assign(host_.edge_count(), 0);
        for (EdgeId e = 0; e < host_.edge_count(); ++e)
            if (!coloring_.is_colored(e)) {
                leftover_[e] = 1;
                edges_.push_back(e);
            }
        if (!edges_.empty())
            coloring_.reserve_palette(p1_ + c2_);
        if (host_.is_graph()) {
            std::tie(lo_, hi_) = cycle_range(st);
            stage1_adj_.resize(V);
            left_adj_.resize(V);
            cnt_.assign(std::size_t(V) * c2_, 0);
            std::vector<Vertex> ev(2);
            for (EdgeId e = 0; e < host_.edge_count(); ++e) {
                unrank_edge(host_, e, ev);
                if (leftover_[e]) {
                    left_adj_[ev[0]].push_back({ev[1], e});
                    left_adj_[ev[1]].push_back({ev[0], e});
                }
                else {
                    stage1_adj_[ev[0]].push_back({coloring_.color(e), ev[1]});
                    stage1_adj_[ev[1]].push_back({coloring_.color(e), ev[0]});
                }
            }
            for (auto & a : stage1_adj_)
                std::sort(a.begin(), a.end());
            used_.assign(V, 0);
        }
        else
            hk_limit_ = std::uint32_t(binomial(k_ + 2, k_)) - 2;
    }

    /// Takes the leftover colors from `assigned` instead of drawing them.
    void load(const Coloring & assigned)
    {
        for (EdgeId e : edges_) {
            const Color c = assigned.color(e);
            if (c < p1_ || c >= p1_ + c2_)
                throw ConfigError("leftover edge " + std::to_string(e) + " lacks a fresh color");
            paint(e, c);
        }
    }

    const std::vector<EdgeId> & leftover_edges() const { return edges_; }

    FinishResult run()
    {
        FinishResult r;
        r.stage1_palette = p1_;
        r.c2 = c2_;
        for (EdgeId e : edges_)
            paint(e, fresh());
        std::deque<EdgeId> queue(edges_.begin(), edges_.end());
        std::vector<char> queued(host_.edge_count(), 0);
        for (EdgeId e : edges_)
            queued[e] = 1;
        while (!queue.empty()) {
            const EdgeId e = queue.front();
            queue.pop_front();
            queued[e] = 0;
            auto ev = find_event(e);
            if (!ev)
                continue;
            if (r.resamples >= cfg_.max_resamples) {
                r.coloring = coloring_;
                r.resamples = cfg_.max_resamples;
                r.remaining_events = 1 + count_remaining(queue);
                return r;
            }
            ++r.resamples;
            for (EdgeId f : ev->edges) {
                if (!leftover_[f])
                    continue;
                paint(f, draw(f));
                if (!queued[f]) {
                    queued[f] = 1;
                    queue.push_back(f);
                }
            }
            if (!queued[e]) {
                queued[e] = 1;
                queue.push_back(e);
            }
        }
        r.finished = true;
        r.coloring = coloring_;
        return r;
    }

    /// First firing event containing leftover edge e: A, then B, then C (graph hosts), or HK.
    std::optional<BadEvent> find_event(EdgeId e)
    {
        if (!host_.is_graph())
            return find_hk(e);
        std::vector<Vertex> ev(2);
        unrank_edge(host_, e, ev);
        const Vertex u = ev[0], v = ev[1];
        const Color x = coloring_.color(e);
        for (Vertex a : {u, v})
            if (cnt_[std::size_t(a) * c2_ + (x - p1_)] > 1)
                for (auto [w, f] : left_adj_[a])
                    if (f != e && coloring_.color(f) == x)
                        return BadEvent{EventType::A, {a}, {std::min(e, f), std::max(e, f)}};
        // B: alternate y, x, y, ... from v back to u
        path_.assign(1, u);
        path_.push_back(v);
        path_edge0_ = e;
        used_[u] = used_[v] = 1;
        bool found = search_b(u, v, x, kUncolored, false);
        if (!found)
            found = search_c(u, v, x, kUncolored);
        std::optional<BadEvent> out;
        if (found) {
            BadEvent b{found_type_, path_, {}};
            for (std::size_t i = 0; i < path_.size(); ++i)
                b.edges.push_back(ranker_.pair(path_[i], path_[(i + 1) % path_.size()]));
            out = std::move(b);
        }
        for (Vertex w : path_)
            used_[w] = 0;
        return out;
    }

private:
    Color fresh() { return p1_ + Color(rng_.below(c2_)); }

    Color draw(EdgeId e)
    {
        if (cfg_.resample == Resample::Uniform)
            return fresh();
        blocked_.assign(c2_, 0);
        std::vector<Vertex> ev(host_.k);
        unrank_edge(host_, e, ev);
        if (host_.is_graph()) {
            for (Vertex a : ev)
                for (Color c = 0; c < c2_; ++c)
                    blocked_[c] |= cnt_[std::size_t(a) * c2_ + c] > 0;
            // e's own color counts at both endpoints
            blocked_[coloring_.color(e) - p1_] = 0;
            for (Vertex a : ev)
                if (cnt_[std::size_t(a) * c2_ + (coloring_.color(e) - p1_)] > 1)
                    blocked_[coloring_.color(e) - p1_] = 1;
        }
        else
            hk_penalties(e, ev);
        const std::uint32_t best = *std::min_element(blocked_.begin(), blocked_.end());
        if (host_.is_graph() && best > 0)
            return fresh();
        options_.clear();
        for (Color c = 0; c < c2_; ++c)
            if (blocked_[c] == best)
                options_.push_back(c);
        return p1_ + options_[rng_.below(options_.size())];
    }

    // blocked_[c]: the (k+2)-sets through e that would fire if e took fresh color c.
    void hk_penalties(EdgeId e, const std::vector<Vertex> & ev)
    {
        const std::uint32_t k = host_.k, total = std::uint32_t(binomial(k + 2, k));
        std::vector<Vertex> Y, rest;
        std::vector<Color> colors;
        for (Vertex w = 0; w < host_.n; ++w)
            if (!std::binary_search(ev.begin(), ev.end(), w))
                rest.push_back(w);
        for_each_subset(rest, 2, [&](std::span<const Vertex> extra) {
            Y = ev;
            Y.push_back(extra[0]);
            Y.push_back(extra[1]);
            std::sort(Y.begin(), Y.end());
            colors.clear();
            for_each_subset(Y, k, [&](std::span<const Vertex> s) {
                EdgeId f = ranker_.sorted(s);
                if (f != e)
                    colors.push_back(coloring_.color(f));
                return true;
            });
            std::sort(colors.begin(), colors.end());
            const auto end = std::unique(colors.begin(), colors.end());
            const std::uint32_t repeats = total - 1 - std::uint32_t(end - colors.begin());
            if (repeats >= 2) {
                for (auto & b : blocked_)
                    ++b;
            }
            else if (repeats == 1) {
                for (auto it = colors.begin(); it != end; ++it)
                    if (*it >= p1_)
                        ++blocked_[*it - p1_];
            }
            return true;
        });
    }

    void paint(EdgeId e, Color c)
    {
        if (host_.is_graph()) {
            std::vector<Vertex> ev(2);
            unrank_edge(host_, e, ev);
            const Color old = coloring_.color(e);
            if (old != kUncolored)
                for (Vertex a : ev)
                    --cnt_[std::size_t(a) * c2_ + (old - p1_)];
            for (Vertex a : ev)
                ++cnt_[std::size_t(a) * c2_ + (c - p1_)];
        }
        coloring_.set_color(e, c);
    }

    // path_ runs u, v, ..., w; the next edge wants x or y (y unset before the first step).
    bool search_b(Vertex u, Vertex w, Color x, Color y, bool want_x)
    {
        for (auto [z, f] : left_adj_[w]) {
            const Color c = coloring_.color(f);
            if (y == kUncolored ? c == x : c != (want_x ? x : y))
                continue;
            if (z == u) {
                if (path_.size() >= lo_ && path_.size() <= hi_) {
                    found_type_ = EventType::B;
                    return true;
                }
                continue;
            }
            if (used_[z] || path_.size() >= hi_)
                continue;
            used_[z] = 1;
            path_.push_back(z);
            if (search_b(u, z, x, y == kUncolored ? c : y, !want_x))
                return true;
            path_.pop_back();
            used_[z] = 0;
        }
        return false;
    }

    bool search_c(Vertex u, Vertex w, Color x, Color y)
    {
        auto step = [&](Vertex z, Color ny) -> bool {
            if (z == u) {
                if (ny != kUncolored && path_.size() >= lo_ && path_.size() <= hi_ && path_.size() >= 3) {
                    found_type_ = EventType::C;
                    return true;
                }
                return false;
            }
            if (used_[z] || path_.size() >= hi_)
                return false;
            used_[z] = 1;
            path_.push_back(z);
            if (search_c(u, z, x, ny))
                return true;
            path_.pop_back();
            used_[z] = 0;
            return false;
        };
        for (auto [z, f] : left_adj_[w]) {
            if (f == path_edge0_ || coloring_.color(f) != x)
                continue;
            if (step(z, y))
                return true;
        }
        const auto & adj = stage1_adj_[w];
        if (y == kUncolored) {
            for (auto [c, z] : adj)
                if (step(z, c))
                    return true;
        }
        else {
            auto lo = std::lower_bound(adj.begin(), adj.end(), std::pair<Color, Vertex>{y, 0});
            for (auto it = lo; it != adj.end() && it->first == y; ++it)
                if (step(it->second, y))
                    return true;
        }
        return false;
    }

    std::optional<BadEvent> find_hk(EdgeId e)
    {
        const std::uint32_t k = host_.k, n = host_.n;
        std::vector<Vertex> ev(k), Y, rest;
        unrank_edge(host_, e, ev);
        for (Vertex w = 0; w < n; ++w)
            if (!std::binary_search(ev.begin(), ev.end(), w))
                rest.push_back(w);
        std::vector<Color> colors;
        std::vector<EdgeId> edges;
        std::optional<BadEvent> out;
        for_each_subset(rest, 2, [&](std::span<const Vertex> extra) {
            Y = ev;
            Y.push_back(extra[0]);
            Y.push_back(extra[1]);
            std::sort(Y.begin(), Y.end());
            colors.clear();
            edges.clear();
            for_each_subset(Y, k, [&](std::span<const Vertex> s) {
                EdgeId f = ranker_.sorted(s);
                edges.push_back(f);
                colors.push_back(coloring_.color(f));
                return true;
            });
            std::sort(colors.begin(), colors.end());
            const auto distinct = std::uint32_t(std::unique(colors.begin(), colors.end()) - colors.begin());
            if (distinct <= hk_limit_) {
                out = BadEvent{EventType::HK, Y, edges};
                return false;
            }
            return true;
        });
        return out;
    }

    std::uint64_t count_remaining(const std::deque<EdgeId> & queue)
    {
        std::uint64_t c = 0;
        for (EdgeId e : queue)
            if (find_event(e))
                ++c;
        return c;
    }

    HostSpec host_;
    EdgeRanker ranker_;
    Coloring coloring_;
    Color p1_;
    Color c2_ = 0;
    Rng rng_;
    FinishConfig cfg_;
    std::uint32_t k_;
    std::uint32_t lo_ = 0, hi_ = 0, hk_limit_ = 0;
    std::vector<char> leftover_;
    std::vector<EdgeId> edges_;
    std::vector<std::vector<std::pair<Color, Vertex>>> stage1_adj_;
    std::vector<std::vector<std::pair<Vertex, EdgeId>>> left_adj_;
    std::vector<std::uint32_t> cnt_;
    std::vector<char> used_;
    std::vector<std::uint32_t> blocked_;
    std::vector<Color> options_;
    std::vector<Vertex> path_;
    EdgeId path_edge0_ = 0;
    EventType found_type_ = EventType::A;
};

} // namespace detail

/// Colors the leftover edges; FinishResult::finished is false when the resample cap was hit.
inline FinishResult finish(const PackState & stage1, const FinishConfig & cfg)
{
    return detail::Finisher(stage1, cfg).run();
}

/// finish() that throws NotFinished when the cap is hit.
inline Coloring finish_or_throw(const PackState & stage1, const FinishConfig & cfg)
{
    auto r = finish(stage1, cfg);
    if (!r.finished)
        throw NotFinished(r.remaining_events);
    return r.coloring;
}

/// First event found by the local search, scanning leftover edges in rank order, for a
/// given assignment of fresh colors.
inline std::optional<BadEvent> first_local_event(const PackState & stage1, const Coloring & assigned, const FinishConfig & cfg)
{
    detail::Finisher f(stage1, cfg);
    f.load(assigned);
    for (EdgeId e : f.leftover_edges())
        if (auto ev = f.find_event(e))
            return ev;
    return std::nullopt;
}

struct RetryResult {
    FinishResult result;
    std::vector<FinishResult> attempts; ///< failed attempts, without their colorings
};

/// Retries with a doubled fresh palette and a derived seed until success or `max_attempts`.
inline RetryResult finish_with_retry(const PackState & stage1, FinishConfig cfg, int max_attempts = 4)
{
    RetryResult out;
    if (cfg.c2 == 0)
        cfg.c2 = default_c2(stage1.coloring.host().n, cfg.delta);
    const std::uint64_t seed = cfg.seed;
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        if (attempt > 0) {
            cfg.c2 *= 2;
            cfg.seed = Rng::mix(seed, std::uint64_t(attempt));
        }
        auto r = finish(stage1, cfg);
        if (r.finished || attempt + 1 == max_attempts) {
            out.result = std::move(r);
            return out;
        }
        r.coloring = Coloring();
        out.attempts.push_back(std::move(r));
    }
    return out;
}

// ---------------------------------------------------------------------------

/// Every firing event, by exhaustive enumeration. `stage1_mask[e]` marks stage-1 edges.
/// Reference implementation for small hosts.
inline std::vector<BadEvent> enumerate_bad_events(
    const Coloring & coloring, const std::vector<char> & stage1_mask, std::uint32_t k, std::uint32_t ell)
{
    const HostSpec & host = coloring.host();
    EdgeRanker ranker(host);
    std::vector<BadEvent> out;
    if (!host.is_graph()) {
        const std::uint32_t limit = std::uint32_t(binomial(k + 2, k)) - 2;
        std::vector<EdgeId> edges;
        stream_copies(host, CopyKind::clique(k + 2), [&](std::span<const Vertex> s) {
            copy_edges(ranker, CopyKind::clique(k + 2), s, edges);
            bool any_left = false;
            std::vector<Color> colors;
            for (EdgeId e : edges) {
                any_left |= !stage1_mask[e];
                colors.push_back(coloring.color(e));
            }
            std::sort(colors.begin(), colors.end());
            auto distinct = std::uint32_t(std::unique(colors.begin(), colors.end()) - colors.begin());
            if (any_left && distinct <= limit)
                out.push_back({EventType::HK, {s.begin(), s.end()}, edges});
        });
        return out;
    }
    std::vector<std::vector<EdgeId>> incident(host.vertex_count());
    std::vector<Vertex> ev(2);
    for (EdgeId e = 0; e < host.edge_count(); ++e)
        if (!stage1_mask[e]) {
            unrank_edge(host, e, ev);
            incident[ev[0]].push_back(e);
            incident[ev[1]].push_back(e);
        }
    for (Vertex v = 0; v < incident.size(); ++v)
        for (std::size_t i = 0; i < incident[v].size(); ++i)
            for (std::size_t j = i + 1; j < incident[v].size(); ++j)
                if (coloring.color(incident[v][i]) == coloring.color(incident[v][j]))
                    out.push_back({EventType::A, {v}, {incident[v][i], incident[v][j]}});
    const std::uint32_t lo = host.mode == HostMode::Bipartite ? 2 * k : k;
    const std::uint32_t hi = host.mode == HostMode::Bipartite ? 2 * k : std::max(ell, k);
    std::vector<EdgeId> edges;
    for (std::uint32_t m = lo; m <= hi; ++m) {
        if (m > host.vertex_count())
            break;
        stream_copies(host, CopyKind::cycle(m), [&](std::span<const Vertex> s) {
            copy_edges(ranker, CopyKind::cycle(m), s, edges);
            std::vector<Color> fresh, old;
            for (EdgeId e : edges)
                (stage1_mask[e] ? old : fresh).push_back(coloring.color(e));
            if (fresh.empty())
                return;
            auto distinct = [](std::vector<Color> v) {
                std::sort(v.begin(), v.end());
                return std::size_t(std::unique(v.begin(), v.end()) - v.begin());
            };
            if (old.empty()) {
                if (distinct(fresh) != 2)
                    return;
                for (std::size_t i = 0; i < fresh.size(); ++i)
                    if (fresh[i] == fresh[(i + 1) % fresh.size()])
                        return;
                out.push_back({EventType::B, {s.begin(), s.end()}, edges});
            }
            else if (distinct(fresh) == 1 && distinct(old) == 1)
                out.push_back({EventType::C, {s.begin(), s.end()}, edges});
        });
    }
    return out;
}

/// Stage-1 mask of a pack result: 1 where stage 1 colored the edge.
inline std::vector<char> stage1_mask(const PackState & st)
{
    std::vector<char> m(st.coloring.edge_count());
    for (EdgeId e = 0; e < m.size(); ++e)
        m[e] = st.coloring.is_colored(e);
    return m;
}

} // namespace grc
