#pragma once

// Checking colorings against (H, q) requirements, plus the structural statistics of
// stage-1 output and the pair counts x0, x1, x2 of uniform colorings.

#include <grc/combinatorics.hpp>
#include <grc/core.hpp>
#include <grc/enumerate.hpp>
#include <grc/rng.hpp>

#include <algorithm>
#include <atomic>
#include <optional>
#include <thread>
#include <vector>

namespace grc {

struct CheckItem {
    CopyKind kind;
    std::uint32_t q = 1;
};

struct CheckSpec {
    std::vector<CheckItem> kinds;
    bool require_proper = false;
    /// Zero means exhaustive; otherwise this many uniformly drawn copies per kind.
    std::uint64_t sample_count = 0;
    std::uint64_t seed = 0;
    unsigned threads = 1;
    /// Exhaustive mode: stop scanning a kind at its first violation.
    bool stop_at_first = false;

    static CheckSpec exhaustive(std::vector<CheckItem> kinds, bool proper = false)
    {
        CheckSpec s;
        s.kinds = std::move(kinds);
        s.require_proper = proper;
        return s;
    }

    static CheckSpec sampled(std::vector<CheckItem> kinds, std::uint64_t count, std::uint64_t seed)
    {
        CheckSpec s;
        s.kinds = std::move(kinds);
        s.sample_count = count;
        s.seed = seed;
        return s;
    }
};

struct Violation {
    Copy copy;
    std::uint32_t distinct_colors = 0;
    std::vector<Color> colors_seen;
};

struct KindReport {
    CheckItem item;
    std::uint64_t copies_checked = 0;
    std::uint64_t violations = 0;
    std::optional<Violation> first;
};

struct CheckReport {
    bool ok = true;
    std::optional<Violation> first_violation;
    std::uint64_t copies_checked = 0;
    /// Two adjacent edges sharing a color, reported as a 3-vertex path.
    std::optional<Violation> improper;
    std::vector<KindReport> kinds;
};

namespace detail {

inline std::uint32_t count_distinct(std::vector<Color> & colors)
{
    std::sort(colors.begin(), colors.end());
    return std::uint32_t(std::unique(colors.begin(), colors.end()) - colors.begin());
}

// Counts violations among fully colored copies. Subtrees that already carry q colors,
// or contain an uncolored edge, cannot violate and are skipped.
class ViolationTracker {
public:
    ViolationTracker(const Coloring & coloring, const EdgeRanker & ranker, CheckItem item, bool stop_at_first) :
        coloring_(coloring), ranker_(ranker), item_(item), stop_(stop_at_first), count_(coloring.palette_size(), 0)
    {
    }

    bool enter(std::span<const EdgeId> edges)
    {
        frames_.push_back(std::uint32_t(added_.size()));
        bool blocked = false;
        for (EdgeId e : edges) {
            Color c = coloring_.color(e);
            if (c == kUncolored) {
                blocked = true;
                break;
            }
            added_.push_back(c);
            if (count_[c]++ == 0)
                ++distinct_;
        }
        if (blocked || distinct_ >= item_.q) {
            leave();
            return false;
        }
        return true;
    }

    void leave()
    {
        std::uint32_t mark = frames_.back();
        frames_.pop_back();
        while (added_.size() > mark) {
            if (--count_[added_.back()] == 0)
                --distinct_;
            added_.pop_back();
        }
    }

    bool visit(std::span<const Vertex> seq)
    {
        ++violations_;
        if (!first_) {
            Violation v;
            v.copy = {item_.kind, {seq.begin(), seq.end()}};
            v.distinct_colors = distinct_;
            copy_edges(ranker_, item_.kind, seq, scratch_);
            for (EdgeId e : scratch_)
                v.colors_seen.push_back(coloring_.color(e));
            first_ = std::move(v);
        }
        return !stop_;
    }

    std::uint64_t violations() const { return violations_; }
    std::optional<Violation> & first() { return first_; }

private:
    const Coloring & coloring_;
    const EdgeRanker & ranker_;
    CheckItem item_;
    bool stop_;
    std::vector<std::uint32_t> count_;
    std::vector<Color> added_;
    std::vector<std::uint32_t> frames_;
    std::uint32_t distinct_ = 0;
    std::uint64_t violations_ = 0;
    std::optional<Violation> first_;
    std::vector<EdgeId> scratch_;
};

inline KindReport check_exhaustive(const Coloring & coloring, const EdgeRanker & ranker, CheckItem item, const CheckSpec & spec)
{
    const Vertex V = coloring.host().vertex_count();
    const unsigned threads = std::max(1u, spec.threads);
    // One slot per first vertex; the reduction scans slots in stream order.
    struct Slot {
        std::uint64_t violations = 0;
        std::optional<Violation> first;
    };
    std::vector<Slot> slots(V);
    std::atomic<Vertex> next{0};
    std::atomic<bool> stop{false};
    auto work = [&] {
        for (Vertex v; (v = next.fetch_add(1)) < V;) {
            if (stop.load())
                return;
            ViolationTracker t(coloring, ranker, item, spec.stop_at_first);
            walk_copies(ranker, item.kind, t, v, v + 1);
            slots[v].violations = t.violations();
            slots[v].first = std::move(t.first());
            if (spec.stop_at_first && slots[v].first && threads == 1)
                stop = true;
        }
    };
    if (threads == 1)
        work();
    else {
        std::vector<std::thread> pool;
        for (unsigned i = 0; i < threads; ++i)
            pool.emplace_back(work);
        for (auto & t : pool)
            t.join();
    }
    KindReport r;
    r.item = item;
    r.copies_checked = count_copies(coloring.host(), item.kind);
    for (auto & s : slots) {
        r.violations += s.violations;
        if (!r.first && s.first) {
            r.first = std::move(s.first);
            if (spec.stop_at_first)
                break;
        }
    }
    return r;
}

inline KindReport check_sampled(const Coloring & coloring, const EdgeRanker & ranker, CheckItem item, const CheckSpec & spec)
{
    KindReport r;
    r.item = item;
    const std::uint64_t total = count_copies(coloring.host(), item.kind);
    if (total == 0)
        return r;
    Rng rng(Rng::mix(spec.seed, std::uint64_t(item.kind.family) * 1000 + item.kind.size));
    std::vector<EdgeId> edges;
    std::vector<Color> colors;
    for (std::uint64_t i = 0; i < spec.sample_count; ++i) {
        auto seq = unrank_copy(coloring.host(), item.kind, rng.below(total));
        ++r.copies_checked;
        copy_edges(ranker, item.kind, seq, edges);
        colors.clear();
        bool partial = false;
        for (EdgeId e : edges) {
            if (!coloring.is_colored(e)) {
                partial = true;
                break;
            }
            colors.push_back(coloring.color(e));
        }
        if (partial)
            continue;
        auto seen = colors;
        std::uint32_t d = count_distinct(colors);
        if (d >= item.q)
            continue;
        ++r.violations;
        if (!r.first)
            r.first = Violation{{item.kind, seq}, d, seen};
        if (spec.stop_at_first)
            break;
    }
    return r;
}

} // namespace detail

/// First pair of adjacent colored edges sharing a color, as a path (u, v, w) with centre v.
/// Uniform hosts: edges meeting in at least one vertex; reported as a 2-edge clique set witness.
inline std::optional<Violation> find_improper(const Coloring & coloring)
{
    const HostSpec & host = coloring.host();
    const Vertex V = host.vertex_count();
    if (host.is_graph()) {
        EdgeRanker ranker(host);
        std::vector<Vertex> seen(coloring.palette_size(), ~Vertex(0));
        for (Vertex v = 0; v < V; ++v) {
            std::fill(seen.begin(), seen.end(), ~Vertex(0));
            for (Vertex u = 0; u < V; ++u) {
                EdgeId e = ranker.pair(u, v);
                if (u == v || e == EdgeRanker::kNoEdge || !coloring.is_colored(e))
                    continue;
                Color c = coloring.color(e);
                if (seen[c] != ~Vertex(0)) {
                    Vertex a = seen[c], b = u;
                    if (a > b)
                        std::swap(a, b);
                    return Violation{{CopyKind::path(3), {a, v, b}}, 1, {c, c}};
                }
                seen[c] = u;
            }
        }
        return std::nullopt;
    }
    // uniform host: for each vertex, colors of edges through it must be distinct
    std::vector<EdgeId> seen(coloring.palette_size(), EdgeRanker::kNoEdge);
    std::vector<Vertex> verts(host.k);
    std::vector<std::vector<EdgeId>> incident(V);
    for (EdgeId e = 0; e < host.edge_count(); ++e) {
        if (!coloring.is_colored(e))
            continue;
        unrank_edge(host, e, verts);
        for (Vertex v : verts)
            incident[v].push_back(e);
    }
    for (Vertex v = 0; v < V; ++v) {
        std::fill(seen.begin(), seen.end(), EdgeRanker::kNoEdge);
        for (EdgeId e : incident[v]) {
            Color c = coloring.color(e);
            if (seen[c] != EdgeRanker::kNoEdge) {
                auto a = unrank_edge(host, seen[c]), b = unrank_edge(host, e);
                std::vector<Vertex> u;
                std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(u));
                return Violation{{CopyKind::clique(std::uint32_t(u.size())), u}, 1, {c, c}};
            }
            seen[c] = e;
        }
    }
    return std::nullopt;
}

/// Checks every listed kind; the overall first violation is the first kind's first witness.
inline CheckReport check(const Coloring & coloring, const CheckSpec & spec)
{
    for (const auto & item : spec.kinds) {
        validate_kind(coloring.host(), item.kind);
        if (item.q < 1)
            throw ConfigError("q must be positive");
    }
    CheckReport report;
    EdgeRanker ranker(coloring.host());
    if (spec.require_proper) {
        report.improper = find_improper(coloring);
        if (report.improper)
            report.ok = false;
    }
    for (const auto & item : spec.kinds) {
        auto kr = spec.sample_count ? detail::check_sampled(coloring, ranker, item, spec)
                                    : detail::check_exhaustive(coloring, ranker, item, spec);
        report.copies_checked += kr.copies_checked;
        if (kr.violations) {
            report.ok = false;
            if (!report.first_violation)
                report.first_violation = kr.first;
        }
        report.kinds.push_back(std::move(kr));
    }
    return report;
}

inline bool is_valid(const Coloring & coloring, const CheckSpec & spec)
{
    auto s = spec;
    s.stop_at_first = true;
    return check(coloring, s).ok;
}

// ---------------------------------------------------------------------------

/// A monochromatic path on t vertices, if one exists. Graph hosts.
inline std::optional<std::vector<Vertex>> max_mono_path(const Coloring & coloring, std::uint32_t t)
{
    const HostSpec & host = coloring.host();
    if (!host.is_graph())
        throw Unsupported("monochromatic paths are searched in graph hosts");
    if (t < 2)
        throw ConfigError("path needs at least 2 vertices");
    const Vertex V = host.vertex_count();
    const Color P = coloring.palette_size();
    // adjacency per color
    std::vector<std::vector<std::vector<Vertex>>> adj(P, std::vector<std::vector<Vertex>>(V));
    std::vector<Vertex> ev(2);
    for (EdgeId e = 0; e < host.edge_count(); ++e) {
        if (!coloring.is_colored(e))
            continue;
        unrank_edge(host, e, ev);
        adj[coloring.color(e)][ev[0]].push_back(ev[1]);
        adj[coloring.color(e)][ev[1]].push_back(ev[0]);
    }
    std::vector<Vertex> path;
    std::vector<char> used(V, 0);
    for (Color c = 0; c < P; ++c) {
        const auto & g = adj[c];
        auto dfs = [&](auto & self, Vertex v) -> bool {
            path.push_back(v);
            used[v] = 1;
            if (path.size() == t)
                return true;
            for (Vertex w : g[v])
                if (!used[w] && self(self, w))
                    return true;
            used[v] = 0;
            path.pop_back();
            return false;
        };
        for (Vertex v = 0; v < V; ++v) {
            if (g[v].empty())
                continue;
            if (dfs(dfs, v))
                return path;
        }
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------

struct XCounts {
    std::uint64_t x0 = 0, x1 = 0, x2 = 0;
    friend bool operator==(const XCounts &, const XCounts &) = default;
};

/// x0: ((k-1)-set, color) pairs with no edge of that color through the set.
/// x1: edges with no same-colored edge meeting them in k-1 vertices.
/// x2: unordered same-colored edge pairs meeting in k-1 vertices.
inline XCounts xcounts(const Coloring & coloring)
{
    const HostSpec & host = coloring.host();
    if (host.mode != HostMode::UniformComplete)
        throw Unsupported("x-counts are defined for uniform hosts");
    if (!coloring.is_total())
        throw PartialColoring("x-counts need a total coloring");
    const std::uint32_t n = host.n, k = host.k;
    EdgeRanker ranker(host);
    XCounts x;
    std::vector<char> shared(host.edge_count(), 0);
    std::vector<Vertex> S(k - 1), buf(k);
    std::vector<std::pair<Color, EdgeId>> through;
    const std::uint64_t sets = binomial(n, k - 1);
    for (std::uint64_t r = 0; r < sets; ++r) {
        colex_unrank(r, k - 1, n, S);
        through.clear();
        for (Vertex w = 0; w < n; ++w) {
            if (std::binary_search(S.begin(), S.end(), w))
                continue;
            std::copy(S.begin(), S.end(), buf.begin());
            buf[k - 1] = w;
            EdgeId e = ranker.unsorted(buf);
            through.push_back({coloring.color(e), e});
        }
        std::sort(through.begin(), through.end());
        std::uint64_t distinct = 0;
        for (std::size_t i = 0; i < through.size();) {
            std::size_t j = i;
            while (j < through.size() && through[j].first == through[i].first)
                ++j;
            ++distinct;
            const std::uint64_t m = j - i;
            x.x2 += m * (m - 1) / 2;
            if (m > 1)
                for (std::size_t t = i; t < j; ++t)
                    shared[through[t].second] = 1;
            i = j;
        }
        x.x0 += coloring.palette_size() - distinct;
    }
    for (char s : shared)
        if (!s)
            ++x.x1;
    return x;
}

// ---------------------------------------------------------------------------

struct LeftoverStats {
    std::uint64_t max_uncolored_degree = 0;
    std::uint64_t max_uncolored_codegree = 0;
    std::uint64_t max_dangerous_pairs = 0;
    std::uint64_t uncolored = 0;
};

/// Degree: per vertex (graph) or per (k-1)-set (uniform), uncolored edges through it.
/// Codegree: per vertex pair, common uncolored neighbours (graph) or uncolored edges containing both (uniform).
/// Dangerous pairs: per edge xy, uncolored x'y' with xy' and yx' of one color; uniform hosts
/// use e = {x,y}+S against uncolored {x',y'}+S with {x,x'}+S and {y,y'}+S of one color.
inline LeftoverStats leftover_stats(const Coloring & coloring)
{
    const HostSpec & host = coloring.host();
    const Vertex V = host.vertex_count();
    EdgeRanker ranker(host);
    LeftoverStats st;
    st.uncolored = coloring.edge_count() - coloring.colored_count();
    if (st.uncolored == 0)
        return st;

    if (host.is_graph()) {
        auto unc = [&](Vertex a, Vertex b) {
            EdgeId e = ranker.pair(a, b);
            return a != b && e != EdgeRanker::kNoEdge && !coloring.is_colored(e);
        };
        auto col = [&](Vertex a, Vertex b) -> Color {
            EdgeId e = ranker.pair(a, b);
            return (a == b || e == EdgeRanker::kNoEdge) ? kUncolored : coloring.color(e);
        };
        for (Vertex v = 0; v < V; ++v) {
            std::uint64_t d = 0;
            for (Vertex u = 0; u < V; ++u)
                d += unc(u, v);
            st.max_uncolored_degree = std::max(st.max_uncolored_degree, d);
        }
        for (Vertex x = 0; x < V; ++x)
            for (Vertex y = x + 1; y < V; ++y) {
                std::uint64_t c = 0;
                for (Vertex w = 0; w < V; ++w)
                    c += unc(x, w) && unc(y, w);
                st.max_uncolored_codegree = std::max(st.max_uncolored_codegree, c);
            }
        std::vector<Vertex> ev(2);
        for (EdgeId e = 0; e < host.edge_count(); ++e) {
            unrank_edge(host, e, ev);
            const Vertex x = ev[0], y = ev[1];
            std::uint64_t c = 0;
            for (Vertex a = 0; a < V; ++a)
                for (Vertex b = a + 1; b < V; ++b) {
                    if (a == x || a == y || b == x || b == y || !unc(a, b))
                        continue;
                    Color p = col(x, b), q = col(y, a), r = col(x, a), s = col(y, b);
                    if ((p != kUncolored && p == q) || (r != kUncolored && r == s))
                        ++c;
                }
            st.max_dangerous_pairs = std::max(st.max_dangerous_pairs, c);
        }
        return st;
    }

    const std::uint32_t n = host.n, k = host.k;
    std::vector<Vertex> S(k - 1), buf(k);
    auto edge_with = [&](std::span<const Vertex> base, std::initializer_list<Vertex> extra) {
        std::size_t i = 0;
        for (Vertex v : base)
            buf[i++] = v;
        for (Vertex v : extra)
            buf[i++] = v;
        return ranker.unsorted(buf);
    };
    for (std::uint64_t r = 0; r < binomial(n, k - 1); ++r) {
        colex_unrank(r, k - 1, n, S);
        std::uint64_t d = 0;
        for (Vertex w = 0; w < n; ++w)
            if (!std::binary_search(S.begin(), S.end(), w) && !coloring.is_colored(edge_with(S, {w})))
                ++d;
        st.max_uncolored_degree = std::max(st.max_uncolored_degree, d);
    }
    std::vector<Vertex> ev(k);
    std::vector<std::uint64_t> pair_count(std::size_t(n) * n, 0);
    for (EdgeId e = 0; e < host.edge_count(); ++e) {
        if (coloring.is_colored(e))
            continue;
        unrank_edge(host, e, ev);
        for (std::uint32_t i = 0; i < k; ++i)
            for (std::uint32_t j = i + 1; j < k; ++j)
                st.max_uncolored_codegree =
                    std::max(st.max_uncolored_codegree, ++pair_count[std::size_t(ev[i]) * n + ev[j]]);
    }
    std::vector<Vertex> R(k - 2);
    std::vector<char> inR(n);
    for (EdgeId e = 0; e < host.edge_count(); ++e) {
        unrank_edge(host, e, ev);
        for (std::uint32_t i = 0; i < k; ++i)
            for (std::uint32_t j = i + 1; j < k; ++j) {
                const Vertex x = ev[i], y = ev[j];
                std::size_t t = 0;
                std::fill(inR.begin(), inR.end(), 0);
                for (std::uint32_t m = 0; m < k; ++m)
                    if (m != i && m != j) {
                        R[t++] = ev[m];
                        inR[ev[m]] = 1;
                    }
                std::uint64_t c = 0;
                for (Vertex a = 0; a < n; ++a)
                    for (Vertex b = a + 1; b < n; ++b) {
                        if (inR[a] || inR[b] || a == x || a == y || b == x || b == y)
                            continue;
                        if (coloring.is_colored(edge_with(R, {a, b})))
                            continue;
                        Color p = coloring.color(edge_with(R, {x, a})), q = coloring.color(edge_with(R, {y, b}));
                        Color u = coloring.color(edge_with(R, {x, b})), w = coloring.color(edge_with(R, {y, a}));
                        if ((p != kUncolored && p == q) || (u != kUncolored && u == w))
                            ++c;
                    }
                st.max_dangerous_pairs = std::max(st.max_dangerous_pairs, c);
            }
    }
    return st;
}

} // namespace grc
