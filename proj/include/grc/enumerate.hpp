#pragma once

// Canonical-form streams of pattern copies: cycles, paths, clique sets, tight cycles.
//
// Canonical forms:
//   cycle / tight cycle: rotation-reflection whose first vertex is the minimum and whose
//                        second vertex is smaller than the last
//   path:                the orientation whose first endpoint is smaller
//   clique set:          ascending vertex set
//
// Streams are lazy depth-first walks that emit sequences in lexicographic order.

#include <grc/combinatorics.hpp>
#include <grc/core.hpp>

#include <algorithm>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

namespace grc {

enum class Family { Cycle, Path, CliqueSet, TightCycle };

inline const char * family_name(Family f)
{
    switch (f) {
    case Family::Cycle: return "cycle";
    case Family::Path: return "path";
    case Family::CliqueSet: return "clique";
    case Family::TightCycle: return "tight-cycle";
    }
    return "?";
}

inline Family parse_family(const std::string & s)
{
    if (s == "cycle")
        return Family::Cycle;
    if (s == "path")
        return Family::Path;
    if (s == "clique")
        return Family::CliqueSet;
    if (s == "tight-cycle")
        return Family::TightCycle;
    throw ConfigError("unknown pattern kind '" + s + "'");
}

/// A pattern family with its size parameter: Cycle(m), Path(t), CliqueSet(p), TightCycle(l).
struct CopyKind {
    Family family = Family::Cycle;
    std::uint32_t size = 0;

    static CopyKind cycle(std::uint32_t m) { return {Family::Cycle, m}; }
    static CopyKind path(std::uint32_t t) { return {Family::Path, t}; }
    static CopyKind clique(std::uint32_t p) { return {Family::CliqueSet, p}; }
    static CopyKind tight_cycle(std::uint32_t l) { return {Family::TightCycle, l}; }

    std::string name() const { return std::string(family_name(family)) + "(" + std::to_string(size) + ")"; }

    friend bool operator==(const CopyKind &, const CopyKind &) = default;
};

/// One copy in canonical form.
struct Copy {
    CopyKind kind;
    std::vector<Vertex> verts;

    friend bool operator==(const Copy &, const Copy &) = default;
};

inline void validate_kind(const HostSpec & host, CopyKind kind)
{
    switch (kind.family) {
    case Family::Cycle:
        if (!host.is_graph())
            throw Unsupported("cycles are defined on graph hosts");
        if (kind.size < 3)
            throw Unsupported("cycles need at least 3 vertices");
        if (host.mode == HostMode::Bipartite && (kind.size % 2 != 0 || kind.size < 4))
            throw Unsupported("bipartite cycles have even length >= 4");
        return;
    case Family::Path:
        if (!host.is_graph())
            throw Unsupported("paths are defined on graph hosts");
        if (kind.size < 2)
            throw Unsupported("paths need at least 2 vertices");
        return;
    case Family::CliqueSet:
        if (host.mode == HostMode::Bipartite)
            throw Unsupported("clique sets are not defined on bipartite hosts");
        if (kind.size < host.k)
            throw Unsupported("clique set smaller than edge size");
        return;
    case Family::TightCycle:
        if (host.mode != HostMode::UniformComplete)
            throw Unsupported("tight cycles live in uniform hosts");
        if (kind.size < host.k + 1)
            throw Unsupported("tight cycle needs at least k+1 vertices");
        return;
    }
}

/// Number of host edges in one copy.
inline std::uint64_t copy_edge_count(const HostSpec & host, CopyKind kind)
{
    switch (kind.family) {
    case Family::Cycle: return kind.size;
    case Family::Path: return kind.size - 1;
    case Family::CliqueSet: return binomial(kind.size, host.k);
    case Family::TightCycle: return kind.size;
    }
    return 0;
}

/// Edge ids of a copy, in pattern order (consecutive pairs / windows / colex subsets).
inline void copy_edges(const EdgeRanker & ranker, CopyKind kind, std::span<const Vertex> seq, std::vector<EdgeId> & out)
{
    out.clear();
    const std::uint32_t s = std::uint32_t(seq.size());
    const std::uint32_t k = ranker.host().k;
    switch (kind.family) {
    case Family::Cycle:
        for (std::uint32_t i = 0; i < s; ++i)
            out.push_back(ranker.pair(seq[i], seq[(i + 1) % s]));
        return;
    case Family::Path:
        for (std::uint32_t i = 0; i + 1 < s; ++i)
            out.push_back(ranker.pair(seq[i], seq[i + 1]));
        return;
    case Family::TightCycle: {
        Vertex buf[32];
        for (std::uint32_t i = 0; i < s; ++i) {
            for (std::uint32_t j = 0; j < k; ++j)
                buf[j] = seq[(i + j) % s];
            out.push_back(ranker.unsorted(std::span<const Vertex>(buf, k)));
        }
        return;
    }
    case Family::CliqueSet:
        for_each_subset(seq, k, [&](std::span<const Vertex> sub) {
            out.push_back(ranker.sorted(sub));
            return true;
        });
        return;
    }
}

inline std::vector<EdgeId> copy_edges(const HostSpec & host, const Copy & copy)
{
    EdgeRanker ranker(host);
    std::vector<EdgeId> out;
    copy_edges(ranker, copy.kind, copy.verts, out);
    return out;
}

/// Closed-form number of copies of `kind` in `host`.
inline std::uint64_t count_copies(const HostSpec & host, CopyKind kind)
{
    validate_kind(host, kind);
    const std::uint64_t n = host.n, s = kind.size;
    switch (kind.family) {
    case Family::Cycle:
        if (host.mode == HostMode::Bipartite) {
            std::uint64_t h = s / 2, sets = binomial(n, h);
            return sat_mul(sat_mul(sets, sets), sat_mul(factorial(h), factorial(h - 1)) / 2);
        }
        return sat_mul(binomial(n, s), factorial(s - 1) / 2);
    case Family::TightCycle: return sat_mul(binomial(n, s), factorial(s - 1) / 2);
    case Family::Path:
        if (host.mode == HostMode::Bipartite) {
            std::uint64_t h = s / 2;
            if (s % 2 == 0)
                return sat_mul(falling(n, h), falling(n, h));
            return sat_mul(falling(n, h + 1), falling(n, h));
        }
        return falling(n, s) / 2;
    case Family::CliqueSet: return binomial(n, s);
    }
    return 0;
}

// ---------------------------------------------------------------------------
// Walk engine
//
// A Tracker observes the walk:
//   bool enter(std::span<const EdgeId> new_edges)  vertex appended; false skips the subtree
//   void leave()                                    undo the matching enter
//   bool visit(std::span<const Vertex> seq)         complete copy; false stops the walk
//
// For cycles the closing edge(s) are reported together with the last vertex.

namespace detail {

template <class Tracker>
class Walker {
public:
    Walker(const EdgeRanker & ranker, CopyKind kind, Tracker & tracker) :
        ranker_(ranker), host_(ranker.host()), kind_(kind), tracker_(tracker), seq_(kind.size),
        used_(host_.vertex_count(), 0)
    {
    }

    bool run(Vertex first_lo, Vertex first_hi)
    {
        const Vertex V = host_.vertex_count();
        first_hi = std::min(first_hi, V);
        for (Vertex v = first_lo; v < first_hi; ++v) {
            if (kind_.family == Family::Cycle && host_.mode == HostMode::Bipartite && !host_.is_left(v))
                break;
            if (kind_.family == Family::CliqueSet && v + kind_.size > V)
                break;
            if (!place(0, v))
                return false;
        }
        return true;
    }

private:
    bool bipartite() const { return host_.mode == HostMode::Bipartite; }

    // Appends v at position pos, reports new edges, recurses.
    bool place(std::uint32_t pos, Vertex v)
    {
        seq_[pos] = v;
        new_edges(pos);
        if (!tracker_.enter(std::span<const EdgeId>(scratch_[pos])))
            return true;
        bool keep = true;
        if (pos + 1 == kind_.size)
            keep = tracker_.visit(std::span<const Vertex>(seq_));
        else {
            used_[v] = 1;
            keep = extend(pos + 1);
            used_[v] = 0;
        }
        tracker_.leave();
        return keep;
    }

    bool extend(std::uint32_t pos)
    {
        const Vertex V = host_.vertex_count();
        const bool last = pos + 1 == kind_.size;
        const Vertex first = seq_[0];
        Vertex lo = 0, hi = V;
        switch (kind_.family) {
        case Family::CliqueSet:
            lo = seq_[pos - 1] + 1;
            hi = V - (kind_.size - 1 - pos);
            break;
        case Family::Cycle:
        case Family::TightCycle:
            if (bipartite()) {
                if (pos % 2 == 1)
                    lo = host_.n;
                else {
                    lo = first + 1;
                    hi = host_.n;
                }
            }
            else
                lo = first + 1;
            if (last && kind_.size >= 3)
                lo = std::max(lo, seq_[1] + 1);
            break;
        case Family::Path:
            if (bipartite()) {
                if (host_.is_left(seq_[pos - 1]))
                    lo = host_.n;
                else
                    hi = host_.n;
            }
            if (last)
                lo = std::max(lo, first + 1);
            break;
        }
        for (Vertex v = lo; v < hi; ++v) {
            if (used_[v])
                continue;
            if (!place(pos, v))
                return false;
        }
        return true;
    }

    void new_edges(std::uint32_t pos)
    {
        if (scratch_.size() < kind_.size)
            scratch_.resize(kind_.size);
        auto & out = scratch_[pos];
        out.clear();
        const std::uint32_t s = kind_.size, k = host_.k;
        const Vertex v = seq_[pos];
        switch (kind_.family) {
        case Family::Cycle:
            if (pos > 0)
                out.push_back(ranker_.pair(seq_[pos - 1], v));
            if (pos + 1 == s)
                out.push_back(ranker_.pair(v, seq_[0]));
            break;
        case Family::Path:
            if (pos > 0)
                out.push_back(ranker_.pair(seq_[pos - 1], v));
            break;
        case Family::TightCycle: {
            Vertex buf[32];
            if (pos + 1 >= k) {
                std::copy(seq_.begin() + (pos + 1 - k), seq_.begin() + pos + 1, buf);
                out.push_back(ranker_.unsorted(std::span<const Vertex>(buf, k)));
            }
            if (pos + 1 == s)
                for (std::uint32_t start = s - k + 1; start < s; ++start) {
                    for (std::uint32_t j = 0; j < k; ++j)
                        buf[j] = seq_[(start + j) % s];
                    out.push_back(ranker_.unsorted(std::span<const Vertex>(buf, k)));
                }
            break;
        }
        case Family::CliqueSet:
            if (pos + 1 >= k) {
                Vertex buf[32];
                for_each_subset(std::span<const Vertex>(seq_.data(), pos), k - 1, [&](std::span<const Vertex> sub) {
                    std::copy(sub.begin(), sub.end(), buf);
                    buf[k - 1] = v;
                    out.push_back(ranker_.sorted(std::span<const Vertex>(buf, k)));
                    return true;
                });
            }
            break;
        }
    }

    const EdgeRanker & ranker_;
    HostSpec host_;
    CopyKind kind_;
    Tracker & tracker_;
    std::vector<Vertex> seq_;
    std::vector<char> used_;
    std::vector<std::vector<EdgeId>> scratch_;
};

template <class F>
struct VisitOnly {
    F & f;
    bool enter(std::span<const EdgeId>) { return true; }
    void leave() {}
    bool visit(std::span<const Vertex> seq)
    {
        if constexpr (std::is_same_v<std::invoke_result_t<F &, std::span<const Vertex>>, void>) {
            f(seq);
            return true;
        }
        else
            return f(seq);
    }
};

template <class F>
bool call_visitor(F & f, std::span<const Vertex> seq)
{
    if constexpr (std::is_same_v<std::invoke_result_t<F &, std::span<const Vertex>>, void>) {
        f(seq);
        return true;
    }
    else
        return f(seq);
}

} // namespace detail

/// Runs `tracker` over every copy whose first canonical vertex lies in [first_lo, first_hi).
/// Returns false if the tracker stopped the walk.
template <class Tracker>
bool walk_copies(const EdgeRanker & ranker, CopyKind kind, Tracker & tracker, Vertex first_lo = 0,
    Vertex first_hi = ~Vertex(0))
{
    validate_kind(ranker.host(), kind);
    detail::Walker<Tracker> w(ranker, kind, tracker);
    return w.run(first_lo, first_hi);
}

/// Calls f(std::span<const Vertex>) for each copy in stream order; f may return bool to stop early.
template <class F>
void stream_copies(const HostSpec & host, CopyKind kind, F && f, Vertex first_lo = 0, Vertex first_hi = ~Vertex(0))
{
    EdgeRanker ranker(host);
    detail::VisitOnly<std::remove_reference_t<F>> t{f};
    walk_copies(ranker, kind, t, first_lo, first_hi);
}

inline std::vector<Copy> collect_copies(const HostSpec & host, CopyKind kind)
{
    std::vector<Copy> out;
    stream_copies(host, kind, [&](std::span<const Vertex> s) { out.push_back({kind, {s.begin(), s.end()}}); });
    return out;
}

// ---------------------------------------------------------------------------
// Copies through one edge

namespace detail {

// Fills the free positions of seq depth-first with unused vertices. side[p] is 0 (left),
// 1 (right) or 2 (either). done() returns false to stop.
template <class Done>
bool fill_free(const HostSpec & host, std::vector<Vertex> & seq, const std::vector<char> & free,
    const std::vector<char> & side, std::vector<char> & used, std::uint32_t pos, Done & done)
{
    while (pos < seq.size() && !free[pos])
        ++pos;
    if (pos == seq.size())
        return done();
    const Vertex V = host.vertex_count();
    Vertex lo = 0, hi = V;
    if (side[pos] == 0)
        hi = host.n;
    else if (side[pos] == 1)
        lo = host.n;
    for (Vertex v = lo; v < hi; ++v) {
        if (used[v])
            continue;
        seq[pos] = v;
        used[v] = 1;
        bool keep = fill_free(host, seq, free, side, used, pos + 1, done);
        used[v] = 0;
        if (!keep)
            return false;
    }
    return true;
}

} // namespace detail

/// Calls f(std::span<const Vertex>) for each copy (canonical form) whose edge set contains `edge`.
/// Emission order is deterministic but differs from stream_copies.
template <class F>
void stream_copies_through(const HostSpec & host, CopyKind kind, EdgeId edge, F && f)
{
    validate_kind(host, kind);
    auto ev = unrank_edge(host, edge);
    const std::uint32_t s = kind.size;
    const Vertex V = host.vertex_count();
    const bool bip = host.mode == HostMode::Bipartite;

    if (kind.family == Family::CliqueSet) {
        std::vector<Vertex> pool;
        for (Vertex v = 0; v < V; ++v)
            if (!std::binary_search(ev.begin(), ev.end(), v))
                pool.push_back(v);
        std::vector<Vertex> merged(s);
        for_each_subset(pool, s - host.k, [&](std::span<const Vertex> rest) {
            std::merge(ev.begin(), ev.end(), rest.begin(), rest.end(), merged.begin());
            return detail::call_visitor(f, std::span<const Vertex>(merged));
        });
        return;
    }
    if (s > V)
        return;

    std::vector<Vertex> seq(s), out(s);
    std::vector<char> used(V, 0), free(s), side(s, 2);
    for (Vertex v : ev)
        used[v] = 1;

    if (kind.family == Family::Path) {
        auto done = [&]() -> bool {
            if (seq.front() > seq.back())
                return true;
            return detail::call_visitor(f, std::span<const Vertex>(seq));
        };
        for (int orient = 0; orient < 2; ++orient) {
            const Vertex x = ev[orient], y = ev[1 - orient];
            for (std::uint32_t i = 0; i + 1 < s; ++i) {
                std::fill(free.begin(), free.end(), 1);
                free[i] = free[i + 1] = 0;
                seq[i] = x;
                seq[i + 1] = y;
                if (bip)
                    for (std::uint32_t p = 0; p < s; ++p)
                        side[p] = char(host.is_left(x) ? (p + i) % 2 : 1 - (p + i) % 2);
                if (!detail::fill_free(host, seq, free, side, used, 0, done))
                    return;
            }
        }
        return;
    }

    // Cycles and tight cycles: the edge occupies the window at positions 0..k-1 in every order;
    // each directed cycle through it arises once, and one direction is kept.
    const std::uint32_t w = host.k;
    std::fill(free.begin(), free.end(), 1);
    for (std::uint32_t j = 0; j < w; ++j)
        free[j] = 0;
    auto done = [&]() -> bool {
        std::uint32_t i = std::uint32_t(std::min_element(seq.begin(), seq.end()) - seq.begin());
        if (seq[(i + 1) % s] > seq[(i + s - 1) % s])
            return true;
        for (std::uint32_t j = 0; j < s; ++j)
            out[j] = seq[(i + j) % s];
        return detail::call_visitor(f, std::span<const Vertex>(out));
    };
    std::vector<Vertex> perm(ev);
    do {
        std::copy(perm.begin(), perm.end(), seq.begin());
        if (bip)
            for (std::uint32_t p = 0; p < s; ++p)
                side[p] = char(host.is_left(perm[0]) ? p % 2 : 1 - p % 2);
        if (!detail::fill_free(host, seq, free, side, used, w, done))
            return;
    } while (std::next_permutation(perm.begin(), perm.end()));
}

// ---------------------------------------------------------------------------
// Unranking: copy index in [0, count_copies) -> canonical sequence

inline std::vector<Vertex> unrank_copy(const HostSpec & host, CopyKind kind, std::uint64_t index)
{
    const std::uint64_t total = count_copies(host, kind);
    if (total == kSaturated)
        throw Unsupported("copy count exceeds 64 bits");
    if (index >= total)
        throw ConfigError("copy index out of range");
    const std::uint32_t s = kind.size, n = host.n;
    std::vector<Vertex> out(s);

    auto cyclic = [&](std::span<const Vertex> set, std::uint64_t r) {
        // set ascending; first = min, remaining arranged with second < last
        out[0] = set[0];
        auto arr = unrank_first_lt_last(s - 1, r);
        for (std::uint32_t j = 0; j + 1 < s; ++j)
            out[j + 1] = set[1 + arr[j]];
    };

    if (host.mode == HostMode::Bipartite) {
        if (kind.family == Family::Cycle) {
            const std::uint32_t h = s / 2;
            const std::uint64_t per = factorial(h) / 2 * factorial(h - 1);
            const std::uint64_t sets = binomial(n, h);
            std::uint64_t set_idx = index / per, r = index % per;
            std::vector<Vertex> left(h), right(h);
            colex_unrank(set_idx / sets, h, n, left);
            colex_unrank(set_idx % sets, h, n, right);
            std::uint64_t left_perms = factorial(h - 1);
            auto rarr = unrank_first_lt_last(h, r / left_perms);
            auto larr = unrank_permutation(h - 1, r % left_perms);
            out[0] = left[0];
            for (std::uint32_t j = 0; j < h; ++j)
                out[2 * j + 1] = n + right[rarr[j]];
            for (std::uint32_t j = 0; j + 1 < h; ++j)
                out[2 * j + 2] = left[1 + larr[j]];
            return out;
        }
        // Path
        if (s % 2 == 0) {
            const std::uint32_t h = s / 2;
            const std::uint64_t hf = factorial(h), sets = binomial(n, h);
            std::uint64_t set_idx = index / (hf * hf), r = index % (hf * hf);
            std::vector<Vertex> left(h), right(h);
            colex_unrank(set_idx / sets, h, n, left);
            colex_unrank(set_idx % sets, h, n, right);
            auto la = unrank_permutation(h, r / hf), ra = unrank_permutation(h, r % hf);
            for (std::uint32_t j = 0; j < h; ++j) {
                out[2 * j] = left[la[j]];
                out[2 * j + 1] = n + right[ra[j]];
            }
            return out;
        }
        const std::uint32_t h = s / 2;
        const std::uint64_t half = total / 2;
        const bool major_left = index < half;
        std::uint64_t r = index % half;
        const std::uint64_t maj_arr = factorial(h + 1) / 2, min_arr = factorial(h);
        const std::uint64_t per = maj_arr * min_arr;
        std::uint64_t set_idx = r / per;
        r %= per;
        const std::uint64_t minor_sets = binomial(n, h);
        std::vector<Vertex> major(h + 1), minor(h);
        colex_unrank(set_idx / minor_sets, h + 1, n, major);
        colex_unrank(set_idx % minor_sets, h, n, minor);
        auto ma = unrank_first_lt_last(h + 1, r / min_arr);
        auto mi = unrank_permutation(h, r % min_arr);
        const Vertex major_off = major_left ? 0 : n, minor_off = major_left ? n : 0;
        for (std::uint32_t j = 0; j <= h; ++j)
            out[2 * j] = major_off + major[ma[j]];
        for (std::uint32_t j = 0; j < h; ++j)
            out[2 * j + 1] = minor_off + minor[mi[j]];
        return out;
    }

    std::vector<Vertex> set(s);
    switch (kind.family) {
    case Family::CliqueSet: colex_unrank(index, s, n, out); return out;
    case Family::Cycle:
    case Family::TightCycle: {
        const std::uint64_t per = factorial(s - 1) / 2;
        colex_unrank(index / per, s, n, set);
        cyclic(set, index % per);
        return out;
    }
    case Family::Path: {
        const std::uint64_t per = factorial(s) / 2;
        colex_unrank(index / per, s, n, set);
        auto arr = unrank_first_lt_last(s, index % per);
        for (std::uint32_t j = 0; j < s; ++j)
            out[j] = set[arr[j]];
        return out;
    }
    }
    return out;
}

} // namespace grc
