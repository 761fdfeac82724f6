#pragma once

// Host graphs, edge ranking, coloring storage and the .grc text format.

#include <grc/combinatorics.hpp>

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace grc {

using EdgeId = std::uint64_t;
using Color = std::uint32_t;

/// Reserved value outside the color id space.
inline constexpr Color kUncolored = 0xFFFFFFFFu;

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InvalidEdge : Error {
    using Error::Error;
};
struct Unsupported : Error {
    using Error::Error;
};
struct ConfigError : Error {
    using Error::Error;
};
struct PartialColoring : Error {
    using Error::Error;
};
struct ParseError : Error {
    ParseError(std::size_t line_no, const std::string & what) :
        Error("line " + std::to_string(line_no) + ": " + what), line(line_no)
    {
    }
    std::size_t line;
};

enum class HostMode { Complete, Bipartite, UniformComplete };

inline const char * mode_name(HostMode m)
{
    switch (m) {
    case HostMode::Complete: return "complete";
    case HostMode::Bipartite: return "bipartite";
    case HostMode::UniformComplete: return "uniform";
    }
    return "?";
}

inline HostMode parse_mode(const std::string & s)
{
    if (s == "complete")
        return HostMode::Complete;
    if (s == "bipartite")
        return HostMode::Bipartite;
    if (s == "uniform")
        return HostMode::UniformComplete;
    throw ConfigError("unknown host mode '" + s + "'");
}

/// K_n, K_{n,n} (left = 0..n-1, right = n..2n-1) or K_n^k.
struct HostSpec {
    HostMode mode = HostMode::Complete;
    std::uint32_t n = 0;
    std::uint32_t k = 2;

    static HostSpec complete(std::uint32_t n) { return {HostMode::Complete, n, 2}; }
    static HostSpec bipartite(std::uint32_t n) { return {HostMode::Bipartite, n, 2}; }
    static HostSpec uniform(std::uint32_t n, std::uint32_t k) { return {HostMode::UniformComplete, n, k}; }

    void validate() const
    {
        if (mode == HostMode::UniformComplete) {
            if (k < 3 || k > n)
                throw ConfigError("uniform host needs 3 <= k <= n");
        }
        else if (k != 2)
            throw ConfigError("graph hosts have k = 2");
    }

    bool is_graph() const { return mode != HostMode::UniformComplete; }
    /// Complete and UniformComplete hosts: every k-subset is an edge.
    bool all_subsets() const { return mode != HostMode::Bipartite; }

    std::uint32_t vertex_count() const { return mode == HostMode::Bipartite ? 2 * n : n; }

    std::uint64_t edge_count() const
    {
        if (mode == HostMode::Bipartite)
            return std::uint64_t(n) * n;
        return binomial(n, k);
    }

    bool is_left(Vertex v) const { return v < n; }

    friend bool operator==(const HostSpec &, const HostSpec &) = default;
};

/// Colex rank of a sorted vertex set within the host's edge set.
inline EdgeId rank_edge(const HostSpec & host, std::span<const Vertex> verts)
{
    if (verts.size() != host.k)
        throw InvalidEdge("edge has wrong number of vertices");
    for (std::size_t i = 0; i < verts.size(); ++i) {
        if (verts[i] >= host.vertex_count())
            throw InvalidEdge("vertex out of range");
        if (i > 0 && verts[i - 1] >= verts[i])
            throw InvalidEdge("edge vertices must be strictly ascending");
    }
    if (host.mode == HostMode::Bipartite) {
        if (!host.is_left(verts[0]) || host.is_left(verts[1]))
            throw InvalidEdge("bipartite edge must join the two sides");
        return EdgeId(verts[1] - host.n) * host.n + verts[0];
    }
    return colex_rank(verts);
}

inline EdgeId rank_edge(const HostSpec & host, std::initializer_list<Vertex> verts)
{
    std::vector<Vertex> v(verts);
    return rank_edge(host, v);
}

inline void unrank_edge(const HostSpec & host, EdgeId id, std::span<Vertex> out)
{
    if (id >= host.edge_count())
        throw InvalidEdge("edge id out of range");
    if (host.mode == HostMode::Bipartite) {
        out[0] = Vertex(id % host.n);
        out[1] = Vertex(host.n + id / host.n);
        return;
    }
    colex_unrank(id, host.k, host.n, out);
}

inline std::vector<Vertex> unrank_edge(const HostSpec & host, EdgeId id)
{
    std::vector<Vertex> out(host.k);
    unrank_edge(host, id, out);
    return out;
}

/// Fast ranking for inner loops. Graph hosts use a dense pair table.
class EdgeRanker {
public:
    static constexpr EdgeId kNoEdge = ~EdgeId(0);

    explicit EdgeRanker(const HostSpec & host) : host_(host), V_(host.vertex_count())
    {
        if (host.is_graph()) {
            pair_.assign(std::size_t(V_) * V_, kNoEdge);
            for (Vertex u = 0; u < V_; ++u)
                for (Vertex v = u + 1; v < V_; ++v) {
                    if (host.mode == HostMode::Bipartite && (host.is_left(u) == host.is_left(v)))
                        continue;
                    EdgeId r = host.mode == HostMode::Bipartite ? EdgeId(v - host.n) * host.n + u
                                                                 : EdgeId(v) * (v - 1) / 2 + u;
                    pair_[std::size_t(u) * V_ + v] = r;
                    pair_[std::size_t(v) * V_ + u] = r;
                }
        }
        else
            table_ = BinomialTable(host.n + 1, host.k + 1);
    }

    const HostSpec & host() const { return host_; }

    /// Rank of {u, v} in either order, or kNoEdge. Graph hosts only.
    EdgeId pair(Vertex u, Vertex v) const { return pair_[std::size_t(u) * V_ + v]; }

    /// Rank of an ascending k-set; no validation.
    EdgeId sorted(std::span<const Vertex> verts) const
    {
        if (host_.is_graph())
            return pair(verts[0], verts[1]);
        return colex_rank(verts, table_);
    }

    /// Rank of an arbitrary-order k-set; sorts a copy.
    EdgeId unsorted(std::span<const Vertex> verts) const
    {
        Vertex buf[32];
        std::copy(verts.begin(), verts.end(), buf);
        std::sort(buf, buf + verts.size());
        return sorted(std::span<const Vertex>(buf, verts.size()));
    }

private:
    HostSpec host_;
    Vertex V_;
    std::vector<EdgeId> pair_;
    BinomialTable table_;
};

/// Dense edge -> color map over a host.
class Coloring {
public:
    Coloring() = default;

    explicit Coloring(const HostSpec & host) : host_(host), colors_(host.edge_count(), kUncolored) { host.validate(); }

    Coloring(const HostSpec & host, std::vector<Color> colors, Color palette_size) :
        host_(host), colors_(std::move(colors)), palette_(palette_size)
    {
        host.validate();
        if (colors_.size() != host.edge_count())
            throw ConfigError("color array does not match host edge count");
        for (Color c : colors_)
            if (c != kUncolored && c >= palette_)
                throw ConfigError("color id outside palette");
    }

    const HostSpec & host() const { return host_; }
    std::uint64_t edge_count() const { return colors_.size(); }
    std::span<const Color> colors() const { return colors_; }

    Color color(EdgeId e) const { return colors_[e]; }
    bool is_colored(EdgeId e) const { return colors_[e] != kUncolored; }

    /// Assigning an id at or past the palette grows the declared palette.
    void set_color(EdgeId e, Color c)
    {
        colors_[e] = c;
        if (c != kUncolored && c >= palette_)
            palette_ = c + 1;
    }

    /// Declared palette; may exceed the ids in use until normalize() runs.
    Color palette_size() const { return palette_; }

    void reserve_palette(Color p)
    {
        if (p < palette_)
            for (Color c : colors_)
                if (c != kUncolored && c >= p)
                    throw ConfigError("palette smaller than ids in use");
        palette_ = p;
    }

    std::uint64_t colored_count() const
    {
        return std::uint64_t(std::count_if(colors_.begin(), colors_.end(), [](Color c) { return c != kUncolored; }));
    }

    bool is_total() const { return std::find(colors_.begin(), colors_.end(), kUncolored) == colors_.end(); }

    /// Compacts the ids in use to 0..m-1 preserving their order; palette becomes m.
    void normalize()
    {
        std::vector<char> used(palette_, 0);
        for (Color c : colors_)
            if (c != kUncolored)
                used[c] = 1;
        std::vector<Color> remap(palette_, kUncolored);
        Color next = 0;
        for (Color c = 0; c < palette_; ++c)
            if (used[c])
                remap[c] = next++;
        for (Color & c : colors_)
            if (c != kUncolored)
                c = remap[c];
        palette_ = next;
    }

    /// Number of distinct ids that actually appear.
    Color distinct_colors() const
    {
        std::vector<char> used(palette_, 0);
        Color count = 0;
        for (Color c : colors_)
            if (c != kUncolored && !used[c]) {
                used[c] = 1;
                ++count;
            }
        return count;
    }

    friend bool operator==(const Coloring &, const Coloring &) = default;

private:
    HostSpec host_;
    std::vector<Color> colors_;
    Color palette_ = 0;
};

/// Sizes of the nonempty color classes, in ascending color-id order.
inline std::vector<std::uint64_t> color_class_sizes(const Coloring & coloring)
{
    std::vector<std::uint64_t> sizes(coloring.palette_size(), 0);
    for (Color c : coloring.colors())
        if (c != kUncolored)
            ++sizes[c];
    std::erase(sizes, 0);
    return sizes;
}

/// Per-color edge lists and per-(vertex, color) incidence counts, kept in sync with a Coloring.
class ColorClassIndex {
public:
    explicit ColorClassIndex(const Coloring & coloring) :
        host_(coloring.host()), V_(coloring.host().vertex_count())
    {
        grow(coloring.palette_size());
        std::vector<Vertex> buf(host_.k);
        for (EdgeId e = 0; e < coloring.edge_count(); ++e) {
            Color c = coloring.color(e);
            if (c == kUncolored)
                continue;
            classes_[c].push_back(e);
            unrank_edge(host_, e, buf);
            for (Vertex v : buf)
                ++incidence_[std::size_t(v) * palette_ + c];
        }
    }

    /// Recolors e in both the coloring and the index.
    void assign(Coloring & coloring, EdgeId e, Color c)
    {
        Color old = coloring.color(e);
        if (old == c)
            return;
        if (c != kUncolored && c >= palette_)
            grow(c + 1);
        std::vector<Vertex> buf(host_.k);
        unrank_edge(host_, e, buf);
        if (old != kUncolored) {
            auto & list = classes_[old];
            list.erase(std::lower_bound(list.begin(), list.end(), e));
            for (Vertex v : buf)
                --incidence_[std::size_t(v) * palette_ + old];
        }
        if (c != kUncolored) {
            auto & list = classes_[c];
            list.insert(std::lower_bound(list.begin(), list.end(), e), e);
            for (Vertex v : buf)
                ++incidence_[std::size_t(v) * palette_ + c];
        }
        coloring.set_color(e, c);
    }

    std::span<const EdgeId> edges_of(Color c) const
    {
        if (c >= palette_)
            return {};
        return classes_[c];
    }

    std::uint32_t incidence(Vertex v, Color c) const
    {
        return c < palette_ ? incidence_[std::size_t(v) * palette_ + c] : 0;
    }

    Color palette_capacity() const { return palette_; }

    /// Equality of content, ignoring spare capacity for unused color ids.
    friend bool operator==(const ColorClassIndex & a, const ColorClassIndex & b)
    {
        if (!(a.host_ == b.host_))
            return false;
        Color p = std::max(a.palette_, b.palette_);
        for (Color c = 0; c < p; ++c) {
            auto ea = a.edges_of(c), eb = b.edges_of(c);
            if (!std::equal(ea.begin(), ea.end(), eb.begin(), eb.end()))
                return false;
            for (Vertex v = 0; v < a.V_; ++v)
                if (a.incidence(v, c) != b.incidence(v, c))
                    return false;
        }
        return true;
    }

private:
    void grow(Color p)
    {
        std::vector<std::uint32_t> next(std::size_t(V_) * p, 0);
        for (Vertex v = 0; v < V_; ++v)
            for (Color c = 0; c < palette_; ++c)
                next[std::size_t(v) * p + c] = incidence_[std::size_t(v) * palette_ + c];
        incidence_ = std::move(next);
        classes_.resize(p);
        palette_ = p;
    }

    HostSpec host_;
    Vertex V_;
    Color palette_ = 0;
    std::vector<std::vector<EdgeId>> classes_;
    std::vector<std::uint32_t> incidence_;
};

// ---------------------------------------------------------------------------
// .grc text format
//
//   grc 1 <mode> <n> <k> <palette_size>
//   e v1 ... vk c        (one line per colored edge, vertices ascending)
//   # comment

inline void write_coloring(std::ostream & out, const Coloring & coloring)
{
    const HostSpec & h = coloring.host();
    out << "grc 1 " << mode_name(h.mode) << ' ' << h.n << ' ' << h.k << ' ' << coloring.palette_size() << '\n';
    std::vector<Vertex> buf(h.k);
    for (EdgeId e = 0; e < coloring.edge_count(); ++e) {
        Color c = coloring.color(e);
        if (c == kUncolored)
            continue;
        unrank_edge(h, e, buf);
        out << 'e';
        for (Vertex v : buf)
            out << ' ' << v;
        out << ' ' << c << '\n';
    }
}

inline Coloring read_coloring(std::istream & in)
{
    std::string line;
    std::size_t line_no = 0;
    std::optional<Coloring> result;
    std::vector<char> seen;
    auto parse_uint = [&](std::istringstream & ss, const char * what) -> std::uint64_t {
        std::string tok;
        if (!(ss >> tok))
            throw ParseError(line_no, std::string("missing ") + what);
        if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos || tok.size() > 18)
            throw ParseError(line_no, std::string("bad ") + what + " '" + tok + "'");
        return std::stoull(tok);
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty() || line[0] == '#')
            continue;
        std::istringstream ss(line);
        std::string tag;
        ss >> tag;
        if (!result) {
            if (tag != "grc")
                throw ParseError(line_no, "expected 'grc' header");
            if (parse_uint(ss, "version") != 1)
                throw ParseError(line_no, "unsupported format version");
            std::string mode;
            if (!(ss >> mode))
                throw ParseError(line_no, "missing mode");
            HostSpec host;
            try {
                host.mode = parse_mode(mode);
            }
            catch (const ConfigError & e) {
                throw ParseError(line_no, e.what());
            }
            host.n = std::uint32_t(parse_uint(ss, "n"));
            host.k = std::uint32_t(parse_uint(ss, "k"));
            auto palette = parse_uint(ss, "palette size");
            if (palette >= kUncolored)
                throw ParseError(line_no, "palette too large");
            try {
                host.validate();
            }
            catch (const ConfigError & e) {
                throw ParseError(line_no, e.what());
            }
            result.emplace(host);
            result->reserve_palette(Color(palette));
            seen.assign(host.edge_count(), 0);
            std::string extra;
            if (ss >> extra)
                throw ParseError(line_no, "trailing data in header");
            continue;
        }
        if (tag != "e")
            throw ParseError(line_no, "expected edge line");
        const HostSpec & host = result->host();
        std::vector<Vertex> verts(host.k);
        for (auto & v : verts) {
            auto x = parse_uint(ss, "vertex");
            if (x >= host.vertex_count())
                throw ParseError(line_no, "vertex out of range");
            v = Vertex(x);
        }
        auto c = parse_uint(ss, "color");
        if (c >= result->palette_size())
            throw ParseError(line_no, "color id not below declared palette");
        std::string extra;
        if (ss >> extra)
            throw ParseError(line_no, "trailing data on edge line");
        EdgeId e;
        try {
            e = rank_edge(host, verts);
        }
        catch (const InvalidEdge & err) {
            throw ParseError(line_no, err.what());
        }
        if (seen[e])
            throw ParseError(line_no, "duplicate edge");
        seen[e] = 1;
        result->set_color(e, Color(c));
    }
    if (!result)
        throw ParseError(line_no, "empty file");
    return std::move(*result);
}

inline void save_coloring(const Coloring & coloring, const std::string & path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("cannot open '" + path + "' for writing");
    write_coloring(out, coloring);
}

inline Coloring load_coloring(const std::string & path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot open '" + path + "'");
    return read_coloring(in);
}

} // namespace grc
