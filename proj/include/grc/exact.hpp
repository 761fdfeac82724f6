#pragma once

// Exact minimum palette sizes on tiny hosts by branch and bound.

#include <grc/core.hpp>
#include <grc/enumerate.hpp>
#include <grc/verify.hpp>

#include <algorithm>
#include <numeric>
#include <optional>
#include <vector>

namespace grc {

struct ExactProblem {
    HostSpec host;
    std::vector<CheckItem> kinds;
    bool require_proper = false;
};

struct ExactResult {
    Color value = 0;
    Coloring witness;
    std::uint64_t nodes = 0;
};

struct BudgetExceeded : Error {
    Color lower, upper; ///< value lies in [lower, upper]
    std::uint64_t nodes;
    BudgetExceeded(Color lo, Color hi, std::uint64_t used) :
        Error("node budget exhausted; value in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]"), lower(lo),
        upper(hi), nodes(used)
    {
    }
};

inline constexpr std::uint64_t kMaxExactEdges = 36;

namespace detail {

class ExactSearch {
public:
    ExactSearch(const ExactProblem & p, std::vector<EdgeId> order) : p_(p), order_(std::move(order))
    {
        const std::size_t E = order_.size();
        pos_.assign(E, 0);
        for (std::size_t i = 0; i < E; ++i)
            pos_[order_[i]] = i;
        EdgeRanker ranker(p.host);
        std::vector<EdgeId> edges;
        through_.assign(E, {});
        for (const auto & item : p.kinds)
            stream_copies(p.host, item.kind, [&](std::span<const Vertex> s) {
                copy_edges(ranker, item.kind, s, edges);
                const std::uint32_t id = std::uint32_t(copies_.size());
                copies_.push_back({edges, item.q});
                for (EdgeId e : edges)
                    through_[pos_[e]].push_back(id);
            });
        if (p.require_proper) {
            std::vector<std::vector<Vertex>> vs(E);
            for (EdgeId e = 0; e < E; ++e)
                vs[e] = unrank_edge(p.host, e);
            adjacent_earlier_.assign(E, {});
            for (std::size_t i = 0; i < E; ++i)
                for (std::size_t j = 0; j < i; ++j) {
                    const auto & a = vs[order_[i]];
                    const auto & b = vs[order_[j]];
                    bool meet = false;
                    for (Vertex x : a)
                        meet |= std::find(b.begin(), b.end(), x) != b.end();
                    if (meet)
                        adjacent_earlier_[i].push_back(std::uint32_t(j));
                }
        }
        color_.assign(E, kUncolored);
    }

    /// Feasibility within `limit` colors. nullopt when the budget ran out.
    std::optional<bool> feasible(Color limit, std::uint64_t & budget)
    {
        limit_ = limit;
        budget_ = &budget;
        exhausted_ = false;
        std::fill(color_.begin(), color_.end(), kUncolored);
        const bool found = assign(0, 0);
        if (exhausted_)
            return std::nullopt;
        return found;
    }

    std::uint64_t nodes() const { return nodes_; }

    Coloring witness() const
    {
        Coloring c(p_.host);
        for (std::size_t i = 0; i < order_.size(); ++i)
            c.set_color(order_[i], found_[i]);
        return c;
    }

private:
    struct CopyEdges {
        std::vector<EdgeId> edges;
        std::uint32_t q;
    };

    // Every copy through position i can still reach q colors: distinct assigned colors plus
    // unassigned edges.
    bool copies_ok(std::size_t i)
    {
        for (std::uint32_t id : through_[i]) {
            const auto & c = copies_[id];
            seen_.clear();
            std::uint32_t open = 0;
            for (EdgeId e : c.edges) {
                const Color x = color_[pos_[e]];
                if (x == kUncolored)
                    ++open;
                else if (std::find(seen_.begin(), seen_.end(), x) == seen_.end())
                    seen_.push_back(x);
            }
            if (seen_.size() + open < c.q)
                return false;
        }
        return true;
    }

    bool assign(std::size_t i, Color used)
    {
        if (i == order_.size()) {
            found_ = color_;
            return true;
        }
        for (Color c = 0; c <= used && c < limit_; ++c) {
            if (*budget_ == 0) {
                exhausted_ = true;
                return false;
            }
            --*budget_;
            ++nodes_;
            if (p_.require_proper) {
                bool clash = false;
                for (std::uint32_t j : adjacent_earlier_[i])
                    clash |= color_[j] == c;
                if (clash)
                    continue;
            }
            color_[i] = c;
            if (copies_ok(i) && assign(i + 1, std::max<Color>(used, c + 1)))
                return true;
            color_[i] = kUncolored;
            if (exhausted_)
                return false;
        }
        return false;
    }

    const ExactProblem & p_;
    std::vector<EdgeId> order_;
    std::vector<std::size_t> pos_;
    std::vector<CopyEdges> copies_;
    std::vector<std::vector<std::uint32_t>> through_;
    std::vector<std::vector<std::uint32_t>> adjacent_earlier_;
    std::vector<Color> color_, found_, seen_;
    Color limit_ = 0;
    std::uint64_t * budget_ = nullptr;
    bool exhausted_ = false;
    std::uint64_t nodes_ = 0;
};

} // namespace detail

/// Edges by descending number of copies through them, ties by rank.
inline std::vector<EdgeId> fail_first_order(const ExactProblem & p)
{
    const EdgeId E = p.host.edge_count();
    std::vector<std::uint64_t> through(E, 0);
    EdgeRanker ranker(p.host);
    std::vector<EdgeId> edges;
    for (const auto & item : p.kinds)
        stream_copies(p.host, item.kind, [&](std::span<const Vertex> s) {
            copy_edges(ranker, item.kind, s, edges);
            for (EdgeId e : edges)
                ++through[e];
        });
    std::vector<EdgeId> order(E);
    std::iota(order.begin(), order.end(), EdgeId(0));
    std::stable_sort(order.begin(), order.end(), [&](EdgeId a, EdgeId b) { return through[a] > through[b]; });
    return order;
}

/// Smallest palette admitting a valid coloring, with the lexicographically least witness at that
/// size (in assignment order). Palette sizes are tried upward, so on BudgetExceeded every size
/// below `lower` has been ruled out. `order` overrides the edge order.
inline ExactResult min_colors(const ExactProblem & p, std::uint64_t budget = 50000000, std::optional<std::vector<EdgeId>> order = {})
{
    p.host.validate();
    const EdgeId E = p.host.edge_count();
    if (E > kMaxExactEdges)
        throw Unsupported("exact search is capped at " + std::to_string(kMaxExactEdges) + " edges");
    for (const auto & item : p.kinds) {
        validate_kind(p.host, item.kind);
        if (count_copies(p.host, item.kind) > 0 && copy_edge_count(p.host, item.kind) < item.q)
            throw ConfigError("no coloring gives " + item.kind.name() + " " + std::to_string(item.q) + " colors");
    }
    if (E == 0)
        return {0, Coloring(p.host), 0};
    std::vector<EdgeId> ord = order ? *order : fail_first_order(p);
    std::vector<EdgeId> check_ord = ord;
    std::sort(check_ord.begin(), check_ord.end());
    for (EdgeId i = 0; i < check_ord.size(); ++i)
        if (check_ord[i] != i || check_ord.size() != E)
            throw ConfigError("edge order must list every edge once");
    if (ord.size() != E)
        throw ConfigError("edge order must list every edge once");
    detail::ExactSearch search(p, ord);
    std::uint64_t left = budget;
    for (Color c = 1; c <= E; ++c) {
        auto r = search.feasible(c, left);
        if (!r)
            throw BudgetExceeded(c, Color(E), search.nodes());
        if (*r)
            return {c, search.witness(), search.nodes()};
    }
    throw Error("rainbow coloring rejected; unreachable");
}

} // namespace grc
