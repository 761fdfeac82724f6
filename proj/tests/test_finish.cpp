#include <grc/finish.hpp>
#include <grc/verify.hpp>

#include "oracle.hpp"

#include <gtest/gtest.h>

using namespace grc;

namespace {

CheckSpec cycles(std::uint32_t lo, std::uint32_t hi)
{
    std::vector<CheckItem> items;
    for (std::uint32_t m = lo; m <= hi; ++m)
        items.push_back({CopyKind::cycle(m), 3});
    return CheckSpec::exhaustive(items, false);
}

CheckSpec target(const PackState & st)
{
    const HostSpec & h = st.coloring.host();
    if (h.mode == HostMode::UniformComplete)
        return CheckSpec::exhaustive({{CopyKind::clique(h.k + 2), Color(binomial(h.k + 2, h.k)) - 1}}, false);
    auto [lo, hi] = cycle_range(st);
    return cycles(lo, hi);
}

// Stage-1 state holding a given coloring; tiles are irrelevant to finishing.
PackState manual(const Coloring & c, std::uint32_t k, std::uint32_t ell)
{
    PackState st;
    st.coloring = c;
    st.palette = Color(c.palette_size());
    st.k = k;
    st.ell = ell;
    return st;
}

Coloring rainbow(const HostSpec & h)
{
    Coloring c(h);
    for (EdgeId e = 0; e < c.edge_count(); ++e)
        c.set_color(e, Color(e));
    return c;
}

bool leftover_proper(const Coloring & c, const std::vector<char> & mask)
{
    std::vector<Vertex> a(2), b(2);
    for (EdgeId e = 0; e < c.edge_count(); ++e)
        for (EdgeId f = e + 1; f < c.edge_count(); ++f) {
            if (mask[e] || mask[f] || c.color(e) != c.color(f))
                continue;
            unrank_edge(c.host(), e, a);
            unrank_edge(c.host(), f, b);
            if (a[0] == b[0] || a[0] == b[1] || a[1] == b[0] || a[1] == b[1])
                return false;
        }
    return true;
}

} // namespace

TEST(Finish, EmptyLeftoverIsUnchanged)
{
    auto c = rainbow(HostSpec::complete(6));
    auto st = manual(c, 4, 4);
    FinishConfig cfg;
    cfg.c2 = 3;
    auto r = finish(st, cfg);
    EXPECT_TRUE(r.finished);
    EXPECT_EQ(r.resamples, 0u);
    EXPECT_EQ(r.coloring, c);
}

TEST(Finish, SingleLeftoverEdge)
{
    auto c = rainbow(HostSpec::complete(7));
    c.set_color(5, kUncolored);
    auto st = manual(c, 4, 5);
    FinishConfig cfg;
    cfg.c2 = 2;
    auto r = finish(st, cfg);
    ASSERT_TRUE(r.finished);
    EXPECT_TRUE(r.coloring.is_total());
    EXPECT_GE(r.coloring.color(5), st.palette);
    EXPECT_TRUE(check(r.coloring, cycles(4, 5)).ok);
}

TEST(Finish, N60EndToEnd)
{
    PackConfig pc;
    pc.seed = 3;
    pc.ell = 4;
    auto st = pack_complete(60, 4, pc);
    FinishConfig cfg;
    cfg.seed = 3;
    auto r = finish(st, cfg);
    ASSERT_TRUE(r.finished);
    EXPECT_LE(r.resamples, 1000000u);
    EXPECT_TRUE(r.coloring.is_total());
    EXPECT_TRUE(check(r.coloring, cycles(4, 4)).ok);
    for (EdgeId e = 0; e < r.coloring.edge_count(); ++e) {
        if (st.coloring.is_colored(e))
            EXPECT_EQ(r.coloring.color(e), st.coloring.color(e));
        else
            EXPECT_GE(r.coloring.color(e), st.palette);
    }
    EXPECT_LE(r.coloring.distinct_colors(), st.palette + r.c2);
}

TEST(Finish, Deterministic)
{
    PackConfig pc;
    pc.seed = 4;
    pc.ell = 5;
    auto st = pack_complete(24, 4, pc);
    FinishConfig cfg;
    cfg.seed = 8;
    auto a = finish(st, cfg), b = finish(st, cfg);
    EXPECT_EQ(a.coloring, b.coloring);
    EXPECT_EQ(a.resamples, b.resamples);
}

TEST(Finish, AllFamiliesSmall)
{
    PackConfig pc;
    pc.seed = 2;
    pc.ell = 6;
    std::vector<PackState> stages{pack_complete(20, 4, pc), pack_complete(18, 5, pc), pack_bipartite(12, 3, pc),
        pack_hyper(11, 3, pc)};
    for (const auto & st : stages) {
        FinishConfig cfg;
        cfg.c2 = scaled_c2(st.coloring.host().n);
        auto r = finish(st, cfg);
        ASSERT_TRUE(r.finished) << mode_name(st.coloring.host().mode);
        EXPECT_TRUE(check(r.coloring, target(st)).ok) << mode_name(st.coloring.host().mode);
        EXPECT_TRUE(enumerate_bad_events(r.coloring, stage1_mask(st), st.k, st.ell).empty());
    }
}

TEST(Finish, UniformResampling)
{
    PackConfig pc;
    pc.seed = 6;
    auto st = pack_complete(16, 4, pc);
    FinishConfig cfg;
    cfg.resample = Resample::Uniform;
    cfg.c2 = 40;
    auto r = finish(st, cfg);
    ASSERT_TRUE(r.finished);
    EXPECT_TRUE(check(r.coloring, cycles(4, 4)).ok);
}

TEST(Finish, CapAndRetry)
{
    PackConfig pc;
    pc.seed = 1;
    auto st = pack_complete(20, 4, pc);
    FinishConfig cfg;
    cfg.c2 = 2;
    cfg.max_resamples = 5;
    auto r = finish(st, cfg);
    EXPECT_FALSE(r.finished);
    EXPECT_EQ(r.resamples, 5u);
    EXPECT_GT(r.remaining_events, 0u);
    EXPECT_THROW(finish_or_throw(st, cfg), NotFinished);

    cfg.max_resamples = 100000;
    auto rr = finish_with_retry(st, cfg, 6);
    EXPECT_TRUE(rr.result.finished);
    EXPECT_FALSE(rr.attempts.empty());
    EXPECT_EQ(rr.result.c2, Color(2) << rr.attempts.size());
    EXPECT_TRUE(check(rr.result.coloring, cycles(4, 4)).ok);
}

TEST(Finish, DefaultPaletteSize)
{
    EXPECT_EQ(default_c2(60, 0.15), 33u);
    EXPECT_EQ(default_c2(40, 0.15), 24u);
    EXPECT_EQ(scaled_c2(40), 69u);
    EXPECT_EQ(scaled_c2(15), 28u);
}

TEST(BadEvents, RainbowLeftoverIsQuiet)
{
    const HostSpec h = HostSpec::complete(12);
    Coloring c(h);
    Rng rng(3);
    // stage 1: a rainbow on half the edges; leftover: distinct fresh colors
    std::vector<char> mask(c.edge_count());
    for (EdgeId e = 0; e < c.edge_count(); ++e)
        mask[e] = rng.chance(1, 2);
    Color next = 0;
    for (EdgeId e = 0; e < c.edge_count(); ++e)
        if (mask[e])
            c.set_color(e, next++);
    auto st = manual(c, 4, 4);
    const Color p1 = next;
    for (EdgeId e = 0; e < c.edge_count(); ++e)
        if (!mask[e])
            c.set_color(e, next++);
    EXPECT_TRUE(enumerate_bad_events(c, mask, 4, 4).empty());
    EXPECT_TRUE(check(c, cycles(4, 4)).ok);
    FinishConfig cfg;
    cfg.c2 = next - p1;
    EXPECT_FALSE(first_local_event(st, c, cfg).has_value());
}

TEST(BadEvents, OneAdjacentPair)
{
    const HostSpec h = HostSpec::complete(5);
    EdgeRanker r(h);
    auto c = rainbow(h);
    const EdgeId e = r.pair(0, 1), f = r.pair(0, 2);
    c.set_color(e, kUncolored);
    c.set_color(f, kUncolored);
    auto st = manual(c, 4, 4);
    auto mask = stage1_mask(st);
    c.set_color(e, 10);
    c.set_color(f, 10);
    auto events = enumerate_bad_events(c, mask, 4, 4);
    ASSERT_EQ(events.size(), 1u);
    EXPECT_EQ(events[0].type, EventType::A);
    FinishConfig cfg;
    cfg.c2 = 2;
    auto local = first_local_event(st, c, cfg);
    ASSERT_TRUE(local.has_value());
    EXPECT_EQ(local->type, EventType::A);
}

TEST(BadEvents, TypesBAndC)
{
    const HostSpec h = HostSpec::complete(6);
    EdgeRanker r(h);
    auto c = rainbow(h);
    // leftover 4-cycle 0-1-2-3 alternating two fresh colors
    std::vector<EdgeId> cyc{r.pair(0, 1), r.pair(1, 2), r.pair(2, 3), r.pair(3, 0)};
    for (EdgeId e : cyc)
        c.set_color(e, kUncolored);
    auto st = manual(c, 4, 4);
    auto mask = stage1_mask(st);
    for (std::size_t i = 0; i < 4; ++i)
        c.set_color(cyc[i], Color(15 + i % 2));
    auto events = enumerate_bad_events(c, mask, 4, 4);
    ASSERT_EQ(events.size(), 1u);
    EXPECT_EQ(events[0].type, EventType::B);
    FinishConfig cfg;
    cfg.c2 = 2;
    EXPECT_EQ(first_local_event(st, c, cfg)->type, EventType::B);

    // leftover 0-1 and 2-3 in one fresh color, stage-1 1-2 and 3-0 in one old color
    auto d = rainbow(h);
    d.set_color(cyc[1], 0);
    d.set_color(cyc[3], 0);
    d.set_color(cyc[0], kUncolored);
    d.set_color(cyc[2], kUncolored);
    auto st2 = manual(d, 4, 4);
    auto mask2 = stage1_mask(st2);
    d.set_color(cyc[0], 20);
    d.set_color(cyc[2], 20);
    events = enumerate_bad_events(d, mask2, 4, 4);
    ASSERT_EQ(events.size(), 1u);
    EXPECT_EQ(events[0].type, EventType::C);
    cfg.c2 = 2;
    st2.palette = 20;
    EXPECT_EQ(first_local_event(st2, d, cfg)->type, EventType::C);
}

TEST(BadEvents, AgreeWithVerifier)
{
    int fired = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        Rng rng(seed);
        const std::uint32_t n = 8 + std::uint32_t(rng.below(7));
        const std::uint32_t ell = 4 + std::uint32_t(rng.below(3));
        PackConfig pc;
        pc.seed = seed;
        pc.ell = ell;
        const bool bip = seed % 4 == 0;
        PackState st = bip ? pack_bipartite(n / 2 + 3, 3, pc) : pack_complete(n, 4, pc);
        auto mask = stage1_mask(st);
        const Color c2 = 2 + Color(rng.below(4 * n));
        Coloring c = st.coloring;
        for (EdgeId e = 0; e < c.edge_count(); ++e)
            if (!mask[e])
                c.set_color(e, st.palette + Color(rng.below(c2)));
        auto events = enumerate_bad_events(c, mask, st.k, st.ell);
        const bool valid = check(c, target(st)).ok && leftover_proper(c, mask);
        EXPECT_EQ(events.empty(), valid) << seed;
        FinishConfig cfg;
        cfg.c2 = c2;
        EXPECT_EQ(first_local_event(st, c, cfg).has_value(), !events.empty()) << seed;
        fired += !events.empty();
    }
    EXPECT_GT(fired, 10);
    EXPECT_LT(fired, 100);
}

TEST(BadEvents, HyperAgreeWithVerifier)
{
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        PackConfig pc;
        pc.seed = seed;
        auto st = pack_hyper(8 + std::uint32_t(seed % 3), 3, pc);
        auto mask = stage1_mask(st);
        Rng rng(seed);
        const Color c2 = 10 + Color(rng.below(30));
        Coloring c = st.coloring;
        for (EdgeId e = 0; e < c.edge_count(); ++e)
            if (!mask[e])
                c.set_color(e, st.palette + Color(rng.below(c2)));
        auto events = enumerate_bad_events(c, mask, st.k, st.ell);
        EXPECT_EQ(events.empty(), check(c, target(st)).ok) << seed;
        FinishConfig cfg;
        cfg.c2 = c2;
        EXPECT_EQ(first_local_event(st, c, cfg).has_value(), !events.empty()) << seed;
    }
}
