#include <grc/pack.hpp>
#include <grc/verify.hpp>

#include <gtest/gtest.h>

using namespace grc;

namespace {

PackConfig config(std::uint64_t seed, std::uint32_t ell = 0, double delta = 0.15)
{
    PackConfig c;
    c.seed = seed;
    c.ell = ell;
    c.delta = delta;
    return c;
}

CheckSpec cycles(std::uint32_t lo, std::uint32_t hi)
{
    std::vector<CheckItem> items;
    for (std::uint32_t m = lo; m <= hi; ++m)
        items.push_back({CopyKind::cycle(m), 3});
    return CheckSpec::exhaustive(items, false);
}

} // namespace

TEST(PackComplete, N40IsValidAndTriangleClasses)
{
    auto st = pack_complete(40, 4, config(1, 4));
    EXPECT_EQ(st.palette, 20u);
    EXPECT_TRUE(check(st.coloring, cycles(4, 4)).ok);
    EXPECT_TRUE(tiles_match_coloring(st));
    EXPECT_TRUE(same_color_tiles_disjoint(st));
    for (const auto & t : st.tiles)
        EXPECT_EQ(t.a.size(), 3u);
    EXPECT_FALSE(max_mono_path(st.coloring, 4).has_value());
    EXPECT_GT(st.coverage(), 0.5);
}

TEST(PackComplete, LongerCyclesAndLargerTiles)
{
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        auto st = pack_complete(24, 4, config(seed, 6));
        EXPECT_TRUE(check(st.coloring, cycles(4, 6)).ok) << seed;
        auto st5 = pack_complete(24, 5, config(seed, 6));
        EXPECT_TRUE(check(st5.coloring, cycles(5, 6)).ok) << seed;
        EXPECT_TRUE(same_color_tiles_disjoint(st5));
        EXPECT_FALSE(max_mono_path(st5.coloring, 5).has_value());
    }
}

TEST(PackComplete, SmallestHostTakesTwoTiles)
{
    for (std::uint32_t k = 4; k <= 7; ++k) {
        auto st = pack_complete(2 * (k - 1), k, config(k));
        EXPECT_GE(st.tiles.size(), 2u) << k;
    }
}

TEST(PackComplete, UniformSamplingIsValid)
{
    auto cfg = config(5, 5);
    cfg.sampling = Sampling::Uniform;
    auto st = pack_complete(20, 4, cfg);
    EXPECT_FALSE(st.tiles.empty());
    EXPECT_TRUE(check(st.coloring, cycles(4, 5)).ok);
    EXPECT_TRUE(same_color_tiles_disjoint(st));
}

TEST(PackComplete, Deterministic)
{
    EXPECT_EQ(pack_complete(30, 4, config(9, 5)), pack_complete(30, 4, config(9, 5)));
    EXPECT_FALSE(pack_complete(30, 4, config(9, 5)) == pack_complete(30, 4, config(10, 5)));
}

TEST(PackComplete, RejectsBadParameters)
{
    EXPECT_THROW(pack_complete(5, 4, config(1)), ConfigError);
    EXPECT_THROW(pack_complete(20, 3, config(1)), ConfigError);
    EXPECT_THROW(pack_complete(20, 5, config(1, 4)), ConfigError);
    auto bad = config(1);
    bad.delta = 0.7;
    EXPECT_THROW(pack_complete(20, 4, bad), ConfigError);
}

TEST(PackBipartite, N24IsValid)
{
    auto st = pack_bipartite(24, 3, config(1));
    EXPECT_EQ(st.palette, 9u);
    EXPECT_TRUE(check(st.coloring, CheckSpec::exhaustive({{CopyKind::cycle(6), 3}}, false)).ok);
    EXPECT_TRUE(tiles_match_coloring(st));
    EXPECT_TRUE(tiles_share_at_most_one_vertex(st));
    EXPECT_TRUE(same_color_tiles_disjoint(st));
    for (const auto & t : st.tiles) {
        EXPECT_EQ(t.a.size() + t.b.size(), 6u);
        EXPECT_EQ(t.a.size() * t.b.size(), 8u);
    }
}

TEST(PackBipartite, FullPairSetWhenPIsOne)
{
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        auto st = pack_bipartite(18, 4, config(seed));
        EXPECT_FALSE(st.tiles.empty());
        EXPECT_TRUE(tiles_share_at_most_one_vertex(st));
        EXPECT_TRUE(check(st.coloring, CheckSpec::exhaustive({{CopyKind::cycle(8), 3}}, false)).ok);
    }
}

TEST(PackHyper, N20IsValid)
{
    auto st = pack_hyper(20, 3, config(7, 0, 0.2));
    EXPECT_TRUE(check(st.coloring, CheckSpec::exhaustive({{CopyKind::clique(5), 9}}, false)).ok);
    EXPECT_TRUE(tiles_match_coloring(st));
    EXPECT_TRUE(hyper_classes_ok(st.coloring));
    EXPECT_TRUE(hyper_property_two(st));
}

TEST(PackHyper, TileShape)
{
    auto st = pack_hyper(12, 3, config(2));
    ASSERT_FALSE(st.tiles.empty());
    for (const auto & t : st.tiles) {
        ASSERT_EQ(t.a.size(), 4u);
        std::vector<Color> c = t.colors;
        std::sort(c.begin(), c.end());
        EXPECT_EQ(std::unique(c.begin(), c.end()) - c.begin(), 3);
        int twice = 0;
        for (Color x : t.colors)
            twice += std::count(t.colors.begin(), t.colors.end(), x) == 2;
        EXPECT_EQ(twice, 2);
    }
}

TEST(PackHyper, FourUniform)
{
    auto st = pack_hyper(10, 4, config(3));
    EXPECT_FALSE(st.tiles.empty());
    EXPECT_TRUE(check(st.coloring, CheckSpec::exhaustive({{CopyKind::clique(6), 14}}, false)).ok);
    EXPECT_TRUE(hyper_classes_ok(st.coloring));
    EXPECT_TRUE(hyper_property_two(st));
}

TEST(PackHyper, GraphCaseUsesK4)
{
    auto st = pack_hyper(13, 2, config(4));
    EXPECT_EQ(st.coloring.host().mode, HostMode::Complete);
    EXPECT_TRUE(check(st.coloring, CheckSpec::exhaustive({{CopyKind::clique(4), 5}}, false)).ok);
}

TEST(PackHyper, Deterministic)
{
    EXPECT_EQ(pack_hyper(14, 3, config(11)), pack_hyper(14, 3, config(11)));
}

TEST(PackHyper, XCountsNeedTotalColoring)
{
    auto st = pack_hyper(12, 3, config(5));
    EXPECT_TRUE(hyper_classes_ok(st.coloring));
    EXPECT_THROW(xcounts(st.coloring), PartialColoring);
}
