#include <grc/cli.hpp>

#include <gtest/gtest.h>

#include <filesystem>

using namespace grc;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run grc_run(std::vector<std::string> args)
{
    std::ostringstream out, err;
    int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override
    {
        dir_ = fs::temp_directory_path() / ("grc_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }
    std::string path(const std::string & name) const { return (dir_ / name).string(); }

    fs::path dir_;
};

} // namespace

TEST_F(Cli, BoundsCsv)
{
    auto r = grc_run({"bounds", "--mode", "complete", "--n", "40", "--k", "4"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("name,direction,exactness,numerator,denominator,decimal\n"), std::string::npos);
    EXPECT_NE(r.out.find("cycle_lower,lower,exact,20,1,20.0\n"), std::string::npos);
    EXPECT_NE(r.out.find("p8_q5_proper_lower,lower,exact,364,1,364.0\n"), std::string::npos);
}

TEST_F(Cli, ConstructThenVerify)
{
    const auto col = path("p6.col");
    auto c = grc_run({"construct", "--family", "p6", "--n", "10", "--out", col});
    ASSERT_EQ(c.code, 0) << c.err;
    EXPECT_TRUE(fs::exists(col + ".csv"));
    auto v = grc_run({"verify", col, "--kind", "path", "--t", "6", "--q", "4"});
    EXPECT_EQ(v.code, 0) << v.err;
    EXPECT_NE(v.out.find("path,6,4,"), std::string::npos);
}

TEST_F(Cli, ViolationExitsOne)
{
    Coloring mono(HostSpec::complete(5));
    for (EdgeId e = 0; e < mono.edge_count(); ++e)
        mono.set_color(e, 0);
    const auto col = path("mono.col");
    save_coloring(mono, col);
    auto v = grc_run({"verify", col, "--check", "clique:5:2"});
    EXPECT_EQ(v.code, 1);
    EXPECT_NE(v.err.find("witness: clique"), std::string::npos);
    auto p = grc_run({"verify", col, "--proper"});
    EXPECT_EQ(p.code, 1);
}

TEST_F(Cli, PipelineWithVerify)
{
    auto r = grc_run({"construct", "--family", "cycles", "--n", "20", "--k", "4", "--c2-scaled", "--verify", "--out", path("c.col")});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("verified,1"), std::string::npos);
    EXPECT_NE(r.out.find("schema,construct/1"), std::string::npos);
}

TEST_F(Cli, ManifestReplayIsByteIdentical)
{
    const auto col = path("h.col"), manifest = path("m.json");
    auto r = grc_run({"--manifest-out", manifest, "construct", "--family", "hyper-cliques", "--n", "10", "--k", "3",
        "--delta", "0.45", "--c2-scaled", "--seed", "5", "--out", col});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto first = cli::file_hash(col);
    fs::remove(col);
    EXPECT_EQ(grc_run({"--manifest", manifest}).code, 0);
    EXPECT_EQ(cli::file_hash(col), first);
    std::ifstream f(manifest);
    auto m = cli::Json::parse(f);
    EXPECT_EQ(m["outputs"][0]["fnv1a64"], cli::hex(*first));
    EXPECT_EQ(m["seed"], 5);
}

TEST_F(Cli, ExactAndBudget)
{
    auto r = grc_run({"exact", "--n", "5", "--family", "path", "--size", "4", "--q", "3"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("value,10\n"), std::string::npos);
    auto b = grc_run({"exact", "--n", "7", "--family", "cycle", "--size", "4", "--q", "3", "--budget", "100"});
    EXPECT_EQ(b.code, 2);
    EXPECT_NE(b.out.find("upper,21"), std::string::npos);
}

TEST_F(Cli, StatsCounts)
{
    auto r = grc_run({"stats", "--mode", "complete", "--n", "6", "--copies", "cycle:4", "--copies", "path:3"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("cycle,4,45\n"), std::string::npos);
    EXPECT_NE(r.out.find("path,3,60\n"), std::string::npos);
}

TEST_F(Cli, UsageErrors)
{
    EXPECT_EQ(grc_run({"construct", "--family", "cycles"}).code, 2);
    EXPECT_EQ(grc_run({"construct", "--family", "nope", "--n", "10", "--out", path("x")}).code, 2);
    EXPECT_EQ(grc_run({"verify", path("missing.col"), "--check", "cycle:4:3"}).code, 2);
    EXPECT_EQ(grc_run({"verify", path("missing.col"), "--check", "cycle:4"}).code, 2);
    EXPECT_EQ(grc_run({}).code, 2);
}
