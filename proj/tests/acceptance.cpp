// Acceptance run: one PASS/FAIL line per criterion.
//
//   acceptance                 all criteria
//   acceptance --criterion 3   a single criterion (repeatable)
//   acceptance --leftover-cap  the stage-1 leftover cap at n = 80
//
// Exit code 0 iff every selected line passed.

#include "oracle.hpp"

#include <grc/grc.hpp>

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

using namespace grc;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string & what)
    {
        if (!ok) {
            pass = false;
            detail << " FAILED(" << what << ")";
        }
    }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// ---------------------------------------------------------------------------
// Pipeline configurations shared by criteria 3-8, 11 and 12.

struct PipelineConfig {
    std::string family; // CLI family name
    std::uint32_t n, k, ell;
    double delta;
};

const PipelineConfig kCycles40{"cycles", 40, 4, 4, 0.15};
const PipelineConfig kCycles60{"cycles", 60, 4, 4, 0.15};
const PipelineConfig kCycles80{"cycles", 80, 4, 4, 0.15};
const PipelineConfig kConsecutive60{"cycles", 60, 4, 6, 0.15};
const PipelineConfig kBipartite24{"bipartite-cycles", 24, 3, 0, 0.15};
const PipelineConfig kHyper15{"hyper-cliques", 15, 3, 0, 0.45};
const PipelineConfig kHyper20{"hyper-cliques", 20, 3, 0, 0.45};

std::string label(const PipelineConfig & c)
{
    std::ostringstream s;
    s << c.family << " n=" << c.n << " k=" << c.k;
    if (c.ell)
        s << " ell=" << c.ell;
    return s.str();
}

PackState stage1(const PipelineConfig & c, std::uint64_t seed)
{
    PackConfig pc;
    pc.seed = seed;
    pc.ell = c.ell;
    pc.delta = c.delta;
    if (c.family == "cycles")
        return pack_complete(c.n, c.k, pc);
    if (c.family == "bipartite-cycles")
        return pack_bipartite(c.n, c.k, pc);
    return pack_hyper(c.n, c.k, pc);
}

FinishConfig finish_config(const PipelineConfig & c, std::uint64_t seed)
{
    FinishConfig fc;
    fc.seed = seed;
    fc.delta = c.delta;
    fc.c2 = scaled_c2(c.n);
    fc.max_resamples = 1000000;
    return fc;
}

struct PipelineRun {
    PackState st;
    RetryResult finished;
    double seconds = 0;
};

std::map<std::string, PipelineRun> g_runs;

const PipelineRun & pipeline(const PipelineConfig & c)
{
    auto key = label(c);
    auto it = g_runs.find(key);
    if (it != g_runs.end())
        return it->second;
    const auto t0 = Clock::now();
    PipelineRun r;
    r.st = stage1(c, 1);
    r.finished = finish_with_retry(r.st, finish_config(c, 1));
    r.seconds = seconds_since(t0);
    return g_runs.emplace(key, std::move(r)).first->second;
}

/// Exhaustive verification of the pipeline's target; also records the time spent.
CheckReport verify_target(const PipelineConfig & c, const Coloring & coloring, double & seconds)
{
    const auto t0 = Clock::now();
    std::vector<CheckItem> items;
    if (c.family == "cycles")
        for (std::uint32_t m = c.k; m <= std::max(c.ell, c.k); ++m)
            items.push_back({CopyKind::cycle(m), 3});
    else if (c.family == "bipartite-cycles")
        items.push_back({CopyKind::cycle(2 * c.k), 3});
    else
        items.push_back({CopyKind::clique(c.k + 2), std::uint32_t(binomial(c.k + 2, c.k)) - 1});
    auto rep = check(coloring, CheckSpec::exhaustive(items));
    seconds = seconds_since(t0);
    return rep;
}

void pipeline_validity(const PipelineConfig & c, double limit_s, Outcome & o)
{
    const auto & r = pipeline(c);
    const Coloring & col = r.finished.result.coloring;
    double vs = 0;
    auto rep = verify_target(c, col, vs);
    std::uint64_t violations = 0;
    for (const auto & k : rep.kinds)
        violations += k.violations;
    o.detail << " [" << label(c) << ": palette " << col.palette_size() << ", copies " << rep.copies_checked
             << ", violations " << violations << ", " << std::fixed << std::setprecision(1) << r.seconds + vs << "s]";
    o.require(r.finished.result.finished && col.is_total(), label(c) + " total");
    o.require(rep.ok, label(c) + " zero violations");
    o.require(r.seconds + vs < limit_s, label(c) + " runtime");
}

// ---------------------------------------------------------------------------

Outcome criterion1()
{
    Outcome o;
    const auto t0 = Clock::now();
    struct Case {
        std::uint32_t n, t, q;
        Color want;
    };
    for (Case c : {Case{4, 4, 3, 6}, Case{5, 4, 3, 10}, Case{5, 5, 4, 10}}) {
        auto r = min_colors({HostSpec::complete(c.n), {{CopyKind::path(c.t), c.q}}, false});
        o.detail << " f(K" << c.n << ",P" << c.t << "," << c.q << ")=" << r.value;
        o.require(r.value == c.want, "expected " + std::to_string(c.want));
    }
    const double s = seconds_since(t0);
    o.detail << " in " << std::fixed << std::setprecision(2) << s << "s";
    o.require(s < 60, "runtime < 60s");
    return o;
}

Outcome criterion2()
{
    Outcome o;
    const auto t0 = Clock::now();
    Rng rng(2);
    std::vector<std::pair<HostSpec, CopyKind>> cases;
    for (std::uint32_t n = 3; n <= 8; ++n) {
        auto h = HostSpec::complete(n);
        for (std::uint32_t m = 3; m <= std::min(n, 6u); ++m)
            cases.push_back({h, CopyKind::cycle(m)});
        for (std::uint32_t t = 2; t <= std::min(n, 6u); ++t)
            cases.push_back({h, CopyKind::path(t)});
        for (std::uint32_t p = 2; p <= std::min(n, 5u); ++p)
            cases.push_back({h, CopyKind::clique(p)});
    }
    for (std::uint32_t n = 2; n <= 4; ++n) {
        auto h = HostSpec::bipartite(n);
        for (std::uint32_t m = 4; m <= 2 * n; m += 2)
            cases.push_back({h, CopyKind::cycle(m)});
        for (std::uint32_t t = 2; t <= std::min(2 * n, 5u); ++t)
            cases.push_back({h, CopyKind::path(t)});
    }
    for (std::uint32_t n = 4; n <= 7; ++n) {
        auto h = HostSpec::uniform(n, 3);
        for (std::uint32_t p = 3; p <= std::min(n, 5u); ++p)
            cases.push_back({h, CopyKind::clique(p)});
        for (std::uint32_t l = 4; l <= n; ++l)
            cases.push_back({h, CopyKind::tight_cycle(l)});
    }
    std::uint64_t agree = 0, total = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const auto & [host, kind] = cases[std::size_t(trial) % cases.size()];
        const Color palette = Color(1 + rng.below(5));
        auto c = oracle::random_coloring(host, rng, palette, trial % 4 == 0 ? 0.2 : 0.0);
        const std::uint32_t q = 1 + std::uint32_t(rng.below(std::min<std::uint64_t>(copy_edge_count(host, kind), 4)));
        auto r = check(c, CheckSpec::exhaustive({{kind, q}}, true));
        const bool same = r.kinds[0].violations == oracle::naive_violations(c, kind, q) &&
                          r.kinds[0].copies_checked == oracle::brute_copies(host, kind).size() &&
                          !r.improper == oracle::naive_proper(c);
        agree += same;
        ++total;
        if (!same)
            o.detail << " mismatch at trial " << trial << " (" << kind.name() << ")";
    }
    const double s = seconds_since(t0);
    o.detail << " " << agree << "/" << total << " agree over " << cases.size() << " host/kind pairs in " << std::fixed
             << std::setprecision(2) << s << "s";
    o.require(agree == total, "100% agreement");
    o.require(s < 120, "runtime < 120s");
    return o;
}

Outcome criterion3()
{
    Outcome o;
    for (const auto * c : {&kCycles40, &kCycles60, &kCycles80}) {
        pipeline_validity(*c, 300, o);
        const Color palette = pipeline(*c).finished.result.coloring.palette_size();
        o.require(BigInt(palette) >= cycle_lower(c->n, 4), label(*c) + " palette >= cycle_lower");
    }
    return o;
}

Outcome criterion4()
{
    Outcome o;
    for (const auto * c : {&kCycles40, &kCycles60, &kCycles80}) {
        const Color palette = pipeline(*c).finished.result.coloring.palette_size();
        const double cap = 0.5 * c->n + 3 * std::pow(double(c->n), 0.9);
        o.detail << " [n=" << c->n << ": " << palette << " <= " << std::fixed << std::setprecision(1) << cap << "]";
        o.require(palette <= cap, label(*c) + " palette cap");
    }
    return o;
}

Outcome criterion5()
{
    Outcome o;
    pipeline_validity(kConsecutive60, 600, o);
    return o;
}

Outcome criterion6()
{
    Outcome o;
    pipeline_validity(kBipartite24, 300, o);
    const auto & r = pipeline(kBipartite24);
    o.require(tiles_share_at_most_one_vertex(r.st), "tiles share <= 1 vertex");
    const Color palette = r.finished.result.coloring.palette_size();
    const double cap = 3.0 / 8 * 24 + 3 * std::pow(24.0, 0.9);
    o.detail << " [" << r.st.tiles.size() << " tiles; palette " << palette << " <= " << std::fixed << std::setprecision(1) << cap
             << "]";
    o.require(palette <= cap, "palette cap");
    return o;
}

Outcome criterion7()
{
    Outcome o;
    for (const auto * c : {&kHyper15, &kHyper20}) {
        pipeline_validity(*c, 300, o);
        const auto & r = pipeline(*c);
        o.require(hyper_classes_ok(r.st.coloring), label(*c) + " stage-1 property 1");
        o.require(hyper_property_two(r.st), label(*c) + " stage-1 property 2");
        const Color palette = r.finished.result.coloring.palette_size();
        const BigInt lower = ceil_of(hyper_clique_lower(c->n, 3));
        const double cap = 11.0 / 12 * c->n + 3 * std::pow(double(c->n), 0.9);
        o.detail << " [n=" << c->n << ": " << lower << " <= " << palette << " <= " << std::fixed << std::setprecision(1) << cap
                 << "]";
        o.require(BigInt(palette) >= lower, label(*c) + " palette >= lower bound");
        o.require(palette <= cap, label(*c) + " palette cap");
    }
    return o;
}

Outcome criterion8()
{
    Outcome o;
    for (const auto * c : {&kHyper15, &kHyper20}) {
        const Coloring & col = pipeline(*c).finished.result.coloring;
        double vs = 0;
        if (!col.is_total() || !verify_target(*c, col, vs).ok) {
            o.require(false, label(*c) + " has a total valid coloring");
            continue;
        }
        const auto x = xcounts(col);
        const std::uint64_t n = c->n;
        o.detail << " [n=" << n << ": x0=" << x.x0 << " x1=" << x.x1 << " x2=" << x.x2 << "]";
        o.require(x.x1 + 2 * x.x2 == binomial(n, 3), label(*c) + " x1+2x2");
        o.require(x.x0 + 3 * x.x1 + 5 * x.x2 == binomial(n, 2) * col.palette_size(), label(*c) + " x0+3x1+5x2");
        o.require(x.x1 >= 2 * x.x2, label(*c) + " x1 >= 2x2");
    }
    return o;
}

Outcome criterion9()
{
    Outcome o;
    const auto t0 = Clock::now();
    PackCliquesConfig pc;
    auto packing = pack_cliques(13, 4, pc);
    auto c = color_p6(packing);
    auto rep = check(c, CheckSpec::exhaustive({{CopyKind::path(6), 4}}));
    const double s = seconds_since(t0);
    o.detail << " blocks " << packing.blocks.size() << ", leftover " << packing.leftover.size() << ", colors "
             << c.distinct_colors() << ", copies " << rep.copies_checked << ", " << std::fixed << std::setprecision(2) << s
             << "s";
    o.require(packing.leftover.empty() && packing.blocks.size() == 13, "perfect decomposition");
    o.require(c.distinct_colors() == 39, "exactly 39 colors");
    o.require(rep.ok && rep.copies_checked == 617760, "617760 copies, zero violations");
    o.require(s < 60, "runtime < 60s");
    return o;
}

Outcome criterion10()
{
    Outcome o;
    auto packing = pack_cliques(16, 6, PackCliquesConfig{});
    auto c = color_p8_proper(packing);
    o.detail << " blocks " << packing.blocks.size() << ", colors " << c.distinct_colors() << " (bound " << p8_lower(16) << ")";
    o.require(BigInt(c.distinct_colors()) == p8_lower(16), "exactly p8_lower(16) colors");
    auto proper = check(c, CheckSpec::exhaustive({}, true));
    o.require(proper.ok, "proper");
    const auto t0 = Clock::now();
    auto sampled = check(c, CheckSpec::sampled({{CopyKind::path(8), 5}}, 10000000, 1));
    const double ss = seconds_since(t0);
    o.detail << "; sample " << sampled.copies_checked << " copies, " << sampled.kinds[0].violations << " violations, "
             << std::fixed << std::setprecision(1) << ss << "s";
    o.require(sampled.ok && sampled.copies_checked == 10000000, "1e7-copy sample clean");
    o.require(ss < 300, "sample runtime < 5min");
    const auto t1 = Clock::now();
    auto full = check(c, CheckSpec::exhaustive({{CopyKind::path(8), 5}}));
    const double fs = seconds_since(t1);
    o.detail << "; exhaustive " << full.copies_checked << " copies, " << full.kinds[0].violations << " violations, " << fs << "s";
    o.require(full.ok, "exhaustive clean");
    o.require(fs < 3600, "exhaustive runtime < 60min");
    return o;
}

Outcome criterion11()
{
    Outcome o;
    for (const auto * c : {&kCycles40, &kCycles60, &kCycles80, &kConsecutive60, &kBipartite24, &kHyper15, &kHyper20}) {
        int first = 0, rescued = 0, lost = 0;
        std::vector<std::uint64_t> counts;
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            auto st = stage1(*c, seed);
            auto r = finish_with_retry(st, finish_config(*c, seed));
            if (!r.result.finished)
                ++lost;
            else if (r.attempts.empty())
                ++first;
            else
                ++rescued;
            counts.push_back(r.result.resamples);
        }
        std::sort(counts.begin(), counts.end());
        o.detail << " [" << label(*c) << ": first " << first << "/10, retried " << rescued << ", resamples min "
                 << counts.front() << " median " << counts[counts.size() / 2] << " max " << counts.back() << "]";
        o.require(first >= 9, label(*c) + " first-attempt >= 9/10");
        o.require(lost == 0, label(*c) + " retry succeeds");
    }
    return o;
}

Outcome criterion12()
{
    Outcome o;
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / ("grc_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    auto run = [&](std::vector<std::string> args) {
        std::ostringstream out, err;
        return cli::run(args, out, err);
    };
    auto hashes = [](const std::string & manifest) {
        std::ifstream f(manifest);
        auto m = cli::Json::parse(f);
        std::vector<std::string> out;
        for (const auto & e : m["outputs"]) {
            auto h = cli::file_hash(e["path"].get<std::string>());
            out.push_back(h ? cli::hex(*h) : "missing");
        }
        return std::make_pair(out, m["outputs"]);
    };
    int runs = 0, identical = 0;
    auto replay_check = [&](const std::string & name, std::vector<std::string> args) {
        const std::string manifest = (dir / (name + ".manifest.json")).string();
        args.insert(args.begin(), {"--manifest-out", manifest});
        const int code = run(args);
        auto [first, recorded] = hashes(manifest);
        for (const auto & e : recorded)
            fs::remove(e["path"].get<std::string>());
        const int code2 = run({"--manifest", manifest});
        auto [second, unused] = hashes(manifest);
        ++runs;
        bool same = code == code2 && first == second && !first.empty();
        for (std::size_t i = 0; i < first.size() && same; ++i)
            same = first[i] == recorded[i]["fnv1a64"].get<std::string>();
        identical += same;
        if (!same)
            o.detail << " " << name << " differs";
    };
    for (const auto * c : {&kCycles40, &kCycles60, &kCycles80, &kConsecutive60, &kBipartite24, &kHyper15, &kHyper20}) {
        const std::string name = c->family + std::to_string(c->n) + "_" + std::to_string(c->ell);
        const std::string col = (dir / (name + ".col")).string();
        std::vector<std::string> args{"construct", "--family", c->family, "--n", std::to_string(c->n), "--k",
            std::to_string(c->k), "--delta", std::to_string(c->delta), "--seed", "1", "--c2-scaled", "--out", col};
        if (c->ell)
            args.insert(args.end(), {"--ell", std::to_string(c->ell)});
        replay_check(name + "_construct", args);
        std::vector<std::string> v{"verify", col, "--report", (dir / (name + ".verify.csv")).string()};
        if (c->family == "hyper-cliques")
            v.insert(v.end(), {"--check", "clique:5:9"});
        else if (c->family == "bipartite-cycles")
            v.insert(v.end(), {"--check", "cycle:6:3"});
        else
            for (std::uint32_t m = 4; m <= c->ell; ++m)
                v.insert(v.end(), {"--check", "cycle:" + std::to_string(m) + ":3"});
        replay_check(name + "_verify", v);
    }
    for (const std::string fam : {"p6", "p8proper"}) {
        const std::string n = fam == "p6" ? "13" : "16";
        const std::string col = (dir / (fam + ".col")).string();
        replay_check(fam + "_construct", {"construct", "--family", fam, "--n", n, "--out", col});
        replay_check(fam + "_verify", {"verify", col, "--sample", "100000", "--seed", "3", "--check",
                                          fam == "p6" ? "path:6:4" : "path:8:5", "--report", col + ".verify.csv"});
    }
    o.detail << " " << identical << "/" << runs << " manifest replays byte-identical";
    o.require(runs > 0 && identical == runs, "byte-identical replays");
    fs::remove_all(dir);
    return o;
}

Outcome leftover_cap()
{
    Outcome o;
    auto st = stage1(kCycles80, 1);
    auto ls = leftover_stats(st.coloring);
    const std::uint64_t cap = kCycles80.n / 4;
    o.detail << " n=80: degree " << ls.max_uncolored_degree << ", codegree " << ls.max_uncolored_codegree
             << ", dangerous pairs " << ls.max_dangerous_pairs << " (cap " << cap << ")";
    o.require(ls.max_uncolored_degree <= cap, "degree cap");
    o.require(ls.max_uncolored_codegree <= cap, "codegree cap");
    o.require(ls.max_dangerous_pairs <= cap, "dangerous pairs cap");
    return o;
}

} // namespace

int main(int argc, char ** argv)
{
    CLI::App app{"Acceptance criteria"};
    std::vector<int> selected;
    bool cap = false;
    app.add_option("--criterion", selected, "Criterion number 1-12 (repeatable)")->check(CLI::Range(1, 12));
    app.add_flag("--leftover-cap", cap, "Run the stage-1 leftover cap check");
    CLI11_PARSE(app, argc, argv);

    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"exact small values", criterion1},
        {"oracle equivalence", criterion2},
        {"cycle pipeline validity", criterion3},
        {"cycle pipeline economy", criterion4},
        {"consecutive lengths", criterion5},
        {"bipartite pipeline", criterion6},
        {"hypergraph pipeline", criterion7},
        {"x-identities", criterion8},
        {"P6 construction", criterion9},
        {"P8 construction", criterion10},
        {"resampling contract", criterion11},
        {"determinism", criterion12},
    };
    if (selected.empty() && !cap) {
        for (int i = 1; i <= 12; ++i)
            selected.push_back(i);
        cap = true;
    }
    bool all = true;
    auto report = [&](const std::string & name, const std::function<Outcome()> & f) {
        Outcome o;
        try {
            o = f();
        }
        catch (const std::exception & e) {
            o.pass = false;
            o.detail << " exception: " << e.what();
        }
        all &= o.pass;
        std::cout << (o.pass ? "PASS " : "FAIL ") << name << ":" << o.detail.str() << std::endl;
    };
    for (int i : selected)
        report(std::to_string(i) + " " + criteria[std::size_t(i - 1)].first, criteria[std::size_t(i - 1)].second);
    if (cap)
        report("leftover cap", leftover_cap);
    return all ? 0 : 1;
}
