#pragma once

// The grc command-line driver, callable in-process: run(args, out, err) returns the exit code.
//
//   construct  build a coloring (stage 1 + finishing, or an explicit path coloring)
//   verify     check a coloring file against (kind, q) requirements
//   bounds     closed-form bounds as exact rationals
//   exact      exact minimum palette on a tiny host
//   stats      class sizes, leftover statistics, x-counts, copy counts
//
// Exit codes: 0 ok, 1 violation or invalid, 2 usage or runtime error.

#include <grc/bounds.hpp>
#include <grc/core.hpp>
#include <grc/enumerate.hpp>
#include <grc/exact.hpp>
#include <grc/finish.hpp>
#include <grc/pack.hpp>
#include <grc/paths.hpp>
#include <grc/verify.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

namespace grc::cli {

inline constexpr const char * kVersion = "1.0.0";

using Json = nlohmann::ordered_json;

/// FNV-1a over a file's bytes; empty optional when unreadable.
inline std::optional<std::uint64_t> file_hash(const std::string & path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        return std::nullopt;
    std::uint64_t h = 0xcbf29ce484222325ULL;
    char buf[1 << 14];
    while (in) {
        in.read(buf, sizeof buf);
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= std::uint8_t(buf[i]);
            h *= 0x100000001b3ULL;
        }
    }
    return h;
}

inline std::string hex(std::uint64_t x)
{
    std::ostringstream s;
    s << std::hex << std::setw(16) << std::setfill('0') << x;
    return s.str();
}

/// "cycle:4:3" -> ({Cycle, 4}, 3); the q part is optional for copy counts.
inline CheckItem parse_check(const std::string & text, bool need_q = true)
{
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ':');)
        parts.push_back(p);
    if (parts.size() != (need_q ? 3u : 2u) && !(need_q == false && parts.size() == 3))
        throw ConfigError("expected KIND:SIZE" + std::string(need_q ? ":Q" : "") + ", got '" + text + "'");
    CheckItem item;
    item.kind = {parse_family(parts[0]), std::uint32_t(std::stoul(parts[1]))};
    item.q = parts.size() == 3 ? std::uint32_t(std::stoul(parts[2])) : 1;
    return item;
}

inline std::string witness_text(const Violation & v)
{
    std::ostringstream s;
    s << v.copy.kind.name() << " [";
    for (std::size_t i = 0; i < v.copy.verts.size(); ++i)
        s << (i ? " " : "") << v.copy.verts[i];
    s << "] colors [";
    for (std::size_t i = 0; i < v.colors_seen.size(); ++i)
        s << (i ? " " : "") << v.colors_seen[i];
    s << "]";
    return s.str();
}

struct Context {
    std::ostream & out;
    std::ostream & err;
    Json result = Json::object();
    std::vector<std::string> outputs, inputs;
};

inline void write_text(const std::string & path, const std::string & text)
{
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw Error("cannot write " + path);
    f << text;
}

// ---------------------------------------------------------------------------

struct ConstructOptions {
    std::string family;
    std::uint32_t n = 0, k = 0, ell = 0;
    double delta = 0.15;
    std::uint64_t seed = 1;
    std::string out, report;
    bool stage1_only = false;
    Color c2 = 0;
    bool c2_scaled = false;
    std::string resample = "avoiding";
    std::uint64_t max_resamples = 1000000;
    int retries = 4;
    bool verify = false;
    unsigned threads = 1;
};

/// Exhaustive check of what the family promises.
inline CheckSpec family_target(const std::string & family, std::uint32_t k, std::uint32_t ell)
{
    std::vector<CheckItem> items;
    if (family == "cycles")
        for (std::uint32_t m = k; m <= std::max(ell, k); ++m)
            items.push_back({CopyKind::cycle(m), 3});
    else if (family == "bipartite-cycles")
        items.push_back({CopyKind::cycle(2 * k), 3});
    else if (family == "hyper-cliques")
        items.push_back({CopyKind::clique(k + 2), std::uint32_t(binomial(k + 2, k)) - 1});
    else if (family == "p6")
        items.push_back({CopyKind::path(6), 4});
    else if (family == "p7")
        items.push_back({CopyKind::path(7), 5});
    else if (family == "p8proper")
        return CheckSpec::exhaustive({{CopyKind::path(8), 5}}, true);
    return CheckSpec::exhaustive(items, false);
}

inline int cmd_construct(const ConstructOptions & o, Context & ctx)
{
    std::vector<std::pair<std::string, std::string>> rows{{"schema", "construct/1"}, {"family", o.family},
        {"n", std::to_string(o.n)}, {"seed", std::to_string(o.seed)}};
    Coloring result;
    std::uint32_t k = o.k, ell = o.ell;
    if (o.family == "p6" || o.family == "p7" || o.family == "p8proper") {
        if (o.family == "p7")
            result = color_p7(o.n);
        else {
            const std::uint32_t s = o.family == "p6" ? 4 : 6;
            PackCliquesConfig pcfg;
            pcfg.seed = o.seed;
            auto packing = pack_cliques(o.n, s, pcfg);
            result = s == 4 ? color_p6(packing) : color_p8_proper(packing);
            rows.push_back({"blocks", std::to_string(packing.blocks.size())});
            rows.push_back({"leftover_edges", std::to_string(packing.leftover.size())});
            rows.push_back({"decomposition_search_fell_back", packing.fell_back ? "1" : "0"});
        }
    }
    else {
        PackConfig pc;
        pc.seed = o.seed;
        pc.ell = o.ell;
        pc.delta = o.delta;
        PackState st;
        if (o.family == "cycles")
            st = pack_complete(o.n, o.k, pc);
        else if (o.family == "bipartite-cycles")
            st = pack_bipartite(o.n, o.k, pc);
        else if (o.family == "hyper-cliques")
            st = pack_hyper(o.n, o.k, pc);
        else
            throw ConfigError("unknown family '" + o.family + "'");
        k = st.k;
        ell = st.ell;
        rows.push_back({"k", std::to_string(o.k)});
        rows.push_back({"ell", std::to_string(st.ell)});
        rows.push_back({"stage1_palette", std::to_string(st.palette)});
        rows.push_back({"tiles", std::to_string(st.tiles.size())});
        rows.push_back({"colored_edges", std::to_string(st.coloring.colored_count())});
        rows.push_back({"edges", std::to_string(st.coloring.edge_count())});
        rows.push_back({"coverage", decimal(Rational(st.coloring.colored_count(), st.coloring.edge_count()))});
        auto ls = leftover_stats(st.coloring);
        rows.push_back({"max_uncolored_degree", std::to_string(ls.max_uncolored_degree)});
        rows.push_back({"max_uncolored_codegree", std::to_string(ls.max_uncolored_codegree)});
        rows.push_back({"max_dangerous_pairs", std::to_string(ls.max_dangerous_pairs)});
        if (o.stage1_only)
            result = st.coloring;
        else {
            FinishConfig fc;
            fc.seed = o.seed;
            fc.delta = o.delta;
            fc.max_resamples = o.max_resamples;
            fc.c2 = o.c2 ? o.c2 : o.c2_scaled ? scaled_c2(o.n) : 0;
            if (o.resample == "uniform")
                fc.resample = Resample::Uniform;
            else if (o.resample != "avoiding")
                throw ConfigError("unknown resample rule '" + o.resample + "'");
            auto rr = finish_with_retry(st, fc, std::max(1, o.retries));
            for (std::size_t i = 0; i < rr.attempts.size(); ++i)
                rows.push_back({"failed_attempt_" + std::to_string(i) + "_c2", std::to_string(rr.attempts[i].c2)});
            rows.push_back({"attempts", std::to_string(rr.attempts.size() + 1)});
            rows.push_back({"c2", std::to_string(rr.result.c2)});
            rows.push_back({"resamples", std::to_string(rr.result.resamples)});
            rows.push_back({"finished", rr.result.finished ? "1" : "0"});
            ctx.result["resamples"] = rr.result.resamples;
            ctx.result["attempts"] = rr.attempts.size() + 1;
            ctx.result["finished"] = rr.result.finished;
            if (!rr.result.finished) {
                ctx.err << "finishing hit the resample cap on every attempt\n";
                rows.push_back({"remaining_events", std::to_string(rr.result.remaining_events)});
            }
            result = std::move(rr.result.coloring);
        }
    }
    result.normalize();
    rows.push_back({"palette", std::to_string(result.palette_size())});
    rows.push_back({"total", result.is_total() ? "1" : "0"});
    int code = 0;
    if (ctx.result.contains("finished") && !ctx.result["finished"].get<bool>())
        code = 1;
    if (o.verify) {
        auto spec = family_target(o.family, k, ell);
        spec.threads = o.threads;
        auto rep = check(result, spec);
        rows.push_back({"verified_copies", std::to_string(rep.copies_checked)});
        rows.push_back({"verified", rep.ok ? "1" : "0"});
        if (!rep.ok) {
            code = 1;
            if (rep.first_violation)
                ctx.err << "violation: " << witness_text(*rep.first_violation) << "\n";
            if (rep.improper)
                ctx.err << "improper: " << witness_text(*rep.improper) << "\n";
        }
        ctx.result["verified"] = rep.ok;
    }
    save_coloring(result, o.out);
    ctx.outputs.push_back(o.out);
    std::ostringstream csv;
    csv << "metric,value\n";
    for (const auto & [key, v] : rows)
        csv << key << "," << v << "\n";
    const std::string report = o.report.empty() ? o.out + ".csv" : o.report;
    write_text(report, csv.str());
    ctx.outputs.push_back(report);
    ctx.out << csv.str();
    ctx.result["palette"] = result.palette_size();
    return code;
}

// ---------------------------------------------------------------------------

struct VerifyOptions {
    std::string file;
    std::string kind;
    std::uint32_t size = 0, q = 0;
    std::vector<std::string> checks;
    bool proper = false;
    bool exhaustive = false;
    std::uint64_t sample = 0, seed = 1;
    unsigned threads = 1;
    std::string report;
};

inline int cmd_verify(const VerifyOptions & o, Context & ctx)
{
    const Coloring c = load_coloring(o.file);
    ctx.inputs.push_back(o.file);
    std::vector<CheckItem> items;
    if (!o.kind.empty()) {
        if (!o.size || !o.q)
            throw ConfigError("--kind needs a size (--m, --t, --p or --l) and --q");
        items.push_back({{parse_family(o.kind), o.size}, o.q});
    }
    for (const auto & s : o.checks)
        items.push_back(parse_check(s));
    if (items.empty() && !o.proper)
        throw ConfigError("nothing to check: give --kind or --check, or --proper");
    if (o.exhaustive && o.sample)
        throw ConfigError("--exhaustive and --sample are exclusive");
    CheckSpec spec = o.sample ? CheckSpec::sampled(items, o.sample, o.seed) : CheckSpec::exhaustive(items, o.proper);
    spec.require_proper = o.proper;
    spec.threads = std::max(1u, o.threads);
    auto rep = check(c, spec);
    std::ostringstream csv;
    csv << "kind,param,q,copies_checked,violations,first_witness\n";
    for (const auto & k : rep.kinds)
        csv << family_name(k.item.kind.family) << "," << k.item.kind.size << "," << k.item.q << "," << k.copies_checked
            << "," << k.violations << "," << (k.first ? "\"" + witness_text(*k.first) + "\"" : "") << "\n";
    if (o.proper)
        csv << "proper,2,1,," << (rep.improper ? 1 : 0) << "," << (rep.improper ? "\"" + witness_text(*rep.improper) + "\"" : "")
            << "\n";
    ctx.out << csv.str();
    if (!o.report.empty()) {
        write_text(o.report, csv.str());
        ctx.outputs.push_back(o.report);
    }
    if (rep.first_violation)
        ctx.err << "witness: " << witness_text(*rep.first_violation) << "\n";
    if (rep.improper)
        ctx.err << "witness: improper " << witness_text(*rep.improper) << "\n";
    ctx.result["ok"] = rep.ok;
    ctx.result["copies_checked"] = rep.copies_checked;
    return rep.ok ? 0 : 1;
}

// ---------------------------------------------------------------------------

struct BoundsOptions {
    std::string mode;
    std::uint64_t n = 0, k = 0, ell = 0, q = 0;
    std::string report;
};

inline int cmd_bounds(const BoundsOptions & o, Context & ctx)
{
    const HostMode mode = parse_mode(o.mode);
    auto r = bounds_report(mode, o.n, o.k, o.ell ? std::optional<std::uint64_t>(o.ell) : std::nullopt,
        o.q ? std::optional<std::uint64_t>(o.q) : std::nullopt);
    std::ostringstream csv;
    csv << "name,direction,exactness,numerator,denominator,decimal\n";
    for (const auto & e : r.entries)
        csv << e.name << "," << direction_name(e.direction) << "," << exactness_name(e.exactness) << ","
            << boost::multiprecision::numerator(e.value) << "," << boost::multiprecision::denominator(e.value) << ","
            << decimal(e.value) << "\n";
    ctx.out << csv.str();
    if (!o.report.empty()) {
        write_text(o.report, csv.str());
        ctx.outputs.push_back(o.report);
    }
    ctx.result["entries"] = r.entries.size();
    return 0;
}

// ---------------------------------------------------------------------------

struct ExactOptions {
    std::string mode = "complete";
    std::uint32_t n = 0, k = 2;
    std::string family;
    std::uint32_t size = 0, q = 1;
    bool proper = false;
    std::uint64_t budget = 50000000;
    std::string out;
};

inline int cmd_exact(const ExactOptions & o, Context & ctx)
{
    ExactProblem p{{parse_mode(o.mode), o.n, o.mode == "uniform" ? o.k : 2}, {}, o.proper};
    if (!o.family.empty())
        p.kinds.push_back({{parse_family(o.family), o.size}, o.q});
    try {
        auto r = min_colors(p, o.budget);
        ctx.out << "value," << r.value << "\nnodes," << r.nodes << "\n";
        if (!o.out.empty()) {
            save_coloring(r.witness, o.out);
            ctx.outputs.push_back(o.out);
        }
        ctx.result["value"] = r.value;
        return 0;
    }
    catch (const BudgetExceeded & e) {
        ctx.out << "lower," << e.lower << "\nupper," << e.upper << "\nnodes," << e.nodes << "\n";
        ctx.err << e.what() << "\n";
        ctx.result["lower"] = e.lower;
        ctx.result["upper"] = e.upper;
        return 2;
    }
}

// ---------------------------------------------------------------------------

struct StatsOptions {
    std::string file;
    std::string mode;
    std::uint32_t n = 0, k = 2;
    std::vector<std::string> copies;
};

inline int cmd_stats(const StatsOptions & o, Context & ctx)
{
    std::optional<Coloring> c;
    HostSpec host;
    if (!o.file.empty()) {
        c = load_coloring(o.file);
        ctx.inputs.push_back(o.file);
        host = c->host();
    }
    else if (!o.mode.empty()) {
        host = {parse_mode(o.mode), o.n, o.mode == "uniform" ? o.k : 2};
        host.validate();
    }
    else
        throw ConfigError("stats needs a coloring file or --mode/--n");
    if (c) {
        ctx.out << "metric,value\n";
        ctx.out << "mode," << mode_name(host.mode) << "\nn," << host.n << "\nk," << host.k << "\n";
        ctx.out << "edges," << c->edge_count() << "\ncolored," << c->colored_count() << "\n";
        ctx.out << "palette," << c->palette_size() << "\ndistinct_colors," << c->distinct_colors() << "\n";
        auto sizes = color_class_sizes(*c);
        if (!sizes.empty())
            ctx.out << "max_class_size," << *std::max_element(sizes.begin(), sizes.end()) << "\n";
        auto ls = leftover_stats(*c);
        ctx.out << "max_uncolored_degree," << ls.max_uncolored_degree << "\n";
        ctx.out << "max_uncolored_codegree," << ls.max_uncolored_codegree << "\n";
        ctx.out << "max_dangerous_pairs," << ls.max_dangerous_pairs << "\n";
        if (host.mode == HostMode::UniformComplete && c->is_total()) {
            auto x = xcounts(*c);
            ctx.out << "x0," << x.x0 << "\nx1," << x.x1 << "\nx2," << x.x2 << "\n";
        }
    }
    if (!o.copies.empty()) {
        ctx.out << "kind,param,count\n";
        for (const auto & s : o.copies) {
            auto item = parse_check(s, false);
            ctx.out << family_name(item.kind.family) << "," << item.kind.size << "," << count_copies(host, item.kind) << "\n";
        }
    }
    return 0;
}

// ---------------------------------------------------------------------------

/// Parses and runs one invocation; args exclude the program name.
inline int run(const std::vector<std::string> & args, std::ostream & out = std::cout, std::ostream & err = std::cerr)
{
    CLI::App app{"Generalized Ramsey colorings: construct, verify, bound"};
    app.require_subcommand(0, 1);
    app.fallthrough();
    app.set_version_flag("--version", kVersion);
    std::string manifest_in, manifest_out;
    app.add_option("--manifest", manifest_in, "Replay the run recorded in a manifest");
    app.add_option("--manifest-out", manifest_out, "Write a run manifest here");

    ConstructOptions co;
    auto * construct = app.add_subcommand("construct", "Build a coloring");
    construct->add_option("--family", co.family, "cycles | bipartite-cycles | hyper-cliques | p6 | p7 | p8proper")->required();
    construct->add_option("--n", co.n, "Vertex count (per side for bipartite)")->required();
    construct->add_option("--k", co.k, "Cycle length / path order / uniformity");
    construct->add_option("--ell", co.ell, "Longest forbidden cycle (cycles)");
    construct->add_option("--delta", co.delta, "Exponent for rho and the default fresh palette");
    construct->add_option("--seed", co.seed);
    construct->add_option("--out", co.out, "Coloring file")->required();
    construct->add_option("--report", co.report, "CSV report (default <out>.csv)");
    construct->add_flag("--stage1-only", co.stage1_only, "Skip finishing");
    construct->add_option("--c2", co.c2, "Fresh palette size (default ceil(n^(1-delta)))");
    construct->add_flag("--c2-scaled", co.c2_scaled, "Fresh palette floor(2.5 n^0.9)");
    construct->add_option("--resample", co.resample, "avoiding | uniform");
    construct->add_option("--max-resamples", co.max_resamples);
    construct->add_option("--retries", co.retries, "Finishing attempts, doubling c2 each time");
    construct->add_flag("--verify", co.verify, "Check the result exhaustively");
    construct->add_option("--threads", co.threads);

    VerifyOptions vo;
    auto * verify = app.add_subcommand("verify", "Check a coloring file");
    verify->add_option("file", vo.file)->required();
    verify->add_option("--kind", vo.kind, "cycle | path | clique | tight-cycle");
    for (const char * flag : {"--m", "--t", "--p", "--l", "--size"})
        verify->add_option(flag, vo.size, "Pattern size");
    verify->add_option("--q", vo.q, "Required colors per copy");
    verify->add_option("--check", vo.checks, "KIND:SIZE:Q, repeatable");
    verify->add_flag("--proper", vo.proper, "Also require a proper coloring");
    verify->add_flag("--exhaustive", vo.exhaustive, "Check every copy (default)");
    verify->add_option("--sample", vo.sample, "Check this many uniformly drawn copies per kind");
    verify->add_option("--seed", vo.seed);
    verify->add_option("--threads", vo.threads);
    verify->add_option("--report", vo.report, "Also write the CSV here");

    BoundsOptions bo;
    auto * bounds = app.add_subcommand("bounds", "Closed-form bounds");
    bounds->add_option("--mode", bo.mode, "complete | bipartite | uniform")->required();
    bounds->add_option("--n", bo.n)->required();
    bounds->add_option("--k", bo.k)->required();
    bounds->add_option("--ell", bo.ell);
    bounds->add_option("--q", bo.q);
    bounds->add_option("--report", bo.report);

    ExactOptions eo;
    auto * exact = app.add_subcommand("exact", "Exact minimum palette on a tiny host");
    exact->add_option("--mode", eo.mode);
    exact->add_option("--n", eo.n)->required();
    exact->add_option("--k", eo.k, "Uniformity (uniform mode)");
    exact->add_option("--family", eo.family, "cycle | path | clique | tight-cycle");
    exact->add_option("--size", eo.size);
    exact->add_option("--q", eo.q);
    exact->add_flag("--proper", eo.proper);
    exact->add_option("--budget", eo.budget, "Node budget");
    exact->add_option("--out", eo.out, "Witness coloring file");

    StatsOptions so;
    auto * stats = app.add_subcommand("stats", "Coloring statistics and copy counts");
    stats->add_option("file", so.file);
    stats->add_option("--mode", so.mode);
    stats->add_option("--n", so.n);
    stats->add_option("--k", so.k);
    stats->add_option("--copies", so.copies, "KIND:SIZE, repeatable");

    std::vector<std::string> argv_store{"grc"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<const char *> argv;
    for (const auto & s : argv_store)
        argv.push_back(s.c_str());
    try {
        app.parse(int(argv.size()), argv.data());
    }
    catch (const CLI::CallForHelp & e) {
        out << app.help();
        return 0;
    }
    catch (const CLI::CallForVersion &) {
        out << kVersion << "\n";
        return 0;
    }
    catch (const CLI::ParseError & e) {
        err << e.what() << "\n" << app.help();
        return 2;
    }

    if (!manifest_in.empty()) {
        Json m;
        try {
            std::ifstream f(manifest_in);
            if (!f)
                throw Error("cannot read " + manifest_in);
            m = Json::parse(f);
            auto replay = m.at("args").get<std::vector<std::string>>();
            return run(replay, out, err);
        }
        catch (const std::exception & e) {
            err << "manifest: " << e.what() << "\n";
            return 2;
        }
    }
    if (app.get_subcommands().empty()) {
        err << app.help();
        return 2;
    }

    Context ctx{out, err, Json::object(), {}, {}};
    const auto t0 = std::chrono::steady_clock::now();
    int code = 2;
    std::string name = app.get_subcommands().front()->get_name();
    try {
        if (name == "construct")
            code = cmd_construct(co, ctx);
        else if (name == "verify")
            code = cmd_verify(vo, ctx);
        else if (name == "bounds")
            code = cmd_bounds(bo, ctx);
        else if (name == "exact")
            code = cmd_exact(eo, ctx);
        else
            code = cmd_stats(so, ctx);
    }
    catch (const std::exception & e) {
        err << "error: " << e.what() << "\n";
        code = 2;
    }
    if (!manifest_out.empty()) {
        std::vector<std::string> replay;
        for (std::size_t i = 0; i < args.size(); ++i) {
            if (args[i] == "--manifest-out") {
                ++i;
                continue;
            }
            if (args[i].rfind("--manifest-out=", 0) == 0)
                continue;
            replay.push_back(args[i]);
        }
        Json m;
        m["tool"] = "grc";
        m["version"] = kVersion;
        m["subcommand"] = name;
        m["args"] = replay;
        m["seed"] = name == "construct" ? co.seed : name == "verify" ? vo.seed : 0;
        m["inputs"] = ctx.inputs;
        Json outs = Json::array();
        for (const auto & p : ctx.outputs) {
            auto h = file_hash(p);
            outs.push_back({{"path", p}, {"fnv1a64", h ? hex(*h) : ""}});
        }
        m["outputs"] = outs;
        m["wall_clock_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        m["exit_code"] = code;
        m["result"] = ctx.result;
        try {
            write_text(manifest_out, m.dump(2) + "\n");
        }
        catch (const std::exception & e) {
            err << "error: " << e.what() << "\n";
            return 2;
        }
    }
    return code;
}

} // namespace grc::cli
