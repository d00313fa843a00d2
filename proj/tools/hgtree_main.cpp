// hgtree: command line front end. Exit codes: 0 ok, 1 verification failed,
// 2 usage or configuration error.
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "hgtree/csbp.hpp"
#include "hgtree/gh.hpp"
#include "hgtree/gw_sim.hpp"
#include "hgtree/reduction.hpp"
#include "hgtree/tree_io.hpp"
#include "hgtree/verify.hpp"

#ifndef HGT_VERSION
#define HGT_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace hgt;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// inline JSON, or @path
std::string json_arg(const std::string& s) {
    if (s.empty() || s[0] != '@') return s;
    std::ifstream in(s.substr(1));
    if (!in) throw UsageError("cannot read " + s.substr(1));
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string num(double x) { return fmt::format("{:.17g}", x); }

// --out wins; else $HGT_OUT_DIR/<fallback>; else "" (stdout)
std::string out_path(const std::string& out, const std::string& fallback) {
    if (!out.empty()) return out;
    if (const char* d = std::getenv("HGT_OUT_DIR"); d && *d) {
        fs::create_directories(d);
        return (fs::path(d) / fallback).string();
    }
    return "";
}

void emit(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    if (auto dir = fs::path(path).parent_path(); !dir.empty()) fs::create_directories(dir);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw UsageError("cannot write " + path);
    f << text;
}

struct Run {
    std::string command;
    std::vector<std::string> argv;
    ordered_json params = ordered_json::object();
    std::optional<std::uint64_t> seed;
    std::vector<std::string> inputs, outputs;
    std::string manifest;  // where to write it, empty = nowhere
};

void write_manifest(const Run& r, double wall) {
    if (r.manifest.empty()) return;
    ordered_json j;
    j["command"] = r.command;
    j["argv"] = r.argv;
    j["parameters"] = r.params;
    j["seed"] = r.seed ? ordered_json(*r.seed) : ordered_json(nullptr);
    j["tool_version"] = HGT_VERSION;
    j["inputs"] = r.inputs;
    j["outputs"] = r.outputs;
    j["wall_time"] = wall;
    emit(r.manifest, j.dump(2) + "\n");
}

void record_options(Run& r, const CLI::App* sub) {
    for (const CLI::Option* o : sub->get_options()) {
        if (o->count() == 0 || o->get_name() == "--help") continue;
        std::string key = o->get_name();
        key.erase(0, key.find_first_not_of('-'));
        const auto& res = o->results();
        if (o->get_type_size() == 0)
            r.params[key] = true;
        else if (res.size() == 1)
            r.params[key] = res[0];
        else
            r.params[key] = res;
    }
}

std::vector<double> grid(const std::vector<double>& list, double hi, int steps, const char* what) {
    if (!list.empty()) return list;
    if (steps < 1 || !(hi >= 0.0)) throw UsageError(fmt::format("give --{0} or --{0}-max with --steps", what));
    std::vector<double> g;
    for (int i = 0; i <= steps; ++i) g.push_back(hi * i / steps);
    return g;
}

struct Opts {
    int workers = 1;
    // sample
    std::string law, out, format = "json";
    std::uint64_t seed = 0;
    double height_cap = 0.0;
    std::int64_t vertex_cap = 10'000'000;
    int replicas = 1, lattice_bits = 36;
    // trees
    std::string in, in1, in2, predicate;
    bool raw = false;
    double h = -1.0;
    // profile / csbp
    std::vector<double> as, thetas, hs;
    double a_max = -1.0;
    int steps = 0;
    std::string psi;
    bool table_u = false, table_v = false;
    double rtol = 1e-12;
    // law
    double reduce_alpha = -1.0, invert_alpha = -1.0;
    int kmax = 30;
    std::vector<double> probe;
    // distance
    double exact_eps = 0.0;
    // verify
    std::string suite;
    double threshold = 0.01;
    std::string manifest;
};

int cmd_sample(Opts& o, Run& r) {
    GwLaw law = gw_law_from_json(json_arg(o.law));
    if (o.replicas < 1) throw UsageError("--replicas must be >= 1");
    if (o.format != "json" && o.format != "newick") throw UsageError("--format is json or newick");
    std::string dir = out_path(o.out, "samples");
    if (dir.empty()) dir = "samples";
    fs::create_directories(dir);
    SamplerConfig cfg;
    if (o.height_cap > 0.0) cfg.height_cap = o.height_cap;
    cfg.vertex_cap = o.vertex_cap;
    cfg.lattice_bits = o.lattice_bits;
    std::vector<Sample> out(o.replicas);
    parallel_for(o.replicas, o.workers, [&](std::int64_t i) {
        SamplerConfig c = cfg;
        c.seed = replica_seed(o.seed, static_cast<std::uint64_t>(i));
        out[i] = sample_gw_forest(law, c);
    });
    std::string csv = "replica,vertices,height,total_length,truncated\n";
    for (int i = 0; i < o.replicas; ++i) {
        auto name = fmt::format("tree_{:05d}.{}", i, o.format == "json" ? "json" : "nwk");
        auto p = (fs::path(dir) / name).string();
        save_tree(p, out[i].tree);
        r.outputs.push_back(p);
        const auto& t = out[i].tree;
        csv += fmt::format("{},{},{},{},{}\n", i, t.size(), num(total_height(t)), num(total_length(t)), out[i].truncated ? 1 : 0);
    }
    auto sp = (fs::path(dir) / "summary.csv").string();
    emit(sp, csv);
    r.outputs.push_back(sp);
    r.seed = o.seed;
    r.manifest = (fs::path(dir) / "manifest.json").string();
    return 0;
}

int cmd_reduce(Opts& o, Run& r) {
    if ((o.h >= 0.0) == !o.predicate.empty()) throw UsageError("give exactly one of --h and --predicate");
    HereditaryPredicate A = o.h >= 0.0 ? height_at_least(o.h) : predicate_from_json(json_arg(o.predicate));
    EdgeTree t = load_tree(o.in);
    r.inputs.push_back(o.in);
    EdgeTree red = reduce(A, t);
    if (!o.raw) red = canonicalize(red);
    std::string p = out_path(o.out, "reduced.json");
    if (p.empty()) {
        std::cout << to_json(red) << '\n';
        return 0;
    }
    save_tree(p, red);
    r.outputs.push_back(p);
    r.manifest = p + ".manifest.json";
    return 0;
}

int cmd_profile(Opts& o, Run& r) {
    EdgeTree t = load_tree(o.in);
    r.inputs.push_back(o.in);
    // no --h: the plain profile
    const double h = std::max(o.h, 0.0);
    std::string csv = "a,h,Z,Z_right\n";
    for (double a : grid(o.as, o.a_max, o.steps, "a")) {
        int z = h > 0.0 ? erased_profile(h, a, t) : left_profile(a, t);
        int zr = h > 0.0 ? erased_profile_right(h, a, t) : right_profile(a, t);
        csv += fmt::format("{},{},{},{}\n", num(a), num(h), z, zr);
    }
    std::string p = out_path(o.out, "profile.csv");
    emit(p, csv);
    if (!p.empty()) r.outputs.push_back(p), r.manifest = p + ".manifest.json";
    return 0;
}

int cmd_distance(Opts& o, Run& r) {
    EdgeTree t1 = load_tree(o.in1), t2 = load_tree(o.in2);
    r.inputs = {o.in1, o.in2};
    GhUpper up = gh_upper(t1, t2);
    ordered_json j;
    j["lower"] = gh_lower(t1, t2);
    j["upper"] = up.bound;
    j["witness_size"] = up.witness.pieces.size();
    if (o.exact_eps > 0.0) {
        Enclosure e = gh_exact_tiny(t1, t2, o.exact_eps);
        j["exact"] = {{"lo", e.lo}, {"hi", e.hi}};
    }
    std::string p = out_path(o.out, "distance.json");
    emit(p, j.dump(2) + "\n");
    if (!p.empty()) r.outputs.push_back(p), r.manifest = p + ".manifest.json";
    return 0;
}

int cmd_law(Opts& o, Run& r) {
    GwLaw law = gw_law_from_json(json_arg(o.law));
    int ops = (o.reduce_alpha >= 0.0) + (o.invert_alpha >= 0.0) + (o.h >= 0.0);
    if (ops > 1) throw UsageError("give at most one of --reduce, --invert, --h");
    ordered_json j;
    double alpha = 0.0;
    if (o.h >= 0.0) {
        alpha = height_cdf(law.xi, law.c, o.h);
        law = reduce_law(law, alpha);
    } else if (o.reduce_alpha >= 0.0) {
        alpha = o.reduce_alpha;
        law = reduce_law(law, alpha);
    } else if (o.invert_alpha >= 0.0) {
        alpha = o.invert_alpha;
        law = invert_law(law, alpha);
    }
    if (ops) j["alpha"] = alpha;
    j["law"] = ordered_json::parse(to_json(law, o.kmax));
    if (!o.probe.empty()) {
        j["probe"] = ordered_json::array();
        for (const auto& pr : extension_probe(law.xi, o.probe))
            j["probe"].push_back({{"alpha", pr.alpha}, {"ok", pr.ok}, {"min_entry", pr.min_entry}, {"note", pr.note}});
    }
    std::string p = out_path(o.out, "law.json");
    emit(p, j.dump(2) + "\n");
    if (!p.empty()) r.outputs.push_back(p), r.manifest = p + ".manifest.json";
    return 0;
}

int cmd_csbp(Opts& o, Run& r) {
    SolverConfig sc;
    sc.rtol = o.rtol;
    CsbpKernel k(mechanism_from_json(json_arg(o.psi)), sc);
    std::string csv;
    if (o.table_v) {
        if (o.hs.empty()) throw UsageError("--table-v needs --h");
        csv = "h,v\n";
        for (double h : o.hs) csv += fmt::format("{},{}\n", num(h), num(v_scale(k, h)));
    } else {
        auto as = grid(o.as, o.a_max, o.steps, "a");
        if (o.thetas.empty()) throw UsageError("--table-u needs --theta");
        csv = "a,theta,u\n";
        for (double a : as)
            for (double th : o.thetas) csv += fmt::format("{},{},{}\n", num(a), num(th), num(u_flow(k, a, th)));
    }
    std::string p = out_path(o.out, o.table_v ? "v_table.csv" : "u_table.csv");
    emit(p, csv);
    if (!p.empty()) r.outputs.push_back(p), r.manifest = p + ".manifest.json";
    return 0;
}

int cmd_verify(Opts& o, Run& r) {
    auto names = suite_names();
    std::vector<std::string> todo;
    if (o.suite == "all")
        todo = names;
    else if (std::find(names.begin(), names.end(), o.suite) != names.end())
        todo = {o.suite};
    else
        throw UsageError("unknown suite '" + o.suite + "'");
    VerifyOptions vo;
    vo.workers = o.workers;
    vo.threshold = o.threshold;
    ordered_json j;
    j["suite"] = o.suite;
    j["seed"] = o.seed;
    j["reports"] = ordered_json::array();
    bool ok = true;
    for (const auto& s : todo)
        for (const auto& rep : run_suite(s, o.seed, vo)) {
            ok = ok && rep.pass;
            std::cerr << fmt::format("{} {} stat={:.6g}{}\n", rep.pass ? "PASS" : "FAIL", rep.name, rep.statistic,
                                     rep.p_value ? fmt::format(" p={:.4g}", *rep.p_value) : "");
            j["reports"].push_back(ordered_json::parse(report_json(rep, false, -1)));
        }
    j["pass"] = ok;
    std::string p = out_path(o.out, "report_" + o.suite + ".json");
    emit(p, j.dump(2) + "\n");
    if (!p.empty()) r.outputs.push_back(p), r.manifest = p + ".manifest.json";
    r.seed = o.seed;
    return ok ? 0 : 1;
}

int dispatch(std::vector<std::string> args, bool allow_replay);

int cmd_replay(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read " + path);
    ordered_json j;
    try {
        j = ordered_json::parse(in);
        return dispatch(j.at("argv").get<std::vector<std::string>>(), false);
    } catch (const nlohmann::json::exception& e) {
        throw UsageError(std::string("manifest: ") + e.what());
    }
}

int dispatch(std::vector<std::string> args, bool allow_replay) {
    const std::vector<std::string> argv = args;
    CLI::App app{"hereditary tree growth: trees, laws, CSBP numerics and Monte Carlo checks", "hgtree"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_help_flag("--help", "print help");
    app.set_version_flag("--version", HGT_VERSION);
    Opts o;
    app.add_option("--workers", o.workers, "threads for replicas")->check(CLI::PositiveNumber);

    auto* sample = app.add_subcommand("sample", "sample GW real forests");
    sample->add_option("--law", o.law, "law JSON or @file")->required();
    sample->add_option("--seed", o.seed);
    sample->add_option("--height-cap", o.height_cap);
    sample->add_option("--vertex-cap", o.vertex_cap);
    sample->add_option("--replicas", o.replicas);
    sample->add_option("--lattice-bits", o.lattice_bits);
    sample->add_option("--format", o.format, "json or newick");
    sample->add_option("--out", o.out, "output directory");

    auto* reduce_c = app.add_subcommand("reduce", "hereditary reduction of a tree");
    reduce_c->add_option("--in", o.in)->required();
    reduce_c->add_option("--h", o.h, "leaf-length erasure depth");
    reduce_c->add_option("--predicate", o.predicate, "predicate JSON or @file");
    reduce_c->add_flag("--raw", o.raw, "keep unary vertices instead of the canonical form");
    reduce_c->add_option("--out", o.out);

    auto* profile = app.add_subcommand("profile", "erased profile Z_a^(h) on a grid of a");
    profile->add_option("--in", o.in)->required();
    profile->add_option("--h", o.h);
    profile->add_option("--a", o.as)->delimiter(',');
    profile->add_option("--a-max", o.a_max);
    profile->add_option("--steps", o.steps);
    profile->add_option("--out", o.out);

    auto* distance = app.add_subcommand("distance", "Gromov-Hausdorff bounds between two trees");
    distance->add_option("--in1", o.in1)->required();
    distance->add_option("--in2", o.in2)->required();
    distance->add_option("--exact-eps", o.exact_eps, "also run the tiny exact oracle");
    distance->add_option("--out", o.out);

    auto* law = app.add_subcommand("law", "GW law transforms");
    law->add_option("--law", o.law, "law JSON or @file")->required();
    law->add_option("--reduce", o.reduce_alpha, "reduce with alpha");
    law->add_option("--invert", o.invert_alpha, "invert with alpha");
    law->add_option("--h", o.h, "law of the h-erased tree");
    law->add_option("--kmax", o.kmax);
    law->add_option("--probe", o.probe, "alphas for the extension probe")->delimiter(',');
    law->add_option("--out", o.out);

    auto* csbp = app.add_subcommand("csbp", "CSBP flow and erasure scale tables");
    csbp->alias("csbp-solve");
    csbp->add_option("--psi", o.psi, "mechanism JSON or @file")->required();
    auto* tu = csbp->add_flag("--table-u", o.table_u, "rows (a, theta, u)");
    auto* tv = csbp->add_flag("--table-v", o.table_v, "rows (h, v)");
    tu->excludes(tv);
    csbp->add_option("--a", o.as)->delimiter(',');
    csbp->add_option("--a-max", o.a_max);
    csbp->add_option("--steps", o.steps);
    csbp->add_option("--theta", o.thetas)->delimiter(',');
    csbp->add_option("--h", o.hs)->delimiter(',');
    csbp->add_option("--rtol", o.rtol);
    csbp->add_option("--out", o.out);

    auto* verify = app.add_subcommand("verify", "Monte Carlo verification suites");
    verify->add_option("--suite", o.suite, "suite name or all")->required();
    verify->add_option("--seed", o.seed);
    verify->add_option("--threshold", o.threshold);
    verify->add_option("--out", o.out);

    CLI::App* replay = nullptr;
    if (allow_replay) {
        replay = app.add_subcommand("replay", "rerun the command recorded in a manifest");
        replay->add_option("manifest", o.manifest)->required();
    }

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (replay && replay->parsed()) return cmd_replay(o.manifest);

    CLI::App* sub = app.get_subcommands().front();
    Run r;
    r.command = sub->get_name();
    r.argv = argv;
    record_options(r, &app);
    record_options(r, sub);
    auto t0 = std::chrono::steady_clock::now();
    int code = 0;
    if (sub == sample) code = cmd_sample(o, r);
    else if (sub == reduce_c) code = cmd_reduce(o, r);
    else if (sub == profile) code = cmd_profile(o, r);
    else if (sub == distance) code = cmd_distance(o, r);
    else if (sub == law) code = cmd_law(o, r);
    else if (sub == csbp) code = cmd_csbp(o, r);
    else if (sub == verify) code = cmd_verify(o, r);
    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(r, wall);
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return dispatch(std::vector<std::string>(argv + 1, argv + argc), true);
    } catch (const std::exception& e) {
        std::cerr << "hgtree: error: " << e.what() << '\n';
        return 2;
    }
}
