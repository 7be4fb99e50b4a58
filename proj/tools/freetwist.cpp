// Command-line front end: exact curve-graph queries, free-product normal
// forms, marking distances, and the seeded experiment suite. Value commands
// print bare results; experiment commands print a stable-keyed summary block
// and optionally write CSV + summary artifacts. Exit codes: 0 success,
// 1 assertion-class failure (artifacts still written), 2 usage or parse error.

#include "CLI11.hpp"

#include "freetwist/lab.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

using namespace freetwist;
using farey::Slope;
using freeprod::Word;
using lab::RealizedGroup;

namespace {

// Every tunable a subcommand reads. A config file (key = value lines) fills
// these first; explicit command-line flags override it.
struct Settings {
    std::string config_path;
    std::string alpha1 = "0/1";
    std::string beta1 = "-70/29"; // smallest Farey-distance-6 partner of 0/1
    long long power_a = 1;
    long long power_b = 1;
    bool realization_set = false; // any of the four keys above configured
    std::uint64_t seed = 20260825;
    bool oracle = false;
    int radius_cap = -1; // per-command default when negative
    double A2 = -1;      // per-command default when negative
    std::string out_dir;
    std::string cache_dir;

    // Experiment-specific knobs (config keys of the same name).
    std::string range = "1..3";
    int max_syllables = -1;
    int max_exp = -1;
    std::string exponents; // comma-separated twist exponents
    int N = 10;
    double M_est = 4.0;
    double delta = 1.0;
    double C0 = 13.0;
    std::string contrast = "10,20,40";
    int orbit_radius = 3;
    int min_pairs = -1;
    // estimate_constants knobs
    long long delta_ball_cap = 6;
    long long bgim_ball_cap = 10;
    int bgim_samples = 500;
    int tree_radius = 3;
    int tree_max_exp = 2;
};

int pick(int value, int fallback) { return value >= 0 ? value : fallback; }
double pick(double value, double fallback) { return value >= 0 ? value : fallback; }

std::vector<long long> parse_int_list(std::string const& text, char const* what) {
    std::vector<long long> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stoll(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (std::exception const&) {
            throw parse_error(std::string("bad ") + what + " entry: " + item);
        }
    }
    return out;
}

std::pair<int, int> parse_range(std::string const& text) {
    auto dots = text.find("..");
    try {
        if (dots == std::string::npos) {
            int v = std::stoi(text);
            return {v, v};
        }
        return {std::stoi(text.substr(0, dots)), std::stoi(text.substr(dots + 2))};
    } catch (std::exception const&) {
        throw parse_error("bad range (want LO..HI): " + text);
    }
}

void load_config(Settings& st, std::string const& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open config file: " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        auto trim = [](std::string s) {
            auto b = s.find_first_not_of(" \t\r");
            auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
        };
        if (trim(line).empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw parse_error("config line " + std::to_string(lineno) +
                              " is not key = value: " + line);
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        try {
            if (key == "alpha1") { st.alpha1 = val; st.realization_set = true; }
            else if (key == "beta1") { st.beta1 = val; st.realization_set = true; }
            else if (key == "power_a") { st.power_a = std::stoll(val); st.realization_set = true; }
            else if (key == "power_b") { st.power_b = std::stoll(val); st.realization_set = true; }
            else if (key == "seed") st.seed = std::stoull(val);
            else if (key == "oracle") st.oracle = val == "1" || val == "true";
            else if (key == "radius_cap") st.radius_cap = std::stoi(val);
            else if (key == "A2") st.A2 = std::stod(val);
            else if (key == "out") st.out_dir = val;
            else if (key == "cache") st.cache_dir = val;
            else if (key == "range") st.range = val;
            else if (key == "max_syllables") st.max_syllables = std::stoi(val);
            else if (key == "max_exp") st.max_exp = std::stoi(val);
            else if (key == "exponents") st.exponents = val;
            else if (key == "N") st.N = std::stoi(val);
            else if (key == "M_est") st.M_est = std::stod(val);
            else if (key == "delta") st.delta = std::stod(val);
            else if (key == "C0") st.C0 = std::stod(val);
            else if (key == "contrast") st.contrast = val;
            else if (key == "orbit_radius") st.orbit_radius = std::stoi(val);
            else if (key == "min_pairs") st.min_pairs = std::stoi(val);
            else if (key == "delta_ball_cap") st.delta_ball_cap = std::stoll(val);
            else if (key == "bgim_ball_cap") st.bgim_ball_cap = std::stoll(val);
            else if (key == "bgim_samples") st.bgim_samples = std::stoi(val);
            else if (key == "tree_radius") st.tree_radius = std::stoi(val);
            else if (key == "tree_max_exp") st.tree_max_exp = std::stoi(val);
            else
                throw parse_error("unknown config key: " + key);
        } catch (parse_error const&) {
            throw;
        } catch (std::exception const&) {
            throw parse_error("bad config value for " + key + ": " + val);
        }
    }
}

RealizedGroup group_from(Settings const& st) {
    return lab::make_realized_group(farey::parse_slope(st.alpha1),
                                    farey::parse_slope(st.beta1), st.power_a,
                                    st.power_b);
}

std::string effective_cache_dir(Settings const& st) {
    if (!st.cache_dir.empty()) return st.cache_dir;
    if (char const* env = std::getenv("FREETWIST_CACHE_DIR")) return env;
    return {};
}

// Stable FNV-1a hex digest; used only to derive a safe cache filename. The
// cache file itself stores the full fingerprint, so a filename collision is
// read back as an empty cache, never as wrong data.
std::string hex_digest(std::string const& text) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// Content-addressed ball cache: loaded on construction, persisted on demand.
struct ScopedCache {
    marking::BallCache cache;
    std::string path;

    ScopedCache(marking::MarkingGraphConfig const& cfg, std::string const& dir)
        : cache(cfg.fingerprint()) {
        if (dir.empty()) return;
        std::filesystem::create_directories(dir);
        path = (std::filesystem::path(dir) / ("ball-" + hex_digest(cfg.fingerprint()) + ".bin"))
                   .string();
        cache.load(path);
    }
    void persist() const {
        if (!path.empty()) cache.save(path);
    }
};

// Print the summary block, write artifacts when requested, and turn the
// verdict into the process exit code.
int finish(report::Report const& rep, Settings const& st) {
    if (!st.out_dir.empty()) {
        std::filesystem::create_directories(st.out_dir);
        auto base = std::filesystem::path(st.out_dir) / rep.experiment;
        rep.write_csv(base.string() + ".csv");
        rep.write_summary(base.string() + ".summary.txt");
    }
    std::fputs(rep.summary_block().c_str(), stdout);
    return rep.failed() ? 1 : 0;
}

std::vector<long long> exponents_or(Settings const& st, std::vector<long long> def) {
    if (st.exponents.empty()) return def;
    auto out = parse_int_list(st.exponents, "exponents");
    if (out.empty()) throw parse_error("exponent list is empty");
    return out;
}

// Small coprime slopes (plus 1/0) used when a command needs candidate
// annular cores without the user supplying any.
std::vector<Slope> core_sweep(int cap) {
    std::vector<Slope> cores;
    for (int q = 1; q <= cap; ++q)
        for (int p = -cap; p <= cap; ++p)
            if (std::gcd(p, q) == 1) cores.emplace_back(p, q);
    cores.emplace_back(1, 0);
    return cores;
}

std::vector<Word> words_with_identity(int max_syll, int max_exp) {
    std::vector<Word> ws{Word{}};
    for (Word& w : freeprod::enumerate_words(lab::presentation(), max_syll, max_exp))
        ws.push_back(std::move(w));
    return ws;
}

} // namespace

int main(int argc, char** argv) {
    Settings st;

    // The config file seeds the settings; flags parsed afterwards override it.
    for (int i = 1; i < argc; ++i) {
        std::string arg = argv[i];
        std::string path;
        if (arg == "--config" && i + 1 < argc) path = argv[i + 1];
        else if (arg.rfind("--config=", 0) == 0) path = arg.substr(9);
        if (!path.empty()) {
            try {
                load_config(st, path);
            } catch (std::exception const& e) {
                std::fprintf(stderr, "error: %s\n", e.what());
                return 2;
            }
        }
    }

    CLI::App app{"Exact curve-graph computations and free-product experiments"};
    app.require_subcommand(1);

    std::function<int()> run;

    // Shared flags; also registered at the top level so they may appear
    // before the subcommand tokens.
    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", st.config_path, "key = value settings file");
        cmd->add_option("--seed", st.seed, "random seed for sampled experiments");
        cmd->add_flag("--oracle", st.oracle, "force brute-force reference paths");
        cmd->add_option("--radius-cap", st.radius_cap, "search/ball radius cap");
        cmd->add_option("--A2", st.A2, "truncation threshold of the sum estimate");
        cmd->add_option("--out", st.out_dir, "directory for CSV and summary artifacts");
        cmd->add_option("--cache", st.cache_dir,
                        "ball cache directory (or FREETWIST_CACHE_DIR)");
        return cmd;
    };
    add_common(&app);

    // --- farey ---------------------------------------------------------
    auto* farey_cmd = app.add_subcommand("farey", "curve-graph queries");
    farey_cmd->require_subcommand(1);
    std::string arg_a, arg_b, arg_domain, arg_word, arg_m1, arg_m2;

    auto* fdist = add_common(farey_cmd->add_subcommand("dist", "distance between slopes"));
    fdist->add_option("a", arg_a, "first slope p/q")->required();
    fdist->add_option("b", arg_b, "second slope p/q")->required();
    fdist->callback([&] {
        run = [&] {
            farey::CurveDistanceOpts opts;
            opts.cross_check = st.oracle;
            int d = farey::curve_distance(farey::parse_slope(arg_a),
                                          farey::parse_slope(arg_b), opts);
            std::printf("%d\n", d);
            return 0;
        };
    });

    auto* fgeo = add_common(farey_cmd->add_subcommand("geodesic", "slope geodesic"));
    fgeo->add_option("a", arg_a, "first slope p/q")->required();
    fgeo->add_option("b", arg_b, "second slope p/q")->required();
    fgeo->callback([&] {
        run = [&] {
            farey::CurveDistanceOpts opts;
            opts.cross_check = st.oracle;
            auto path = farey::curve_geodesic(farey::parse_slope(arg_a),
                                              farey::parse_slope(arg_b), opts);
            for (std::size_t i = 0; i < path.size(); ++i)
                std::printf("%s%s", i ? " " : "", farey::to_string(path[i]).c_str());
            std::printf("\n");
            return 0;
        };
    });

    // --- proj ----------------------------------------------------------
    auto* proj_cmd = app.add_subcommand("proj", "annular projections");
    proj_cmd->require_subcommand(1);

    auto* pcoeff =
        add_common(proj_cmd->add_subcommand("coeff", "annular distance at a domain"));
    pcoeff->add_option("domain", arg_domain, "annular domain ann(p/q)")->required();
    pcoeff->add_option("a", arg_a, "first slope p/q")->required();
    pcoeff->add_option("b", arg_b, "second slope p/q")->required();
    pcoeff->callback([&] {
        run = [&] {
            auto d = annular::parse_domain(arg_domain);
            Slope a = farey::parse_slope(arg_a), b = farey::parse_slope(arg_b);
            int fast = annular::annular_distance(d, a, b);
            if (st.oracle) {
                int ref = annular::annular_distance_oracle(d, a, b);
                std::printf("%d\n", ref);
                if (std::abs(fast - ref) > 1) {
                    std::fprintf(stderr, "fast path %d disagrees with oracle %d beyond 1\n",
                                 fast, ref);
                    return 1;
                }
                return 0;
            }
            std::printf("%d\n", fast);
            return 0;
        };
    });

    auto* pbgim = add_common(
        proj_cmd->add_subcommand("bgim", "projection diameter of a slope geodesic"));
    pbgim->add_option("domain", arg_domain, "annular domain ann(p/q)")->required();
    pbgim->add_option("a", arg_a, "first slope p/q")->required();
    pbgim->add_option("b", arg_b, "second slope p/q")->required();
    pbgim->callback([&] {
        run = [&] {
            auto d = annular::parse_domain(arg_domain);
            auto path = farey::curve_geodesic(farey::parse_slope(arg_a),
                                              farey::parse_slope(arg_b));
            auto diam = annular::bgim_diameter(path, d);
            if (diam) std::printf("%d\n", *diam);
            else std::printf("none\n"); // some vertex misses the domain
            return 0;
        };
    });

    // --- markings ------------------------------------------------------
    auto* markings_cmd = app.add_subcommand("markings", "marking-graph queries");
    markings_cmd->require_subcommand(1);

    auto* mdist =
        add_common(markings_cmd->add_subcommand("dist", "distance between markings"));
    mdist->add_option("m1", arg_m1, "marking {p/q, ...} @R")->required();
    mdist->add_option("m2", arg_m2, "marking {p/q, ...} @R")->required();
    mdist->callback([&] {
        run = [&] {
            auto m1 = marking::parse_marking(arg_m1);
            auto m2 = marking::parse_marking(arg_m2);
            auto cfg = marking::default_config(m1.R);
            int cap = pick(st.radius_cap, 8);
            ScopedCache sc(cfg, effective_cache_dir(st));
            auto d = marking::marking_distance(m1, m2, cfg, cap, &sc.cache);
            sc.persist();
            if (!d) {
                std::printf("beyond-cap\n");
                return 0;
            }
            if (st.oracle) {
                // Reference: read the distance off the exact ball around m1.
                auto ball = marking::marking_ball(m1, cfg, cap, &sc.cache);
                sc.persist();
                for (auto const& [m, depth] : ball)
                    if (m == m2 && depth != *d) {
                        std::fprintf(stderr, "fast %d disagrees with ball depth %d\n", *d,
                                     depth);
                        return 1;
                    }
            }
            std::printf("%d\n", *d);
            return 0;
        };
    });

    auto* mformula = add_common(markings_cmd->add_subcommand(
        "formula", "distance-formula comparability on a small ball"));
    mformula->callback([&] {
        run = [&] {
            auto cfg = marking::default_config(1);
            ScopedCache sc(cfg, effective_cache_dir(st));
            auto rep = lab::marking_formula_experiment(cfg, pick(st.A2, 6.0),
                                                       pick(st.radius_cap, 3),
                                                       st.min_pairs >= 0 ? st.min_pairs : 50,
                                                       st.seed, &sc.cache);
            sc.persist();
            return finish(rep, st);
        };
    });

    // --- group ---------------------------------------------------------
    auto* group_cmd = app.add_subcommand("group", "free-product words");
    group_cmd->require_subcommand(1);

    auto* gnf = add_common(group_cmd->add_subcommand("nf", "normal form of a word"));
    gnf->add_option("word", arg_word, "word like A(2)B(-1)")->required();
    gnf->callback([&] {
        run = [&] {
            Word w = freeprod::parse_word(lab::presentation(), arg_word);
            std::printf("%s\n", freeprod::to_string(w).c_str());
            return 0;
        };
    });

    auto* grealize =
        add_common(group_cmd->add_subcommand("realize", "matrix image of a word"));
    grealize->add_option("word", arg_word, "word like A(2)B(-1)")->required();
    grealize->callback([&] {
        run = [&] {
            RealizedGroup rg = group_from(st);
            Word w = freeprod::parse_word(lab::presentation(), arg_word);
            std::printf("%s\n", farey::to_string(lab::realize(rg, w)).c_str());
            return 0;
        };
    });

    auto* gtrace = add_common(group_cmd->add_subcommand("trace", "trace of a word's image"));
    gtrace->add_option("word", arg_word, "word like A(2)B(-1)")->required();
    gtrace->callback([&] {
        run = [&] {
            RealizedGroup rg = group_from(st);
            Word w = freeprod::parse_word(lab::presentation(), arg_word);
            std::printf("%s\n", lab::realize(rg, w).trace().str().c_str());
            return 0;
        };
    });

    // --- exp -----------------------------------------------------------
    auto* exp_cmd = app.add_subcommand("exp", "experiment suite");
    exp_cmd->require_subcommand(1);

    auto scan_opts = [&](int def_syll, int def_exp) {
        lab::ScanOpts so;
        so.max_syllables = pick(st.max_syllables, def_syll);
        so.max_exp = pick(st.max_exp, def_exp);
        return so;
    };

    auto* ed0 = add_common(
        exp_cmd->add_subcommand("d0", "scan distances for injective stretching ranges"));
    ed0->add_option("--range", st.range, "distance range LO..HI");
    ed0->add_option("--max-syllables", st.max_syllables, "word length bound for scans");
    ed0->add_option("--max-exp", st.max_exp, "exponent bound for scans");
    ed0->callback([&] {
        run = [&] {
            auto [lo, hi] = parse_range(st.range);
            auto probe = lab::distance_threshold_probe(lo, hi, scan_opts(3, 2));
            return finish(probe.report, st);
        };
    });

    auto* e31 = add_common(
        exp_cmd->add_subcommand("lemma31", "twist displacement above the scaled bound"));
    e31->callback([&] {
        run = [&] {
            auto rep = lab::twist_displacement_check(
                group_from(st), exponents_or(st, {1, -1, 2, -5, 9}), st.N, st.M_est);
            return finish(rep, st);
        };
    });

    auto* e32 = add_common(exp_cmd->add_subcommand(
        "lemma32", "displacement against the thinness bound (may be vacuous)"));
    e32->callback([&] {
        run = [&] {
            auto rep = lab::thin_displacement_check(
                group_from(st), exponents_or(st, {1, -1, 2, -5}), st.N, st.delta);
            return finish(rep, st);
        };
    });

    auto* e33 = add_common(
        exp_cmd->add_subcommand("lemma33", "edge pairs are local quasigeodesics"));
    e33->callback([&] {
        run = [&] {
            auto rep = lab::local_quasigeodesic_check(
                group_from(st), exponents_or(st, {1, 2, -3}), st.delta, st.C0);
            return finish(rep, st);
        };
    });

    auto* edf = add_common(exp_cmd->add_subcommand(
        "distance-formula", "fit marking distance against the truncated sum"));
    edf->callback([&] {
        run = [&] {
            auto cfg = marking::default_config(1);
            ScopedCache sc(cfg, effective_cache_dir(st));
            auto rep = lab::marking_formula_experiment(
                cfg, pick(st.A2, 6.0), pick(st.radius_cap, 4),
                st.min_pairs >= 0 ? st.min_pairs : 200, st.seed, &sc.cache);
            sc.persist();
            return finish(rep, st);
        };
    });

    auto* edist = add_common(
        exp_cmd->add_subcommand("distortion", "two-sided orbit-map distortion fit"));
    edist->add_option("--max-syllables", st.max_syllables, "word length bound");
    edist->add_option("--max-exp", st.max_exp, "exponent bound");
    edist->callback([&] {
        run = [&] {
            // Default realization: adjacent slopes with twist powers 2, the
            // smallest freely-acting configuration.
            Settings local = st;
            if (!st.realization_set) {
                local.beta1 = "1/0";
                local.power_a = 2;
                local.power_b = 2;
            }
            auto cfg = marking::default_config(1);
            ScopedCache sc(cfg, effective_cache_dir(st));
            auto rep = lab::distortion_fit(group_from(local), pick(st.max_syllables, 4),
                                           pick(st.max_exp, 3), pick(st.radius_cap, 40),
                                           st.seed, &sc.cache);
            sc.persist();
            return finish(rep, st);
        };
    });

    auto* e510 = add_common(exp_cmd->add_subcommand(
        "thm510", "off-orbit projection bound with on-orbit contrast"));
    e510->callback([&] {
        run = [&] {
            RealizedGroup rg = group_from(st);
            auto orbit = lab::orbit_slopes(rg, st.orbit_radius, st.orbit_radius);
            std::vector<Slope> off;
            for (Slope const& s : core_sweep(4)) {
                if (std::binary_search(orbit.begin(), orbit.end(), s)) continue;
                off.push_back(s);
                if (off.size() == 6) break;
            }
            if (off.empty())
                throw precondition_error("no off-orbit cores found in the sweep");
            auto rep = lab::offorbit_projection_check(
                rg, words_with_identity(2, 1), off,
                parse_int_list(st.contrast, "contrast"), st.orbit_radius);
            return finish(rep, st);
        };
    });

    auto* econst = add_common(
        exp_cmd->add_subcommand("constants", "estimate the full constants ledger"));
    econst->callback([&] {
        run = [&] {
            lab::ConstantsOpts co;
            co.delta_ball_cap = Int(st.delta_ball_cap);
            co.bgim_ball_cap = Int(st.bgim_ball_cap);
            co.bgim_samples = st.bgim_samples;
            co.tree_radius = st.tree_radius;
            co.tree_max_exp = st.tree_max_exp;
            co.seed = st.seed;
            auto res = lab::estimate_constants(group_from(st), co);
            std::string text = res.ledger.serialize();
            std::fputs(text.c_str(), stdout);
            std::printf("\n");
            if (!st.out_dir.empty()) {
                std::filesystem::create_directories(st.out_dir);
                std::ofstream out(std::filesystem::path(st.out_dir) / "constants.txt");
                out << text;
            }
            return finish(res.report, st);
        };
    });

    try {
        app.parse(argc, argv);
    } catch (CLI::ParseError const& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2; // help/version exit clean, usage errors as 2
    } catch (parse_error const& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }

    try {
        return run ? run() : 2;
    } catch (parse_error const& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (precondition_error const& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (unsupported_error const& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (resource_limit_error const& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (std::exception const& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return 2;
    }
}
