// Acceptance gate: ten end-to-end checks, one PASS/FAIL line each, nonzero
// exit when any fails. Every check is seeded and deterministic.

#include "freetwist/lab.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace freetwist;
using farey::Slope;
using freeprod::Presentation;
using freeprod::TreePoint;
using freeprod::Word;
using lab::RealizedGroup;

namespace {

constexpr std::uint64_t kSeed = 20260825;

double now_s() {
    using namespace std::chrono;
    return duration<double>(steady_clock::now().time_since_epoch()).count();
}

Slope random_slope(std::mt19937_64& rng, int cap) {
    std::uniform_int_distribution<int> num(-cap, cap), den(0, cap);
    for (;;) {
        int p = num(rng), q = den(rng);
        if (p == 0 && q == 0) continue;
        return Slope(p, q);
    }
}

RealizedGroup distance_six_group() {
    auto wit = farey::distance_witnesses(Slope(0, 1), 6);
    return lab::make_realized_group(Slope(0, 1), wit[6]);
}

// --- criterion 1: fast annular distance vs brute-force lift oracle --------
bool crit_oracle_equivalence(std::string& detail) {
    std::mt19937_64 rng(kSeed);
    int checked = 0, max_dev = 0;
    while (checked < 1000) {
        Slope core = random_slope(rng, 50);
        Slope a = random_slope(rng, 50), b = random_slope(rng, 50);
        if (a == core || b == core) continue; // projection undefined at the core
        annular::AnnularDomain Y{core};
        int dev = std::abs(annular::annular_distance(Y, a, b) -
                           annular::annular_distance_oracle(Y, a, b));
        max_dev = std::max(max_dev, dev);
        ++checked;
    }
    std::ostringstream os;
    os << checked << " random triples, max |fast - oracle| = " << max_dev;
    detail = os.str();
    return max_dev <= 1;
}

// --- criterion 2: twist coefficient band |d_Y - |n|| <= 5 -----------------
bool crit_twist_band(std::string& detail) {
    std::mt19937_64 rng(kSeed + 1);
    std::uniform_int_distribution<int> power(-50, 50);
    int checked = 0, max_dev = 0;
    while (checked < 500) {
        Slope core = random_slope(rng, 20);
        Slope b = random_slope(rng, 20);
        if (b == core) continue;
        long long n = power(rng);
        annular::AnnularDomain Y{core};
        int d = annular::twist_coefficient_check(Y, b, Int(n));
        max_dev = std::max<int>(max_dev, std::abs(d - std::abs((int)n)));
        ++checked;
    }
    std::ostringstream os;
    os << checked << " random twists with |n| <= 50, max |d_Y - |n|| = " << max_dev;
    detail = os.str();
    return max_dev <= 5;
}

// --- criterion 3: truncated-sum transfer + truncation comparability -------
bool crit_property_suites(std::string& detail) {
    std::mt19937_64 rng(kSeed + 2);
    int transfer_bad = 0;
    {
        std::uniform_int_distribution<int> kq(4, 16), cq(0, 12), len(1, 8), yq(0, 80),
            tq(0, 8), jq(1, 20);
        for (int t = 0; t < 1000; ++t) {
            Rat K(kq(rng), 4), C(cq(rng), 4);
            Rat kappa = 2 * K * C + Rat(jq(rng), 4); // strictly above 2KC
            int n = len(rng);
            std::vector<Rat> xs, ys;
            for (int i = 0; i < n; ++i) {
                Rat y(yq(rng), 4);
                Rat lo = (y - C) / K, hi = K * (y + C);
                if (lo < 0) lo = 0;
                Rat x = lo + (hi - lo) * Rat(tq(rng), 8);
                ys.push_back(y);
                xs.push_back(x);
            }
            if (!metric::check_truncated_sum_transfer(xs, ys, K, C, kappa)) ++transfer_bad;
        }
    }
    int trunc_bad = 0;
    {
        Presentation p11(1, 1), p21(2, 1);
        auto w11 = freeprod::enumerate_words(p11, 3, 2);
        auto w21 = freeprod::enumerate_words(p21, 3, 2);
        std::vector<Rat> kappas{Rat(1), Rat(3, 2), Rat(2), Rat(3), Rat(5)};
        std::uniform_int_distribution<std::size_t> k11(0, w11.size() - 1),
            k21(0, w21.size() - 1), kk(0, kappas.size() - 1);
        for (int t = 0; t < 1000; ++t) {
            bool rank2 = t % 2;
            Presentation const& p = rank2 ? p21 : p11;
            Word const& a = rank2 ? w21[k21(rng)] : w11[k11(rng)];
            Word const& b = rank2 ? w21[k21(rng)] : w11[k11(rng)];
            if (!freeprod::check_truncation_comparability(p, freeprod::v_point(a),
                                                          freeprod::v_point(b),
                                                          kappas[kk(rng)]))
                ++trunc_bad;
        }
    }
    std::ostringstream os;
    os << "1000 sum transfers (" << transfer_bad << " violations), "
       << "1000 truncation comparabilities (" << trunc_bad << " violations)";
    detail = os.str();
    return transfer_bad == 0 && trunc_bad == 0;
}

// --- criterion 4: flat-sum distance equals BFS on the expanded complex ----
// Rank (1,1) covers the full (4,3) enumeration; the rank-2 factor is
// exercised on the largest enumerations whose complexes still admit an
// all-pairs search.
bool crit_flat_exactness(std::string& detail) {
    struct SweepResult {
        long long pairs = 0;
        long long mismatches = 0;
    };
    auto sweep = [](Presentation const& p, int sylls, int exps) {
        auto words = freeprod::enumerate_words(p, sylls, exps);
        std::vector<Word> points{Word{}};
        points.insert(points.end(), words.begin(), words.end());
        auto fc = freeprod::build_flat_complex(p, words);
        std::vector<std::uint32_t> ids(points.size());
        for (std::size_t i = 0; i < points.size(); ++i) ids[i] = fc.v_id(points[i]);
        SweepResult res;
        long long mism = 0, pairs = 0;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 8) reduction(+ : mism, pairs)
#endif
        for (std::size_t i = 0; i < points.size(); ++i) {
            auto dist = fc.graph.bfs_distances(ids[i]);
            TreePoint vi = freeprod::v_point(points[i]);
            for (std::size_t j = i + 1; j < points.size(); ++j) {
                Rat want = 2 * freeprod::total_distance(p, vi, freeprod::v_point(points[j]));
                if (Rat(dist[ids[j]]) != want) ++mism;
                ++pairs;
            }
        }
        res.pairs = pairs;
        res.mismatches = mism;
        return res;
    };
    auto r11 = sweep(Presentation(1, 1), 4, 3);
    auto r21a = sweep(Presentation(2, 1), 3, 2);
    auto r21b = sweep(Presentation(2, 1), 4, 1);
    std::ostringstream os;
    os << "rank (1,1) sweep (4,3): " << r11.pairs << " pairs, " << r11.mismatches
       << " mismatches; rank (2,1) sweeps (3,2)+(4,1): " << (r21a.pairs + r21b.pairs)
       << " pairs, " << (r21a.mismatches + r21b.mismatches) << " mismatches";
    detail = os.str();
    return r11.mismatches == 0 && r21a.mismatches == 0 && r21b.mismatches == 0;
}

// --- criterion 5: distance-6 realization is injective and stretching ------
bool crit_desk_freeness(std::string& detail) {
    RealizedGroup rg6 = distance_six_group();
    lab::ScanOpts so;
    so.max_syllables = 5;
    so.max_exp = 4;
    auto inj = lab::injectivity_scan(rg6, so);
    auto pa = lab::pseudo_anosov_scan(rg6, so);
    auto val = [](report::Report const& r, char const* key) {
        for (auto const& [k, v] : r.summary)
            if (k == key) return v;
        return std::string("?");
    };
    std::ostringstream os;
    os << val(inj, "words_checked") << " words <= 5 syllables, exponents <= 4: "
       << val(inj, "kernel_hits") << " kernel hits, " << val(pa, "violations")
       << " stretching violations";
    detail = os.str();
    return !inj.failed() && !pa.failed();
}

// --- criterion 6: threshold probe consistency and reproducibility ---------
bool crit_probe(std::string& detail) {
    lab::ScanOpts so;
    so.max_syllables = 3;
    so.max_exp = 2;
    auto first = lab::distance_threshold_probe(1, 4, so);
    auto second = lab::distance_threshold_probe(1, 4, so);
    bool reproducible = first.report.full_text() == second.report.full_text();
    bool consistent = !first.report.failed();
    std::ostringstream os;
    os << "minimal passing D = "
       << (first.minimal_passing_D ? std::to_string(*first.minimal_passing_D) : "none")
       << ", oracle-consistent over D = 1..4, rerun "
       << (reproducible ? "byte-identical" : "DIFFERS");
    detail = os.str();
    return consistent && reproducible && first.minimal_passing_D.has_value();
}

// --- criterion 7: marking distance vs truncated-sum estimate --------------
bool crit_formula_fit(std::string& detail) {
    auto cfg = marking::default_config(1);
    marking::BallCache cache(cfg.fingerprint());
    auto rep = lab::marking_formula_experiment(cfg, 6.0, 4, 200, kSeed, &cache);
    auto val = [&](char const* key) {
        for (auto const& [k, v] : rep.summary)
            if (k == key) return v;
        return std::string("?");
    };
    bool k_bounded = std::stod(val("fit_K")) <= 20.0;
    std::ostringstream os;
    os << val("pairs") << " pairs at radius 4: fit (K, C) = (" << val("fit_K") << ", "
       << val("fit_C") << "), doubling-stable = " << val("stable");
    detail = os.str();
    return !rep.failed() && k_bounded;
}

// --- criterion 8: orbit-map distortion has a positive lower slope ---------
bool crit_distortion(std::string& detail) {
    RealizedGroup rg = lab::make_realized_group(Slope(0, 1), Slope(1, 0), 2, 2);
    auto cfg = marking::default_config(1);
    marking::BallCache cache(cfg.fingerprint());
    auto rep = lab::distortion_fit(rg, 4, 3, 40, kSeed, &cache);
    auto val = [&](char const* key) {
        for (auto const& [k, v] : rep.summary)
            if (k == key) return v;
        return std::string("?");
    };
    std::ostringstream os;
    os << "lower slopes 1/K = (" << val("lower_slope_A") << ", " << val("lower_slope_B")
       << ") over disjoint samples of " << val("pairs_A") << " + " << val("pairs_B")
       << " words, stable = " << val("stable");
    detail = os.str();
    return !rep.failed();
}

// --- criterion 9: off-orbit bound stable, on-orbit coefficients grow ------
bool crit_offorbit(std::string& detail) {
    RealizedGroup rg6 = distance_six_group();
    auto orbit = lab::orbit_slopes(rg6, 3, 3);
    std::vector<Slope> off;
    for (int q = 1; q <= 3 && off.size() < 4; ++q)
        for (int p = -3; p <= 3 && off.size() < 4; ++p) {
            if (std::gcd(p, q) != 1) continue;
            Slope s(p, q);
            if (!std::binary_search(orbit.begin(), orbit.end(), s)) off.push_back(s);
        }
    std::vector<Word> ws{Word{}};
    for (Word& w : freeprod::enumerate_words(lab::presentation(), 2, 1))
        ws.push_back(std::move(w));
    auto rep = lab::offorbit_projection_check(rg6, ws, off, {10, 20, 40}, 3);
    auto val = [&](char const* key) {
        for (auto const& [k, v] : rep.summary)
            if (k == key) return v;
        return std::string("?");
    };
    std::ostringstream os;
    os << "M1 = " << val("M1_emp") << " over " << off.size()
       << " off-orbit cores, doubling-stable = " << val("stable")
       << ", contrast growth >= |n| - 5 at n in {10, 20, 40}";
    detail = os.str();
    return !rep.failed();
}

// --- criterion 10: projected-geodesic diameter bound ----------------------
bool crit_bgim(std::string& detail) {
    auto est = lab::bgim_constant_estimate(Int(10), 500, kSeed);
    auto val = [&](char const* key) {
        for (auto const& [k, v] : est.report.summary)
            if (k == key) return v;
        return std::string("?");
    };
    std::ostringstream os;
    os << est.samples << " sampled geodesics in the radius-10 ball: max projection "
       << "diameter M = " << est.M << ", doubling-stable = " << val("stable");
    detail = os.str();
    return !est.report.failed();
}

} // namespace

int main() {
    struct Criterion {
        int number;
        bool (*run)(std::string&);
    };
    const Criterion criteria[] = {
        {1, crit_oracle_equivalence}, {2, crit_twist_band}, {3, crit_property_suites},
        {4, crit_flat_exactness},     {5, crit_desk_freeness}, {6, crit_probe},
        {7, crit_formula_fit},        {8, crit_distortion}, {9, crit_offorbit},
        {10, crit_bgim},
    };
    int failures = 0;
    for (auto const& c : criteria) {
        std::string detail;
        bool ok = false;
        double t0 = now_s();
        try {
            ok = c.run(detail);
        } catch (std::exception const& e) {
            detail = std::string("exception: ") + e.what();
        }
        if (!ok) ++failures;
        std::printf("%s criterion %d: %s (%.1f s)\n", ok ? "PASS" : "FAIL", c.number,
                    detail.c_str(), now_s() - t0);
        std::fflush(stdout);
    }
    std::printf("%d/10 criteria passed\n", 10 - failures);
    return failures == 0 ? 0 : 1;
}
