#include "freetwist/lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace freetwist::lab {

using freeprod::Presentation;
using freeprod::Syllable;
using report::Report;
using report::Status;
using report::format_double;

// ---------------------------------------------------------------------------
// Realization
// ---------------------------------------------------------------------------

Presentation presentation() { return Presentation{1, 1}; }

RealizedGroup make_realized_group(Slope alpha1, Slope beta1, long long power_a,
                                  long long power_b, farey::Surface surface) {
    if (alpha1 == beta1)
        throw precondition_error("the two generator slopes must be distinct");
    if (power_a == 0 || power_b == 0)
        throw precondition_error("twist powers must be nonzero");
    RealizedGroup rg;
    rg.surface = surface;
    rg.alpha1 = alpha1;
    rg.beta1 = beta1;
    rg.power_a = power_a;
    rg.power_b = power_b;
    rg.geodesic = farey::curve_geodesic(alpha1, beta1);
    rg.D = static_cast<int>(rg.geodesic.size()) - 1;
    return rg;
}

farey::MappingClass realize(RealizedGroup const& rg, Word const& w) {
    farey::MappingClass out;
    for (Syllable const& s : w.syllables) {
        if (s.exps.size() != 1)
            throw unsupported_error("surface realization supports cyclic factors only");
        Slope const& core = s.side == 'A' ? rg.alpha1 : rg.beta1;
        long long power = s.side == 'A' ? rg.power_a : rg.power_b;
        out = out * farey::twist(core, Int(s.exps[0]) * power);
    }
    return out;
}

Slope phi(RealizedGroup const& rg, TreePoint const& p) {
    farey::MappingClass g = realize(rg, p.coset);
    if (p.kind == TreePoint::Kind::W_VERTEX)
        return farey::apply(g, p.side == 'A' ? rg.alpha1 : rg.beta1);
    return farey::apply(g, rg.geodesic[static_cast<std::size_t>(rg.midpoint())]);
}

Slope phi_scaled(RealizedGroup const& rg, Word const& element, int position) {
    if (position < 0 || position > rg.D)
        throw precondition_error("edge position must lie in [0, D]");
    return farey::apply(realize(rg, element),
                        rg.geodesic[static_cast<std::size_t>(position)]);
}

Slope phi_label(RealizedGroup const& rg, std::string const& label) {
    auto sp = label.find(' ');
    if (sp == std::string::npos) throw parse_error("unrecognized tree label: " + label);
    std::string kind = label.substr(0, sp);
    std::string rest = label.substr(sp + 1);
    Presentation p = presentation();
    if (kind == "A" || kind == "B")
        return phi(rg, freeprod::w_vertex(p, kind[0], freeprod::parse_word(p, rest)));
    if (kind == "V")
        return phi(rg, freeprod::v_point(freeprod::parse_word(p, rest)));
    if (kind == "E") {
        auto sp2 = rest.rfind(' ');
        if (sp2 == std::string::npos) throw parse_error("unrecognized tree label: " + label);
        Word element = freeprod::parse_word(p, rest.substr(0, sp2));
        int pos = std::stoi(rest.substr(sp2 + 1));
        return phi_scaled(rg, element, pos);
    }
    throw parse_error("unrecognized tree label: " + label);
}

// ---------------------------------------------------------------------------
// Exhaustive scans
// ---------------------------------------------------------------------------

namespace {

std::vector<Word> scan_words(ScanOpts const& opts) {
    return freeprod::enumerate_words(presentation(), opts.max_syllables, opts.max_exp);
}

// Dominant eigenvalue modulus of a stretching class, |trace| > 2.
double dominant_eigenvalue(farey::MappingClass const& mc) {
    Int t = abs_int(mc.trace());
    double td = to_double(t);
    return (td + std::sqrt(td * td - 4.0)) / 2.0;
}

Slope growth_seed(farey::MappingClass const& mc) {
    for (Slope s : {Slope(0, 1), Slope(1, 0), Slope(1, 1), Slope(1, 2), Slope(2, 1)}) {
        if (farey::apply(mc, s) == s) continue;
        return s;
    }
    throw precondition_error("no usable growth seed found");
}

} // namespace

Report injectivity_scan(RealizedGroup const& rg, ScanOpts const& opts) {
    std::vector<Word> words = scan_words(opts);
    std::vector<char> hit(words.size(), 0);
    auto body = [&](std::size_t i) {
        hit[i] = realize(rg, words[i]).is_identity() ? 1 : 0;
    };
    if (opts.parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
        for (std::size_t i = 0; i < words.size(); ++i) body(i);
    } else {
        for (std::size_t i = 0; i < words.size(); ++i) body(i);
    }
    Report rep;
    rep.experiment = "injectivity_scan";
    rep.columns = {"word", "matrix", "status"};
    std::size_t hits = 0;
    for (std::size_t i = 0; i < words.size(); ++i)
        if (hit[i]) {
            ++hits;
            rep.add_row({freeprod::to_string(words[i]),
                         farey::to_string(realize(rg, words[i])), "FAIL"});
            rep.note(Status::FAIL);
        }
    rep.add_summary("alpha1", farey::to_string(rg.alpha1));
    rep.add_summary("beta1", farey::to_string(rg.beta1));
    rep.add_summary("D", double(rg.D));
    rep.add_summary("words_checked", double(words.size()));
    rep.add_summary("kernel_hits", double(hits));
    return rep;
}

Report pseudo_anosov_scan(RealizedGroup const& rg, ScanOpts const& opts) {
    std::vector<Word> words = scan_words(opts);
    Presentation p = presentation();
    std::vector<char> scanned(words.size(), 0), violation(words.size(), 0);
    auto body = [&](std::size_t i) {
        if (freeprod::cyclic_reduce(p, words[i]).reduced.syllable_count() < 2) return;
        scanned[i] = 1;
        if (!farey::is_pseudo_anosov(realize(rg, words[i]))) violation[i] = 1;
    };
    if (opts.parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
        for (std::size_t i = 0; i < words.size(); ++i) body(i);
    } else {
        for (std::size_t i = 0; i < words.size(); ++i) body(i);
    }
    Report rep;
    rep.experiment = "pseudo_anosov_scan";
    rep.columns = {"word", "trace", "growth", "eigenvalue", "status"};
    std::size_t scanned_n = 0, violations = 0, growth_checks = 0;
    std::size_t next_growth = 0;
    for (std::size_t i = 0; i < words.size(); ++i) {
        if (!scanned[i]) continue;
        ++scanned_n;
        farey::MappingClass mc = realize(rg, words[i]);
        if (violation[i]) {
            ++violations;
            rep.add_row({freeprod::to_string(words[i]), mc.trace().str(), "", "", "FAIL"});
            rep.note(Status::FAIL);
            continue;
        }
        if (opts.growth_sample_stride > 0 && scanned_n >= next_growth) {
            next_growth = scanned_n + static_cast<std::size_t>(opts.growth_sample_stride);
            ++growth_checks;
            double lambda = dominant_eigenvalue(mc);
            double growth = farey::intersection_growth(mc, growth_seed(mc), 12);
            bool ok = std::abs(growth - lambda) <= 0.05 * lambda;
            rep.add_row({freeprod::to_string(words[i]), mc.trace().str(),
                         format_double(growth), format_double(lambda),
                         ok ? "PASS" : "FAIL"});
            if (!ok) rep.note(Status::FAIL);
        }
    }
    rep.add_summary("words_scanned", double(scanned_n));
    rep.add_summary("violations", double(violations));
    rep.add_summary("growth_checks", double(growth_checks));
    return rep;
}

bool free_twist_criterion(Int const& intersection, long long na, long long nb) {
    return abs_int(Int(na) * Int(nb)) * intersection * intersection >= 4;
}

ProbeResult distance_threshold_probe(int d_min, int d_max, ScanOpts const& opts) {
    if (d_min < 1 || d_max < d_min)
        throw precondition_error("probe range must satisfy 1 <= d_min <= d_max");
    std::vector<Slope> witnesses = farey::distance_witnesses(Slope(0, 1), d_max);
    ProbeResult res;
    res.report.experiment = "distance_threshold_probe";
    res.report.columns = {"D",           "beta",        "intersection", "kernel_hits",
                          "pa_violations", "oracle_free", "scans_pass",  "status"};
    for (int d = d_min; d <= d_max; ++d) {
        Slope beta = witnesses.at(static_cast<std::size_t>(d));
        RealizedGroup rg = make_realized_group(Slope(0, 1), beta, 1, 1);
        Report inj = injectivity_scan(rg, opts);
        Report pa = pseudo_anosov_scan(rg, opts);
        bool inj_ok = !inj.failed();
        bool pass = inj_ok && !pa.failed();
        Int inter = farey::geometric_intersection(rg.surface, rg.alpha1, rg.beta1);
        bool oracle_free = free_twist_criterion(inter, 1, 1);
        // The independent criterion guarantees injectivity only; stretching
        // of all non-factor words is a strictly stronger conclusion.
        bool consistent = !oracle_free || inj_ok;
        if (!consistent) res.report.note(Status::FAIL);
        if (pass && !res.minimal_passing_D) res.minimal_passing_D = d;
        auto count_of = [](Report const& r, char const* key) {
            for (auto const& [k, v] : r.summary)
                if (k == key) return v;
            return std::string("0");
        };
        res.report.add_row({std::to_string(d), farey::to_string(beta), inter.str(),
                            count_of(inj, "kernel_hits"), count_of(pa, "violations"),
                            oracle_free ? "yes" : "no", pass ? "yes" : "no",
                            consistent ? "PASS" : "FAIL"});
    }
    res.report.add_summary("minimal_passing_D",
                           res.minimal_passing_D ? std::to_string(*res.minimal_passing_D)
                                                 : std::string("none"));
    return res;
}

// ---------------------------------------------------------------------------
// Displacement and quasigeodesic checks
// ---------------------------------------------------------------------------

namespace {

Word b_power(long long e) { return Word{{Syllable{'B', {e}}}}; }
Word a_power(long long e) { return Word{{Syllable{'A', {e}}}}; }

int displacement(RealizedGroup const& rg, long long e) {
    Slope image = farey::apply(realize(rg, b_power(e)), rg.alpha1);
    return farey::curve_distance(rg.alpha1, image);
}

} // namespace

Report twist_displacement_check(RealizedGroup const& rg,
                                std::vector<long long> const& exponents, int N,
                                double M_est) {
    if (N <= M_est + 5)
        throw precondition_error("twist power must exceed the projection bound plus 5");
    Report rep;
    rep.experiment = "twist_displacement";
    rep.columns = {"exponent", "displacement", "bound", "slack", "status"};
    double bound = (2.0 * rg.D - 4.0) / N;
    double min_slack = std::numeric_limits<double>::infinity();
    for (long long e : exponents) {
        if (e == 0) throw precondition_error("displacement exponents must be nonzero");
        int d = displacement(rg, e);
        double slack = d - bound;
        min_slack = std::min(min_slack, slack);
        bool ok = d + 1e-12 >= bound;
        rep.add_row({std::to_string(e), std::to_string(d), format_double(bound),
                     format_double(slack), ok ? "PASS" : "FAIL"});
        if (!ok) rep.note(Status::FAIL);
    }
    rep.add_summary("D", double(rg.D));
    rep.add_summary("N", double(N));
    rep.add_summary("bound", bound);
    rep.add_summary("min_slack", min_slack);
    return rep;
}

Report thin_displacement_check(RealizedGroup const& rg,
                               std::vector<long long> const& exponents, int N,
                               double delta) {
    Report rep;
    rep.experiment = "thin_displacement";
    rep.columns = {"exponent", "displacement", "bound", "status"};
    double bound = 2.0 * rg.D - 2.0 * ((N + 1) * delta + 2.0);
    double c_emp = -std::numeric_limits<double>::infinity();
    for (long long e : exponents) {
        if (e == 0) throw precondition_error("displacement exponents must be nonzero");
        int d = displacement(rg, e);
        c_emp = std::max(c_emp, 2.0 * rg.D - d);
        Status st = Status::PASS;
        if (bound <= 0.0) st = Status::VACUOUS;
        else if (d + 1e-12 < bound) st = Status::FAIL;
        rep.add_row({std::to_string(e), std::to_string(d), format_double(bound),
                     report::to_string(st)});
        rep.note(st);
    }
    rep.add_summary("D", double(rg.D));
    rep.add_summary("N", double(N));
    rep.add_summary("delta", delta);
    rep.add_summary("bound", bound);
    rep.add_summary("c_emp", c_emp); // tightest c with displacement >= 2D - c
    return rep;
}

Report local_quasigeodesic_check(RealizedGroup const& rg,
                                 std::vector<long long> const& exponents, double delta,
                                 double C0) {
    Report rep;
    rep.experiment = "local_quasigeodesic";
    rep.columns = {"exponent", "window", "C", "junction_distance", "status"};
    double C = 13.0 * delta + 2.0 * C0;
    for (long long e : exponents) {
        if (e == 0) throw precondition_error("edge-pair exponents must be nonzero");
        // Walk the identity edge end to end, then its b^e-translate back
        // from the shared B-side coset vertex.
        std::vector<Slope> path = rg.geodesic;
        farey::MappingClass h = realize(rg, b_power(e));
        for (int j = 1; j <= rg.D; ++j)
            path.push_back(farey::apply(h, rg.geodesic[static_cast<std::size_t>(rg.D - j)]));
        metric::DistanceFn dist = [&](std::size_t i, std::size_t j) {
            return double(farey::curve_distance(path[i], path[j]));
        };
        bool ok = metric::is_local_quasigeodesic(path.size(), dist, double(rg.D), 1.0, C);
        int junction = farey::curve_distance(path.front(), path.back());
        rep.add_row({std::to_string(e), std::to_string(rg.D), format_double(C),
                     std::to_string(junction), ok ? "PASS" : "FAIL"});
        if (!ok) rep.note(Status::FAIL);
    }
    rep.add_summary("delta", delta);
    rep.add_summary("C0", C0);
    rep.add_summary("C", C);
    return rep;
}

metric::ComparabilityBound qi_fit(std::vector<std::pair<double, double>> const& pairs) {
    if (pairs.size() < 2)
        throw precondition_error("comparability fit needs at least 2 pairs");
    auto c_of = [&](double K) {
        double c = 0.0;
        for (auto const& [x, y] : pairs) {
            c = std::max(c, y - K * x);
            c = std::max(c, x / K - y);
        }
        return c;
    };
    metric::ComparabilityBound best{1.0, c_of(1.0)};
    for (double K = 1.25; K <= 25.0 + 1e-9; K += 0.25) {
        double c = c_of(K);
        if (K + c < best.K + best.C - 1e-9) best = {K, c};
    }
    return best;
}

// ---------------------------------------------------------------------------
// Orbit markings and projection bounds
// ---------------------------------------------------------------------------

marking::Marking base_orbit_marking(RealizedGroup const& rg) {
    std::size_t mid = static_cast<std::size_t>(rg.midpoint());
    return marking::Marking({rg.geodesic[mid], rg.geodesic[mid + 1]}, 1);
}

marking::Marking orbit_marking(RealizedGroup const& rg, Word const& w) {
    return marking::apply(realize(rg, w), base_orbit_marking(rg));
}

std::vector<Slope> orbit_slopes(RealizedGroup const& rg, int max_syll, int max_exp) {
    std::set<Slope> out{rg.alpha1, rg.beta1};
    for (Word const& w : freeprod::enumerate_words(presentation(), max_syll, max_exp)) {
        farey::MappingClass g = realize(rg, w);
        out.insert(farey::apply(g, rg.alpha1));
        out.insert(farey::apply(g, rg.beta1));
    }
    return {out.begin(), out.end()};
}

Report orbit_fill_check(RealizedGroup const& rg, int max_syll, int max_exp) {
    Presentation p = presentation();
    std::vector<Word> words{Word{}};
    for (Word& w : freeprod::enumerate_words(p, max_syll, max_exp))
        words.push_back(std::move(w));
    Report rep;
    rep.experiment = "orbit_fill";
    rep.columns = {"curve", "first_coset", "second_coset", "status"};
    // Group curves by slope: a collision is legitimate exactly when both
    // come from the same coset on the same side.
    std::map<Slope, std::vector<std::string>> by_slope;
    std::size_t curves = 0;
    for (Word const& w : words) {
        farey::MappingClass g = realize(rg, w);
        for (char side : {'A', 'B'}) {
            Slope s = farey::apply(g, side == 'A' ? rg.alpha1 : rg.beta1);
            std::string coset = freeprod::to_string(freeprod::w_vertex(p, side, w));
            auto& bucket = by_slope[s];
            if (std::find(bucket.begin(), bucket.end(), coset) == bucket.end())
                bucket.push_back(coset);
            ++curves;
        }
    }
    std::size_t collisions = 0;
    for (auto const& [s, cosets] : by_slope)
        if (cosets.size() > 1) {
            ++collisions;
            rep.add_row({farey::to_string(s), cosets[0], cosets[1], "FAIL"});
            rep.note(Status::FAIL);
        }
    // Distinct slopes always fill a complexity-one surface; spot-check the
    // predicate on the extremes of the slope order.
    if (by_slope.size() >= 2) {
        auto first = by_slope.begin()->first;
        auto last = by_slope.rbegin()->first;
        if (!farey::fills(first, last)) rep.note(Status::FAIL);
    }
    rep.add_summary("curves", double(curves));
    rep.add_summary("distinct_slopes", double(by_slope.size()));
    rep.add_summary("coset_collisions", double(collisions));
    return rep;
}

Report flat_projection_bound_check(RealizedGroup const& rg,
                                   std::vector<Word> const& words, double P0,
                                   double C3) {
    Presentation p = presentation();
    Report rep;
    rep.experiment = "flat_projection_bound";
    rep.columns = {"pair", "flat", "projection_gap", "tree_distance", "status"};
    std::vector<std::pair<Word, Word>> pairs;
    for (Word const& w : words) pairs.emplace_back(Word{}, w);
    for (std::size_t i = 0; i + 1 < words.size(); ++i)
        pairs.emplace_back(words[i], words[i + 1]);
    double c3_emp = 0.0;
    std::size_t checks = 0, empty_skips = 0;
    for (auto const& [g1, g2] : pairs) {
        Word r = freeprod::concat(p, freeprod::inverse(g1), g2);
        if (r.empty()) continue;
        std::string pair_name = freeprod::to_string(g1) + " | " + freeprod::to_string(g2);
        marking::Marking mu1 = orbit_marking(rg, g1);
        TreePoint v1 = freeprod::v_point(g1);
        Word prefix = g1;
        for (Syllable const& s : r.syllables) {
            TreePoint w = freeprod::w_vertex(p, s.side, prefix);
            annular::AnnularDomain Y{phi(rg, w)};
            Rat dtw = freeprod::tree_distance(p, v1, w);
            // Nonempty-projection shadow: beyond the monotonicity gap, every
            // intermediate vertex image still crosses the flat's annulus.
            if (to_double(dtw) > P0) {
                Word q = g1;
                bool all_nonempty = true;
                for (Syllable const& t : r.syllables) {
                    if (freeprod::w_vertex(p, t.side, q) == w) break;
                    if (!annular::annular_project(Y, phi(rg, freeprod::v_point(q)))) {
                        all_nonempty = false;
                        break;
                    }
                    q = freeprod::concat(p, q, Word{{t}});
                }
                if (!all_nonempty) {
                    rep.add_row({pair_name, freeprod::to_string(w), "empty-intermediate",
                                 format_double(to_double(dtw)), "FAIL"});
                    rep.note(Status::FAIL);
                }
            }
            marking::Marking mu_entry = orbit_marking(rg, prefix);
            ++checks;
            try {
                int d = marking::marking_pair_projection(mu1, mu_entry, Y);
                c3_emp = std::max(c3_emp, double(d));
                bool ok = d <= C3 + 1e-12;
                rep.add_row({pair_name, freeprod::to_string(w), std::to_string(d),
                             format_double(to_double(dtw)), ok ? "PASS" : "FAIL"});
                if (!ok) rep.note(Status::FAIL);
            } catch (precondition_error const&) {
                ++empty_skips;
                rep.add_row({pair_name, freeprod::to_string(w), "empty",
                             format_double(to_double(dtw)), "VACUOUS"});
                rep.note(Status::VACUOUS);
            }
            prefix = freeprod::concat(p, prefix, Word{{s}});
        }
    }
    rep.add_summary("P0", P0);
    rep.add_summary("C3", C3);
    rep.add_summary("checks", double(checks));
    rep.add_summary("empty_skips", double(empty_skips));
    rep.add_summary("C3_emp", c3_emp);
    return rep;
}

namespace {

// Diameter of the union of a marking's projections and one curve's
// projection; -1 when either side misses the core.
int marking_vs_curve(marking::Marking const& m, Slope const& curve,
                     annular::AnnularDomain const& Y) {
    auto pc = annular::annular_project(Y, curve);
    if (!pc) return -1;
    std::vector<annular::ProjectionClass> classes{*pc};
    for (Slope const& s : m.slopes)
        if (auto q = annular::annular_project(Y, s)) classes.push_back(*q);
    if (classes.size() < 2) return -1;
    int diam = 0;
    for (std::size_t i = 0; i < classes.size(); ++i)
        for (std::size_t j = i + 1; j < classes.size(); ++j)
            diam = std::max(diam, annular::class_distance(classes[i], classes[j]));
    return diam;
}

} // namespace

EdgeConstants edge_constant_harness(RealizedGroup const& rg,
                                    std::vector<Word> const& elements,
                                    std::vector<Slope> const& cores) {
    if (elements.size() < 2 || cores.empty())
        throw precondition_error("edge harness needs >= 2 elements and >= 1 core");
    EdgeConstants out;
    Report& rep = out.report;
    rep.experiment = "edge_constants";
    rep.columns = {"quantity", "value", "status"};

    auto sweep = [&](std::size_t n_elems, int& c1, int& c2) {
        c1 = 0;
        c2 = 0;
        for (std::size_t i = 0; i < n_elems; ++i) {
            farey::MappingClass g = realize(rg, elements[i]);
            Slope ca = farey::apply(g, rg.alpha1);
            Slope cb = farey::apply(g, rg.beta1);
            marking::Marking mu = orbit_marking(rg, elements[i]);
            for (Slope const& z : cores) {
                annular::AnnularDomain Y{z};
                if (annular::annular_project(Y, ca) && annular::annular_project(Y, cb))
                    c1 = std::max(c1, annular::annular_distance(Y, ca, cb));
                for (Slope const& c : {ca, cb}) {
                    int d = marking_vs_curve(mu, c, Y);
                    if (d >= 0) c2 = std::max(c2, d);
                }
            }
        }
    };
    int c1_half = 0, c2_half = 0;
    sweep(elements.size() / 2, c1_half, c2_half);
    sweep(elements.size(), out.C1, out.C2);
    bool stable = c1_half == out.C1 && c2_half == out.C2;
    rep.add_row({"edge_C1", std::to_string(out.C1), stable ? "PASS" : "FAIL"});
    rep.add_row({"halfedge_C2", std::to_string(out.C2), stable ? "PASS" : "FAIL"});
    if (!stable) rep.note(Status::FAIL);

    // Translation invariance: the identity edge against a core matches the
    // g-translated edge against the g-translated core.
    {
        farey::MappingClass g = realize(rg, elements.back());
        Slope z = cores.front();
        annular::AnnularDomain Y{z};
        annular::AnnularDomain Yg{farey::apply(g, z)};
        Slope ta = farey::apply(g, rg.alpha1), tb = farey::apply(g, rg.beta1);
        bool base_ok = annular::annular_project(Y, rg.alpha1) &&
                       annular::annular_project(Y, rg.beta1);
        if (base_ok) {
            int d0 = annular::annular_distance(Y, rg.alpha1, rg.beta1);
            int d1 = annular::annular_distance(Yg, ta, tb);
            bool eq = d0 == d1;
            rep.add_row({"translation_invariance",
                         std::to_string(d0) + "=" + std::to_string(d1),
                         eq ? "PASS" : "FAIL"});
            if (!eq) rep.note(Status::FAIL);
        }
    }
    rep.add_summary("elements", double(elements.size()));
    rep.add_summary("cores", double(cores.size()));
    rep.add_summary("edge_C1", double(out.C1));
    rep.add_summary("halfedge_C2", double(out.C2));
    return out;
}

Report offorbit_projection_check(RealizedGroup const& rg,
                                 std::vector<Word> const& words,
                                 std::vector<Slope> const& offorbit_cores,
                                 std::vector<long long> const& contrast_exponents,
                                 int orbit_radius) {
    if (rg.D < 2)
        throw precondition_error("off-orbit projection check requires D >= 2");
    std::vector<Slope> orbit = orbit_slopes(rg, orbit_radius, orbit_radius);
    for (Slope const& z : offorbit_cores)
        if (std::binary_search(orbit.begin(), orbit.end(), z))
            throw precondition_error("claimed off-orbit core lies in the orbit ball: " +
                                     farey::to_string(z));
    Report rep;
    rep.experiment = "offorbit_projection";
    rep.columns = {"kind", "core", "detail", "value", "status"};

    auto max_upto = [&](std::size_t n_pairs_target, std::size_t& counted) {
        int best = 0;
        counted = 0;
        for (std::size_t i = 0; i < words.size() && counted < n_pairs_target; ++i)
            for (std::size_t j = i + 1; j < words.size() && counted < n_pairs_target; ++j) {
                marking::Marking m1 = orbit_marking(rg, words[i]);
                marking::Marking m2 = orbit_marking(rg, words[j]);
                for (Slope const& z : offorbit_cores) {
                    try {
                        best = std::max(
                            best, marking::marking_pair_projection(m1, m2,
                                                                   annular::AnnularDomain{z}));
                    } catch (precondition_error const&) {
                        // marking misses this core: excluded from the sweep
                    }
                }
                ++counted;
            }
        return best;
    };
    std::size_t total_pairs = words.size() * (words.size() - 1) / 2;
    std::size_t counted_half = 0, counted_full = 0;
    int m1_half = max_upto(total_pairs / 2, counted_half);
    int m1_full = max_upto(total_pairs, counted_full);
    bool stable = m1_half == m1_full;
    rep.add_row({"offorbit_max", "all", std::to_string(counted_full) + " pairs",
                 std::to_string(m1_full), stable ? "PASS" : "FAIL"});
    if (!stable) rep.note(Status::FAIL);

    // Contrast: on-orbit coefficients along a twist-power series grow at
    // least |n * power| - 5.
    marking::Marking base = base_orbit_marking(rg);
    annular::AnnularDomain Yon{rg.alpha1};
    for (long long n : contrast_exponents) {
        marking::Marking m2 = orbit_marking(rg, a_power(n));
        int d = marking::marking_pair_projection(base, m2, Yon);
        double needed = std::abs(double(n) * double(rg.power_a)) - 5.0;
        bool ok = d >= needed;
        rep.add_row({"onorbit_contrast", farey::to_string(rg.alpha1), std::to_string(n),
                     std::to_string(d), ok ? "PASS" : "FAIL"});
        if (!ok) rep.note(Status::FAIL);
    }
    rep.add_summary("orbit_radius", double(orbit_radius));
    rep.add_summary("orbit_size", double(orbit.size()));
    rep.add_summary("M1_emp", double(m1_full));
    rep.add_summary("stable", stable ? "yes" : "no");
    return rep;
}

Report wordlen_twist_check(RealizedGroup const& rg, std::vector<long long> const& powers) {
    if (rg.D < 2)
        throw precondition_error("word-length twist check requires D >= 2");
    Report rep;
    rep.experiment = "wordlen_twist";
    rep.columns = {"n", "scaled_length", "coefficient", "status"};
    annular::AnnularDomain Y{rg.alpha1};
    Slope x = rg.geodesic[static_cast<std::size_t>(rg.midpoint())];
    for (long long n : powers) {
        Slope y = farey::apply(farey::twist(rg.alpha1, Int(n) * rg.power_a), x);
        int d = annular::annular_distance(Y, x, y);
        double len = std::abs(double(n) * double(rg.power_a));
        bool ok = metric::check_comparable(len, double(d), {1.0, 5.0});
        rep.add_row({std::to_string(n), format_double(len), std::to_string(d),
                     ok ? "PASS" : "FAIL"});
        if (!ok) rep.note(Status::FAIL);
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Sampled estimation experiments
// ---------------------------------------------------------------------------

namespace {

std::vector<Slope> ball_slopes(Int const& cap) {
    std::vector<Slope> out;
    out.emplace_back(1, 0);
    for (Int q = 1; q <= cap; ++q)
        for (Int p = -cap; p <= cap; ++p)
            if (gcd(abs_int(p), q) == 1) out.emplace_back(p, q);
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace

BgimEstimate bgim_constant_estimate(Int const& ball_cap, int min_samples,
                                    std::uint64_t seed) {
    if (min_samples < 1) throw precondition_error("sample count must be >= 1");
    std::vector<Slope> slopes = ball_slopes(ball_cap);
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, slopes.size() - 1);
    BgimEstimate est;
    est.report.experiment = "bgim_constant";
    est.report.columns = {"sample", "pair", "core", "diameter"};
    std::vector<int> diameters;
    int attempts = 0;
    while (static_cast<int>(diameters.size()) < 2 * min_samples) {
        if (++attempts > 200 * min_samples)
            throw resource_limit_error("projected-geodesic sampling failed to converge");
        Slope a = slopes[pick(rng)], b = slopes[pick(rng)];
        if (a == b) continue;
        std::vector<Slope> path = farey::curve_geodesic(a, b);
        // Large diameters come from cores hugging the path, so sample the
        // core among slopes nearly parallel to one path vertex (still
        // crossing every vertex); uniform cores almost never get close and
        // make the running maximum a coin flip.
        std::uniform_int_distribution<std::size_t> pv(0, path.size() - 1);
        Slope const& v = path[pv(rng)];
        std::vector<Slope> near;
        for (Slope const& u : slopes) {
            Int dt = abs_int(farey::slope_det(u, v));
            if (dt == 0 || dt > 2) continue;
            bool crosses_all = true;
            for (Slope const& w : path)
                if (farey::slope_det(u, w) == 0) { crosses_all = false; break; }
            if (crosses_all) near.push_back(u);
        }
        if (near.empty()) continue;
        std::uniform_int_distribution<std::size_t> pc(0, near.size() - 1);
        Slope core = near[pc(rng)];
        auto diam = annular::bgim_diameter(path, annular::AnnularDomain{core});
        if (!diam) continue;
        diameters.push_back(*diam);
        if (diameters.size() <= 10)
            est.report.add_row({std::to_string(diameters.size()),
                                farey::to_string(a) + " -> " + farey::to_string(b),
                                farey::to_string(core), std::to_string(*diam)});
    }
    int m_half = *std::max_element(diameters.begin(), diameters.begin() + min_samples);
    int m_full = *std::max_element(diameters.begin(), diameters.end());
    bool stable = m_half == m_full;
    est.M = m_full;
    est.samples = static_cast<int>(diameters.size());
    est.report.add_summary("ball_cap", to_double(ball_cap));
    est.report.add_summary("samples", double(est.samples));
    est.report.add_summary("M_half", double(m_half));
    est.report.add_summary("M", double(m_full));
    est.report.add_summary("stable", stable ? "yes" : "no");
    if (!stable) est.report.note(Status::FAIL);
    return est;
}

Report marking_formula_experiment(marking::MarkingGraphConfig const& cfg, double A2,
                                  int radius, int min_pairs, std::uint64_t seed,
                                  marking::BallCache* cache) {
    if (radius < 1 || min_pairs < 2)
        throw precondition_error("formula experiment needs radius >= 1, pairs >= 2");
    marking::Marking mu0 = marking::base_marking(cfg.R);
    auto ball = marking::marking_ball(mu0, cfg, radius, cache);
    Report rep;
    rep.experiment = "marking_formula";
    rep.columns = {"pair", "distance", "estimate"};
    std::vector<std::pair<double, double>> data;
    // Exact center distances first (breadth-first depths), then sampled
    // off-center pairs with capped searches until the target count doubles.
    for (auto const& [m, depth] : ball) {
        if (depth == 0) continue;
        double est = marking::distance_formula_estimate(mu0, m, A2).total;
        data.emplace_back(double(depth), est);
        if (data.size() <= 40 || data.size() % 25 == 0)
            rep.add_row({marking::to_string(m), std::to_string(depth),
                         format_double(est)});
    }
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, ball.size() - 1);
    int attempts = 0;
    while (data.size() < static_cast<std::size_t>(2 * min_pairs) &&
           attempts < 40 * min_pairs) {
        ++attempts;
        auto const& [mv, dv] = ball[pick(rng)];
        auto const& [mw, dw] = ball[pick(rng)];
        if (mv == mw) continue;
        auto d = marking::marking_distance(mv, mw, cfg, 2 * radius, cache);
        if (!d) continue;
        double est = marking::distance_formula_estimate(mv, mw, A2).total;
        data.emplace_back(double(*d), est);
    }
    if (data.size() < static_cast<std::size_t>(min_pairs))
        throw resource_limit_error("could not assemble enough marking pairs");
    auto half = std::vector<std::pair<double, double>>(data.begin(),
                                                       data.begin() + data.size() / 2);
    metric::ComparabilityBound fit_half = qi_fit(half);
    metric::ComparabilityBound fit = qi_fit(data);
    bool k_ok = fit.K <= 20.0;
    bool stable = std::abs(fit.K - fit_half.K) <= 0.2 * fit.K &&
                  std::abs(fit.C - fit_half.C) <= 0.2 * std::max(fit.C, 1.0);
    rep.add_summary("A2", A2);
    rep.add_summary("ball_radius", double(radius));
    rep.add_summary("ball_size", double(ball.size()));
    rep.add_summary("pairs", double(data.size()));
    rep.add_summary("fit_K", fit.K);
    rep.add_summary("fit_C", fit.C);
    rep.add_summary("half_K", fit_half.K);
    rep.add_summary("half_C", fit_half.C);
    rep.add_summary("K_within_20", k_ok ? "yes" : "no");
    rep.add_summary("stable", stable ? "yes" : "no");
    if (!k_ok || !stable) rep.note(Status::FAIL);
    return rep;
}

Report distortion_fit(RealizedGroup const& rg, int max_syll, int max_exp,
                      int radius_cap, std::uint64_t seed, marking::BallCache* cache) {
    Presentation p = presentation();
    std::vector<Word> suffixes = freeprod::enumerate_words(p, max_syll, max_exp);
    std::vector<Word> prefixes{Word{}};
    for (Word& w : freeprod::enumerate_words(p, 1, 1)) prefixes.push_back(std::move(w));
    // Word pairs (x, x*s) whose endpoints both stay inside the syllable
    // bound; src is left-invariant, so the suffix carries the geometry while
    // the prefix varies the basepoint.
    std::vector<std::pair<Word, Word>> pairs;
    for (Word const& x : prefixes)
        for (Word const& s : suffixes) {
            Word y = freeprod::concat(p, x, s);
            if (y.empty() || y.syllable_count() > max_syll) continue;
            pairs.emplace_back(x, std::move(y));
        }
    std::mt19937_64 rng(seed);
    std::shuffle(pairs.begin(), pairs.end(), rng);
    marking::MarkingGraphConfig cfg = marking::default_config(1);

    Report rep;
    rep.experiment = "distortion_fit";
    rep.columns = {"sample", "pair", "flat_sum_distance", "marking_distance"};
    std::size_t capped_skips = 0;
    auto collect = [&](char const* tag, std::size_t begin, std::size_t end,
                       std::size_t target) {
        std::vector<std::pair<double, double>> data;
        for (std::size_t i = begin; i < end && data.size() < target; ++i) {
            auto const& [x, y] = pairs[i];
            Rat src = freeprod::total_distance(p, freeprod::v_point(x),
                                               freeprod::v_point(y));
            auto d = marking::marking_distance(orbit_marking(rg, x), orbit_marking(rg, y),
                                               cfg, radius_cap, cache);
            if (!d) {
                ++capped_skips;
                continue;
            }
            data.emplace_back(to_double(src), double(*d));
            if (data.size() <= 20)
                rep.add_row({tag,
                             freeprod::to_string(x) + " | " + freeprod::to_string(y),
                             format_double(to_double(src)), std::to_string(*d)});
        }
        return data;
    };
    std::size_t half = pairs.size() / 2;
    std::size_t per_sample = std::min<std::size_t>(80, half);
    auto sample_a = collect("A", 0, half, per_sample);
    auto sample_b = collect("B", half, pairs.size(), per_sample);
    if (sample_a.size() < 10 || sample_b.size() < 10)
        throw resource_limit_error("could not assemble distortion samples");
    metric::ComparabilityBound fa = qi_fit(sample_a);
    metric::ComparabilityBound fb = qi_fit(sample_b);
    bool positive = fa.K < 25.0 && fb.K < 25.0; // finite slope => 1/K > 0
    bool stable = std::abs(fa.K - fb.K) <= 0.2 * std::max(fa.K, fb.K);
    rep.add_summary("pairs_A", double(sample_a.size()));
    rep.add_summary("pairs_B", double(sample_b.size()));
    rep.add_summary("capped_skips", double(capped_skips));
    rep.add_summary("K_A", fa.K);
    rep.add_summary("C_A", fa.C);
    rep.add_summary("K_B", fb.K);
    rep.add_summary("C_B", fb.C);
    rep.add_summary("lower_slope_A", 1.0 / fa.K);
    rep.add_summary("lower_slope_B", 1.0 / fb.K);
    rep.add_summary("slope_positive", positive ? "yes" : "no");
    rep.add_summary("stable", stable ? "yes" : "no");
    if (!positive || !stable) rep.note(Status::FAIL);
    return rep;
}

// ---------------------------------------------------------------------------
// Constants-estimation workflow
// ---------------------------------------------------------------------------

namespace {

// Hausdorff distance between two slope families under exact curve distance.
int slope_hausdorff(std::vector<Slope> const& a, std::vector<Slope> const& b) {
    int h = 0;
    for (Slope const& x : a) {
        int best = std::numeric_limits<int>::max();
        for (Slope const& y : b) best = std::min(best, farey::curve_distance(x, y));
        h = std::max(h, best);
    }
    for (Slope const& y : b) {
        int best = std::numeric_limits<int>::max();
        for (Slope const& x : a) best = std::min(best, farey::curve_distance(x, y));
        h = std::max(h, best);
    }
    return h;
}

} // namespace

ConstantsResult estimate_constants(RealizedGroup const& rg, ConstantsOpts const& opts) {
    ConstantsResult res;
    metric::ConstantsLedger& led = res.ledger;
    Report& rep = res.report;
    rep.experiment = "constants";
    rep.columns = {"constant", "value", "provenance"};
    auto record = [&](std::string name, double value, bool estimated,
                      std::string provenance) {
        led.set(name, value, estimated, provenance);
        rep.add_row({name, format_double(value),
                     (estimated ? "ESTIMATED " : "CONFIGURED ") + provenance});
    };

    // Thinness of the slope-ball model.
    metric::FiniteGraph dball = farey::build_farey_ball(opts.delta_ball_cap);
    int delta = metric::estimate_delta(dball);
    record("delta", delta,
           true, "thin-triangle sweep over the size-" + opts.delta_ball_cap.str() + " slope ball");

    // Projected-geodesic diameter bound.
    BgimEstimate bg = bgim_constant_estimate(opts.bgim_ball_cap, opts.bgim_samples, opts.seed);
    record("bgim_M", bg.M, true,
           std::to_string(bg.samples) + " sampled geodesics in the size-" +
               opts.bgim_ball_cap.str() + " ball");
    if (bg.report.failed()) rep.note(Status::FAIL);

    int N = static_cast<int>(std::floor(double(bg.M))) + 6;
    record("power_N", N, false, "floor(M) + 6");
    double C0 = (N + 1) * double(delta) + 2.0;
    record("thin_C0", C0, false, "(N + 1) * delta + 2");

    // Orbit-map embedding constants over coset-vertex pairs.
    Presentation p = presentation();
    std::vector<Word> elements{Word{}};
    for (Word& w : freeprod::enumerate_words(p, opts.tree_radius, opts.tree_max_exp))
        elements.push_back(std::move(w));
    struct WImage {
        TreePoint point;
        Slope image;
    };
    std::vector<WImage> wimages;
    std::set<std::string> seen;
    for (Word const& e : elements)
        for (char side : {'A', 'B'}) {
            TreePoint w = freeprod::w_vertex(p, side, e);
            if (!seen.insert(freeprod::to_string(w)).second) continue;
            wimages.push_back({w, phi(rg, w)});
        }
    std::mt19937_64 rng(opts.seed ^ 0x9e3779b97f4a7c15ull);
    std::uniform_int_distribution<std::size_t> pick(0, wimages.size() - 1);
    std::vector<std::pair<double, double>> qi_pairs;
    // Pairs are capped at tree distance 3: beyond that the image distance
    // leaves the reachable range of the exact slope search.
    int qi_attempts = 0;
    while (qi_pairs.size() < 600) {
        if (++qi_attempts > 60000)
            throw resource_limit_error("orbit-map fit sampling failed to converge");
        auto const& x = wimages[pick(rng)];
        auto const& y = wimages[pick(rng)];
        Rat td = freeprod::tree_distance(p, x.point, y.point);
        if (td > 3) continue;
        double src = to_double(td) * rg.D; // stretched-tree source metric
        double dst = farey::curve_distance(x.image, y.image);
        qi_pairs.emplace_back(src, dst);
    }
    metric::ComparabilityBound qi = qi_fit(qi_pairs);
    record("qi_K", qi.K, true,
           std::to_string(qi_pairs.size()) + " coset-vertex pairs, tree radius " +
               std::to_string(opts.tree_radius));
    record("qi_C", qi.C, true, "additive constant of the same fit");

    // Stability radius: straightness of two-edge path images.
    int r0 = 0;
    for (long long e : {1LL, 2LL, 3LL}) {
        std::vector<Slope> path = rg.geodesic;
        farey::MappingClass h = realize(rg, b_power(e));
        for (int j = 1; j <= rg.D; ++j)
            path.push_back(farey::apply(h, rg.geodesic[static_cast<std::size_t>(rg.D - j)]));
        std::vector<Slope> geo = farey::curve_geodesic(path.front(), path.back());
        r0 = std::max(r0, slope_hausdorff(path, geo));
    }
    record("stability_R0", r0, true, "two-edge path images, exponents 1..3");

    double P0 = 2.0 * qi.K * (qi.C + 2.0 * r0) + qi.K * qi.K;
    record("local_P0", P0, false, "2K(C + 2*R0) + K^2");

    // Edge constants.
    std::vector<Word> harness_elements{Word{}};
    for (Word& w : freeprod::enumerate_words(p, 2, 2)) harness_elements.push_back(std::move(w));
    std::vector<Slope> harness_cores;
    for (Slope const& s : ball_slopes(4)) harness_cores.push_back(s);
    EdgeConstants ec = edge_constant_harness(rg, harness_elements, harness_cores);
    record("edge_C1", ec.C1, true, "edge sweep over " +
                                       std::to_string(harness_elements.size()) +
                                       " elements x size-4 cores");
    record("halfedge_C2", ec.C2, true, "half-edge sweep over the same sample");
    if (ec.report.failed()) rep.note(Status::FAIL);

    double kR = marking::k_of(1), kE = marking::k_of(1);
    double C3 = P0 * ec.C1 + 2.0 * ec.C2 + (2.0 * double(bg.M) + kR + 2.0);
    record("proj_C3", C3, false, "P0*C1 + 2*C2 + (2M + k(R) + 2)");

    // Off-orbit projection bound.
    {
        std::vector<Word> sample{Word{}};
        for (Word& w : freeprod::enumerate_words(p, 2, 2)) sample.push_back(std::move(w));
        std::vector<Slope> orbit = orbit_slopes(rg, 3, 3);
        std::vector<Slope> cores;
        for (Slope const& s : ball_slopes(3)) {
            if (std::binary_search(orbit.begin(), orbit.end(), s)) continue;
            cores.push_back(s);
            if (cores.size() >= 6) break;
        }
        Report off = offorbit_projection_check(rg, sample, cores, {10, 20, 40}, 3);
        double m1 = 0;
        for (auto const& [k, v] : off.summary)
            if (k == "M1_emp") m1 = std::stod(v);
        record("bound_M1", m1, true, "off-orbit sweep, " + std::to_string(cores.size()) +
                                         " cores x " + std::to_string(sample.size()) +
                                         " words");
        if (off.failed()) rep.note(Status::FAIL);
    }

    // Truncation ladder.
    double A0 = 9;
    record("A0", A0, false, "smallest integer above the 8 threshold");
    double A1 = std::max(A0 + 4.0, 4.0 * kE) + 1.0;
    record("A1", A1, false, "max(A0 + 4, 4k(E)) + 1");
    record("A2", A1 - 2.0 * kE, false, "A1 - 2k(E)");

    led.validate(kE, kR);
    rep.add_summary("fields", double(metric::ConstantsLedger::field_names().size()));
    rep.add_summary("validated", "yes");
    return res;
}

} // namespace freetwist::lab
