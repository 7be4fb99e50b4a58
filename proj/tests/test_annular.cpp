#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "freetwist/annular.hpp"

#include <cstdlib>
#include <random>

using namespace freetwist;
using annular::AnnularDomain;
using annular::ProjectionClass;
using farey::MappingClass;
using farey::Slope;

namespace {

Slope sl(std::string const& s) { return farey::parse_slope(s); }
AnnularDomain dom(std::string const& s) { return annular::parse_domain(s); }

Slope random_slope(std::mt19937_64& rng, int span) {
    std::uniform_int_distribution<int> c(-span, span);
    for (;;) {
        int p = c(rng), q = c(rng);
        if (p != 0 || q != 0) return Slope(p, q);
    }
}

// Random determinant +1 matrix as a product of elementary shears.
MappingClass random_sl2(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> e(-3, 3);
    MappingClass m;
    for (int i = 0; i < 3; ++i) {
        m = m * MappingClass(1, e(rng), 0, 1);
        m = m * MappingClass(1, 0, e(rng), 1);
    }
    return m;
}

} // namespace

TEST_CASE("domain parsing round trip") {
    CHECK(annular::to_string(dom("ann(1/0)")) == "ann(1/0)");
    CHECK(annular::to_string(dom("ann(-5/2)")) == "ann(-5/2)");
    CHECK(dom("ann(4/6)").core == Slope(2, 3));
    CHECK_THROWS_AS(annular::parse_domain("1/0"), parse_error);
    CHECK_THROWS_AS(annular::parse_domain("ann()"), parse_error);
    CHECK_THROWS_AS(annular::parse_domain("ann(x/y)"), parse_error);
}

TEST_CASE("core normalizer sends the core to the vertical slope") {
    CHECK(annular::core_normalizer(sl("1/0")).is_identity());
    std::mt19937_64 rng(23);
    for (int t = 0; t < 100; ++t) {
        Slope core = random_slope(rng, 8);
        MappingClass g = annular::core_normalizer(core);
        CHECK(g.det() == 1);
        CHECK(farey::apply(g, core) == sl("1/0"));
        // Deterministic: same input, same matrix.
        CHECK(annular::core_normalizer(core) == g);
    }
}

TEST_CASE("winding numbers over the vertical domain") {
    AnnularDomain d = dom("ann(1/0)");
    // The normalizer is the identity, so winding is just p/q.
    CHECK(annular::winding(d, sl("0/1")) == Rat(0));
    CHECK(annular::winding(d, sl("1/1")) == Rat(1));
    CHECK(annular::winding(d, sl("-5/2")) == Rat(-5, 2));
    CHECK(annular::winding(d, sl("7/3")) == Rat(7, 3));
    CHECK_THROWS_AS(annular::winding(d, sl("1/0")), precondition_error);
}

TEST_CASE("projection classes carry floor and phase") {
    AnnularDomain d = dom("ann(1/0)");
    CHECK_FALSE(annular::annular_project(d, sl("1/0")).has_value());

    auto p = annular::annular_project(d, sl("7/3"));
    REQUIRE(p.has_value());
    CHECK(p->twist_index == 2);
    CHECK(p->endpoint_phase == Rat(1, 3));
    CHECK(p->total_winding() == Rat(7, 3));

    auto n = annular::annular_project(d, sl("-5/2"));
    REQUIRE(n.has_value());
    CHECK(n->twist_index == -3); // floor(-5/2) = -3
    CHECK(n->endpoint_phase == Rat(1, 2));

    std::mt19937_64 rng(31);
    for (int t = 0; t < 100; ++t) {
        Slope core = random_slope(rng, 6);
        Slope a = random_slope(rng, 9);
        AnnularDomain dd{core};
        auto q = annular::annular_project(dd, a);
        CHECK(q.has_value() == !(a == core));
        if (q) {
            CHECK(q->endpoint_phase >= 0);
            CHECK(q->endpoint_phase < 1);
            CHECK(q->total_winding() == annular::winding(dd, a));
        }
    }
}

TEST_CASE("arc class distances") {
    AnnularDomain d = dom("ann(1/0)");
    auto at = [&](std::string const& s) { return *annular::annular_project(d, sl(s)); };
    CHECK(annular::class_distance(at("0/1"), at("0/1")) == 0);
    // Same twist index, different phase: one crossing.
    CHECK(annular::class_distance(at("0/1"), at("1/2")) == 1);
    CHECK(annular::class_distance(at("1/2"), at("1/3")) == 1);
    // One apart in twist index.
    CHECK(annular::class_distance(at("0/1"), at("1/1")) == 2);
    CHECK(annular::annular_distance(d, sl("0/1"), sl("1/1")) == 2);
    // Index gap grows linearly.
    CHECK(annular::class_distance(at("0/1"), at("5/1")) == 6);
    CHECK(annular::class_distance(at("-5/2"), at("7/3")) == 6); // floors -3 and 2

    ProjectionClass other = *annular::annular_project(dom("ann(0/1)"), sl("1/0"));
    CHECK_THROWS_AS(annular::class_distance(at("0/1"), other), precondition_error);

    CHECK_THROWS_WITH_AS(annular::annular_distance(d, sl("1/0"), sl("0/1")),
                         "empty projection of the first curve to ann(1/0)", precondition_error);
    CHECK_THROWS_WITH_AS(annular::annular_distance(d, sl("0/1"), sl("1/0")),
                         "empty projection of the second curve to ann(1/0)", precondition_error);
}

TEST_CASE("fast distance tracks the crossing-count oracle within one") {
    std::mt19937_64 rng(41);
    int tested = 0;
    for (int t = 0; t < 150 && tested < 100; ++t) {
        Slope core = random_slope(rng, 5);
        Slope a = random_slope(rng, 8), b = random_slope(rng, 8);
        if (a == core || b == core) continue;
        AnnularDomain d{core};
        int fast = annular::annular_distance(d, a, b);
        int oracle = annular::annular_distance_oracle(d, a, b);
        CHECK(std::abs(fast - oracle) <= 1);
        ++tested;
    }
    CHECK(tested >= 80);
}

TEST_CASE("twist powers displace by roughly their exponent") {
    std::mt19937_64 rng(47);
    for (int t = 0; t < 60; ++t) {
        Slope core = random_slope(rng, 5);
        Slope b = random_slope(rng, 8);
        if (b == core) continue;
        AnnularDomain d{core};
        for (Int n : {Int(-6), Int(-2), Int(0), Int(1), Int(3), Int(6)}) {
            int disp = annular::twist_coefficient_check(d, b, n);
            Int err = abs_int(Int(disp) - abs_int(n));
            CHECK(err <= 5);
        }
    }
    // Exponent zero never moves the curve.
    CHECK(annular::twist_coefficient_check(dom("ann(2/3)"), sl("0/1"), 0) == 0);
    // Oracle mode obeys the same band.
    for (Int n : {Int(-4), Int(2), Int(5)}) {
        int disp = annular::twist_coefficient_check(dom("ann(1/0)"), sl("0/1"), n, true);
        CHECK(abs_int(Int(disp) - abs_int(n)) <= 5);
    }
}

TEST_CASE("distances are equivariant under orientation-preserving classes") {
    std::mt19937_64 rng(53);
    int tested = 0;
    for (int t = 0; t < 80 && tested < 50; ++t) {
        Slope core = random_slope(rng, 4);
        Slope a = random_slope(rng, 6), b = random_slope(rng, 6);
        if (a == core || b == core) continue;
        MappingClass g = random_sl2(rng);
        AnnularDomain d{core}, gd{farey::apply(g, core)};
        int before = annular::annular_distance(d, a, b);
        int after = annular::annular_distance(gd, farey::apply(g, a), farey::apply(g, b));
        CHECK(before == after);
        ++tested;
    }
    CHECK(tested >= 40);
}

TEST_CASE("disjoint domain lists on a complexity-one surface") {
    DOCTEST_SUBCASE("validation") {
        CHECK_NOTHROW(annular::DisjointDomains({dom("ann(1/2)")}));
        CHECK_NOTHROW(annular::DisjointDomains({dom("ann(1/2)"), dom("ann(1/2)")}));
        CHECK_THROWS_AS(annular::DisjointDomains({dom("ann(0/1)"), dom("ann(1/0)")}),
                        precondition_error);
        CHECK_THROWS_AS(annular::DisjointDomains(std::vector<AnnularDomain>{}),
                        precondition_error);
    }
    DOCTEST_SUBCASE("sums over components") {
        annular::DisjointDomains one({dom("ann(1/0)")});
        annular::DisjointDomains twice({dom("ann(1/0)"), dom("ann(1/0)")});
        int single = annular::l1_distance(one, sl("0/1"), sl("1/1"));
        CHECK(single == 2);
        CHECK(annular::l1_distance(twice, sl("0/1"), sl("1/1")) == 2 * single);
        CHECK(annular::l1_distance(one, sl("0/1"), sl("1/1"), true) ==
              annular::annular_distance_oracle(dom("ann(1/0)"), sl("0/1"), sl("1/1")));
        CHECK_THROWS_WITH_AS(annular::l1_distance(one, sl("1/0"), sl("0/1")),
                             "empty projection at component 0 (ann(1/0))", precondition_error);
    }
}

TEST_CASE("projected diameter of shortest paths") {
    // A path through the core projects nowhere.
    auto through = farey::curve_geodesic(sl("0/1"), sl("1/0"));
    CHECK_FALSE(annular::bgim_diameter(through, dom("ann(1/0)")).has_value());
    CHECK_FALSE(annular::bgim_diameter(through, dom("ann(0/1)")).has_value());

    // Off-path domains give a finite diameter.
    auto path = farey::curve_geodesic(sl("0/1"), sl("-5/2"));
    REQUIRE(path.size() == 4);
    auto diam = annular::bgim_diameter(path, dom("ann(7/3)"));
    REQUIRE(diam.has_value());
    CHECK(*diam >= 0);
    // Single vertex paths are geodesics with diameter zero.
    CHECK(annular::bgim_diameter({sl("1/2")}, dom("ann(1/0)")) == 0);

    // Non-paths and non-shortest paths are rejected.
    CHECK_THROWS_AS(annular::bgim_diameter({sl("0/1"), sl("2/3")}, dom("ann(1/2)")),
                    precondition_error);
    CHECK_THROWS_AS(annular::bgim_diameter({sl("0/1"), sl("1/1"), sl("1/0")}, dom("ann(1/2)")),
                    precondition_error);
    CHECK_THROWS_AS(annular::bgim_diameter({}, dom("ann(1/2)")), precondition_error);
}

TEST_CASE("projections spread stars by at most two") {
    // A lone curve is the only genuinely disjoint family here: diameter 0.
    CHECK(annular::lipschitz_check({sl("1/2")}, dom("ann(1/0)")) == 0);
    // Sets of pairwise minimally-crossing slopes (vertex stars) stay within
    // diameter 2.
    std::vector<Slope> tri{sl("0/1"), sl("1/0"), sl("1/1")};
    CHECK(annular::lipschitz_check(tri, dom("ann(5/2)")) <= 2);
    CHECK(annular::lipschitz_check(tri, dom("ann(-7/3)")) <= 2);
    CHECK(annular::lipschitz_check({sl("1/2"), sl("1/3")}, dom("ann(1/0)")) <= 2);
    // An adjacent pair can really use the full budget.
    CHECK(annular::lipschitz_check({sl("0/1"), sl("1/1")}, dom("ann(1/0)")) == 2);
    std::mt19937_64 rng(59);
    for (int t = 0; t < 40; ++t) {
        // Random Farey triangle: v, neighbor u, and their mediant-like sum.
        Slope v = random_slope(rng, 5);
        Slope anchor = v == sl("0/1") ? sl("1/0") : sl("0/1");
        auto ns = farey::neighbors_near(v, anchor, 10);
        if (ns.empty()) continue;
        Slope u = ns[std::uniform_int_distribution<std::size_t>(0, ns.size() - 1)(rng)];
        Slope w(u.p + v.p, u.q + v.q);
        Slope core = random_slope(rng, 4);
        if (core == v || core == u || core == w) continue;
        CHECK(annular::lipschitz_check({v, u, w}, dom("ann(" + farey::to_string(core) + ")")) <= 2);
    }

    CHECK_THROWS_AS(annular::lipschitz_check({sl("0/1"), sl("-5/2")}, dom("ann(1/0)")),
                    precondition_error);
    CHECK_THROWS_AS(annular::lipschitz_check({sl("0/1"), sl("1/1")}, dom("ann(0/1)")),
                    precondition_error);
    CHECK_THROWS_AS(annular::lipschitz_check({}, dom("ann(1/0)")), precondition_error);
}
