#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "freetwist/marking.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

using namespace freetwist;
using farey::Slope;
using marking::BallCache;
using marking::Marking;
using marking::MarkingGraphConfig;

namespace {

Slope sl(std::string const& s) { return farey::parse_slope(s); }

std::string read_file(std::string const& path) {
    std::ifstream is(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(is), {});
}

void write_file(std::string const& path, std::string const& bytes) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("ftw_marking_test_" + std::to_string(::getpid()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string file(std::string const& name) const { return (path / name).string(); }
};

} // namespace

TEST_CASE("marking construction and validation") {
    Marking m({sl("1/0"), sl("0/1")}, 1);
    CHECK(m.slopes == std::vector<Slope>{sl("0/1"), sl("1/0")}); // sorted
    CHECK(marking::to_string(m) == "{0/1, 1/0} @1");
    CHECK(marking::base_marking(1) == m);

    // Duplicates collapse; a single slope does not fill.
    CHECK_THROWS_AS(Marking({sl("0/1"), sl("0/1")}, 1), precondition_error);
    CHECK_THROWS_AS(Marking({sl("0/1")}, 1), precondition_error);
    CHECK_THROWS_AS(Marking({}, 1), precondition_error);
    // Pairwise intersection above R is rejected; raising R admits it.
    CHECK_THROWS_AS(Marking({sl("0/1"), sl("2/1")}, 1), precondition_error);
    CHECK_NOTHROW(Marking({sl("0/1"), sl("2/1")}, 2));

    CHECK(marking::is_marking({sl("0/1"), sl("1/0")}, 1));
    CHECK_FALSE(marking::is_marking({sl("0/1")}, 1));
    CHECK_FALSE(marking::is_marking({sl("0/1"), sl("2/1")}, 1));
    CHECK(marking::is_marking({sl("0/1"), sl("1/0"), sl("1/1")}, 1));
}

TEST_CASE("marking text round trip") {
    for (auto const& text : {"{0/1, 1/0} @1", "{-12/5, -7/3} @1", "{0/1, 1/0, 1/1} @1"}) {
        Marking m = marking::parse_marking(text);
        CHECK(marking::to_string(m) == text);
        CHECK(marking::parse_marking(marking::to_string(m)) == m);
    }
    CHECK_THROWS_AS(marking::parse_marking("0/1, 1/0 @1"), parse_error);
    CHECK_THROWS_AS(marking::parse_marking("{0/1, 1/0} 1"), parse_error);
    CHECK_THROWS_AS(marking::parse_marking("{0/1, 1/0} @x"), parse_error);
    CHECK_THROWS_AS(marking::parse_marking("{0/1} @1"), parse_error);      // not filling
    CHECK_THROWS_AS(marking::parse_marking("{0/1, 2/1} @1"), parse_error); // exceeds R
    CHECK_THROWS_AS(marking::parse_marking("{0/1, } @1"), parse_error);
}

TEST_CASE("mapping classes act on markings") {
    Marking mu0 = marking::base_marking(1);
    Marking img = marking::apply(farey::twist(sl("1/0"), 1), mu0);
    CHECK(img == Marking({sl("-1/1"), sl("1/0")}, 1));
    // Orientation-reversing diagonal fixes the base marking.
    CHECK(marking::apply(farey::MappingClass(1, 0, 0, -1), mu0) == mu0);
    // Intersection bounds are preserved by any mapping class.
    Marking big = marking::apply(farey::MappingClass(3, 2, 4, 3), mu0);
    CHECK(big.R == 1);
    CHECK(marking::is_marking(big.slopes, 1));
}

TEST_CASE("default configuration computes the union bound") {
    MarkingGraphConfig cfg = marking::default_config(1);
    CHECK(cfg.R == 1);
    CHECK(cfg.E == 1);
    CHECK(cfg.generators.size() == 4);
    CHECK(!cfg.fingerprint().empty());
    CHECK(cfg.fingerprint() == marking::default_config(1).fingerprint());
    CHECK(cfg.fingerprint() != marking::default_config(2).fingerprint());
}

TEST_CASE("adjacency predicate") {
    MarkingGraphConfig cfg = marking::default_config(1);
    Marking mu0 = marking::base_marking(1);
    CHECK(marking::adjacent(mu0, mu0, cfg));
    Marking n1 = marking::apply(cfg.generators[0], mu0);
    CHECK(marking::adjacent(mu0, n1, cfg));
    CHECK(marking::adjacent(n1, mu0, cfg));
    // A marking violating cfg.R is rejected outright.
    Marking loose({sl("0/1"), sl("2/1")}, 2);
    CHECK_THROWS_AS(marking::adjacent(loose, mu0, cfg), precondition_error);
}

TEST_CASE("neighbor enumeration is complete and symmetric at the base") {
    MarkingGraphConfig cfg = marking::default_config(1);
    Marking mu0 = marking::base_marking(1);
    auto ns = marking::marking_neighbors(mu0, cfg);
    CHECK(ns.size() == 6);
    for (Marking const& n : ns) {
        CHECK_FALSE(n == mu0);
        CHECK(marking::adjacent(mu0, n, cfg));
        // Symmetry: the base shows up among each neighbor's neighbors.
        auto back = marking::marking_neighbors(n, cfg);
        CHECK(std::find(back.begin(), back.end(), mu0) != back.end());
    }
    // Generator images are among the neighbors.
    for (auto const& g : cfg.generators) {
        Marking img = marking::apply(g, mu0);
        CHECK(std::find(ns.begin(), ns.end(), img) != ns.end());
    }
}

TEST_CASE("ball growth around the base marking") {
    MarkingGraphConfig cfg = marking::default_config(1);
    Marking mu0 = marking::base_marking(1);
    auto b1 = marking::marking_ball(mu0, cfg, 1);
    CHECK(b1.size() == 7); // center + degree six
    CHECK(b1.front().first == mu0);
    CHECK(b1.front().second == 0);
    CHECK(marking::marking_ball(mu0, cfg, 3).size() == 43);
    CHECK(marking::marking_ball(mu0, cfg, 4).size() == 91);
    CHECK(marking::marking_ball(mu0, cfg, 5).size() == 187);

    // Deterministic order: sorted by depth, then the slope list.
    auto b3 = marking::marking_ball(mu0, cfg, 3);
    CHECK(b3 == marking::marking_ball(mu0, cfg, 3));
    for (std::size_t i = 1; i < b3.size(); ++i) {
        auto const& [pm, pd] = b3[i - 1];
        auto const& [cm, cd] = b3[i];
        CHECK(pd <= cd);
        if (pd == cd) CHECK(pm.slopes < cm.slopes);
    }
}

TEST_CASE("distances agree with breadth-first depths") {
    MarkingGraphConfig cfg = marking::default_config(1);
    Marking mu0 = marking::base_marking(1);
    CHECK(marking::marking_distance(mu0, mu0, cfg, 3) == 0);

    auto ball = marking::marking_ball(mu0, cfg, 4);
    for (auto const& [m, depth] : ball) {
        auto d = marking::marking_distance(mu0, m, cfg, 8);
        REQUIRE(d.has_value());
        CHECK(*d == depth);
        // Symmetric in its endpoints.
        CHECK(marking::marking_distance(m, mu0, cfg, 8) == depth);
    }

    // Beyond the cap the answer is "unknown", never a wrong number.
    auto far = marking::marking_ball(mu0, cfg, 5).back();
    REQUIRE(far.second == 5);
    CHECK_FALSE(marking::marking_distance(mu0, far.first, cfg, 4).has_value());
    CHECK(marking::marking_distance(mu0, far.first, cfg, 5) == 5);
}

TEST_CASE("distances are equivariant") {
    MarkingGraphConfig cfg = marking::default_config(1);
    Marking mu0 = marking::base_marking(1);
    farey::MappingClass g = farey::twist(sl("1/0"), 1) * farey::twist(sl("0/1"), -1);
    Marking gmu0 = marking::apply(g, mu0);
    for (auto const& [m, depth] : marking::marking_ball(mu0, cfg, 2)) {
        auto moved = marking::marking_distance(gmu0, marking::apply(g, m), cfg, 6);
        REQUIRE(moved.has_value());
        CHECK(*moved == depth);
    }
}

TEST_CASE("adjacency cache round trip and invalidation") {
    MarkingGraphConfig cfg = marking::default_config(1);
    Marking mu0 = marking::base_marking(1);
    TempDir tmp;
    std::string path = tmp.file("ball.cache");

    BallCache cache(cfg.fingerprint());
    auto plain = marking::marking_ball(mu0, cfg, 3);
    auto cached = marking::marking_ball(mu0, cfg, 3, &cache);
    CHECK(plain == cached);
    CHECK(cache.size() > 0);
    cache.save(path);
    CHECK_FALSE(std::filesystem::exists(path + ".tmp")); // temp moved into place

    // Same fingerprint: contents survive the round trip and reproduce the ball.
    BallCache reloaded(cfg.fingerprint());
    reloaded.load(path);
    CHECK(reloaded.size() == cache.size());
    CHECK(marking::marking_ball(mu0, cfg, 3, &reloaded) == plain);
    CHECK(reloaded.lookup(marking::to_string(mu0)).has_value());
    CHECK_FALSE(reloaded.lookup("{3/1, 22/7} @1").has_value());

    // Different fingerprint: the file is discarded, not misread.
    BallCache other(marking::default_config(2).fingerprint());
    other.load(path);
    CHECK(other.size() == 0);

    // Foreign magic bytes: ignored. Truncation: rejected loudly.
    std::string bytes = read_file(path);
    REQUIRE(bytes.size() > 20);
    write_file(tmp.file("foreign.cache"), "XYZW" + bytes.substr(4));
    BallCache foreign(cfg.fingerprint());
    CHECK_NOTHROW(foreign.load(tmp.file("foreign.cache")));
    CHECK(foreign.size() == 0);
    write_file(tmp.file("cut.cache"), bytes.substr(0, bytes.size() - 5));
    BallCache cut(cfg.fingerprint());
    CHECK_THROWS_AS(cut.load(tmp.file("cut.cache")), parse_error);

    // Missing file: stays empty without error.
    BallCache missing(cfg.fingerprint());
    CHECK_NOTHROW(missing.load(tmp.file("absent.cache")));
    CHECK(missing.size() == 0);

    // A warm cache changes no answers.
    CHECK(marking::marking_distance(mu0, plain.back().first, cfg, 6, &reloaded) ==
          plain.back().second);
}

TEST_CASE("projection diameter bound") {
    CHECK(marking::k_of(0) == doctest::Approx(6.0));
    CHECK(marking::k_of(1) == doctest::Approx(8.0));
    CHECK(marking::k_of(100) == doctest::Approx(101.0)); // linear branch takes over

    Marking mu0 = marking::base_marking(1);
    CHECK(marking::marking_projection_diameter(mu0, annular::parse_domain("ann(1/1)")) == 2);
    // When the core belongs to the marking only the other slopes project.
    CHECK(marking::marking_projection_diameter(mu0, annular::parse_domain("ann(1/0)")) == 0);

    MarkingGraphConfig cfg = marking::default_config(1);
    for (auto const& dom : {"ann(1/1)", "ann(2/3)", "ann(-5/2)"}) {
        annular::AnnularDomain Y = annular::parse_domain(dom);
        for (auto const& [m, depth] : marking::marking_ball(mu0, cfg, 2))
            CHECK(marking::marking_projection_diameter(m, Y) <= marking::k_of(m.R));
    }
}

TEST_CASE("pairwise projection distance") {
    Marking mu0 = marking::base_marking(1);
    Marking moved = marking::apply(farey::twist(sl("1/0"), 20), mu0);
    CHECK(marking::marking_pair_projection(mu0, moved, annular::parse_domain("ann(1/0)")) == 21);
    CHECK(marking::marking_pair_projection(mu0, mu0, annular::parse_domain("ann(1/1)")) == 2);
}

TEST_CASE("distance formula estimator finds the twisting domain") {
    Marking mu0 = marking::base_marking(1);
    // Twenty twists about 1/0 move 0/1 to -20/1: one annular domain carries
    // winding gap 20, so the class distance there is 21.
    Marking moved = marking::apply(farey::twist(sl("1/0"), 20), mu0);

    auto est = marking::distance_formula_estimate(mu0, moved, 6.0);
    CHECK(est.total == doctest::Approx(21.0));
    bool found = false;
    for (auto const& w : est.witnesses)
        if (w.domain && w.domain->core == sl("1/0")) {
            found = true;
            CHECK(w.term == doctest::Approx(21.0));
        }
    CHECK(found);

    // The brute-force candidate sweep lands on the same total.
    marking::EstimatorOpts oracle;
    oracle.oracle = true;
    auto est2 = marking::distance_formula_estimate(mu0, moved, 6.0, oracle);
    CHECK(est2.total == doctest::Approx(est.total));

    // Identical markings estimate to zero.
    CHECK(marking::distance_formula_estimate(mu0, mu0, 6.0).total == doctest::Approx(0.0));

    // Cutoffs below the minimum are rejected.
    CHECK_THROWS_AS(marking::distance_formula_estimate(mu0, moved, 1.5), precondition_error);
}
