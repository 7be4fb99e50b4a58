#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "freetwist/metric.hpp"

#include <random>

using namespace freetwist;
using metric::ComparabilityBound;
using metric::FiniteGraph;

namespace {

// Path graph 0-1-...-(n-1).
FiniteGraph path_graph(int n) {
    FiniteGraph g;
    for (int i = 0; i < n; ++i) g.add_vertex("p" + std::to_string(i));
    for (int i = 0; i + 1 < n; ++i) g.add_edge(i, i + 1);
    g.finalize();
    return g;
}

FiniteGraph cycle_graph(int n) {
    FiniteGraph g;
    for (int i = 0; i < n; ++i) g.add_vertex("c" + std::to_string(i));
    for (int i = 0; i < n; ++i) g.add_edge(i, (i + 1) % n);
    g.finalize();
    return g;
}

} // namespace

TEST_CASE("comparability bound basics") {
    CHECK(metric::check_comparable(5, 5, {1, 0}));
    CHECK(metric::check_comparable(10, 6, {2, 1}));
    CHECK_FALSE(metric::check_comparable(10, 3, {2, 1}));
    CHECK_FALSE(metric::check_comparable(3, 10, {2, 1}));
    CHECK(metric::check_comparable(0, 0, {1, 0}));

    // Exact variant agrees with the double variant on rational data.
    CHECK(metric::check_comparable(Rat(7, 2), Rat(3), Rat(2), Rat(1)));
    CHECK_FALSE(metric::check_comparable(Rat(21, 2), Rat(3), Rat(2), Rat(1)));
}

TEST_CASE("symmetrize and compose preserve comparability") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> val(0.0, 50.0);
    for (int t = 0; t < 200; ++t) {
        ComparabilityBound b{1.0 + (t % 5), double(t % 4)};
        double a = val(rng);
        // Pick x strictly inside the comparability window of a (a margin keeps
        // floating-point roundoff at the window edges out of the picture),
        // then check the reversed bound.
        double lo = a / b.K - b.C, hi = b.K * a + b.C;
        double m = 1e-9 * (1.0 + hi - lo);
        if (hi - lo > 2 * m) { lo += m; hi -= m; }
        double x = std::min(hi, std::max(lo, val(rng)));
        REQUIRE(metric::check_comparable(a, x, b));
        CHECK(metric::check_comparable(x, a, metric::symmetrize(b)));
    }
    // Chaining: a ~ b ~ d implies a ~ d at the composed bound.
    ComparabilityBound ab{2, 1}, bd{3, 2};
    ComparabilityBound ad = metric::compose(ab, bd);
    CHECK(ad.K == 6);
    CHECK(ad.C == 5); // K'*C + C' covers both chained extremes
    for (double a : {0.0, 1.0, 10.0, 33.0}) {
        double b = 2 * a + 1;         // extreme of the first bound
        double d = 3 * b + 2;         // extreme of the second bound
        CHECK(metric::check_comparable(a, d, ad));
        double b2 = a / 2 - 1, d2 = b2 / 3 - 2;
        if (b2 >= 0 && d2 >= 0) CHECK(metric::check_comparable(a, d2, ad));
    }
}

TEST_CASE("threshold truncation") {
    CHECK(metric::truncate_below(5.0, 3.0) == 5.0);
    CHECK(metric::truncate_below(2.9, 3.0) == 0.0);
    CHECK(metric::truncate_below(3.0, 3.0) == 3.0);
    CHECK(metric::truncate_below(Rat(7, 2), Rat(3)) == Rat(7, 2));
    CHECK(metric::truncate_below(Rat(5, 2), Rat(3)) == Rat(0));
    CHECK_THROWS_AS(metric::truncate_below(-1.0, 3.0), precondition_error);
}

TEST_CASE("truncated sum transfer property suite") {
    std::mt19937_64 rng(20260825);
    std::uniform_int_distribution<int> len(1, 12), num(0, 60);
    Rat K(2), C(3), kappa(13); // kappa > 2KC = 12
    for (int t = 0; t < 300; ++t) {
        int n = len(rng);
        std::vector<Rat> xs, ys;
        for (int i = 0; i < n; ++i) {
            Rat y(num(rng), 1 + num(rng) % 4);
            // x anywhere with x/K - C <= y <= K*x + C (exact arithmetic, so
            // the window endpoints themselves are fair game).
            Rat lo = (y - C) / K, hi = K * (y + C);
            if (lo < 0) lo = 0;
            Rat x = lo + (hi - lo) * Rat(num(rng), 60);
            xs.push_back(x);
            ys.push_back(y);
        }
        CHECK(metric::check_truncated_sum_transfer(xs, ys, K, C, kappa));
    }
    CHECK_THROWS_AS(metric::check_truncated_sum_transfer({Rat(1)}, {}, K, C, kappa),
                    precondition_error);
    CHECK_THROWS_AS(metric::check_truncated_sum_transfer({Rat(1)}, {Rat(1)}, K, C, Rat(12)),
                    precondition_error);
    CHECK_THROWS_AS(
        metric::check_truncated_sum_transfer({Rat(100)}, {Rat(1)}, K, C, kappa),
        precondition_error);
}

TEST_CASE("finite graph distances and geodesics") {
    FiniteGraph g = path_graph(6);
    CHECK(g.vertex_count() == 6);
    CHECK(g.edge_count() == 5);
    CHECK(g.distance(0, 5) == 5);
    CHECK(g.distance(2, 2) == 0);
    CHECK(g.find_label("p3").value() == 3);
    CHECK_FALSE(g.find_label("missing").has_value());

    auto geo = g.geodesic(1, 4);
    REQUIRE(geo.size() == 4);
    CHECK(geo.front() == 1);
    CHECK(geo.back() == 4);

    // Two components: unreachable pairs report -1.
    FiniteGraph h;
    h.add_vertex("a");
    h.add_vertex("b");
    h.add_vertex("c");
    h.add_edge(0, 1);
    h.finalize();
    CHECK(h.distance(0, 2) == -1);
    auto dist = h.bfs_distances(0);
    CHECK(dist[1] == 1);
    CHECK(dist[2] == -1);
}

TEST_CASE("finite graph snapshot round trip") {
    FiniteGraph g = cycle_graph(7);
    std::string path = "/tmp/ftw_graph_test.bin";
    g.save(path);
    FiniteGraph h = FiniteGraph::load(path);
    REQUIRE(h.vertex_count() == g.vertex_count());
    REQUIRE(h.edge_count() == g.edge_count());
    for (std::uint32_t v = 0; v < g.vertex_count(); ++v) {
        CHECK(h.label(v) == g.label(v));
        CHECK(h.neighbors(v) == g.neighbors(v));
    }
}

TEST_CASE("thinness estimate: known graphs, parallel equals serial") {
    CHECK(metric::estimate_delta(path_graph(8)) == 0); // trees are 0-thin
    FiniteGraph c6 = cycle_graph(6);
    int d6 = metric::estimate_delta(c6);
    CHECK(d6 == metric::estimate_delta_serial(c6));
    CHECK(d6 >= 1); // a hexagon triangle is not a tripod

    // Random graph: the parallel kernel must match the serial reference.
    std::mt19937_64 rng(5);
    FiniteGraph g;
    for (int i = 0; i < 25; ++i) g.add_vertex();
    for (int i = 1; i < 25; ++i) g.add_edge(i, std::uniform_int_distribution<int>(0, i - 1)(rng));
    for (int t = 0; t < 10; ++t) {
        int u = std::uniform_int_distribution<int>(0, 24)(rng);
        int v = std::uniform_int_distribution<int>(0, 24)(rng);
        if (u != v) g.add_edge(u, v);
    }
    g.finalize();
    CHECK(metric::estimate_delta(g) == metric::estimate_delta_serial(g));
}

TEST_CASE("windowed quasigeodesic predicate") {
    FiniteGraph g = path_graph(12);
    std::vector<std::uint32_t> straight{0, 1, 2, 3, 4, 5, 6, 7};
    CHECK(metric::is_local_quasigeodesic(g, straight, 6, 1, 0));

    // A full back-and-forth violates the lower bound on wide windows but not
    // on narrow ones.  Each turning point puts indices two apart on the same
    // vertex, so the additive slack must be at least 2 even narrowly.
    std::vector<std::uint32_t> zigzag{0, 1, 2, 3, 2, 1, 0, 1};
    CHECK_FALSE(metric::is_local_quasigeodesic(g, zigzag, 2, 1, 1));
    CHECK(metric::is_local_quasigeodesic(g, zigzag, 2, 1, 2));
    CHECK_FALSE(metric::is_local_quasigeodesic(g, zigzag, 7, 1, 2));

    metric::DistanceFn dist = [&](std::size_t i, std::size_t j) {
        return double(g.distance(straight[i], straight[j]));
    };
    CHECK(metric::is_local_quasigeodesic(straight.size(), dist, 6, 1, 0));
}

TEST_CASE("hausdorff distances between vertex families") {
    // 3x4 grid: walking along one side stays distance <= 1 from the other.
    FiniteGraph g;
    auto id = [](int r, int c) { return std::uint32_t(r * 4 + c); };
    for (int i = 0; i < 12; ++i) g.add_vertex();
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 4; ++c) {
            if (c + 1 < 4) g.add_edge(id(r, c), id(r, c + 1));
            if (r + 1 < 3) g.add_edge(id(r, c), id(r + 1, c));
        }
    g.finalize();
    std::vector<std::uint32_t> top{id(0, 0), id(0, 1), id(0, 2), id(0, 3)};
    std::vector<std::uint32_t> mid{id(1, 0), id(1, 1), id(1, 2), id(1, 3)};
    std::vector<std::uint32_t> bottom{id(2, 0), id(2, 1), id(2, 2), id(2, 3)};
    CHECK(metric::hausdorff_distance(g, top, mid) == 1);
    CHECK(metric::hausdorff_distance(g, top, bottom) == 2);
    CHECK(metric::hausdorff_distance(g, top, top) == 0);

    // Detour through the middle row: within Hausdorff 1 of the endpoint
    // geodesic along the top row.
    std::vector<std::uint32_t> detour{id(0, 0), id(1, 0), id(1, 1), id(1, 2),
                                      id(1, 3), id(0, 3)};
    CHECK(metric::hausdorff_to_endpoint_geodesic(g, detour) == 1);
}

TEST_CASE("projection monotonicity along a quasigeodesic") {
    FiniteGraph g = path_graph(16);
    // A (1,2)-quasigeodesic with one stall; Hausdorff bound 1 to the
    // straight geodesic between its endpoints.
    std::vector<std::uint32_t> path{0, 1, 2, 3, 3, 4, 5, 6, 7, 8};
    auto res = metric::check_projection_monotone(g, path, 1.0, 2.0, 1.0);
    CHECK(res.ok);
    CHECK(res.threshold == doctest::Approx(2 * 1 * (2 + 2 * 1) + 1)); // 2K(C+2R)+K^2

    // The explicit-geodesic overload agrees with the endpoint version.
    auto geo = g.geodesic(0, 8);
    auto res2 = metric::check_projection_monotone(g, path, geo, 1.0, 2.0, 1.0);
    CHECK(res2.ok == res.ok);
    CHECK(res2.threshold == res.threshold);

    // Violated preconditions are rejected, not silently absorbed: this walk
    // is not a (1,0)-quasigeodesic.
    std::vector<std::uint32_t> bad{0, 1, 2, 1, 0, 1, 2, 3};
    CHECK_THROWS_AS(metric::check_projection_monotone(g, bad, 1.0, 0.0, 1.0),
                    precondition_error);
}
