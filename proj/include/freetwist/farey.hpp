#pragma once
#include <array>
#include <compare>
#include <optional>
#include <string>
#include <vector>

#include "freetwist/errors.hpp"
#include "freetwist/metric.hpp"
#include "freetwist/numeric.hpp"

namespace freetwist::farey {

// The two complexity-one surfaces share one combinatorial curve graph; they
// differ only in the scale factor of geometric intersection numbers.
enum class Surface { one_holed_torus, four_holed_sphere };

inline int intersection_scale(Surface s) {
    return s == Surface::one_holed_torus ? 1 : 2;
}

// An isotopy class of essential simple closed curves, encoded as a primitive
// integer vector (p, q), canonical with q > 0, or (1, 0) for the vertical
// class. Construction reduces and canonicalizes.
struct Slope {
    Int p{0}, q{1};

    Slope() = default;
    Slope(Int pp, Int qq);

    bool operator==(Slope const& o) const { return p == o.p && q == o.q; }
    std::strong_ordering operator<=>(Slope const& o) const {
        if (p != o.p) return p < o.p ? std::strong_ordering::less : std::strong_ordering::greater;
        if (q != o.q) return q < o.q ? std::strong_ordering::less : std::strong_ordering::greater;
        return std::strong_ordering::equal;
    }
};

struct SlopeHash {
    std::size_t operator()(Slope const& s) const {
        return hash_mix(hash_int(s.p), hash_int(s.q));
    }
};

// det of the 2x2 matrix with columns a, b; intersection numbers are the
// surface scale times its absolute value.
Int slope_det(Slope const& a, Slope const& b);
Int geometric_intersection(Surface s, Slope const& a, Slope const& b);

std::string to_string(Slope const& s);
Slope parse_slope(std::string const& text);

// ---------------------------------------------------------------------------
// Mapping classes: 2x2 integer matrices of determinant +-1 acting on slopes
// by left multiplication. Entries are arbitrary precision.
// ---------------------------------------------------------------------------

struct MappingClass {
    // Row-major: [[a, b], [c, d]].
    std::array<Int, 4> m{1, 0, 0, 1};

    MappingClass() = default;
    MappingClass(Int a, Int b, Int c, Int d);

    Int det() const { return m[0] * m[3] - m[1] * m[2]; }
    Int trace() const { return m[0] + m[3]; }
    bool is_identity() const { return m[0] == 1 && m[1] == 0 && m[2] == 0 && m[3] == 1; }
    MappingClass inverse() const;
    bool operator==(MappingClass const& o) const = default;
};

MappingClass operator*(MappingClass const& a, MappingClass const& b);
Slope apply(MappingClass const& mc, Slope const& s);

std::string to_string(MappingClass const& mc);
MappingClass parse_matrix(std::string const& text);

// The n-th power of the twist about v: w -> w + n * det(w, v) * v.
MappingClass twist(Slope const& v, Int const& n);

// ---------------------------------------------------------------------------
// Curve-graph distance. Vertices have infinite degree, so searches are pruned
// to candidate slopes u with |det(u, a)| and |det(u, b)| at most the pruning
// cap (default: |det(a, b)|), which preserves at least one geodesic. The
// unpruned check runs over an explicitly built ball and is used as fallback.
// ---------------------------------------------------------------------------

struct CurveDistanceOpts {
    bool cross_check = false; // also run the induced-ball search and reconcile
    int cap_multiplier = 1;   // pruning cap = cap_multiplier * |det(a,b)|
    long long max_frontier = 2'000'000; // resource cap on visited slopes
};

int curve_distance(Slope const& a, Slope const& b, CurveDistanceOpts const& opts = {});

// Deterministic geodesic: among all shortest slope paths inside the pruned
// candidate set, the lexicographically least sequence under Slope ordering.
std::vector<Slope> curve_geodesic(Slope const& a, Slope const& b,
                                  CurveDistanceOpts const& opts = {});

// Unpruned reference: BFS on the subgraph induced by slopes with
// |det(u,a)| <= cap and |det(u,b)| <= cap. Returns -1 when no path exists
// inside the ball (the cap was too small).
int curve_distance_ball_oracle(Slope const& a, Slope const& b, Int const& cap);

// Two distinct slopes always fill a complexity-one surface.
bool fills(Slope const& a, Slope const& b);

// |trace| > 2 detects the stretching classes; |trace| = 2 is reducible,
// |trace| < 2 periodic.
bool is_pseudo_anosov(MappingClass const& mc);

// Growth-ratio estimate of intersection numbers under iteration: the last
// ratio i(mc^k+1 seed, seed) / i(mc^k seed, seed) for k = iters - 1. For
// |trace| > 2 this converges to the dominant eigenvalue modulus; |trace| = 2
// gives linear growth, so the ratio tends to 1. Requires iters >= 3 and a
// seed that is neither fixed by mc nor sent to it by any power.
double intersection_growth(MappingClass const& mc, Slope const& seed, int iters);

// Induced subgraph of the curve graph on all slopes with |p| <= cap and
// q <= cap, edges between minimally intersecting pairs. Labels are slope
// strings. Used for thinness estimation and as a search oracle.
metric::FiniteGraph build_farey_ball(Int const& cap);

// Slopes at each exact distance 0..max_d from `base`, smallest available
// witness first, built by greedy geodesic extension with verified distances.
std::vector<Slope> distance_witnesses(Slope const& base, int max_d);

// Neighbor slopes u of v (|det(u,v)| = 1) with |det(u,anchor)| <= cap,
// ascending Slope order. Finite because the neighbor family is a line.
std::vector<Slope> neighbors_near(Slope const& v, Slope const& anchor, Int const& cap);

} // namespace freetwist::farey
