#pragma once

// Marking graph on the complexity-one model: vertices are filling slope
// systems with bounded pairwise intersection, edges are bounded-intersection
// unions, explored lazily by breadth-first search with an on-disk adjacency
// cache. Includes the projection-diameter bound and the truncated
// distance-formula estimator.

#include "freetwist/annular.hpp"
#include "freetwist/errors.hpp"
#include "freetwist/farey.hpp"

#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

namespace freetwist::marking {

// A filling system of slopes with pairwise intersection number <= R.
// On the complexity-one model (one-holed torus convention throughout this
// module), any two distinct slopes fill, so |slopes| >= 2 suffices.
struct Marking {
    std::vector<farey::Slope> slopes; // sorted, deduplicated
    int R = 1;

    Marking() = default;
    Marking(std::vector<farey::Slope> s, int r);

    bool operator==(Marking const& o) const { return R == o.R && slopes == o.slopes; }
};

// True iff the slopes pairwise intersect at most R times and fill
// (at least two distinct slopes). Does not throw.
bool is_marking(std::vector<farey::Slope> const& slopes, int R);

// Text format: "{0/1, 1/0} @1". Doubles as the canonical cache key.
std::string to_string(Marking const& m);
Marking parse_marking(std::string const& text);

Marking apply(farey::MappingClass const& g, Marking const& m);

// Graph parameters: vertex bound R, edge bound E (union of adjacent markings
// intersects pairwise <= E), and the generating twists used for lazy orbit
// exploration.
struct MarkingGraphConfig {
    int R = 1;
    int E = 1;
    std::vector<farey::MappingClass> generators;

    std::string fingerprint() const; // versioning key for the ball cache
};

// Base marking {0/1, 1/0} at the given R.
Marking base_marking(int R = 1);

// Generators: twists about 0/1 and 1/0, both signs. E is computed as the
// smallest value >= R for which the base marking united with each generator
// image is an E-marking (not hard-coded).
MarkingGraphConfig default_config(int R = 1);

// True iff m1 union m2 is an E-marking. Reflexive and symmetric.
// Throws precondition_error unless both are R-markings under cfg.R.
bool adjacent(Marking const& m1, Marking const& m2, MarkingGraphConfig const& cfg);

// All neighbors of m (excluding m itself): every R-marking whose slopes all
// intersect every slope of m at most E times. Complete: candidates are
// enumerated through integer intersection pairs against two anchor slopes,
// then cliques under the pairwise-R relation are collected.
std::vector<Marking> marking_neighbors(Marking const& m, MarkingGraphConfig const& cfg);

// Versioned on-disk adjacency cache, keyed by canonical marking text.
// A file whose version or config fingerprint does not match is treated as
// empty; truncated or corrupt data throws parse_error. Writes are atomic
// (temp file + rename). In-memory access is safe for concurrent readers
// with exclusive insertion.
class BallCache {
  public:
    explicit BallCache(std::string fingerprint) : fingerprint_(std::move(fingerprint)) {}

    std::optional<std::vector<std::string>> lookup(std::string const& key) const;
    void store(std::string const& key, std::vector<std::string> neighbors);
    std::size_t size() const;

    void load(std::string const& path); // missing file: stays empty
    void save(std::string const& path) const;

  private:
    std::string fingerprint_;
    std::unordered_map<std::string, std::vector<std::string>> adj_;
    mutable std::shared_mutex mutex_;
};

// Exact distance between markings when it is <= radius_cap, std::nullopt
// otherwise (never a wrong number). Level-synchronous search from both
// endpoints, so the explored region is two balls of half the distance. An
// optional cache persists the adjacency lists across calls. Frontier
// expansion is parallel, with a serial merge; results are deterministic.
std::optional<int> marking_distance(Marking const& m1, Marking const& m2,
                                    MarkingGraphConfig const& cfg, int radius_cap,
                                    BallCache* cache = nullptr);

// Every marking within the given radius of m0 with its exact breadth-first
// depth, ordered by (depth, slope list).
std::vector<std::pair<Marking, int>> marking_ball(Marking const& m0,
                                                  MarkingGraphConfig const& cfg, int radius,
                                                  BallCache* cache = nullptr);

// Projection-diameter bound k(A) = max{2*log2(4(A+1)) + 2, A + 1}.
double k_of(int A);

// Diameter in the annular curve graph of the projections of all slopes of m
// that cross the core of Y. Throws precondition_error when every slope has
// empty projection. Bounded by k_of(R) for an R-marking.
int marking_projection_diameter(Marking const& m, annular::AnnularDomain const& Y);

// Projection distance between two markings at Y: the diameter of the union
// of their slope projections. Throws precondition_error when either marking
// misses the core entirely.
int marking_pair_projection(Marking const& m1, Marking const& m2,
                            annular::AnnularDomain const& Y);

// One term of the distance-formula estimate: the domain (std::nullopt means
// the whole surface) and the truncated projection distance there.
struct DomainTerm {
    std::optional<annular::AnnularDomain> domain;
    double term = 0;
};

struct EstimateResult {
    double total = 0;
    std::vector<DomainTerm> witnesses; // domains with nonzero truncated term
};

struct EstimatorOpts {
    // Size bound for neighbor slopes added around geodesic vertices when
    // enumerating candidate annular cores.
    int neighbor_bound = 16;
    // Replace the geodesic-hull candidate enumeration by a brute-force sweep
    // over every core intersecting all slopes of both markings at most
    // oracle_cap times.
    bool oracle = false;
    int oracle_cap = 32;
};

// Truncation cutoffs below this are rejected.
inline constexpr double MIN_A2 = 2.0;

// Sum over domains of the A2-truncated projection distance between the two
// markings: the whole-surface term is the curve-graph diameter of the union
// of their slope sets, and annular terms range over candidate cores drawn
// from the markings' slopes, the deterministic geodesics between them, and
// bounded Farey neighbors of those (or the brute-force sweep in oracle mode).
EstimateResult distance_formula_estimate(Marking const& m1, Marking const& m2, double A2,
                                         EstimatorOpts const& opts = {});

} // namespace freetwist::marking
