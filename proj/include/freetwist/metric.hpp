#pragma once
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "freetwist/errors.hpp"
#include "freetwist/numeric.hpp"

namespace freetwist::metric {

// ---------------------------------------------------------------------------
// Coarse comparison of quantities: A and B are (K,C)-comparable when
//   A/K - C <= B <= K*A + C.
// ---------------------------------------------------------------------------

struct ComparabilityBound {
    double K = 1.0;
    double C = 0.0;
};

// Bound for the reversed comparison: if A ~(K,C) B then B ~(K,KC) A.
ComparabilityBound symmetrize(ComparabilityBound const& b);

// Bound for the chained comparison: A ~(K,C) B and B ~(K',C') D gives
// A ~(K*K', K'*C + C') D.
ComparabilityBound compose(ComparabilityBound const& ab, ComparabilityBound const& bd);

bool check_comparable(double a, double b, ComparabilityBound const& bound);
// Exact-arithmetic variant for integer/rational data.
bool check_comparable(Rat const& a, Rat const& b, Rat const& K, Rat const& C);

// Threshold cutoff: keep A when A >= threshold, else drop to 0.
// Negative inputs are rejected (quantities here are distances/diameters).
double truncate_below(double a, double threshold);
Rat truncate_below(Rat const& a, Rat const& threshold);

// Transfer of truncated sums across a termwise comparability: if every
// x[i] ~(K,C) y[i] and kappa > 2*K*C, then
//   sum_i [x[i]]_kappa  <=  2K * sum_i [y[i]]_C.
// Returns whether the inequality holds. Throws precondition_error when the
// sequences mismatch in length, kappa <= 2KC, or a pair is not comparable.
bool check_truncated_sum_transfer(std::vector<Rat> const& xs,
                                  std::vector<Rat> const& ys,
                                  Rat const& K, Rat const& C, Rat const& kappa);

// ---------------------------------------------------------------------------
// Finite graphs with unit-length edges, immutable after finalize().
// Vertex ids are dense indices; labels are optional caller-side names.
// ---------------------------------------------------------------------------

class FiniteGraph {
public:
    std::uint32_t add_vertex(std::string label = {});
    void add_edge(std::uint32_t u, std::uint32_t v);
    void finalize();

    bool finalized() const { return finalized_; }
    std::size_t vertex_count() const { return labels_.size(); }
    std::size_t edge_count() const { return edge_pairs_.size(); }
    std::string const& label(std::uint32_t v) const { return labels_.at(v); }
    std::optional<std::uint32_t> find_label(std::string const& label) const;

    // Neighbors in ascending id order (valid after finalize()).
    std::vector<std::uint32_t> const& neighbors(std::uint32_t v) const;

    // Unreachable vertices get distance -1.
    std::vector<int> bfs_distances(std::uint32_t src) const;
    int distance(std::uint32_t u, std::uint32_t v) const;

    // The lexicographically least shortest vertex path from u to v
    // (deterministic tie-breaking by vertex id).
    std::vector<std::uint32_t> geodesic(std::uint32_t u, std::uint32_t v) const;

    // Versioned binary snapshot (vertices, edges, labels).
    void save(std::string const& path) const;
    static FiniteGraph load(std::string const& path);

private:
    void require_finalized() const;
    std::vector<std::string> labels_;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edge_pairs_;
    std::vector<std::vector<std::uint32_t>> adj_;
    bool finalized_ = false;
};

// ---------------------------------------------------------------------------
// Hyperbolicity estimate: the least integer d such that every triangle of
// chosen geodesics (deterministic tie-breaks) is d-thin, over all vertex
// triples of the graph. The parallel kernel and the serial reference must
// agree; the serial version is the correctness baseline.
// ---------------------------------------------------------------------------

int estimate_delta(FiniteGraph const& g);
int estimate_delta_serial(FiniteGraph const& g);

// ---------------------------------------------------------------------------
// Quasigeodesic predicates. Paths are vertex sequences where consecutive
// entries are adjacent or equal; the parameter of vertex i is i.
// ---------------------------------------------------------------------------

using DistanceFn = std::function<double(std::size_t, std::size_t)>;

// Windowed quasigeodesic test: on every index window of width <= D,
//   |i-j|/K - C <= dist(path[i], path[j]) <= K*|i-j| + C.
bool is_local_quasigeodesic(std::size_t path_len, DistanceFn dist,
                            double D, double K, double C);
bool is_local_quasigeodesic(FiniteGraph const& g,
                            std::vector<std::uint32_t> const& path,
                            double D, double K, double C);

// Symmetric Hausdorff distance between a path and a reference geodesic
// (both vertex sets of the same graph).
int hausdorff_distance(FiniteGraph const& g,
                       std::vector<std::uint32_t> const& a,
                       std::vector<std::uint32_t> const& b);

// Hausdorff distance from a walk to the chosen geodesic between its own
// endpoints; the straightness measure behind the stability constant R0.
int hausdorff_to_endpoint_geodesic(FiniteGraph const& g,
                                   std::vector<std::uint32_t> const& path);

struct MonotoneResult {
    bool ok = false;
    double threshold = 0.0;   // index gap above which order is enforced
    std::string detail;       // first violation, if any
};

// Closest-point projections of a (K,C)-quasigeodesic with Hausdorff bound R
// onto its endpoint geodesic advance strictly once parameters are more than
// 2K(C+2R)+K^2 apart. Ties in the projection resolve to the earliest index.
MonotoneResult check_projection_monotone(FiniteGraph const& g,
                                         std::vector<std::uint32_t> const& path,
                                         std::vector<std::uint32_t> const& geo,
                                         double K, double C, double R);

// Same check against the chosen geodesic between the path's endpoints.
MonotoneResult check_projection_monotone(FiniteGraph const& g,
                                         std::vector<std::uint32_t> const& path,
                                         double K, double C, double R);

} // namespace freetwist::metric
