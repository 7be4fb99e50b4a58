#pragma once

// Surface realization of the rank-(1,1) free product by twist powers, the
// vertex/marking orbit maps, and the experiment harness: injectivity and
// stretching scans, displacement bounds, local quasigeodesic checks,
// projection-bound estimation, and the constants-estimation workflow.

#include "freetwist/annular.hpp"
#include "freetwist/constants.hpp"
#include "freetwist/farey.hpp"
#include "freetwist/freeprod.hpp"
#include "freetwist/marking.hpp"
#include "freetwist/report.hpp"

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace freetwist::lab {

using farey::Slope;
using freeprod::TreePoint;
using freeprod::Word;

// Two twist generators about slopes at curve-graph distance D, realizing the
// free product of two infinite cyclic groups. The geodesic between the
// slopes is fixed once (deterministically) and shared by every map below.
struct RealizedGroup {
    farey::Surface surface = farey::Surface::one_holed_torus;
    Slope alpha1;
    Slope beta1;
    long long power_a = 1;
    long long power_b = 1;
    int D = 1;
    std::vector<Slope> geodesic; // geodesic[0] = alpha1, geodesic[D] = beta1

    // Index of the middle geodesic vertex; rounds down when D is odd (the
    // true midpoint then sits on an edge and is perturbed to a vertex).
    int midpoint() const { return D / 2; }
};

// Validates alpha1 != beta1 and nonzero powers, computes D and the geodesic.
RealizedGroup make_realized_group(Slope alpha1, Slope beta1, long long power_a = 1,
                                  long long power_b = 1,
                                  farey::Surface surface = farey::Surface::one_holed_torus);

// The abstract group both factors cyclic: ranks (1, 1).
freeprod::Presentation presentation();

// Homomorphism into mapping classes: each A-syllable a^e contributes
// twist(alpha1, e * power_a), each B-syllable twist(beta1, e * power_b).
// Words with non-scalar syllables throw unsupported_error: only cyclic
// factors act on a complexity-one surface.
farey::MappingClass realize(RealizedGroup const& rg, Word const& w);

// Orbit map into slopes: the A/B coset vertex of g goes to the translated
// alpha1/beta1; the edge-midpoint vertex of g goes to the translated middle
// geodesic vertex.
Slope phi(RealizedGroup const& rg, TreePoint const& p);

// Subdivision points of the stretched edge of `element`: position 0 is its
// A-side endpoint, position D its B-side endpoint, interior positions map to
// the interior vertices of the translated geodesic.
Slope phi_scaled(RealizedGroup const& rg, Word const& element, int position);

// Same map keyed by the vertex labels of freeprod::build_scaled_tree
// ("A <w>", "B <w>", "E <w> <i>").
Slope phi_label(RealizedGroup const& rg, std::string const& label);

// ---------------------------------------------------------------------------
// Exhaustive word scans
// ---------------------------------------------------------------------------

struct ScanOpts {
    int max_syllables = 4;
    int max_exp = 3;
    bool parallel = true;       // serial reference path kept for testing
    int growth_sample_stride = 50; // cross-check every n-th stretching word
};

// Asserts realize(w) != identity for every nontrivial normal-form word in
// bounds; rows list kernel hits (expected none at large enough D).
report::Report injectivity_scan(RealizedGroup const& rg, ScanOpts const& opts = {});

// Asserts |trace| > 2 for every word whose cyclic reduction has >= 2
// syllables; cross-checks a deterministic subsample against the
// intersection-growth estimate of the dominant eigenvalue.
report::Report pseudo_anosov_scan(RealizedGroup const& rg, ScanOpts const& opts = {});

// Independent freeness oracle for two twist powers: the products of twists
// t_a^na, t_b^nb about curves with intersection number i generate a free
// group whenever |na*nb| * i^2 >= 4.
bool free_twist_criterion(Int const& intersection, long long na, long long nb);

// Sweeps configurations at each curve-graph distance d in [d_min, d_max]
// (base slope 0/1 against the recorded smallest witness at exact distance d,
// twist powers 1) and reports the smallest d at which both scans pass. An
// empirical observation, never a certified threshold.
struct ProbeResult {
    std::optional<int> minimal_passing_D;
    report::Report report;
};
ProbeResult distance_threshold_probe(int d_min, int d_max, ScanOpts const& opts = {});

// ---------------------------------------------------------------------------
// Displacement and quasigeodesic checks
// ---------------------------------------------------------------------------

// For single B-syllable words b^e: curve displacement of alpha1 under the
// realized twist is at least (2D - 4)/N. Requires N > M_est + 5.
report::Report twist_displacement_check(RealizedGroup const& rg,
                                        std::vector<long long> const& exponents, int N,
                                        double M_est);

// Same displacements against the bound 2D - 2*((N+1)*delta + 2); when the
// bound is nonpositive the rows are marked VACUOUS instead of passing.
// Records the empirically optimal additive constant c in d >= 2D - c.
report::Report thin_displacement_check(RealizedGroup const& rg,
                                       std::vector<long long> const& exponents, int N,
                                       double delta);

// For sampled two-edge paths through a shared coset vertex (the identity
// edge followed by its b^e-translate), checks that the stepwise slope image
// is a D-local (1, 13*delta + 2*C0)-quasigeodesic in the curve graph.
report::Report local_quasigeodesic_check(RealizedGroup const& rg,
                                         std::vector<long long> const& exponents,
                                         double delta, double C0);

// Comparability bound fitted over (source, target) distance pairs: K scans
// a fixed grid (1 to 25 in steps of 1/4), C(K) is the tightest additive
// constant at that K, and the fit minimizes the balanced objective K + C(K)
// (ties to the smaller K, so neither constant degenerates). Throws below 2
// pairs.
metric::ComparabilityBound qi_fit(std::vector<std::pair<double, double>> const& pairs);

// ---------------------------------------------------------------------------
// Orbit markings and projection bounds
// ---------------------------------------------------------------------------

// The minimal marking containing the middle geodesic vertex: that vertex
// plus its geodesic successor (intersection number 1). Valid for D >= 1.
marking::Marking base_orbit_marking(RealizedGroup const& rg);

// Equivariant marking orbit: realize(w) applied to the base marking.
marking::Marking orbit_marking(RealizedGroup const& rg, Word const& w);

// All distinct orbit slopes realize(g)*alpha1 / realize(g)*beta1 over words
// within the bounds, sorted. Used for bounded orbit-membership tests.
std::vector<Slope> orbit_slopes(RealizedGroup const& rg, int max_syll, int max_exp);

// Distinct translated curves pairwise fill the surface: checks that any two
// orbit curves either coincide for the expected coset reason (same side,
// same coset) or are distinct slopes, which fill.
report::Report orbit_fill_check(RealizedGroup const& rg, int max_syll, int max_exp);

// For word pairs and every flat crossed with positive width between them,
// bounds the annular projection gap between the endpoint marking and the
// marking of the entry vertex of that flat by C3. Also verifies that when
// the tree distance to the flat exceeds P0, every intermediate vertex slope
// still crosses the flat's annulus (nonempty projections).
report::Report flat_projection_bound_check(RealizedGroup const& rg,
                                           std::vector<Word> const& words, double P0,
                                           double C3);

// Empirical projection bounds across one tree edge (between its two
// endpoint curves) and across a half edge (between a vertex marking and an
// endpoint curve), swept over annular domains with nonempty projections.
// Asserts the maxima are unchanged when the sample doubles, and spot-checks
// translation invariance.
struct EdgeConstants {
    int C1 = 0;
    int C2 = 0;
    report::Report report;
};
EdgeConstants edge_constant_harness(RealizedGroup const& rg,
                                    std::vector<Word> const& elements,
                                    std::vector<Slope> const& cores);

// Off-orbit annular coefficients between orbit markings: empirical maximum
// M1, asserted stable under sample doubling. Each supplied core is first
// verified absent from the orbit ball of the given radius (throws
// precondition_error otherwise). A contrast series shows on-orbit
// coefficients growing at least |n| - 5 along twist powers.
report::Report offorbit_projection_check(RealizedGroup const& rg,
                                         std::vector<Word> const& words,
                                         std::vector<Slope> const& offorbit_cores,
                                         std::vector<long long> const& contrast_exponents,
                                         int orbit_radius);

// Word length versus annular coefficient for twist powers: checks
// |n| and the annular distance between the middle-vertex image and its
// a^n-translate are (1, 5)-comparable. Requires D >= 2.
report::Report wordlen_twist_check(RealizedGroup const& rg,
                                   std::vector<long long> const& powers);

// ---------------------------------------------------------------------------
// Sampled estimation experiments
// ---------------------------------------------------------------------------

// Projected-geodesic diameter bound: over sampled geodesics in the slope
// ball of the given size whose vertices all cross a sampled core, records
// the maximum projection diameter and checks it is unchanged when the
// sample doubles. Cores are sampled near the path (small determinant
// against one vertex), where the large diameters live.
struct BgimEstimate {
    int M = 0;
    int samples = 0;
    report::Report report;
};
BgimEstimate bgim_constant_estimate(Int const& ball_cap, int min_samples,
                                    std::uint64_t seed);

// Marking-graph distance formula comparability: explores the ball around
// the base marking, pairs ball vertices with their exact breadth-first
// distances, fits a comparability bound against the truncated estimate, and
// checks fit stability when the sample doubles.
report::Report marking_formula_experiment(marking::MarkingGraphConfig const& cfg,
                                          double A2, int radius, int min_pairs,
                                          std::uint64_t seed,
                                          marking::BallCache* cache = nullptr);

// Distortion fit for the marking orbit map on tree vertices: fits the
// comparability bound between exact flat-sum distances and capped marking
// distances over two disjoint word samples; the lower-bound slope 1/K must
// be strictly positive (finite K) and stable across the samples.
report::Report distortion_fit(RealizedGroup const& rg, int max_syll, int max_exp,
                              int radius_cap, std::uint64_t seed,
                              marking::BallCache* cache = nullptr);

// ---------------------------------------------------------------------------
// Constants-estimation workflow
// ---------------------------------------------------------------------------

struct ConstantsOpts {
    Int delta_ball_cap = 6;   // slope ball for the thinness sweep
    Int bgim_ball_cap = 10;   // slope ball for geodesic/projection sampling
    int bgim_samples = 500;
    int tree_radius = 3;      // tree ball for the orbit-map fit
    int tree_max_exp = 2;
    std::uint64_t seed = 20260825;
};

struct ConstantsResult {
    metric::ConstantsLedger ledger;
    report::Report report;
};

// Estimates every ledger field from the configured realization: thinness
// delta, projected-geodesic bound M, the derived twist power N and additive
// constant C0, the orbit-map embedding constants (K, C), the stability
// radius R0, the monotonicity gap P0, the edge constants C1/C2, the flat
// projection bound C3, the off-orbit bound M1, and the truncation ladder
// A0/A1/A2. Derived fields satisfy ConstantsLedger::validate.
ConstantsResult estimate_constants(RealizedGroup const& rg, ConstantsOpts const& opts = {});

} // namespace freetwist::lab
