#pragma once
#include <optional>
#include <string>
#include <vector>

#include "freetwist/errors.hpp"
#include "freetwist/farey.hpp"
#include "freetwist/numeric.hpp"

namespace freetwist::annular {

// The annular neighborhood of a core curve. Arcs crossing the annulus are
// classified by how far they wind along the core; distances between arc
// classes count essential crossings plus one.
struct AnnularDomain {
    farey::Slope core;

    bool operator==(AnnularDomain const& o) const { return core == o.core; }
};

std::string to_string(AnnularDomain const& d); // ann(p/q)
AnnularDomain parse_domain(std::string const& text);

// The canonical determinant-one matrix sending the core to slope 1/0
// (identity when the core already is 1/0). Normalizing by it turns every
// crossing slope into a winding number.
farey::MappingClass core_normalizer(farey::Slope const& core);

// Total winding of a crossing slope around the domain's core: the ratio
// P/Q of the normalized slope. Defined only when the slope differs from
// the core.
Rat winding(AnnularDomain const& d, farey::Slope const& a);

// The arc class of a curve's crossing arcs: integer twisting plus the
// fractional endpoint offset that breaks ties between neighboring classes.
struct ProjectionClass {
    AnnularDomain domain;
    Int twist_index;      // floor of the winding
    Rat endpoint_phase;   // winding - floor, in [0, 1)

    Rat total_winding() const { return Rat(twist_index) + endpoint_phase; }
    bool operator==(ProjectionClass const& o) const {
        return domain == o.domain && twist_index == o.twist_index &&
               endpoint_phase == o.endpoint_phase;
    }
};

// Empty exactly when the curve misses the annulus, i.e. equals the core.
std::optional<ProjectionClass> annular_project(AnnularDomain const& d, farey::Slope const& a);

// Distance between two arc classes over the same domain: 0 when equal,
// otherwise one plus the integer-twisting gap. Agrees with the arc-crossing
// oracle below within 1 (an arc class is a diameter-one set of lifts, so
// any representative choice moves the count by at most one).
int class_distance(ProjectionClass const& a, ProjectionClass const& b);

// class_distance of the two projections; throws precondition_error naming
// the offending side when a projection is empty.
int annular_distance(AnnularDomain const& d, farey::Slope const& a, farey::Slope const& b);

// Brute-force reference: model each class as the integer-translate family of
// straight segments across the unit strip with the class's winding, place the
// two families in minimal generic position, and count transversal crossings
// by enumerating translates with exact rational sign tests.
int annular_distance_oracle(AnnularDomain const& d, farey::Slope const& a, farey::Slope const& b);

// d_Y(b, twist(core, n) b): the annular displacement of a curve under the
// n-th power of the twist about the core. Callers check it lies within 5
// of |n|.
int twist_coefficient_check(AnnularDomain const& d, farey::Slope const& b, Int const& n,
                            bool use_oracle = false);

// A list of pairwise-disjoint annular domains. On a complexity-one surface
// distinct essential curves always intersect, so validation admits only
// repetitions of a single core; the list shape serves rank-general callers.
struct DisjointDomains {
    explicit DisjointDomains(std::vector<AnnularDomain> components);
    std::vector<AnnularDomain> const& components() const { return components_; }

private:
    std::vector<AnnularDomain> components_;
};

// Sum of per-component annular distances; throws precondition_error naming
// the component index when a projection is empty there.
int l1_distance(DisjointDomains const& z, farey::Slope const& a, farey::Slope const& b,
                bool use_oracle = false);

// Diameter of the projections of a geodesic's vertices to one domain, or
// empty when some vertex misses the domain. Throws when the path is not a
// geodesic (consecutive minimal intersections and shortest overall).
std::optional<int> bgim_diameter(std::vector<farey::Slope> const& geodesic_path,
                                 AnnularDomain const& d);

// Diameter of the projections of a set of pairwise disjoint-or-minimally
// intersecting slopes; callers assert <= 1 for simplices and <= 2 for
// vertex stars. Throws on empty projections or violated pairwise bound.
int lipschitz_check(std::vector<farey::Slope> const& simplex, AnnularDomain const& d);

} // namespace freetwist::annular
