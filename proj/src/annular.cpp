#include "freetwist/annular.hpp"

#include <algorithm>

namespace freetwist::annular {

using farey::MappingClass;
using farey::Slope;

std::string to_string(AnnularDomain const& d) {
    return "ann(" + farey::to_string(d.core) + ")";
}

AnnularDomain parse_domain(std::string const& text) {
    if (text.size() < 6 || text.substr(0, 4) != "ann(" || text.back() != ')')
        throw parse_error("annular domain must look like ann(p/q): " + text);
    return AnnularDomain{farey::parse_slope(text.substr(4, text.size() - 5))};
}

MappingClass core_normalizer(Slope const& core) {
    if (core.q == 0) return MappingClass(); // core 1/0 is already normalized
    // Rows (a, b; -q, p) with a*p + b*q = 1; the top row is free to shift by
    // (q, -p), pinned by 0 <= a < q.
    auto e = egcd(core.p, core.q);
    Int a = e.x, b = e.y;
    Int t;
    if (a >= 0) t = a / core.q;
    else t = -Int((-a + core.q - 1) / core.q);
    a -= t * core.q;
    b += t * core.p;
    return MappingClass(a, b, -core.q, core.p);
}

Rat winding(AnnularDomain const& d, Slope const& a) {
    if (a == d.core)
        throw precondition_error("winding undefined for the core itself");
    MappingClass g = core_normalizer(d.core);
    Slope n = apply(g, a);
    // Renormalization keeps q >= 0; q = 0 would mean a == core.
    return Rat(n.p, n.q);
}

std::optional<ProjectionClass> annular_project(AnnularDomain const& d, Slope const& a) {
    if (a == d.core) return std::nullopt;
    Rat w = winding(d, a);
    Int fl = rat_floor(w);
    return ProjectionClass{d, fl, w - Rat(fl)};
}

int class_distance(ProjectionClass const& a, ProjectionClass const& b) {
    if (!(a.domain == b.domain))
        throw precondition_error("arc classes live over different domains");
    if (a == b) return 0;
    Int gap = abs_int(a.twist_index - b.twist_index);
    return static_cast<int>(gap.convert_to<long long>()) + 1;
}

namespace {

ProjectionClass project_or_throw(AnnularDomain const& d, Slope const& s, char const* side) {
    auto p = annular_project(d, s);
    if (!p)
        throw precondition_error(std::string("empty projection of the ") + side +
                                 " curve to " + to_string(d));
    return *p;
}

// Crossing count between the strip-segment families of windings wa and wb in
// minimal generic position: translates B + (j, 0) crossing a fixed lift of A.
// A translate crosses iff its bottom and top endpoints straddle A's, i.e.
// (j + c) and (j + c - delta) have opposite signs, where c is the relative
// base offset. Minimal position picks c in the open residue intervals away
// from endpoint collisions; both midpoint candidates are enumerated exactly.
Int strip_crossings(Rat const& wa, Rat const& wb) {
    Rat delta = wa - wb;
    if (delta == 0) return 0;
    Rat frac = delta - Rat(rat_floor(delta));
    std::vector<Rat> offsets;
    if (frac == 0) {
        offsets.emplace_back(1, 2);
    } else {
        offsets.push_back(frac / 2);
        offsets.push_back((frac + 1) / 2);
    }
    Rat mag = delta < 0 ? -delta : delta;
    long long reach = rat_floor(mag).convert_to<long long>() + 2;
    Int bestcount = -1;
    for (Rat const& c : offsets) {
        Int count = 0;
        for (long long j = -reach; j <= reach; ++j) {
            Rat lo = Rat(j) + c;
            Rat hi = lo - delta;
            if ((lo < 0 && hi > 0) || (lo > 0 && hi < 0)) ++count;
        }
        if (bestcount < 0 || count < bestcount) bestcount = count;
    }
    return bestcount;
}

} // namespace

int annular_distance(AnnularDomain const& d, Slope const& a, Slope const& b) {
    return class_distance(project_or_throw(d, a, "first"), project_or_throw(d, b, "second"));
}

int annular_distance_oracle(AnnularDomain const& d, Slope const& a, Slope const& b) {
    ProjectionClass pa = project_or_throw(d, a, "first");
    ProjectionClass pb = project_or_throw(d, b, "second");
    if (pa == pb) return 0;
    Int crossings = strip_crossings(pa.total_winding(), pb.total_winding());
    return static_cast<int>(crossings.convert_to<long long>()) + 1;
}

int twist_coefficient_check(AnnularDomain const& d, Slope const& b, Int const& n,
                            bool use_oracle) {
    Slope image = apply(farey::twist(d.core, n), b);
    if (image == b) return 0;
    return use_oracle ? annular_distance_oracle(d, b, image) : annular_distance(d, b, image);
}

DisjointDomains::DisjointDomains(std::vector<AnnularDomain> components)
    : components_(std::move(components)) {
    if (components_.empty())
        throw precondition_error("domain list must be nonempty");
    for (std::size_t i = 0; i < components_.size(); ++i)
        for (std::size_t j = i + 1; j < components_.size(); ++j)
            if (farey::slope_det(components_[i].core, components_[j].core) != 0)
                throw precondition_error("domains overlap: cores intersect");
}

int l1_distance(DisjointDomains const& z, Slope const& a, Slope const& b, bool use_oracle) {
    int total = 0;
    for (std::size_t i = 0; i < z.components().size(); ++i) {
        AnnularDomain const& d = z.components()[i];
        if (a == d.core || b == d.core)
            throw precondition_error("empty projection at component " + std::to_string(i) +
                                     " (" + to_string(d) + ")");
        total += use_oracle ? annular_distance_oracle(d, a, b) : annular_distance(d, a, b);
    }
    return total;
}

std::optional<int> bgim_diameter(std::vector<Slope> const& geodesic_path,
                                 AnnularDomain const& d) {
    if (geodesic_path.empty()) throw precondition_error("empty path");
    for (std::size_t i = 0; i + 1 < geodesic_path.size(); ++i)
        if (abs_int(farey::slope_det(geodesic_path[i], geodesic_path[i + 1])) != 1)
            throw precondition_error("consecutive path slopes are not adjacent");
    int span = farey::curve_distance(geodesic_path.front(), geodesic_path.back());
    if (span != static_cast<int>(geodesic_path.size()) - 1)
        throw precondition_error("path is not a shortest route between its endpoints");
    for (Slope const& s : geodesic_path)
        if (s == d.core) return std::nullopt;
    int diam = 0;
    for (std::size_t i = 0; i < geodesic_path.size(); ++i)
        for (std::size_t j = i + 1; j < geodesic_path.size(); ++j)
            diam = std::max(diam, annular_distance(d, geodesic_path[i], geodesic_path[j]));
    return diam;
}

int lipschitz_check(std::vector<Slope> const& simplex, AnnularDomain const& d) {
    if (simplex.empty()) throw precondition_error("empty slope set");
    for (std::size_t i = 0; i < simplex.size(); ++i)
        for (std::size_t j = i + 1; j < simplex.size(); ++j)
            if (abs_int(farey::slope_det(simplex[i], simplex[j])) > 1)
                throw precondition_error("slopes are neither disjoint nor minimally crossing");
    int diam = 0;
    for (std::size_t i = 0; i < simplex.size(); ++i) {
        project_or_throw(d, simplex[i], "sampled");
        for (std::size_t j = i + 1; j < simplex.size(); ++j)
            diam = std::max(diam, annular_distance(d, simplex[i], simplex[j]));
    }
    return diam;
}

} // namespace freetwist::annular
