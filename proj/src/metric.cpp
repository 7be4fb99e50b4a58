#include "freetwist/metric.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <deque>
#include <fstream>
#include <limits>
#include <sstream>

namespace freetwist::metric {

// ---------------------------------------------------------------------------
// Comparability
// ---------------------------------------------------------------------------

ComparabilityBound symmetrize(ComparabilityBound const& b) {
    return {b.K, b.K * b.C};
}

ComparabilityBound compose(ComparabilityBound const& ab, ComparabilityBound const& bd) {
    return {ab.K * bd.K, bd.K * ab.C + bd.C};
}

bool check_comparable(double a, double b, ComparabilityBound const& bound) {
    if (bound.K < 1.0 || bound.C < 0.0)
        throw precondition_error("comparability bound needs K >= 1 and C >= 0");
    return a / bound.K - bound.C <= b && b <= bound.K * a + bound.C;
}

bool check_comparable(Rat const& a, Rat const& b, Rat const& K, Rat const& C) {
    if (K < 1 || C < 0)
        throw precondition_error("comparability bound needs K >= 1 and C >= 0");
    return a / K - C <= b && b <= K * a + C;
}

double truncate_below(double a, double threshold) {
    if (a < 0.0) throw precondition_error("truncation input must be nonnegative");
    return a >= threshold ? a : 0.0;
}

Rat truncate_below(Rat const& a, Rat const& threshold) {
    if (a < 0) throw precondition_error("truncation input must be nonnegative");
    return a >= threshold ? a : Rat(0);
}

bool check_truncated_sum_transfer(std::vector<Rat> const& xs,
                                  std::vector<Rat> const& ys,
                                  Rat const& K, Rat const& C, Rat const& kappa) {
    if (xs.size() != ys.size())
        throw precondition_error("sequence lengths differ");
    if (!(kappa > 2 * K * C))
        throw precondition_error("cutoff must exceed 2*K*C");
    for (std::size_t i = 0; i < xs.size(); ++i)
        if (!check_comparable(xs[i], ys[i], K, C))
            throw precondition_error("termwise comparability fails at index " + std::to_string(i));
    Rat lhs = 0, rhs = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        lhs += truncate_below(xs[i], kappa);
        rhs += truncate_below(ys[i], C);
    }
    return lhs <= 2 * K * rhs;
}

// ---------------------------------------------------------------------------
// FiniteGraph
// ---------------------------------------------------------------------------

std::uint32_t FiniteGraph::add_vertex(std::string label) {
    if (finalized_) throw precondition_error("graph already finalized");
    labels_.push_back(std::move(label));
    return static_cast<std::uint32_t>(labels_.size() - 1);
}

void FiniteGraph::add_edge(std::uint32_t u, std::uint32_t v) {
    if (finalized_) throw precondition_error("graph already finalized");
    if (u >= labels_.size() || v >= labels_.size())
        throw precondition_error("edge endpoint out of range");
    if (u == v) throw precondition_error("self loops are not allowed");
    if (u > v) std::swap(u, v);
    edge_pairs_.emplace_back(u, v);
}

void FiniteGraph::finalize() {
    if (finalized_) return;
    std::sort(edge_pairs_.begin(), edge_pairs_.end());
    edge_pairs_.erase(std::unique(edge_pairs_.begin(), edge_pairs_.end()), edge_pairs_.end());
    adj_.assign(labels_.size(), {});
    for (auto [u, v] : edge_pairs_) {
        adj_[u].push_back(v);
        adj_[v].push_back(u);
    }
    for (auto& n : adj_) std::sort(n.begin(), n.end());
    finalized_ = true;
}

void FiniteGraph::require_finalized() const {
    if (!finalized_) throw precondition_error("graph not finalized");
}

std::optional<std::uint32_t> FiniteGraph::find_label(std::string const& label) const {
    for (std::uint32_t i = 0; i < labels_.size(); ++i)
        if (labels_[i] == label) return i;
    return std::nullopt;
}

std::vector<std::uint32_t> const& FiniteGraph::neighbors(std::uint32_t v) const {
    require_finalized();
    return adj_.at(v);
}

std::vector<int> FiniteGraph::bfs_distances(std::uint32_t src) const {
    require_finalized();
    std::vector<int> dist(labels_.size(), -1);
    std::deque<std::uint32_t> q{src};
    dist.at(src) = 0;
    while (!q.empty()) {
        std::uint32_t v = q.front();
        q.pop_front();
        for (std::uint32_t u : adj_[v])
            if (dist[u] < 0) {
                dist[u] = dist[v] + 1;
                q.push_back(u);
            }
    }
    return dist;
}

int FiniteGraph::distance(std::uint32_t u, std::uint32_t v) const {
    return bfs_distances(u).at(v);
}

std::vector<std::uint32_t> FiniteGraph::geodesic(std::uint32_t u, std::uint32_t v) const {
    require_finalized();
    auto dist_to_v = bfs_distances(v);
    if (dist_to_v.at(u) < 0)
        throw precondition_error("vertices are in different components");
    // Greedy walk toward v, always taking the least neighbor that makes
    // progress: yields the lexicographically least shortest path.
    std::vector<std::uint32_t> path{u};
    std::uint32_t cur = u;
    while (cur != v) {
        for (std::uint32_t nb : adj_[cur])
            if (dist_to_v[nb] == dist_to_v[cur] - 1) {
                cur = nb;
                break;
            }
        path.push_back(cur);
    }
    return path;
}

static constexpr std::uint32_t kGraphMagic = 0x46544752; // "FTGR"
static constexpr std::uint32_t kGraphVersion = 1;

void FiniteGraph::save(std::string const& path) const {
    require_finalized();
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw resource_limit_error("cannot open " + path + " for writing");
    auto put32 = [&](std::uint32_t v) { out.write(reinterpret_cast<char const*>(&v), 4); };
    put32(kGraphMagic);
    put32(kGraphVersion);
    put32(static_cast<std::uint32_t>(labels_.size()));
    put32(static_cast<std::uint32_t>(edge_pairs_.size()));
    for (auto [a, b] : edge_pairs_) {
        put32(a);
        put32(b);
    }
    for (auto const& l : labels_) {
        put32(static_cast<std::uint32_t>(l.size()));
        out.write(l.data(), static_cast<std::streamsize>(l.size()));
    }
}

FiniteGraph FiniteGraph::load(std::string const& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw resource_limit_error("cannot open " + path);
    auto get32 = [&]() {
        std::uint32_t v = 0;
        in.read(reinterpret_cast<char*>(&v), 4);
        if (!in) throw parse_error("truncated graph file " + path);
        return v;
    };
    if (get32() != kGraphMagic) throw parse_error("not a graph snapshot: " + path);
    if (get32() != kGraphVersion) throw parse_error("unsupported graph snapshot version in " + path);
    std::uint32_t nv = get32(), ne = get32();
    FiniteGraph g;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges(ne);
    for (auto& [a, b] : edges) {
        a = get32();
        b = get32();
    }
    std::vector<std::string> labels(nv);
    for (auto& l : labels) {
        std::uint32_t len = get32();
        l.resize(len);
        in.read(l.data(), len);
        if (!in) throw parse_error("truncated graph file " + path);
    }
    for (auto& l : labels) g.add_vertex(std::move(l));
    for (auto [a, b] : edges) g.add_edge(a, b);
    g.finalize();
    return g;
}

// ---------------------------------------------------------------------------
// Thinness estimation
// ---------------------------------------------------------------------------

namespace {

// Max over points p of side `s` of min distance to the union of the two other
// sides, using a precomputed all-pairs table.
int side_thinness(std::vector<std::uint32_t> const& s,
                  std::vector<std::uint32_t> const& o1,
                  std::vector<std::uint32_t> const& o2,
                  std::vector<std::vector<int>> const& apsp) {
    int worst = 0;
    for (std::uint32_t p : s) {
        int best = std::numeric_limits<int>::max();
        for (std::uint32_t q : o1) best = std::min(best, apsp[p][q]);
        for (std::uint32_t q : o2) best = std::min(best, apsp[p][q]);
        worst = std::max(worst, best);
    }
    return worst;
}

int triangle_thinness(FiniteGraph const& g, std::uint32_t a, std::uint32_t b,
                      std::uint32_t c, std::vector<std::vector<int>> const& apsp) {
    auto ab = g.geodesic(a, b), bc = g.geodesic(b, c), ac = g.geodesic(a, c);
    int t = side_thinness(ab, bc, ac, apsp);
    t = std::max(t, side_thinness(bc, ab, ac, apsp));
    t = std::max(t, side_thinness(ac, ab, bc, apsp));
    return t;
}

std::vector<std::vector<int>> all_pairs(FiniteGraph const& g) {
    std::size_t n = g.vertex_count();
    std::vector<std::vector<int>> apsp(n);
#ifdef FTW_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (std::size_t i = 0; i < n; ++i)
        apsp[i] = g.bfs_distances(static_cast<std::uint32_t>(i));
    return apsp;
}

} // namespace

int estimate_delta_serial(FiniteGraph const& g) {
    std::size_t n = g.vertex_count();
    std::vector<std::vector<int>> apsp(n);
    for (std::size_t i = 0; i < n; ++i)
        apsp[i] = g.bfs_distances(static_cast<std::uint32_t>(i));
    int delta = 0;
    for (std::uint32_t a = 0; a < n; ++a)
        for (std::uint32_t b = a + 1; b < n; ++b) {
            if (apsp[a][b] < 0) continue;
            for (std::uint32_t c = b + 1; c < n; ++c) {
                if (apsp[a][c] < 0 || apsp[b][c] < 0) continue;
                delta = std::max(delta, triangle_thinness(g, a, b, c, apsp));
            }
        }
    return delta;
}

int estimate_delta(FiniteGraph const& g) {
    std::size_t n = g.vertex_count();
    auto apsp = all_pairs(g);
    int delta = 0;
#ifdef FTW_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic) reduction(max : delta)
#endif
    for (std::uint32_t a = 0; a < n; ++a) {
        // Geodesics are recomputed per triangle from the shared table, so the
        // parallel split over the first corner is embarrassingly parallel.
        for (std::uint32_t b = a + 1; b < n; ++b) {
            if (apsp[a][b] < 0) continue;
            for (std::uint32_t c = b + 1; c < n; ++c) {
                if (apsp[a][c] < 0 || apsp[b][c] < 0) continue;
                delta = std::max(delta, triangle_thinness(g, a, b, c, apsp));
            }
        }
    }
    return delta;
}

// ---------------------------------------------------------------------------
// Quasigeodesic predicates
// ---------------------------------------------------------------------------

bool is_local_quasigeodesic(std::size_t path_len, DistanceFn dist,
                            double D, double K, double C) {
    if (K < 1.0 || C < 0.0)
        throw precondition_error("quasigeodesic constants need K >= 1 and C >= 0");
    for (std::size_t i = 0; i + 1 < path_len; ++i) {
        double gap = static_cast<double>(std::min<std::size_t>(
            path_len - 1 - i, static_cast<std::size_t>(std::floor(D))));
        for (std::size_t j = i + 1; j <= i + static_cast<std::size_t>(gap); ++j) {
            double param = static_cast<double>(j - i);
            double d = dist(i, j);
            if (d < param / K - C || d > K * param + C) return false;
        }
    }
    return true;
}

bool is_local_quasigeodesic(FiniteGraph const& g,
                            std::vector<std::uint32_t> const& path,
                            double D, double K, double C) {
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        auto const& nb = g.neighbors(path[i]);
        bool step_ok = path[i] == path[i + 1] ||
                       std::binary_search(nb.begin(), nb.end(), path[i + 1]);
        if (!step_ok) throw precondition_error("path steps must be adjacent or equal");
    }
    // Cache single-source distances from each distinct path vertex.
    std::vector<std::vector<int>> from(path.size());
    for (std::size_t i = 0; i < path.size(); ++i) from[i] = g.bfs_distances(path[i]);
    return is_local_quasigeodesic(
        path.size(),
        [&](std::size_t i, std::size_t j) {
            int d = from[i][path[j]];
            if (d < 0) throw precondition_error("path not connected in graph");
            return static_cast<double>(d);
        },
        D, K, C);
}

int hausdorff_distance(FiniteGraph const& g,
                       std::vector<std::uint32_t> const& a,
                       std::vector<std::uint32_t> const& b) {
    if (a.empty() || b.empty()) throw precondition_error("empty vertex set");
    int h = 0;
    for (std::uint32_t p : a) {
        auto d = g.bfs_distances(p);
        int best = std::numeric_limits<int>::max();
        for (std::uint32_t q : b) {
            if (d[q] < 0) continue;
            best = std::min(best, d[q]);
        }
        if (best == std::numeric_limits<int>::max())
            throw precondition_error("sets are in different components");
        h = std::max(h, best);
    }
    for (std::uint32_t p : b) {
        auto d = g.bfs_distances(p);
        int best = std::numeric_limits<int>::max();
        for (std::uint32_t q : a) {
            if (d[q] < 0) continue;
            best = std::min(best, d[q]);
        }
        h = std::max(h, best);
    }
    return h;
}

int hausdorff_to_endpoint_geodesic(FiniteGraph const& g,
                                   std::vector<std::uint32_t> const& path) {
    if (path.empty()) throw precondition_error("empty path");
    return hausdorff_distance(g, path, g.geodesic(path.front(), path.back()));
}

MonotoneResult check_projection_monotone(FiniteGraph const& g,
                                         std::vector<std::uint32_t> const& path,
                                         double K, double C, double R) {
    if (path.empty()) throw precondition_error("empty path");
    return check_projection_monotone(g, path, g.geodesic(path.front(), path.back()), K, C, R);
}

MonotoneResult check_projection_monotone(FiniteGraph const& g,
                                         std::vector<std::uint32_t> const& path,
                                         std::vector<std::uint32_t> const& geo,
                                         double K, double C, double R) {
    if (path.empty() || geo.empty()) throw precondition_error("empty path");
    if (K < 1.0 || C < 0.0 || R < 0.0)
        throw precondition_error("constants need K >= 1, C >= 0, R >= 0");
    if (!is_local_quasigeodesic(g, path, static_cast<double>(path.size()), K, C))
        throw precondition_error("path is not a (K,C)-quasigeodesic");
    if (hausdorff_distance(g, path, geo) > R)
        throw precondition_error("path exceeds the stated Hausdorff bound");

    MonotoneResult res;
    res.threshold = 2.0 * K * (C + 2.0 * R) + K * K;

    // Closest-point projection of each path vertex onto geo, ties earliest.
    std::vector<std::size_t> proj(path.size(), 0);
    for (std::size_t i = 0; i < path.size(); ++i) {
        auto d = g.bfs_distances(path[i]);
        int best = std::numeric_limits<int>::max();
        for (std::size_t k = 0; k < geo.size(); ++k)
            if (d[geo[k]] >= 0 && d[geo[k]] < best) {
                best = d[geo[k]];
                proj[i] = k;
            }
    }
    for (std::size_t s = 0; s < path.size(); ++s)
        for (std::size_t t = s + 1; t < path.size(); ++t) {
            if (static_cast<double>(t - s) <= res.threshold) continue;
            if (!(proj[s] < proj[t])) {
                res.ok = false;
                std::ostringstream os;
                os << "projection order fails at parameters " << s << " -> " << t
                   << " (positions " << proj[s] << ", " << proj[t] << ")";
                res.detail = os.str();
                return res;
            }
        }
    res.ok = true;
    return res;
}

} // namespace freetwist::metric
