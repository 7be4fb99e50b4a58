#include "freetwist/farey.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace freetwist::farey {

namespace {

Int floor_div(Int const& a, Int const& b) {
    Int q = a / b, r = a % b;
    if (r != 0 && ((r < 0) != (b < 0))) --q;
    return q;
}

Int ceil_div(Int const& a, Int const& b) { return -floor_div(-a, b); }

} // namespace

// ---------------------------------------------------------------------------
// Slopes
// ---------------------------------------------------------------------------

Slope::Slope(Int pp, Int qq) : p(std::move(pp)), q(std::move(qq)) {
    if (p == 0 && q == 0) throw precondition_error("slope (0,0) is not a curve");
    Int g = boost::multiprecision::gcd(abs_int(p), abs_int(q));
    if (g > 1) { p /= g; q /= g; }
    if (q < 0) { p = -p; q = -q; }
    if (q == 0) p = 1;
}

Int slope_det(Slope const& a, Slope const& b) { return a.p * b.q - a.q * b.p; }

Int geometric_intersection(Surface s, Slope const& a, Slope const& b) {
    return intersection_scale(s) * abs_int(slope_det(a, b));
}

std::string to_string(Slope const& s) {
    return s.p.str() + "/" + s.q.str();
}

Slope parse_slope(std::string const& text) {
    auto slash = text.find('/');
    if (slash == std::string::npos) throw parse_error("slope must look like p/q: " + text);
    try {
        Int p(text.substr(0, slash));
        Int q(text.substr(slash + 1));
        return Slope(p, q);
    } catch (std::exception const&) {
        throw parse_error("bad slope: " + text);
    }
}

// ---------------------------------------------------------------------------
// Mapping classes
// ---------------------------------------------------------------------------

MappingClass::MappingClass(Int a, Int b, Int c, Int d)
    : m{std::move(a), std::move(b), std::move(c), std::move(d)} {
    Int dd = det();
    if (dd != 1 && dd != -1)
        throw precondition_error("mapping class matrix must have determinant +-1");
}

MappingClass MappingClass::inverse() const {
    Int dd = det();
    // Adjugate over det; det is +-1 so entries stay integral.
    return MappingClass(m[3] * dd, -m[1] * dd, -m[2] * dd, m[0] * dd);
}

MappingClass operator*(MappingClass const& a, MappingClass const& b) {
    return MappingClass(a.m[0] * b.m[0] + a.m[1] * b.m[2],
                        a.m[0] * b.m[1] + a.m[1] * b.m[3],
                        a.m[2] * b.m[0] + a.m[3] * b.m[2],
                        a.m[2] * b.m[1] + a.m[3] * b.m[3]);
}

Slope apply(MappingClass const& mc, Slope const& s) {
    return Slope(mc.m[0] * s.p + mc.m[1] * s.q, mc.m[2] * s.p + mc.m[3] * s.q);
}

std::string to_string(MappingClass const& mc) {
    return "[[" + mc.m[0].str() + "," + mc.m[1].str() + "],[" + mc.m[2].str() + "," +
           mc.m[3].str() + "]]";
}

MappingClass parse_matrix(std::string const& text) {
    std::string digits;
    std::vector<Int> vals;
    for (char ch : text) {
        if ((ch >= '0' && ch <= '9') || ch == '-') {
            digits += ch;
        } else {
            if (!digits.empty()) {
                vals.emplace_back(digits);
                digits.clear();
            }
            if (ch != '[' && ch != ']' && ch != ',' && ch != ' ')
                throw parse_error("bad matrix: " + text);
        }
    }
    if (!digits.empty()) vals.emplace_back(digits);
    if (vals.size() != 4) throw parse_error("matrix must have four entries: " + text);
    try {
        return MappingClass(vals[0], vals[1], vals[2], vals[3]);
    } catch (precondition_error const& e) {
        throw parse_error(std::string("bad matrix: ") + e.what());
    }
}

MappingClass twist(Slope const& v, Int const& n) {
    // w -> w + n * det(w, v) * v, as a matrix in the (p, q) coordinates.
    return MappingClass(1 + n * v.p * v.q, -n * v.p * v.p,
                        n * v.q * v.q, 1 - n * v.p * v.q);
}

// ---------------------------------------------------------------------------
// Distance
// ---------------------------------------------------------------------------

namespace {

// All u with |det(u, v)| = 1, |det(u, a)| <= cap_a, |det(u, b)| <= cap_b.
// The det-1 solutions form two lines u = +-u0 + t*v; each cap restricts t to
// an interval, so the list is finite whenever v differs from a or b.
std::vector<Slope> neighbor_candidates(Slope const& v, Slope const& a, Int const& cap_a,
                                       Slope const& b, Int const& cap_b) {
    auto e = egcd(v.q, -v.p); // v.q * x - v.p * y = 1 with (x, y) = u
    Int x0 = e.x, y0 = e.y;
    if (e.g != 1) throw precondition_error("slope is not primitive");
    std::vector<Slope> out;
    for (int sgn = 0; sgn < 2; ++sgn) {
        Int xs = sgn ? -x0 : x0, ys = sgn ? -y0 : y0;
        bool empty = false;
        bool bounded = false;
        Int lo = 0, hi = 0;
        auto clamp = [&](Int const& d0, Int const& dv, Int const& cap) {
            if (empty) return;
            if (dv == 0) {
                if (abs_int(d0) > cap) empty = true;
                return;
            }
            Int t1 = ceil_div(-cap - d0, dv), t2 = floor_div(cap - d0, dv);
            if (dv < 0) std::swap(t1, t2);
            if (!bounded) { lo = t1; hi = t2; bounded = true; }
            else { lo = std::max(lo, t1); hi = std::min(hi, t2); }
            if (lo > hi) empty = true;
        };
        clamp(xs * a.q - ys * a.p, slope_det(v, a), cap_a);
        clamp(xs * b.q - ys * b.p, slope_det(v, b), cap_b);
        if (empty || !bounded) continue;
        for (Int t = lo; t <= hi; ++t)
            out.emplace_back(xs + t * v.p, ys + t * v.q);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// All u with |det(u, v)| = 1 and |u.p| <= cap, u.q <= cap. Always finite:
// the family is a line with direction v != 0.
std::vector<Slope> neighbors_sized(Slope const& v, Int const& cap) {
    auto e = egcd(v.q, -v.p);
    std::vector<Slope> out;
    for (int sgn = 0; sgn < 2; ++sgn) {
        Int xs = sgn ? -e.x : e.x, ys = sgn ? -e.y : e.y;
        bool empty = false, bounded = false;
        Int lo = 0, hi = 0;
        auto clamp = [&](Int const& c, Int const& step) {
            if (empty) return;
            if (step == 0) {
                if (abs_int(c) > cap) empty = true;
                return;
            }
            Int t1 = ceil_div(-cap - c, step), t2 = floor_div(cap - c, step);
            if (step < 0) std::swap(t1, t2);
            if (!bounded) { lo = t1; hi = t2; bounded = true; }
            else { lo = std::max(lo, t1); hi = std::min(hi, t2); }
            if (lo > hi) empty = true;
        };
        clamp(xs, v.p);
        clamp(ys, v.q);
        if (empty || !bounded) continue;
        for (Int t = lo; t <= hi; ++t) {
            Slope u(xs + t * v.p, ys + t * v.q);
            if (abs_int(u.p) <= cap && u.q <= cap) out.push_back(u);
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

int log_budget(Int const& det) {
    // distance <= 2*log2(intersection) + 2
    double l = std::log2(std::max(1.0, to_double(abs_int(det))));
    return static_cast<int>(std::ceil(2.0 * l + 2.0)) + 1;
}

// Level-synchronous bidirectional BFS over the candidate region
// {u : |det(u,a)| <= cap, |det(u,b)| <= cap}. Exact on the region: stops
// only when no undiscovered meeting point can beat the best known length.
int region_bfs(Slope const& a, Slope const& b, Int const& cap, long long max_frontier) {
    if (a == b) return 0;
    if (abs_int(slope_det(a, b)) <= 1) return 1;
    int budget = log_budget(slope_det(a, b));
    constexpr int kInf = std::numeric_limits<int>::max();

    std::unordered_map<Slope, int, SlopeHash> dist[2];
    std::vector<Slope> front[2];
    dist[0][a] = 0;
    dist[1][b] = 0;
    front[0] = {a};
    front[1] = {b};
    int depth[2] = {0, 0};
    int best = kInf;
    long long visited = 2;

    while (!front[0].empty() && !front[1].empty()) {
        if (best <= depth[0] + depth[1]) break;
        if (depth[0] + depth[1] >= budget) break;
        int side = front[0].size() <= front[1].size() ? 0 : 1;
        int other = 1 - side;
        std::vector<Slope> next;
        for (Slope const& v : front[side]) {
            int dv = dist[side].at(v);
            for (Slope const& u : neighbor_candidates(v, a, cap, b, cap)) {
                auto [it, fresh] = dist[side].try_emplace(u, dv + 1);
                if (!fresh) continue;
                auto hit = dist[other].find(u);
                if (hit != dist[other].end())
                    best = std::min(best, dv + 1 + hit->second);
                if (++visited > max_frontier)
                    throw resource_limit_error("curve distance search exceeded frontier cap");
                next.push_back(u);
            }
        }
        front[side] = std::move(next);
        ++depth[side];
    }
    return best == kInf ? -1 : best;
}

} // namespace

int curve_distance_ball_oracle(Slope const& a, Slope const& b, Int const& cap) {
    return region_bfs(a, b, cap, 8'000'000);
}

int curve_distance(Slope const& a, Slope const& b, CurveDistanceOpts const& opts) {
    if (a == b) return 0;
    Int det = abs_int(slope_det(a, b));
    if (det <= 1) return 1;
    Int cap = std::max<Int>(det * opts.cap_multiplier, 2);
    int fast = region_bfs(a, b, cap, opts.max_frontier);
    if (opts.cross_check) {
        // Widened-region reference: can only reveal shorter routes. Fall back
        // to the better answer if the pruned region missed one.
        int ref = region_bfs(a, b, 4 * det + 8, 8 * opts.max_frontier);
        if (ref >= 0 && (fast < 0 || ref < fast)) return ref;
    }
    if (fast < 0) throw resource_limit_error("curve distance not found within pruned region");
    return fast;
}

std::vector<Slope> curve_geodesic(Slope const& a, Slope const& b,
                                  CurveDistanceOpts const& opts) {
    if (a == b) return {a};
    Int det = abs_int(slope_det(a, b));
    Int cap = std::max<Int>(det * opts.cap_multiplier, 2);
    int total = curve_distance(a, b, opts);
    // Distance field from b over the candidate region out to the known
    // distance, then a greedy walk from a picking the least progressing
    // neighbor: the lexicographically least geodesic inside the region.
    std::unordered_map<Slope, int, SlopeHash> dist;
    std::deque<Slope> q{b};
    dist[b] = 0;
    long long visited = 1;
    while (!q.empty()) {
        Slope v = q.front();
        q.pop_front();
        int dv = dist[v];
        if (dv >= total) continue;
        for (Slope const& u : neighbor_candidates(v, a, cap, b, cap)) {
            if (dist.count(u)) continue;
            dist[u] = dv + 1;
            if (++visited > opts.max_frontier)
                throw resource_limit_error("curve geodesic search exceeded frontier cap");
            q.push_back(u);
        }
    }
    auto it = dist.find(a);
    if (it == dist.end() || it->second != total)
        throw resource_limit_error("curve geodesic not found within pruned region");
    std::vector<Slope> path{a};
    Slope cur = a;
    int remaining = it->second;
    while (remaining > 0) {
        bool advanced = false;
        for (Slope const& u : neighbor_candidates(cur, a, cap, b, cap)) {
            auto du = dist.find(u);
            if (du != dist.end() && du->second == remaining - 1) {
                cur = u;
                advanced = true;
                break;
            }
        }
        if (!advanced)
            throw resource_limit_error("geodesic walk lost the distance gradient");
        path.push_back(cur);
        --remaining;
    }
    return path;
}

bool fills(Slope const& a, Slope const& b) { return !(a == b); }

bool is_pseudo_anosov(MappingClass const& mc) {
    return abs_int(mc.trace()) > 2;
}

double intersection_growth(MappingClass const& mc, Slope const& seed, int iters) {
    if (iters < 3) throw precondition_error("growth estimate needs iters >= 3");
    if (apply(mc, seed) == seed)
        throw precondition_error("growth estimate needs a seed not fixed by the class");
    MappingClass power = mc;
    Int prev = 0;
    for (int k = 1; k <= iters; ++k) {
        Int cur = abs_int(slope_det(apply(power, seed), seed));
        if (cur == 0)
            throw precondition_error("seed returns to itself under iteration");
        // Exact rational ratio before the float conversion: the raw counts
        // overflow double long before the ratio does.
        if (k == iters) return to_double(Rat(cur, prev));
        prev = cur;
        power = power * mc;
    }
    return 1.0; // unreachable
}

metric::FiniteGraph build_farey_ball(Int const& cap) {
    if (cap < 1) throw precondition_error("ball cap must be positive");
    std::vector<Slope> verts;
    verts.emplace_back(1, 0);
    for (Int qq = 1; qq <= cap; ++qq)
        for (Int pp = -cap; pp <= cap; ++pp)
            if (boost::multiprecision::gcd(abs_int(pp), qq) == 1)
                verts.emplace_back(pp, qq);
    std::sort(verts.begin(), verts.end());
    metric::FiniteGraph g;
    std::unordered_map<Slope, std::uint32_t, SlopeHash> index;
    for (auto const& s : verts) index[s] = g.add_vertex(to_string(s));
    // Enumerate each vertex's neighbor line, restricted to the ball.
    for (auto const& v : verts) {
        auto iv = index.find(v)->second;
        for (Slope const& u : neighbors_sized(v, cap)) {
            auto iu = index.find(u);
            if (iu != index.end() && iv < iu->second) g.add_edge(iv, iu->second);
        }
    }
    g.finalize();
    return g;
}

std::vector<Slope> neighbors_near(Slope const& v, Slope const& anchor, Int const& cap) {
    return neighbor_candidates(v, anchor, cap, anchor, cap);
}

std::vector<Slope> distance_witnesses(Slope const& base, int max_d) {
    if (max_d < 0) throw precondition_error("negative distance");
    std::vector<Slope> out{base};
    Slope cur = base;
    for (int d = 1; d <= max_d; ++d) {
        bool found = false;
        Int size_cap = 3 * std::max(abs_int(cur.p), cur.q) + 3;
        for (int attempt = 0; attempt < 6 && !found; ++attempt, size_cap *= 2) {
            auto cands = neighbors_sized(cur, size_cap);
            // Prefer small witnesses: order by size, then slope order.
            std::stable_sort(cands.begin(), cands.end(), [](Slope const& x, Slope const& y) {
                Int sx = std::max(abs_int(x.p), x.q), sy = std::max(abs_int(y.p), y.q);
                if (sx != sy) return sx < sy;
                return x < y;
            });
            for (Slope const& u : cands) {
                if (curve_distance(base, u) == d) {
                    cur = u;
                    out.push_back(u);
                    found = true;
                    break;
                }
            }
        }
        if (!found)
            throw resource_limit_error("no distance witness found at step " + std::to_string(d));
    }
    return out;
}

} // namespace freetwist::farey
