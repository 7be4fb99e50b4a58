#include "freetwist/marking.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace freetwist::marking {

using farey::Slope;
using farey::Surface;

namespace {

// All marking-graph intersections use the one-holed torus convention:
// i(a, b) = |det(a, b)|.
constexpr Surface kSurface = Surface::one_holed_torus;

Int intersect(Slope const& a, Slope const& b) {
    return farey::geometric_intersection(kSurface, a, b);
}

} // namespace

bool is_marking(std::vector<Slope> const& slopes, int R) {
    if (R < 1) return false;
    std::vector<Slope> uniq = slopes;
    std::sort(uniq.begin(), uniq.end());
    uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
    if (uniq.size() < 2) return false; // a single curve never fills
    for (std::size_t i = 0; i < uniq.size(); ++i)
        for (std::size_t j = i + 1; j < uniq.size(); ++j)
            if (intersect(uniq[i], uniq[j]) > R) return false;
    return true;
}

Marking::Marking(std::vector<Slope> s, int r) : slopes(std::move(s)), R(r) {
    std::sort(slopes.begin(), slopes.end());
    slopes.erase(std::unique(slopes.begin(), slopes.end()), slopes.end());
    if (!is_marking(slopes, R))
        throw precondition_error("slope set is not a filling system with pairwise "
                                 "intersection <= " + std::to_string(R));
}

std::string to_string(Marking const& m) {
    std::string out = "{";
    for (std::size_t i = 0; i < m.slopes.size(); ++i) {
        if (i) out += ", ";
        out += farey::to_string(m.slopes[i]);
    }
    out += "} @" + std::to_string(m.R);
    return out;
}

Marking parse_marking(std::string const& text) {
    auto open = text.find('{');
    auto close = text.find('}');
    auto at = text.find('@');
    if (open == std::string::npos || close == std::string::npos || at == std::string::npos ||
        open > close || at < close)
        throw parse_error("expected '{p/q, ...} @R': " + text);
    std::vector<Slope> slopes;
    std::string body = text.substr(open + 1, close - open - 1);
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto b = item.find_first_not_of(" \t");
        auto e = item.find_last_not_of(" \t");
        if (b == std::string::npos) throw parse_error("empty slope in marking: " + text);
        slopes.push_back(farey::parse_slope(item.substr(b, e - b + 1)));
    }
    int R = 0;
    try {
        R = std::stoi(text.substr(at + 1));
    } catch (std::exception const&) {
        throw parse_error("bad intersection bound in marking: " + text);
    }
    try {
        return Marking(std::move(slopes), R);
    } catch (precondition_error const& ex) {
        throw parse_error(std::string("text does not describe a marking: ") + ex.what());
    }
}

Marking apply(farey::MappingClass const& g, Marking const& m) {
    std::vector<Slope> out;
    out.reserve(m.slopes.size());
    for (Slope const& s : m.slopes) out.push_back(farey::apply(g, s));
    return Marking(std::move(out), m.R);
}

std::string MarkingGraphConfig::fingerprint() const {
    std::string out = "R=" + std::to_string(R) + ";E=" + std::to_string(E) + ";gens=";
    for (auto const& g : generators) out += farey::to_string(g) + ";";
    return out;
}

Marking base_marking(int R) {
    return Marking({Slope(0, 1), Slope(1, 0)}, R);
}

MarkingGraphConfig default_config(int R) {
    MarkingGraphConfig cfg;
    cfg.R = R;
    for (int n : {1, -1}) {
        cfg.generators.push_back(farey::twist(Slope(0, 1), n));
        cfg.generators.push_back(farey::twist(Slope(1, 0), n));
    }
    Marking mu0 = base_marking(R);
    Int worst = R;
    for (auto const& h : cfg.generators) {
        Marking img = apply(h, mu0);
        std::vector<Slope> uni = mu0.slopes;
        uni.insert(uni.end(), img.slopes.begin(), img.slopes.end());
        std::sort(uni.begin(), uni.end());
        uni.erase(std::unique(uni.begin(), uni.end()), uni.end());
        for (std::size_t i = 0; i < uni.size(); ++i)
            for (std::size_t j = i + 1; j < uni.size(); ++j)
                worst = std::max(worst, Int(intersect(uni[i], uni[j])));
    }
    cfg.E = static_cast<int>(worst);
    return cfg;
}

bool adjacent(Marking const& m1, Marking const& m2, MarkingGraphConfig const& cfg) {
    if (m1.R != cfg.R || m2.R != cfg.R || !is_marking(m1.slopes, cfg.R) ||
        !is_marking(m2.slopes, cfg.R))
        throw precondition_error("adjacency requires two R-markings at the configured R");
    std::vector<Slope> uni = m1.slopes;
    uni.insert(uni.end(), m2.slopes.begin(), m2.slopes.end());
    std::sort(uni.begin(), uni.end());
    uni.erase(std::unique(uni.begin(), uni.end()), uni.end());
    for (std::size_t i = 0; i < uni.size(); ++i)
        for (std::size_t j = i + 1; j < uni.size(); ++j)
            if (intersect(uni[i], uni[j]) > cfg.E) return false;
    return true;
}

namespace {

// Every slope whose intersection with each slope of m is at most bound.
// A slope u is determined by the intersection pair (det(u,b), det(u,a))
// against two independent anchors a, b via u = (X*a - Y*b)/det(a,b); sweep
// the bounded integer pairs and keep the integral, primitive solutions.
std::vector<Slope> bounded_intersection_slopes(std::vector<Slope> const& m, Int const& bound) {
    Slope const& a = m.at(0);
    Slope const& b = m.at(1);
    Int D = farey::slope_det(a, b); // nonzero: distinct canonical slopes
    std::set<Slope> out;
    for (Int X = -bound; X <= bound; ++X) {
        for (Int Y = -bound; Y <= bound; ++Y) {
            Int up = X * a.p - Y * b.p;
            Int uq = X * a.q - Y * b.q;
            if (up % D != 0 || uq % D != 0) continue;
            up /= D;
            uq /= D;
            if (up == 0 && uq == 0) continue;
            Slope u(up, uq);
            bool ok = true;
            for (Slope const& s : m)
                if (intersect(u, s) > bound) { ok = false; break; }
            if (ok) out.insert(u);
        }
    }
    return {out.begin(), out.end()};
}

} // namespace

std::vector<Marking> marking_neighbors(Marking const& m, MarkingGraphConfig const& cfg) {
    if (m.R != cfg.R || !is_marking(m.slopes, cfg.R))
        throw precondition_error("neighbor enumeration requires an R-marking at the configured R");
    std::vector<Slope> cand = bounded_intersection_slopes(m.slopes, cfg.E);
    // Any neighbor consists solely of candidate slopes that pairwise
    // intersect at most R: collect cliques of size >= 2 (sizes are bounded
    // intrinsically; Farey-type graphs have small cliques).
    std::set<std::vector<Slope>> cliques;
    std::vector<std::size_t> stack;
    auto extend = [&](auto&& self, std::size_t from) -> void {
        if (stack.size() >= 2) {
            std::vector<Slope> sel;
            sel.reserve(stack.size());
            for (std::size_t i : stack) sel.push_back(cand[i]);
            cliques.insert(std::move(sel));
        }
        for (std::size_t j = from; j < cand.size(); ++j) {
            bool ok = true;
            for (std::size_t i : stack)
                if (intersect(cand[i], cand[j]) > cfg.R) { ok = false; break; }
            if (!ok) continue;
            stack.push_back(j);
            self(self, j + 1);
            stack.pop_back();
        }
    };
    extend(extend, 0);
    std::vector<Marking> out;
    for (auto const& sel : cliques) {
        Marking nb(sel, cfg.R);
        if (!(nb == m)) out.push_back(std::move(nb));
    }
    // Generator images are found by the clique sweep whenever they are
    // adjacent; applying them directly is a cheap safety net for the lazy
    // exploration contract.
    for (auto const& h : cfg.generators) {
        Marking img = apply(h, m);
        if (img == m || !adjacent(m, img, cfg)) continue;
        if (std::find(out.begin(), out.end(), img) == out.end()) out.push_back(std::move(img));
    }
    std::sort(out.begin(), out.end(),
              [](Marking const& x, Marking const& y) { return x.slopes < y.slopes; });
    return out;
}

// ---------------------------------------------------------------------------
// Ball cache
// ---------------------------------------------------------------------------

namespace {

constexpr char kCacheMagic[4] = {'F', 'T', 'M', 'B'};
constexpr std::uint32_t kCacheVersion = 1;

void put_u32(std::ostream& os, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16),
                          static_cast<unsigned char>(v >> 24)};
    os.write(reinterpret_cast<char const*>(b), 4);
}

std::uint32_t get_u32(std::istream& is) {
    unsigned char b[4];
    if (!is.read(reinterpret_cast<char*>(b), 4))
        throw parse_error("truncated marking ball cache");
    return std::uint32_t(b[0]) | std::uint32_t(b[1]) << 8 | std::uint32_t(b[2]) << 16 |
           std::uint32_t(b[3]) << 24;
}

void put_str(std::ostream& os, std::string const& s) {
    put_u32(os, static_cast<std::uint32_t>(s.size()));
    os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string get_str(std::istream& is) {
    std::uint32_t n = get_u32(is);
    if (n > (1u << 24)) throw parse_error("corrupt marking ball cache (oversized entry)");
    std::string s(n, '\0');
    if (n && !is.read(s.data(), n)) throw parse_error("truncated marking ball cache");
    return s;
}

} // namespace

std::optional<std::vector<std::string>> BallCache::lookup(std::string const& key) const {
    std::shared_lock lock(mutex_);
    auto it = adj_.find(key);
    if (it == adj_.end()) return std::nullopt;
    return it->second;
}

void BallCache::store(std::string const& key, std::vector<std::string> neighbors) {
    std::unique_lock lock(mutex_);
    adj_.emplace(key, std::move(neighbors));
}

std::size_t BallCache::size() const {
    std::shared_lock lock(mutex_);
    return adj_.size();
}

void BallCache::load(std::string const& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) return; // missing cache file: start empty
    char magic[4];
    if (!is.read(magic, 4)) throw parse_error("truncated marking ball cache");
    if (!std::equal(magic, magic + 4, kCacheMagic)) return; // foreign file: ignore
    if (get_u32(is) != kCacheVersion) return;               // stale version: discard
    if (get_str(is) != fingerprint_) return;                // other config: discard
    std::uint32_t count = get_u32(is);
    std::unordered_map<std::string, std::vector<std::string>> fresh;
    fresh.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        std::string key = get_str(is);
        std::uint32_t n = get_u32(is);
        std::vector<std::string> nbrs;
        nbrs.reserve(n);
        for (std::uint32_t j = 0; j < n; ++j) nbrs.push_back(get_str(is));
        fresh.emplace(std::move(key), std::move(nbrs));
    }
    std::unique_lock lock(mutex_);
    adj_ = std::move(fresh);
}

void BallCache::save(std::string const& path) const {
    std::string tmp = path + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw resource_limit_error("cannot write marking ball cache: " + tmp);
        os.write(kCacheMagic, 4);
        put_u32(os, kCacheVersion);
        put_str(os, fingerprint_);
        std::shared_lock lock(mutex_);
        put_u32(os, static_cast<std::uint32_t>(adj_.size()));
        // Deterministic file bytes: write keys in sorted order.
        std::vector<std::string const*> keys;
        keys.reserve(adj_.size());
        for (auto const& [k, v] : adj_) keys.push_back(&k);
        std::sort(keys.begin(), keys.end(),
                  [](auto const* a, auto const* b) { return *a < *b; });
        for (auto const* k : keys) {
            put_str(os, *k);
            auto const& nbrs = adj_.at(*k);
            put_u32(os, static_cast<std::uint32_t>(nbrs.size()));
            for (auto const& n : nbrs) put_str(os, n);
        }
        if (!os) throw resource_limit_error("failed writing marking ball cache: " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw resource_limit_error("cannot move marking ball cache into place: " + path);
}

// ---------------------------------------------------------------------------
// Breadth-first distance
// ---------------------------------------------------------------------------

namespace {

// Expand one breadth-first level: the neighbor lists of a whole frontier,
// served from the cache when possible and computed (then stored) otherwise.
// Parallel over the frontier; the caller merges serially.
std::vector<std::vector<Marking>> expand_frontier(std::vector<Marking> const& frontier,
                                                  MarkingGraphConfig const& cfg,
                                                  BallCache* cache) {
    std::vector<std::vector<Marking>> produced(frontier.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (std::size_t fi = 0; fi < frontier.size(); ++fi) {
        Marking const& v = frontier[fi];
        std::string key = to_string(v);
        if (cache) {
            if (auto hit = cache->lookup(key)) {
                std::vector<Marking> nbrs;
                nbrs.reserve(hit->size());
                for (auto const& nk : *hit) nbrs.push_back(parse_marking(nk));
                produced[fi] = std::move(nbrs);
                continue;
            }
        }
        std::vector<Marking> nbrs = marking_neighbors(v, cfg);
        if (cache) {
            std::vector<std::string> keys;
            keys.reserve(nbrs.size());
            for (auto const& n : nbrs) keys.push_back(to_string(n));
            cache->store(key, std::move(keys));
        }
        produced[fi] = std::move(nbrs);
    }
    return produced;
}

} // namespace

std::optional<int> marking_distance(Marking const& m1, Marking const& m2,
                                    MarkingGraphConfig const& cfg, int radius_cap,
                                    BallCache* cache) {
    if (radius_cap < 0) throw precondition_error("radius cap must be >= 0");
    if (m1.R != cfg.R || m2.R != cfg.R || !is_marking(m1.slopes, cfg.R) ||
        !is_marking(m2.slopes, cfg.R))
        throw precondition_error("distance requires two R-markings at the configured R");
    if (to_string(m1) == to_string(m2)) return 0;

    // Level-synchronous search from both endpoints, always growing the
    // smaller frontier. A meeting vertex seen at depths (i, j) witnesses
    // distance i + j; the best witness is final once no undiscovered vertex
    // could beat it (every new discovery sits at depth >= level + 1).
    std::array<std::unordered_map<std::string, int>, 2> depth;
    std::array<std::vector<Marking>, 2> frontier;
    depth[0].emplace(to_string(m1), 0);
    depth[1].emplace(to_string(m2), 0);
    frontier[0] = {m1};
    frontier[1] = {m2};
    std::array<int, 2> level{0, 0};
    int best = std::numeric_limits<int>::max();
    while (!frontier[0].empty() || !frontier[1].empty()) {
        if (best <= level[0] + level[1]) break;
        if (level[0] + level[1] >= radius_cap && best > radius_cap)
            return std::nullopt; // any later meeting would overshoot the cap
        int side;
        if (frontier[0].empty()) side = 1;
        else if (frontier[1].empty()) side = 0;
        else side = frontier[0].size() <= frontier[1].size() ? 0 : 1;
        auto produced = expand_frontier(frontier[side], cfg, cache);
        ++level[side];
        std::vector<Marking> next;
        for (auto& bucket : produced) {
            for (auto& nb : bucket) {
                std::string key = to_string(nb);
                if (!depth[side].emplace(key, level[side]).second) continue;
                auto other = depth[1 - side].find(key);
                if (other != depth[1 - side].end())
                    best = std::min(best, level[side] + other->second);
                next.push_back(std::move(nb));
            }
        }
        frontier[side] = std::move(next);
    }
    if (best <= radius_cap) return best;
    return std::nullopt;
}

std::vector<std::pair<Marking, int>> marking_ball(Marking const& m0,
                                                  MarkingGraphConfig const& cfg, int radius,
                                                  BallCache* cache) {
    if (radius < 0) throw precondition_error("radius must be >= 0");
    if (m0.R != cfg.R || !is_marking(m0.slopes, cfg.R))
        throw precondition_error("ball center must be an R-marking at the configured R");
    std::vector<std::pair<Marking, int>> out{{m0, 0}};
    std::unordered_map<std::string, int> seen{{to_string(m0), 0}};
    std::vector<Marking> frontier{m0};
    for (int depth = 1; depth <= radius; ++depth) {
        auto produced = expand_frontier(frontier, cfg, cache);
        std::vector<Marking> next;
        for (auto& bucket : produced)
            for (auto& nb : bucket) {
                std::string key = to_string(nb);
                if (seen.emplace(std::move(key), depth).second) {
                    out.emplace_back(nb, depth);
                    next.push_back(std::move(nb));
                }
            }
        if (next.empty()) break;
        frontier = std::move(next);
    }
    std::sort(out.begin(), out.end(), [](auto const& a, auto const& b) {
        if (a.second != b.second) return a.second < b.second;
        return a.first.slopes < b.first.slopes;
    });
    return out;
}

// ---------------------------------------------------------------------------
// Projection bounds and the distance-formula estimator
// ---------------------------------------------------------------------------

double k_of(int A) {
    if (A < 0) throw precondition_error("projection bound argument must be >= 0");
    return std::max(2.0 * std::log2(4.0 * (A + 1)) + 2.0, A + 1.0);
}

namespace {

// Diameter in the annular graph of the projections of the given slopes;
// -1 when no slope crosses the core.
int projection_diameter(std::vector<Slope> const& slopes, annular::AnnularDomain const& Y) {
    std::vector<annular::ProjectionClass> classes;
    for (Slope const& s : slopes)
        if (auto pc = annular::annular_project(Y, s)) classes.push_back(*pc);
    if (classes.empty()) return -1;
    int diam = 0;
    for (std::size_t i = 0; i < classes.size(); ++i)
        for (std::size_t j = i + 1; j < classes.size(); ++j)
            diam = std::max(diam, annular::class_distance(classes[i], classes[j]));
    return diam;
}

} // namespace

int marking_projection_diameter(Marking const& m, annular::AnnularDomain const& Y) {
    int diam = projection_diameter(m.slopes, Y);
    if (diam < 0)
        throw precondition_error("no slope of the marking crosses the annulus core");
    return diam;
}

int marking_pair_projection(Marking const& m1, Marking const& m2,
                            annular::AnnularDomain const& Y) {
    if (projection_diameter(m1.slopes, Y) < 0 || projection_diameter(m2.slopes, Y) < 0)
        throw precondition_error("a marking misses the annulus core entirely");
    std::vector<Slope> uni = m1.slopes;
    uni.insert(uni.end(), m2.slopes.begin(), m2.slopes.end());
    std::sort(uni.begin(), uni.end());
    uni.erase(std::unique(uni.begin(), uni.end()), uni.end());
    return projection_diameter(uni, Y);
}

EstimateResult distance_formula_estimate(Marking const& m1, Marking const& m2, double A2,
                                         EstimatorOpts const& opts) {
    if (A2 < MIN_A2)
        throw precondition_error("truncation cutoff below the configured minimum");
    std::vector<Slope> uni = m1.slopes;
    uni.insert(uni.end(), m2.slopes.begin(), m2.slopes.end());
    std::sort(uni.begin(), uni.end());
    uni.erase(std::unique(uni.begin(), uni.end()), uni.end());

    EstimateResult res;
    // Whole-surface term: curve-graph diameter of the union of slope sets.
    Int d_S = 0;
    for (std::size_t i = 0; i < uni.size(); ++i)
        for (std::size_t j = i + 1; j < uni.size(); ++j)
            d_S = std::max(d_S, Int(farey::curve_distance(uni[i], uni[j])));
    double t = metric::truncate_below(to_double(d_S), A2);
    res.total += t;
    if (t > 0) res.witnesses.push_back({std::nullopt, t});

    // Candidate annular cores.
    std::set<Slope> cores;
    if (opts.oracle) {
        for (Slope const& s : bounded_intersection_slopes(uni, opts.oracle_cap))
            cores.insert(s);
    } else {
        for (Slope const& s : uni) cores.insert(s);
        for (Slope const& a : m1.slopes)
            for (Slope const& b : m2.slopes) {
                if (a == b) continue;
                for (Slope const& v : farey::curve_geodesic(a, b)) {
                    cores.insert(v);
                    for (Slope const& anchor : {a, b}) {
                        if (anchor == v) continue;
                        for (Slope const& n :
                             farey::neighbors_near(v, anchor, opts.neighbor_bound))
                            cores.insert(n);
                    }
                }
            }
    }

    for (Slope const& core : cores) {
        annular::AnnularDomain Y{core};
        int da = projection_diameter(m1.slopes, Y);
        int db = projection_diameter(m2.slopes, Y);
        if (da < 0 || db < 0) continue; // domain not shared by both markings
        int dY = projection_diameter(uni, Y);
        double term = metric::truncate_below(double(dY), A2);
        if (term > 0) {
            res.total += term;
            res.witnesses.push_back({Y, term});
        }
    }
    std::sort(res.witnesses.begin(), res.witnesses.end(),
              [](DomainTerm const& x, DomainTerm const& y) {
                  if (x.term != y.term) return x.term > y.term;
                  std::string xs = x.domain ? annular::to_string(*x.domain) : "S";
                  std::string ys = y.domain ? annular::to_string(*y.domain) : "S";
                  return xs < ys;
              });
    return res;
}

} // namespace freetwist::marking
