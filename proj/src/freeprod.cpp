#include "freetwist/freeprod.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>

namespace freetwist::freeprod {

namespace {

bool is_zero(std::vector<long long> const& v) {
    return std::all_of(v.begin(), v.end(), [](long long x) { return x == 0; });
}

void check_syllable(Presentation const& p, Syllable const& s) {
    if (s.side != 'A' && s.side != 'B')
        throw precondition_error("syllable factor must be A or B");
    if (static_cast<int>(s.exps.size()) != p.rank(s.side))
        throw precondition_error("exponent vector length does not match factor rank");
}

} // namespace

Word normal_form(Presentation const& p, std::vector<Syllable> raw) {
    std::vector<Syllable> out;
    for (Syllable& s : raw) {
        check_syllable(p, s);
        if (is_zero(s.exps)) continue;
        if (!out.empty() && out.back().side == s.side) {
            for (std::size_t i = 0; i < s.exps.size(); ++i)
                out.back().exps[i] += s.exps[i];
            if (is_zero(out.back().exps)) out.pop_back();
        } else {
            out.push_back(std::move(s));
        }
    }
    return Word{std::move(out)};
}

Word concat(Presentation const& p, Word const& x, Word const& y) {
    std::vector<Syllable> raw = x.syllables;
    raw.insert(raw.end(), y.syllables.begin(), y.syllables.end());
    return normal_form(p, std::move(raw));
}

Word inverse(Word const& w) {
    Word out;
    for (auto it = w.syllables.rbegin(); it != w.syllables.rend(); ++it) {
        Syllable s = *it;
        for (long long& e : s.exps) e = -e;
        out.syllables.push_back(std::move(s));
    }
    return out;
}

Int exponent_l1(Word const& w) {
    Int total = 0;
    for (Syllable const& s : w.syllables)
        for (long long e : s.exps) total += e < 0 ? -e : e;
    return total;
}

std::string to_string(Word const& w) {
    if (w.empty()) return "1";
    std::string out;
    for (Syllable const& s : w.syllables) {
        out += s.side;
        out += '(';
        for (std::size_t i = 0; i < s.exps.size(); ++i) {
            if (i) out += ',';
            out += std::to_string(s.exps[i]);
        }
        out += ')';
    }
    return out;
}

Word parse_word(Presentation const& p, std::string const& text) {
    std::vector<Syllable> raw;
    std::size_t i = 0;
    auto skip_ws = [&] { while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i; };
    skip_ws();
    if (i < text.size() && text[i] == '1' ) {
        ++i;
        skip_ws();
        if (i != text.size()) throw parse_error("trailing characters after identity: " + text);
        return Word{};
    }
    while (i < text.size()) {
        skip_ws();
        if (i >= text.size()) break;
        char side = text[i];
        if (side != 'A' && side != 'B')
            throw parse_error("expected factor letter A or B in word: " + text);
        ++i;
        skip_ws();
        if (i >= text.size() || text[i] != '(')
            throw parse_error("expected ( after factor letter in word: " + text);
        ++i;
        Syllable s{side, {}};
        std::string num;
        for (; i < text.size() && text[i] != ')'; ++i) {
            char c = text[i];
            if (c == ',') {
                if (num.empty()) throw parse_error("empty exponent in word: " + text);
                s.exps.push_back(std::strtoll(num.c_str(), nullptr, 10));
                num.clear();
            } else if (c == '-' || c == '+' || std::isdigit(static_cast<unsigned char>(c))) {
                num += c;
            } else if (!std::isspace(static_cast<unsigned char>(c))) {
                throw parse_error("bad character in exponent list: " + text);
            }
        }
        if (i >= text.size()) throw parse_error("unterminated exponent list: " + text);
        ++i; // past ')'
        if (num.empty()) throw parse_error("empty exponent in word: " + text);
        s.exps.push_back(std::strtoll(num.c_str(), nullptr, 10));
        try {
            check_syllable(p, s);
        } catch (precondition_error const& e) {
            throw parse_error(std::string("bad word: ") + e.what() + ": " + text);
        }
        raw.push_back(std::move(s));
    }
    return normal_form(p, std::move(raw));
}

CyclicReduction cyclic_reduce(Presentation const& p, Word const& w) {
    Word cur = normal_form(p, w.syllables);
    Word conj; // w = conj * cur * conj^-1
    while (cur.syllable_count() >= 2 &&
           cur.syllables.front().side == cur.syllables.back().side) {
        Word last{{cur.syllables.back()}};
        cur = concat(p, concat(p, last, cur), inverse(last));
        conj = concat(p, conj, inverse(last));
    }
    return {cur, conj};
}

bool is_conjugate_into_factor(Presentation const& p, Word const& w) {
    return cyclic_reduce(p, w).reduced.syllable_count() <= 1;
}

// ---------------------------------------------------------------------------
// Tree points and distances
// ---------------------------------------------------------------------------

TreePoint w_vertex(Presentation const& p, char side, Word const& rep) {
    if (side != 'A' && side != 'B') throw precondition_error("coset factor must be A or B");
    Word c = normal_form(p, rep.syllables);
    if (!c.empty() && c.syllables.back().side == side) c.syllables.pop_back();
    return TreePoint{TreePoint::Kind::W_VERTEX, side, std::move(c)};
}

TreePoint v_point(Word const& element) {
    return TreePoint{TreePoint::Kind::V_POINT, 'A', element};
}

std::string to_string(TreePoint const& t) {
    if (t.kind == TreePoint::Kind::V_POINT) return "V " + to_string(t.coset);
    return std::string(1, t.side) + " " + to_string(t.coset);
}

namespace {

// Distance between W vertices (X, c1) and (Y, c2), canonical representatives.
int w_to_w(Presentation const& p, char X, Word const& c1, char Y, Word const& c2) {
    Word r = concat(p, inverse(c1), c2);
    if (!r.empty() && r.syllables.back().side == Y) r.syllables.pop_back();
    if (!r.empty() && r.syllables.front().side == X) r.syllables.erase(r.syllables.begin());
    if (r.empty()) return X == Y ? 0 : 1;
    return r.syllable_count() + 1;
}

int v_to_w(Presentation const& p, Word const& g, char Y, Word const& c) {
    TreePoint wa = w_vertex(p, 'A', g), wb = w_vertex(p, 'B', g);
    return std::min(w_to_w(p, 'A', wa.coset, Y, c), w_to_w(p, 'B', wb.coset, Y, c));
}

} // namespace

Rat tree_distance(Presentation const& p, TreePoint const& x, TreePoint const& y) {
    bool xv = x.kind == TreePoint::Kind::V_POINT, yv = y.kind == TreePoint::Kind::V_POINT;
    if (xv && yv)
        return Rat(concat(p, inverse(x.coset), y.coset).syllable_count());
    if (!xv && !yv)
        return Rat(w_to_w(p, x.side, x.coset, y.side, y.coset));
    if (xv) return Rat(1, 2) + Rat(v_to_w(p, x.coset, y.side, y.coset));
    return Rat(1, 2) + Rat(v_to_w(p, y.coset, x.side, x.coset));
}

std::vector<TreePoint> crossed_flats(Presentation const& p, TreePoint const& x,
                                     TreePoint const& y) {
    if (x.kind != TreePoint::Kind::V_POINT || y.kind != TreePoint::Kind::V_POINT)
        throw precondition_error("flat decomposition requires V points");
    Word r = concat(p, inverse(x.coset), y.coset);
    std::vector<TreePoint> out;
    Word prefix = x.coset;
    for (Syllable const& s : r.syllables) {
        out.push_back(w_vertex(p, s.side, prefix));
        prefix = concat(p, prefix, Word{{s}});
    }
    return out;
}

Int flat_term(Presentation const& p, TreePoint const& w, TreePoint const& x,
              TreePoint const& y) {
    if (w.kind != TreePoint::Kind::W_VERTEX)
        throw precondition_error("flat term must be indexed by a W vertex");
    if (x.kind != TreePoint::Kind::V_POINT || y.kind != TreePoint::Kind::V_POINT)
        throw precondition_error("flat decomposition requires V points");
    Word r = concat(p, inverse(x.coset), y.coset);
    Word prefix = x.coset;
    for (Syllable const& s : r.syllables) {
        if (w_vertex(p, s.side, prefix) == w)
            return exponent_l1(Word{{s}});
        prefix = concat(p, prefix, Word{{s}});
    }
    return 0;
}

Rat total_distance(Presentation const& p, TreePoint const& x, TreePoint const& y) {
    Rat total = tree_distance(p, x, y);
    for (TreePoint const& w : crossed_flats(p, x, y))
        total += Rat(flat_term(p, w, x, y));
    return total;
}

bool check_truncation_comparability(Presentation const& p, TreePoint const& x,
                                    TreePoint const& y, Rat const& kappa) {
    if (kappa <= 0) throw precondition_error("truncation threshold must be positive");
    Rat full = total_distance(p, x, y);
    Rat truncated = metric::truncate_below(tree_distance(p, x, y), kappa);
    for (TreePoint const& w : crossed_flats(p, x, y))
        truncated += metric::truncate_below(Rat(flat_term(p, w, x, y)), kappa);
    return metric::check_comparable(full, truncated, kappa + 1, kappa * kappa + 2 * kappa);
}

Int coned_distance(Presentation const& p, Word const& g1, Word const& g2) {
    return Int(concat(p, inverse(g1), g2).syllable_count());
}

// ---------------------------------------------------------------------------
// Explicit balls
// ---------------------------------------------------------------------------

namespace {

// Nonzero exponent vectors in [-max_exp, max_exp]^rank, lexicographic.
std::vector<std::vector<long long>> nonzero_vectors(int rank, int max_exp) {
    std::vector<std::vector<long long>> out;
    std::vector<long long> cur(rank, -max_exp);
    while (true) {
        if (!is_zero(cur)) out.push_back(cur);
        int i = rank - 1;
        while (i >= 0 && cur[i] == max_exp) { cur[i] = -max_exp; --i; }
        if (i < 0) break;
        ++cur[i];
    }
    return out;
}

} // namespace

std::vector<Word> enumerate_words(Presentation const& p, int max_syllables, int max_exp) {
    if (max_syllables < 1 || max_exp < 1)
        throw precondition_error("enumeration bounds must be >= 1");
    std::vector<std::vector<long long>> vecs[2] = {
        nonzero_vectors(p.rank_a, max_exp), nonzero_vectors(p.rank_b, max_exp)};
    std::vector<Word> out;
    std::vector<Syllable> stack;
    auto extend = [&](auto&& self, char side, int remaining) -> void {
        int vi = side == 'A' ? 0 : 1;
        for (auto const& v : vecs[vi]) {
            stack.push_back(Syllable{side, v});
            out.push_back(Word{stack});
            if (remaining > 1) self(self, side == 'A' ? 'B' : 'A', remaining - 1);
            stack.pop_back();
        }
    };
    // Ordered by first factor, then depth-first over extensions; the caller
    // contract is only determinism and completeness, checked by count tests.
    for (char first : {'A', 'B'}) extend(extend, first, max_syllables);
    std::stable_sort(out.begin(), out.end(), [](Word const& a, Word const& b) {
        return a.syllable_count() < b.syllable_count();
    });
    return out;
}

metric::FiniteGraph build_tree(Presentation const& p, int radius, int max_exp) {
    if (radius < 1 || max_exp < 1) throw precondition_error("tree ball bounds must be >= 1");
    metric::FiniteGraph g;
    std::unordered_map<std::string, std::uint32_t> ids;
    auto id_of = [&](TreePoint const& t) {
        std::string key = to_string(t);
        auto it = ids.find(key);
        if (it != ids.end()) return it->second;
        std::uint32_t id = g.add_vertex(key);
        ids.emplace(std::move(key), id);
        return id;
    };
    std::vector<Word> elements{Word{}};
    for (Word& w : enumerate_words(p, radius, max_exp)) elements.push_back(std::move(w));
    for (Word const& e : elements) {
        std::uint32_t ve = id_of(v_point(e));
        for (char side : {'A', 'B'}) {
            TreePoint w = w_vertex(p, side, e);
            // W vertex lies at canonical-depth + 1/2 from the base point.
            if (Rat(w.coset.syllable_count()) + Rat(1, 2) <= Rat(radius))
                g.add_edge(ve, id_of(w));
        }
    }
    g.finalize();
    return g;
}

metric::FiniteGraph build_scaled_tree(Presentation const& p, int radius, int D, int max_exp) {
    if (radius < 1 || D < 1 || max_exp < 1)
        throw precondition_error("scaled tree bounds must be >= 1");
    metric::FiniteGraph g;
    std::unordered_map<std::string, std::uint32_t> ids;
    auto id_of = [&](std::string key) {
        auto it = ids.find(key);
        if (it != ids.end()) return it->second;
        std::uint32_t id = g.add_vertex(key);
        ids.emplace(std::move(key), id);
        return id;
    };
    std::vector<Word> elements{Word{}};
    for (Word& w : enumerate_words(p, radius, max_exp)) elements.push_back(std::move(w));
    for (Word const& e : elements) {
        std::string estr = to_string(e);
        std::uint32_t head = id_of(to_string(w_vertex(p, 'A', e)));
        for (int i = 1; i <= D - 1; ++i) {
            std::uint32_t sub = id_of("E " + estr + " " + std::to_string(i));
            g.add_edge(head, sub);
            head = sub;
        }
        g.add_edge(head, id_of(to_string(w_vertex(p, 'B', e))));
    }
    g.finalize();
    return g;
}

metric::FiniteGraph build_coned_ball(Presentation const& p, int radius, int max_exp) {
    if (radius < 1 || max_exp < 1) throw precondition_error("coned ball bounds must be >= 1");
    metric::FiniteGraph g;
    std::unordered_map<std::string, std::uint32_t> ids;
    auto id_of = [&](std::string key) {
        auto it = ids.find(key);
        if (it != ids.end()) return it->second;
        std::uint32_t id = g.add_vertex(key);
        ids.emplace(std::move(key), id);
        return id;
    };
    std::vector<Word> elements{Word{}};
    for (Word& w : enumerate_words(p, radius, max_exp)) elements.push_back(std::move(w));
    std::unordered_map<std::string, Word> in_ball;
    for (Word const& e : elements) in_ball.emplace(to_string(e), e);
    for (Word const& e : elements) {
        std::string estr = to_string(e);
        std::uint32_t ve = id_of("V " + estr);
        // Cone edges: one unit to each factor-coset apex (= half a unit of
        // the coned graph metric).
        for (char side : {'A', 'B'})
            g.add_edge(ve, id_of(to_string(w_vertex(p, side, e))));
        // Generator edges subdivided once: unit exponent steps inside factors.
        for (char side : {'A', 'B'}) {
            int rank = p.rank(side);
            for (int i = 0; i < rank; ++i) {
                for (int sgn : {-1, 1}) {
                    std::vector<long long> v(rank, 0);
                    v[i] = sgn;
                    Word h = concat(p, e, Word{{Syllable{side, v}}});
                    std::string hstr = to_string(h);
                    if (!in_ball.count(hstr) || !(estr < hstr)) continue;
                    std::uint32_t mid = id_of("M " + estr + " | " + hstr);
                    g.add_edge(ve, mid);
                    g.add_edge(mid, id_of("V " + hstr));
                }
            }
        }
    }
    g.finalize();
    return g;
}

// ---------------------------------------------------------------------------
// Flat-glued complex
// ---------------------------------------------------------------------------

std::uint32_t FlatComplex::v_id(Word const& w) const {
    auto it = v_ids.find(to_string(w));
    if (it == v_ids.end())
        throw precondition_error("word is not a vertex of the built complex: " + to_string(w));
    return it->second;
}

FlatComplex build_flat_complex(Presentation const& p, std::vector<Word> const& words) {
    // V points: all syllable prefixes of the given words.
    std::vector<Word> elements;
    std::unordered_map<std::string, std::size_t> elem_index;
    auto add_element = [&](Word const& w) {
        std::string key = to_string(w);
        if (elem_index.emplace(key, elements.size()).second) elements.push_back(w);
    };
    add_element(Word{});
    for (Word const& w : words) {
        Word prefix;
        add_element(w); // ensure normal-form input is present as given
        for (Syllable const& s : w.syllables) {
            prefix = concat(p, prefix, Word{{s}});
            add_element(prefix);
        }
    }

    // Which lattice coordinates of which flats the V points touch.
    struct FlatData {
        char side = 'A';
        std::vector<std::vector<long long>> coords; // deduplicated
    };
    std::unordered_map<std::string, FlatData> flats;
    // Per element: (flat key, coordinate) of its two attachments.
    struct Attach {
        std::string flat;
        std::vector<long long> coord;
    };
    std::vector<std::array<Attach, 2>> attach(elements.size());
    for (std::size_t ei = 0; ei < elements.size(); ++ei) {
        Word const& e = elements[ei];
        int k = 0;
        for (char side : {'A', 'B'}) {
            TreePoint w = w_vertex(p, side, e);
            std::vector<long long> coord(p.rank(side), 0);
            if (!e.empty() && e.syllables.back().side == side) coord = e.syllables.back().exps;
            std::string key = to_string(w);
            auto& fd = flats[key];
            fd.side = side;
            if (std::find(fd.coords.begin(), fd.coords.end(), coord) == fd.coords.end())
                fd.coords.push_back(coord);
            attach[ei][k++] = Attach{std::move(key), std::move(coord)};
        }
    }

    FlatComplex out;
    metric::FiniteGraph& g = out.graph;
    std::unordered_map<std::string, std::uint32_t> ids;
    auto id_of = [&](std::string key) {
        auto it = ids.find(key);
        if (it != ids.end()) return it->second;
        std::uint32_t id = g.add_vertex(key);
        ids.emplace(std::move(key), id);
        return id;
    };
    auto coord_key = [](std::vector<long long> const& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i) s += ',';
            s += std::to_string(v[i]);
        }
        return s;
    };

    // Lattice boxes: the componentwise hull of the touched coordinates of
    // each flat with at least two touched points. Single-point flats are
    // dead ends for every path and are dropped.
    for (auto const& [key, fd] : flats) {
        if (fd.coords.size() < 2) continue;
        int rank = static_cast<int>(fd.coords.front().size());
        std::vector<long long> lo = fd.coords.front(), hi = fd.coords.front();
        for (auto const& c : fd.coords)
            for (int i = 0; i < rank; ++i) {
                lo[i] = std::min(lo[i], c[i]);
                hi[i] = std::max(hi[i], c[i]);
            }
        // Enumerate the box and its unit lattice edges (subdivided once so
        // that every graph distance doubles the true length).
        std::vector<long long> cur = lo;
        while (true) {
            std::uint32_t vc = id_of("F " + key + " [" + coord_key(cur) + "]");
            for (int i = 0; i < rank; ++i) {
                if (cur[i] + 1 > hi[i]) continue;
                auto next = cur;
                ++next[i];
                std::uint32_t vm =
                    id_of("L " + key + " [" + coord_key(cur) + "] +" + std::to_string(i));
                g.add_edge(vc, vm);
                g.add_edge(vm, id_of("F " + key + " [" + coord_key(next) + "]"));
            }
            int i = rank - 1;
            while (i >= 0 && cur[i] == hi[i]) { cur[i] = lo[i]; --i; }
            if (i < 0) break;
            ++cur[i];
        }
    }

    // Element edges: V point to its two flat attachments (one unit each,
    // i.e. half a unit of the true metric).
    for (std::size_t ei = 0; ei < elements.size(); ++ei) {
        std::string estr = to_string(elements[ei]);
        std::uint32_t ve = id_of("V " + estr);
        out.v_ids.emplace(estr, ve);
        for (Attach const& at : attach[ei]) {
            auto fit = flats.find(at.flat);
            if (fit == flats.end() || fit->second.coords.size() < 2) continue;
            g.add_edge(ve, id_of("F " + at.flat + " [" + coord_key(at.coord) + "]"));
        }
    }
    g.finalize();
    return out;
}

} // namespace freetwist::freeprod
