#pragma once
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "freetwist/errors.hpp"
#include "freetwist/metric.hpp"
#include "freetwist/numeric.hpp"

namespace freetwist::freeprod {

// The free product of two free-abelian groups of the given ranks.
struct Presentation {
    int rank_a = 1;
    int rank_b = 1;

    Presentation() = default;
    Presentation(int ra, int rb) : rank_a(ra), rank_b(rb) {
        if (ra < 1 || rb < 1) throw precondition_error("factor ranks must be >= 1");
    }
    int rank(char side) const { return side == 'A' ? rank_a : rank_b; }
};

// One maximal block of a word lying in a single factor: the factor name and
// the exponent vector (never the zero vector in normal form).
struct Syllable {
    char side = 'A'; // 'A' or 'B'
    std::vector<long long> exps;

    bool operator==(Syllable const& o) const = default;
};

// Alternating-syllable normal form; the identity is the empty list.
struct Word {
    std::vector<Syllable> syllables;

    bool operator==(Word const& o) const = default;
    bool empty() const { return syllables.empty(); }
    int syllable_count() const { return static_cast<int>(syllables.size()); }
};

// Collapse a raw syllable list to the unique normal form: merge adjacent
// same-factor syllables by vector addition, drop zero syllables, repeat.
Word normal_form(Presentation const& p, std::vector<Syllable> raw);

Word concat(Presentation const& p, Word const& x, Word const& y);
Word inverse(Word const& w);
// Sum of L1 norms of all exponent vectors (the flat travel of the word).
Int exponent_l1(Word const& w);

std::string to_string(Word const& w); // e.g. A(2)B(-1,3)A(1); identity = 1
Word parse_word(Presentation const& p, std::string const& text);

// w = conjugator * reduced * conjugator^-1 with reduced cyclically reduced
// (first and last syllables in different factors, or at most one syllable).
struct CyclicReduction {
    Word reduced;
    Word conjugator;
};
CyclicReduction cyclic_reduce(Presentation const& p, Word const& w);
bool is_conjugate_into_factor(Presentation const& p, Word const& w);

// ---------------------------------------------------------------------------
// The tree obtained by collapsing factor flats: one vertex per factor coset
// (W vertices), one point per group element at the midpoint of its edge
// (V points). Edges have length 1, so V points sit at half-integer distances.
// ---------------------------------------------------------------------------

struct TreePoint {
    enum class Kind { W_VERTEX, V_POINT };
    Kind kind = Kind::V_POINT;
    char side = 'A';   // which factor's coset, for W vertices
    Word coset;        // W: canonical coset representative; V: the element

    bool operator==(TreePoint const& o) const = default;
};

// Canonical W vertex for the coset (word * factor of `side`): strips the
// trailing syllable of that factor from the representative.
TreePoint w_vertex(Presentation const& p, char side, Word const& rep);
TreePoint v_point(Word const& element);
std::string to_string(TreePoint const& t);

// Exact distance in the collapsed tree (closed form on coset words; V-V
// distances are integers, V-W distances half-integers).
Rat tree_distance(Presentation const& p, TreePoint const& x, TreePoint const& y);

// The W vertices whose flats the tree geodesic between two V points passes
// through, in path order.
std::vector<TreePoint> crossed_flats(Presentation const& p, TreePoint const& x,
                                     TreePoint const& y);

// L1 length of the geodesic's traversal of the given flat: the exponent
// distance between its entry and exit points, 0 when the geodesic misses
// the flat. Endpoints must be V points.
Int flat_term(Presentation const& p, TreePoint const& w, TreePoint const& x,
              TreePoint const& y);

// Tree distance plus all flat traversals: the exact word metric of the
// group realized on the flat-glued complex. For V points of elements g, h
// this equals syllable count plus exponent L1 of g^-1 h.
Rat total_distance(Presentation const& p, TreePoint const& x, TreePoint const& y);

// Comparability of the kappa-truncated distance sum with the full distance at
// constants (kappa+1, kappa^2+2kappa); a property that must always hold.
bool check_truncation_comparability(Presentation const& p, TreePoint const& x,
                                    TreePoint const& y, Rat const& kappa);

// Distance in the Cayley graph with every factor coset coned to a point:
// the syllable count of g1^-1 g2.
Int coned_distance(Presentation const& p, Word const& g1, Word const& g2);

// ---------------------------------------------------------------------------
// Explicit finite models used as search oracles. The tree and the coned
// graph are not locally finite (factors are infinite), so balls are cut off
// by an exponent cap in addition to the radius.
// ---------------------------------------------------------------------------

// Ball of the collapsed tree around the base V point. Edges of the returned
// graph are half-units: graph distance = 2 * tree distance. Labels:
// "V <word>" for V points, "A <word>"/"B <word>" for W vertices.
metric::FiniteGraph build_tree(Presentation const& p, int radius, int max_exp);

// Same ball with every W-W edge stretched to length D via D-1 interior
// subdivision vertices (labels "E <word> <i>", i = 1..D-1); graph edges are
// unit length, so graph distance = scaled-tree distance.
metric::FiniteGraph build_scaled_tree(Presentation const& p, int radius, int D, int max_exp);

// Ball of the coned Cayley graph around the identity. Cone edges (element to
// coset apex, length 1/2) become unit edges; generator edges (length 1) are
// subdivided once, so graph distance = 2 * coned distance. Labels "V <word>",
// "A <word>"/"B <word>" for apexes, "M ..." for subdivision points.
metric::FiniteGraph build_coned_ball(Presentation const& p, int radius, int max_exp);

// All normal-form words with at most the given syllable count and exponent
// entries bounded by max_exp in absolute value, enumerated deterministically
// (by syllable count, then factor pattern, then exponent vectors) with no
// duplicates.
std::vector<Word> enumerate_words(Presentation const& p, int max_syllables, int max_exp);

// The flat-glued complex spanned by a word set: V points of all syllable
// prefixes, flats as L1 lattice boxes over the touched coordinates, glued
// along element edges. Graph distance between V points = 2 * total_distance.
struct FlatComplex {
    metric::FiniteGraph graph;
    std::unordered_map<std::string, std::uint32_t> v_ids; // word text -> vertex

    std::uint32_t v_id(Word const& w) const;
};
FlatComplex build_flat_complex(Presentation const& p, std::vector<Word> const& words);

} // namespace freetwist::freeprod
