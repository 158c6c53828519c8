#pragma once

// Band complexes: an interval of items carrying bands (dual pairs of bases),
// marked boundary connections, and 2-cells attached along band traversals and
// interval paths.  This is the combinatorial state the elimination process
// rewrites; every 1-cell keeps a parent-group word so fundamental groups can
// be read off at any stage.

#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <variant>

#include "grushko/numeric.hpp"
#include "grushko/presentation.hpp"
#include "grushko/word.hpp"

namespace grushko {

struct BandComplexError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A base is one of the two horizontal sides of a band, living on the item
// line.  Items are indexed 0..nitems-1 left to right; boundary k sits left of
// item k, so a base over items [first..last] spans boundaries first..last+1.
struct Base {
  int first = 0, last = 0;  // inclusive item range
  int orientation = 1;      // +1 preserving band, -1 reversing; equal on duals
  int dual = -1;            // base id of the opposite side
  int band = -1;

  int alpha() const { return first; }     // left boundary
  int beta() const { return last + 1; }   // right boundary
  int span() const { return last - first + 1; }
};

struct Band {
  int b0 = -1, b1 = -1;  // base ids, b0 < b1
  // parent word read along the left edge, from the b0 side to the b1 side
  Word left_label;
  // the dual base hangs on its own section reached only through this band, so
  // the band letter lies in the spanning tree and is trivial in pi_1
  bool spanning = false;
};

enum class ConnSource { Cell, BandEdge, Introduced };

inline const char* to_string(ConnSource s) {
  switch (s) {
    case ConnSource::Cell: return "cell";
    case ConnSource::BandEdge: return "edge";
    default: return "introduced";
  }
}

// A marked vertical subset of a band: boundary x on the b0 side is tied to
// boundary y on the b1 side.  Band edges are themselves connections.
struct BoundaryConnection {
  int band = -1;
  int x = 0, y = 0;
  ConnSource source = ConnSource::Introduced;
};

// 2-cell boundary pieces.  A traversal crosses the band along a marked
// connection (dir +1 goes from the b0 side to the b1 side); an interval path
// runs between two boundaries, optionally routed through the basepoint along
// extra loops (letters index base_loops, 1-based signed).
struct BandTraversal {
  int conn = -1;
  int dir = 1;
};
struct IntervalPath {
  int from = 0, to = 0;
  Word via_loops;
};
using CellSegment = std::variant<BandTraversal, IntervalPath>;

struct CellAttachment {
  std::vector<CellSegment> segments;
  int vertical_length() const {
    int k = 0;
    for (const auto& s : segments)
      if (std::holds_alternative<BandTraversal>(s)) ++k;
    return k;
  }
};

using ItemMeasure = std::vector<long>;

struct BandComplex {
  int nitems = 0;
  std::vector<Base> bases;
  std::vector<Band> bands;
  std::vector<BoundaryConnection> connections;
  std::vector<CellAttachment> cells;

  // extra petals at the basepoint (parent words); generators beyond the bands
  std::vector<Word> base_loops;
  // per item: parent word of the chosen basepoint path to its section.
  // Constant across each section.
  std::vector<Word> item_anchor;
  // optional per-item block tags for periodic structure; empty when unset
  std::vector<int> periodic_block;

  int nboundaries() const { return nitems == 0 ? 0 : nitems + 1; }
};

// ---- construction helpers -------------------------------------------------

namespace detail {

inline std::pair<BoundaryConnection, BoundaryConnection> edge_connections(
    const BandComplex& bc, int band) {
  const Band& bd = bc.bands[static_cast<std::size_t>(band)];
  const Base& m0 = bc.bases[static_cast<std::size_t>(bd.b0)];
  const Base& m1 = bc.bases[static_cast<std::size_t>(bd.b1)];
  bool pres = m0.orientation > 0;
  BoundaryConnection left{band, m0.alpha(), pres ? m1.alpha() : m1.beta(),
                          ConnSource::BandEdge};
  BoundaryConnection right{band, m0.beta(), pres ? m1.beta() : m1.alpha(),
                           ConnSource::BandEdge};
  return {left, right};
}

}  // namespace detail

// appends a band with bases over [f0..l0] and [f1..l1] plus its two edge
// connections; returns the band id
inline int make_band(BandComplex& bc, int f0, int l0, int f1, int l1,
                     int orientation = 1, Word left_label = {}) {
  int i0 = static_cast<int>(bc.bases.size());
  int i1 = i0 + 1;
  int bd = static_cast<int>(bc.bands.size());
  bc.bases.push_back(Base{f0, l0, orientation, i1, bd});
  bc.bases.push_back(Base{f1, l1, orientation, i0, bd});
  bc.bands.push_back(Band{i0, i1, std::move(left_label)});
  auto [l, r] = detail::edge_connections(bc, bd);
  bc.connections.push_back(l);
  bc.connections.push_back(r);
  return bd;
}

// ---- structural validation ------------------------------------------------

inline void validate_band_complex(const BandComplex& bc) {
  auto fail = [](const std::string& m) { throw std::invalid_argument("band complex: " + m); };
  if (bc.nitems < 0) fail("negative item count");
  if (bc.item_anchor.size() != static_cast<std::size_t>(bc.nitems))
    fail("anchor table size mismatch");
  if (!bc.periodic_block.empty() &&
      bc.periodic_block.size() != static_cast<std::size_t>(bc.nitems))
    fail("periodic block table size mismatch");
  std::vector<int> seen(bc.bases.size(), 0);
  for (std::size_t i = 0; i < bc.bands.size(); ++i) {
    const Band& bd = bc.bands[i];
    if (bd.b0 < 0 || bd.b1 < 0 || bd.b0 >= static_cast<int>(bc.bases.size()) ||
        bd.b1 >= static_cast<int>(bc.bases.size()) || bd.b0 >= bd.b1)
      fail("bad base ids in band");
    seen[static_cast<std::size_t>(bd.b0)]++;
    seen[static_cast<std::size_t>(bd.b1)]++;
    const Base& m0 = bc.bases[static_cast<std::size_t>(bd.b0)];
    const Base& m1 = bc.bases[static_cast<std::size_t>(bd.b1)];
    if (m0.dual != bd.b1 || m1.dual != bd.b0) fail("dual pairing broken");
    if (m0.band != static_cast<int>(i) || m1.band != static_cast<int>(i))
      fail("band back-reference broken");
    if (m0.orientation != m1.orientation || std::abs(m0.orientation) != 1)
      fail("orientation mismatch");
  }
  for (std::size_t i = 0; i < bc.bases.size(); ++i) {
    if (seen[i] != 1) fail("base not in exactly one band");
    const Base& b = bc.bases[i];
    if (b.first < 0 || b.last < b.first || b.last >= bc.nitems)
      fail("base range out of bounds");
  }
  // connections: endpoints inside the respective bases, edges present, and
  // pairwise non-crossing under the band's reparametrization
  std::vector<std::vector<std::pair<int, int>>> per_band(bc.bands.size());
  std::vector<int> edge_count(bc.bands.size(), 0);
  for (const BoundaryConnection& c : bc.connections) {
    if (c.band < 0 || c.band >= static_cast<int>(bc.bands.size()))
      fail("connection references missing band");
    const Band& bd = bc.bands[static_cast<std::size_t>(c.band)];
    const Base& m0 = bc.bases[static_cast<std::size_t>(bd.b0)];
    const Base& m1 = bc.bases[static_cast<std::size_t>(bd.b1)];
    if (c.x < m0.alpha() || c.x > m0.beta() || c.y < m1.alpha() || c.y > m1.beta())
      fail("connection endpoint outside its base");
    if (c.source == ConnSource::BandEdge) {
      auto [l, r] = detail::edge_connections(bc, c.band);
      if (!((c.x == l.x && c.y == l.y) || (c.x == r.x && c.y == r.y)))
        fail("edge connection does not match band edge");
      edge_count[static_cast<std::size_t>(c.band)]++;
    }
    per_band[static_cast<std::size_t>(c.band)].push_back({c.x, c.y});
  }
  for (std::size_t b = 0; b < bc.bands.size(); ++b) {
    if (edge_count[b] != 2) fail("band must carry exactly its two edge connections");
    auto v = per_band[b];
    std::sort(v.begin(), v.end());
    int ori = bc.bases[static_cast<std::size_t>(bc.bands[b].b0)].orientation;
    for (std::size_t k = 0; k + 1 < v.size(); ++k) {
      if (v[k].first == v[k + 1].first) {
        if (v[k].second != v[k + 1].second) fail("two connections at one point disagree");
      } else if (ori > 0 ? v[k].second > v[k + 1].second
                         : v[k].second < v[k + 1].second) {
        fail("crossing connections in one band");
      }
    }
  }
  for (const CellAttachment& cell : bc.cells) {
    if (cell.segments.empty()) fail("empty cell boundary");
    auto ends = [&](const CellSegment& s) -> std::pair<int, int> {
      if (const auto* t = std::get_if<BandTraversal>(&s)) {
        if (t->conn < 0 || t->conn >= static_cast<int>(bc.connections.size()))
          fail("traversal references missing connection");
        const BoundaryConnection& c = bc.connections[static_cast<std::size_t>(t->conn)];
        return t->dir > 0 ? std::pair{c.x, c.y} : std::pair{c.y, c.x};
      }
      const auto& p = std::get<IntervalPath>(s);
      // an itemless complex still has its basepoint, boundary 0
      int nb = bc.nitems == 0 ? 1 : bc.nboundaries();
      if (p.from < 0 || p.from >= nb || p.to < 0 || p.to >= nb)
        fail("interval path endpoint out of range");
      for (int l : p.via_loops)
        if (l == 0 || std::abs(l) > static_cast<int>(bc.base_loops.size()))
          fail("interval path references missing loop");
      return {p.from, p.to};
    };
    for (std::size_t k = 0; k < cell.segments.size(); ++k) {
      auto [s1, e1] = ends(cell.segments[k]);
      auto [s2, e2] = ends(cell.segments[(k + 1) % cell.segments.size()]);
      (void)s1;
      (void)e2;
      if (e1 != s2) fail("cell boundary segments do not concatenate");
    }
  }
}

// ---- sections and complexities --------------------------------------------

inline int gamma(const BandComplex& bc, int item) {
  int g = 0;
  for (const Base& b : bc.bases)
    if (b.first <= item && item <= b.last) ++g;
  return g;
}

// maximal runs of covered items; a run breaks at an interior boundary unless
// a single base spans it (two bases merely touching there stay separate
// closed sections)
inline std::vector<std::pair<int, int>> sections(const BandComplex& bc) {
  std::vector<char> covered(static_cast<std::size_t>(bc.nitems), 0);
  std::vector<char> spanned(static_cast<std::size_t>(bc.nitems) + 1, 0);
  for (const Base& b : bc.bases) {
    for (int h = b.first; h <= b.last; ++h) covered[static_cast<std::size_t>(h)] = 1;
    for (int x = b.first + 1; x <= b.last; ++x) spanned[static_cast<std::size_t>(x)] = 1;
  }
  std::vector<std::pair<int, int>> out;
  for (int h = 0; h < bc.nitems; ++h) {
    if (!covered[static_cast<std::size_t>(h)]) continue;
    if (out.empty() || out.back().second != h - 1 || !spanned[static_cast<std::size_t>(h)])
      out.push_back({h, h});
    else
      out.back().second = h;
  }
  return out;
}

inline int section_of_item(const BandComplex& bc, int item) {
  auto secs = sections(bc);
  for (std::size_t i = 0; i < secs.size(); ++i)
    if (secs[i].first <= item && item <= secs[i].second) return static_cast<int>(i);
  return -1;
}

inline int tau_of(const BandComplex& bc, int lo, int hi) {
  int t = 0;
  for (auto [f, l] : sections(bc)) {
    if (f < lo || l > hi) continue;
    int inside = 0;
    for (const Base& b : bc.bases)
      if (b.first >= f && b.last <= l) ++inside;
    t += std::max(inside - 2, 0);
  }
  return t;
}

inline int tau(const BandComplex& bc) {
  return bc.nitems == 0 ? 0 : tau_of(bc, 0, bc.nitems - 1);
}

// items + bases + boundary connections (band edges included) + vertical
// lengths of the 2-cells
inline int total_complexity(const BandComplex& bc) {
  int t = bc.nitems + static_cast<int>(bc.bases.size()) +
          static_cast<int>(bc.connections.size());
  for (const CellAttachment& c : bc.cells) t += c.vertical_length();
  return t;
}

// ---- measures -------------------------------------------------------------

inline Int measured_length(const ItemMeasure& m, int from_boundary, int to_boundary) {
  Int s = 0;
  for (int h = from_boundary; h < to_boundary; ++h) s += m[static_cast<std::size_t>(h)];
  return s;
}

// one row per connection, measuring it against the band's left edge; the
// right edge's row is exactly the equal-base-length constraint
inline IntMatrix measure_rows(const BandComplex& bc) {
  IntMatrix rows;
  for (const BoundaryConnection& c : bc.connections) {
    const Band& bd = bc.bands[static_cast<std::size_t>(c.band)];
    const Base& m0 = bc.bases[static_cast<std::size_t>(bd.b0)];
    const Base& m1 = bc.bases[static_cast<std::size_t>(bd.b1)];
    std::vector<Int> row(static_cast<std::size_t>(bc.nitems), Int(0));
    for (int h = m0.alpha(); h < c.x; ++h) row[static_cast<std::size_t>(h)] += 1;
    if (m0.orientation > 0)
      for (int h = m1.alpha(); h < c.y; ++h) row[static_cast<std::size_t>(h)] -= 1;
    else
      for (int h = c.y; h < m1.beta(); ++h) row[static_cast<std::size_t>(h)] -= 1;
    bool zero = true;
    for (const Int& v : row)
      if (v != 0) zero = false;
    if (!zero) rows.push_back(std::move(row));
  }
  return rows;
}

// a reversing pair is illegal when its bases meet; bases touching only at an
// abstract boundary are physically disjoint unless they share a section
inline bool reversing_overlap(const BandComplex& bc) {
  for (const Band& bd : bc.bands) {
    const Base& m0 = bc.bases[static_cast<std::size_t>(bd.b0)];
    const Base& m1 = bc.bases[static_cast<std::size_t>(bd.b1)];
    if (m0.orientation > 0) continue;
    if (m1.first <= m0.last && m0.first <= m1.last) return true;
    if (m1.alpha() <= m0.beta() && m0.alpha() <= m1.beta() &&
        section_of_item(bc, m0.first) == section_of_item(bc, m1.first))
      return true;
  }
  return false;
}

inline bool validate_measure(const BandComplex& bc, const ItemMeasure& m) {
  if (m.size() != static_cast<std::size_t>(bc.nitems)) return false;
  for (long v : m)
    if (v < 0) return false;
  if (reversing_overlap(bc)) return false;
  for (const auto& row : measure_rows(bc)) {
    Int s = 0;
    for (std::size_t h = 0; h < row.size(); ++h) s += row[h] * m[h];
    if (s != 0) return false;
  }
  return true;
}

inline bool is_formally_consistent_bc(const BandComplex& bc) {
  if (reversing_overlap(bc)) return false;
  return nonneg_kernel_nonzero(measure_rows(bc), static_cast<std::size_t>(bc.nitems));
}

// ---- carrier classification -----------------------------------------------

struct BaseClassification {
  std::vector<int> leading;
  int carrier = -1;
  std::vector<int> transfers;
};

inline BaseClassification classify_bases(const BandComplex& bc) {
  if (bc.bases.empty()) throw BandComplexError("empty complex: no bases to classify");
  int min_alpha = bc.bases[0].alpha();
  for (const Base& b : bc.bases) min_alpha = std::min(min_alpha, b.alpha());
  BaseClassification out;
  for (std::size_t i = 0; i < bc.bases.size(); ++i)
    if (bc.bases[i].alpha() == min_alpha) out.leading.push_back(static_cast<int>(i));
  out.carrier = out.leading[0];
  for (int i : out.leading) {
    const Base& b = bc.bases[static_cast<std::size_t>(i)];
    const Base& c = bc.bases[static_cast<std::size_t>(out.carrier)];
    if (b.span() > c.span()) out.carrier = i;
  }
  for (int i : out.leading)
    if (i != out.carrier) out.transfers.push_back(i);
  return out;
}

// ---- vertical leaves of a measure -----------------------------------------

// per band, the leaf multiplicities over the items of its b0 base
inline std::vector<std::vector<long>> standard_embedded_pattern(const BandComplex& bc,
                                                                const ItemMeasure& m) {
  if (!validate_measure(bc, m)) throw BandComplexError("invalid measure");
  bool nonzero = false;
  for (long v : m)
    if (v > 0) nonzero = true;
  if (!nonzero) throw BandComplexError("invalid measure: zero everywhere");
  std::vector<std::vector<long>> out;
  for (const Band& bd : bc.bands) {
    const Base& m0 = bc.bases[static_cast<std::size_t>(bd.b0)];
    std::vector<long> leaves;
    for (int h = m0.first; h <= m0.last; ++h) leaves.push_back(m[static_cast<std::size_t>(h)]);
    out.push_back(std::move(leaves));
  }
  return out;
}

// ---- overlapping pairs ----------------------------------------------------

struct OverlapData {
  bool overlapping = false;
  int j_first = 0, j_last = 0;  // item range of J = closure of the union
  int tr_items = 0;             // offset between the two left ends, in items
  LinearForm tr_measured;       // the same offset as a form over item measures
};

inline OverlapData overlapping_data(const BandComplex& bc, int base) {
  const Base& m0 = bc.bases[static_cast<std::size_t>(base)];
  const Base& m1 = bc.bases[static_cast<std::size_t>(m0.dual)];
  OverlapData d;
  d.overlapping = m1.alpha() <= m0.beta() && m0.alpha() <= m1.beta();
  d.j_first = std::min(m0.first, m1.first);
  d.j_last = std::max(m0.last, m1.last);
  d.tr_items = std::abs(m1.first - m0.first);
  for (int h = std::min(m0.first, m1.first); h < std::max(m0.first, m1.first); ++h)
    d.tr_measured.add(h, Int(1));
  return d;
}

// ---- parent-word reading --------------------------------------------------

inline Word expand_loops(const BandComplex& bc, const Word& via) {
  Word out;
  for (int l : via) {
    const Word& w = bc.base_loops[static_cast<std::size_t>(std::abs(l) - 1)];
    Word part = l > 0 ? w : inverse(w);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

// anchor of the section meeting boundary b; prefers the item to the right
inline const Word& anchor_at(const BandComplex& bc, int b) {
  static const Word empty;
  if (bc.nitems == 0) return empty;
  if (b < bc.nitems && gamma(bc, b) > 0) return bc.item_anchor[static_cast<std::size_t>(b)];
  if (b > 0 && gamma(bc, b - 1) > 0) return bc.item_anchor[static_cast<std::size_t>(b - 1)];
  return bc.item_anchor[static_cast<std::size_t>(std::min(b, bc.nitems - 1))];
}

// unbased parent label of one boundary segment of a cell
inline Word segment_parent_label(const BandComplex& bc, const CellSegment& s) {
  if (const auto* t = std::get_if<BandTraversal>(&s)) {
    const Band& bd = bc.bands[static_cast<std::size_t>(
        bc.connections[static_cast<std::size_t>(t->conn)].band)];
    return t->dir > 0 ? bd.left_label : inverse(bd.left_label);
  }
  const auto& p = std::get<IntervalPath>(s);
  return free_reduce(
      concat(inverse(anchor_at(bc, p.from)),
             concat(expand_loops(bc, p.via_loops), anchor_at(bc, p.to))));
}

inline Word cell_parent_word(const BandComplex& bc, const CellAttachment& cell) {
  Word w;
  for (const CellSegment& s : cell.segments) w = concat(w, segment_parent_label(bc, s));
  return free_reduce(w);
}

// relator over the band/loop alphabet: bands first, then loops
inline Word cell_relator(const BandComplex& bc, const CellAttachment& cell) {
  int nb = static_cast<int>(bc.bands.size());
  Word w;
  for (const CellSegment& s : cell.segments) {
    if (const auto* t = std::get_if<BandTraversal>(&s)) {
      int band = bc.connections[static_cast<std::size_t>(t->conn)].band;
      w.push_back(t->dir > 0 ? band + 1 : -(band + 1));
    } else {
      for (int l : std::get<IntervalPath>(s).via_loops)
        w.push_back(l > 0 ? l + nb : l - nb);
    }
  }
  return free_reduce(w);
}

// presentation of the fundamental group: a generator per band and per loop,
// a relator per cell; parent_images gives the images of those generators
inline Presentation presentation_of(const BandComplex& bc) {
  Presentation p;
  p.ngens = static_cast<int>(bc.bands.size() + bc.base_loops.size());
  for (const CellAttachment& c : bc.cells) p.relators.push_back(cell_relator(bc, c));
  for (std::size_t i = 0; i < bc.bands.size(); ++i)
    if (bc.bands[i].spanning) p.relators.push_back(Word{static_cast<int>(i) + 1});
  return p;
}

inline std::vector<Word> parent_images(const BandComplex& bc) {
  std::vector<Word> out;
  for (const Band& bd : bc.bands) {
    const Base& m0 = bc.bases[static_cast<std::size_t>(bd.b0)];
    const Base& m1 = bc.bases[static_cast<std::size_t>(bd.b1)];
    Word a0 = bc.item_anchor[static_cast<std::size_t>(m0.first)];
    Word a1 = bc.item_anchor[static_cast<std::size_t>(m1.first)];
    out.push_back(free_reduce(concat(a0, concat(bd.left_label, inverse(a1)))));
  }
  for (const Word& w : bc.base_loops) out.push_back(w);
  return out;
}

// ---- tubular elements -----------------------------------------------------

// the loop through the left edge of lambda's band, based at boundary p of the
// common section and conjugated by the given (or the section's) anchor
inline Word tubular_element(const BandComplex& bc, int lambda, int p,
                            std::optional<Word> anchor = std::nullopt) {
  const Base& l0 = bc.bases[static_cast<std::size_t>(lambda)];
  const Base& l1 = bc.bases[static_cast<std::size_t>(l0.dual)];
  auto secs = sections(bc);
  int s0 = -1, s1 = -1, sp = -1;
  for (std::size_t i = 0; i < secs.size(); ++i) {
    auto [f, l] = secs[i];
    if (l0.first >= f && l0.last <= l) s0 = static_cast<int>(i);
    if (l1.first >= f && l1.last <= l) s1 = static_cast<int>(i);
    if (p >= f && p <= l + 1) sp = static_cast<int>(i);
  }
  if (s0 < 0 || s0 != s1 || s0 != sp)
    throw BandComplexError("not co-resident: bases and basepoint must share a section");
  const Band& bd = bc.bands[static_cast<std::size_t>(l0.band)];
  Word edge = lambda == bd.b0 ? bd.left_label : inverse(bd.left_label);
  Word a = anchor ? *anchor : bc.item_anchor[static_cast<std::size_t>(l0.first)];
  return free_reduce(concat(a, concat(edge, inverse(a))));
}

// ---- canonical form and serialization -------------------------------------

// combinatorial type only: labels, anchors and loops are history, not shape
inline std::string canonical_form(const BandComplex& bc) {
  std::vector<int> order(bc.bases.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  auto key = [&](int i) {
    const Base& b = bc.bases[static_cast<std::size_t>(i)];
    const Base& d = bc.bases[static_cast<std::size_t>(b.dual)];
    return std::tuple{b.first, b.last, b.orientation, d.first, d.last};
  };
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return key(a) < key(b); });
  std::vector<int> pos(bc.bases.size());
  for (std::size_t i = 0; i < order.size(); ++i)
    pos[static_cast<std::size_t>(order[i])] = static_cast<int>(i);

  // bands keyed by their smaller renumbered base
  std::vector<int> band_order(bc.bands.size());
  for (std::size_t i = 0; i < band_order.size(); ++i) band_order[i] = static_cast<int>(i);
  auto band_key = [&](int i) {
    const Band& bd = bc.bands[static_cast<std::size_t>(i)];
    return std::min(pos[static_cast<std::size_t>(bd.b0)], pos[static_cast<std::size_t>(bd.b1)]);
  };
  std::stable_sort(band_order.begin(), band_order.end(),
                   [&](int a, int b) { return band_key(a) < band_key(b); });
  std::vector<int> band_pos(bc.bands.size());
  for (std::size_t i = 0; i < band_order.size(); ++i)
    band_pos[static_cast<std::size_t>(band_order[i])] = static_cast<int>(i);

  std::vector<std::tuple<int, int, int, int>> conns;  // band, x, y, source
  std::vector<int> conn_new(bc.connections.size());
  {
    std::vector<int> corder(bc.connections.size());
    for (std::size_t i = 0; i < corder.size(); ++i) corder[i] = static_cast<int>(i);
    auto ckey = [&](int i) {
      const BoundaryConnection& c = bc.connections[static_cast<std::size_t>(i)];
      return std::tuple{band_pos[static_cast<std::size_t>(c.band)], c.x, c.y,
                        static_cast<int>(c.source)};
    };
    std::stable_sort(corder.begin(), corder.end(),
                     [&](int a, int b) { return ckey(a) < ckey(b); });
    for (std::size_t i = 0; i < corder.size(); ++i) {
      conn_new[static_cast<std::size_t>(corder[i])] = static_cast<int>(i);
      conns.push_back(ckey(corder[i]));
    }
  }

  auto seg_str = [&](const CellSegment& s, bool flip) {
    std::ostringstream o;
    if (const auto* t = std::get_if<BandTraversal>(&s)) {
      o << "T" << conn_new[static_cast<std::size_t>(t->conn)] << ","
        << (flip ? -t->dir : t->dir);
    } else {
      const auto& p = std::get<IntervalPath>(s);
      Word v = flip ? inverse(p.via_loops) : p.via_loops;
      o << "P" << (flip ? p.to : p.from) << "," << (flip ? p.from : p.to);
      for (int l : v) o << "," << l;
    }
    return o.str();
  };
  std::vector<std::string> cell_strs;
  for (const CellAttachment& c : bc.cells) {
    std::string best;
    std::size_t n = c.segments.size();
    for (int flip = 0; flip < 2; ++flip) {
      for (std::size_t r = 0; r < n; ++r) {
        std::string s;
        for (std::size_t k = 0; k < n; ++k) {
          std::size_t idx = flip ? (r + n - k) % n : (r + k) % n;
          s += seg_str(c.segments[idx], flip != 0) + ";";
        }
        if (best.empty() || s < best) best = s;
      }
    }
    cell_strs.push_back(best);
  }
  std::sort(cell_strs.begin(), cell_strs.end());

  std::ostringstream o;
  o << "n" << bc.nitems << "|";
  for (int i : order) {
    const Base& b = bc.bases[static_cast<std::size_t>(i)];
    o << "b" << b.first << "," << b.last << "," << b.orientation << ","
      << pos[static_cast<std::size_t>(b.dual)];
    if (bc.bands[static_cast<std::size_t>(b.band)].spanning) o << ",s";
    o << "|";
  }
  for (auto [bd, x, y, src] : conns) o << "c" << bd << "," << x << "," << y << "," << src << "|";
  for (const std::string& s : cell_strs) o << "D" << s << "|";
  return o.str();
}

inline std::size_t canonical_hash(const BandComplex& bc) {
  return std::hash<std::string>{}(canonical_form(bc));
}

// full debug dump, storage order, stable field layout
inline std::string to_text(const BandComplex& bc) {
  auto word_str = [](const Word& w) {
    std::string s;
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (i) s += " ";
      s += std::to_string(w[i]);
    }
    return s.empty() ? "-" : s;
  };
  std::ostringstream o;
  o << "items " << bc.nitems << "\n";
  for (std::size_t i = 0; i < bc.bases.size(); ++i) {
    const Base& b = bc.bases[i];
    o << "base " << i << ": [" << b.first << "," << b.last << "] or " << b.orientation
      << " dual " << b.dual << " band " << b.band << "\n";
  }
  for (std::size_t i = 0; i < bc.bands.size(); ++i) {
    o << "band " << i << ": bases " << bc.bands[i].b0 << " " << bc.bands[i].b1
      << " label " << word_str(bc.bands[i].left_label);
    if (bc.bands[i].spanning) o << " spanning";
    o << "\n";
  }
  for (std::size_t i = 0; i < bc.connections.size(); ++i) {
    const BoundaryConnection& c = bc.connections[i];
    o << "conn " << i << ": band " << c.band << " " << c.x << " " << c.y << " "
      << to_string(c.source) << "\n";
  }
  for (std::size_t i = 0; i < bc.cells.size(); ++i) {
    o << "cell " << i << ":";
    for (const CellSegment& s : bc.cells[i].segments) {
      if (const auto* t = std::get_if<BandTraversal>(&s))
        o << " T(" << t->conn << "," << t->dir << ")";
      else {
        const auto& p = std::get<IntervalPath>(s);
        o << " P(" << p.from << "," << p.to;
        if (!p.via_loops.empty()) o << ";" << word_str(p.via_loops);
        o << ")";
      }
    }
    o << "\n";
  }
  for (std::size_t i = 0; i < bc.base_loops.size(); ++i)
    o << "loop " << i << ": " << word_str(bc.base_loops[i]) << "\n";
  for (std::size_t i = 0; i < bc.item_anchor.size(); ++i)
    o << "anchor " << i << ": " << word_str(bc.item_anchor[i]) << "\n";
  return o.str();
}

}  // namespace grushko
