#pragma once

// Elementary moves on band complexes and the two schedules built from them
// (thinning for complexes with a gamma=1 item, the entire transformation for
// unthinnable ones), plus the periodic mergers.  Every move preserves the
// fundamental group; the justification for the substitution moves (annulus
// removal, zipping) is that the complex's group maps isomorphically to the
// parent group throughout, so any relation the oracle certifies in the parent
// already holds upstairs.
//
// Each outcome carries a replayable label.  Replaying a label on the parent
// complex re-executes the exact surgery without consulting any oracle, which
// is how measures are pulled back along a move after the fact.

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>

#include "grushko/bandcomplex.hpp"
#include "grushko/oracle.hpp"
#include "grushko/roots.hpp"

namespace grushko {

struct MoveError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NotLonely : MoveError {
  using MoveError::MoveError;
};
struct MissingBoundaryConnections : MoveError {
  using MoveError::MoveError;
};
struct NotThinnable : MoveError {
  using MoveError::MoveError;
};
struct NotUnthinnable : MoveError {
  using MoveError::MoveError;
};
struct PreconditionFailed : MoveError {
  using MoveError::MoveError;
};
struct LabelMismatch : MoveError {
  using MoveError::MoveError;
};

enum class MoveStatus { Ok, Unsuitable, OracleUnknown, ResourceExhausted };

inline const char* to_string(MoveStatus s) {
  switch (s) {
    case MoveStatus::Ok: return "ok";
    case MoveStatus::Unsuitable: return "unsuitable";
    case MoveStatus::OracleUnknown: return "oracle-unknown";
    default: return "resource-exhausted";
  }
}

// parent measure from child measure: row per parent item, sparse nonnegative
// integer combination of child items
using PullbackMap = std::vector<std::vector<std::pair<int, long>>>;

struct MoveOutcome {
  BandComplex bc;
  std::string label;
};

struct MoveResult {
  MoveStatus status = MoveStatus::Ok;
  std::vector<MoveOutcome> outcomes;
  std::string reason;
};

// ---- move labels ----------------------------------------------------------

// NAME[k=v,...] for elementary moves, NAME[child;child;...] for schedules
struct MoveLabel {
  std::string name;
  std::vector<std::pair<std::string, long>> params;
  std::vector<MoveLabel> children;

  bool composite() const { return !children.empty(); }

  long get(const std::string& key) const {
    for (const auto& [k, v] : params)
      if (k == key) return v;
    throw LabelMismatch("move label " + name + " lacks parameter " + key);
  }

  std::string str() const {
    std::string s = name + "[";
    if (composite()) {
      for (std::size_t i = 0; i < children.size(); ++i) {
        if (i) s += ";";
        s += children[i].str();
      }
    } else {
      for (std::size_t i = 0; i < params.size(); ++i) {
        if (i) s += ",";
        s += params[i].first + "=" + std::to_string(params[i].second);
      }
    }
    return s + "]";
  }

  static MoveLabel parse(const std::string& s) {
    std::size_t pos = 0;
    MoveLabel l = parse_at(s, pos);
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos != s.size()) throw LabelMismatch("trailing junk in move label: " + s);
    return l;
  }

 private:
  static MoveLabel parse_at(const std::string& s, std::size_t& pos) {
    auto skip = [&] {
      while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    };
    skip();
    MoveLabel out;
    while (pos < s.size() && (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
      out.name += s[pos++];
    if (out.name.empty()) throw LabelMismatch("empty move name in label: " + s);
    skip();
    if (pos >= s.size() || s[pos] != '[') return out;  // bare name, no args
    ++pos;
    skip();
    if (pos < s.size() && s[pos] == ']') {
      ++pos;
      return out;
    }
    // composite unless the body reads like a key=value list; children may be
    // bare names (NORM) as well as bracketed labels
    std::size_t probe = pos;
    while (probe < s.size() &&
           (std::isalnum(static_cast<unsigned char>(s[probe])) || s[probe] == '_'))
      ++probe;
    bool comp = probe < s.size() && s[probe] != '=';
    if (comp) {
      for (;;) {
        out.children.push_back(parse_at(s, pos));
        skip();
        if (pos < s.size() && s[pos] == ';') {
          ++pos;
          continue;
        }
        break;
      }
    } else {
      for (;;) {
        skip();
        std::string key;
        while (pos < s.size() &&
               (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
          key += s[pos++];
        skip();
        if (key.empty() || pos >= s.size() || s[pos] != '=')
          throw LabelMismatch("bad parameter in move label: " + s);
        ++pos;
        skip();
        std::size_t used = 0;
        long v = std::stol(s.substr(pos), &used);
        pos += used;
        out.params.push_back({key, v});
        skip();
        if (pos < s.size() && s[pos] == ',') {
          ++pos;
          continue;
        }
        break;
      }
    }
    if (pos >= s.size() || s[pos] != ']') throw LabelMismatch("unbalanced move label: " + s);
    ++pos;
    return out;
  }
};

namespace detail {

// ---- pullback plumbing ----------------------------------------------------

inline PullbackMap identity_pullback(int nitems) {
  PullbackMap m(static_cast<std::size_t>(nitems));
  for (int i = 0; i < nitems; ++i) m[static_cast<std::size_t>(i)] = {{i, 1}};
  return m;
}

// parent->mid composed with mid->child gives parent->child
inline PullbackMap compose_pullback(const PullbackMap& first, const PullbackMap& then) {
  PullbackMap out(first.size());
  for (std::size_t i = 0; i < first.size(); ++i) {
    std::map<int, long> acc;
    for (auto [j, a] : first[i])
      for (auto [k, b] : then[static_cast<std::size_t>(j)]) acc[k] += a * b;
    for (auto [k, v] : acc)
      if (v != 0) out[i].push_back({k, v});
  }
  return out;
}

inline ItemMeasure apply_pullback(const PullbackMap& m, const ItemMeasure& child) {
  ItemMeasure out(m.size(), 0);
  for (std::size_t i = 0; i < m.size(); ++i)
    for (auto [j, c] : m[i]) out[i] += c * child[static_cast<std::size_t>(j)];
  return out;
}

struct Step {
  BandComplex bc;
  PullbackMap pb;
};

// ---- surgery helpers ------------------------------------------------------

inline int add_loop(BandComplex& bc, Word w) {
  bc.base_loops.push_back(std::move(w));
  return static_cast<int>(bc.base_loops.size());  // 1-based letter
}

inline const Base& base_at(const BandComplex& bc, int i, const char* who) {
  if (i < 0 || i >= static_cast<int>(bc.bases.size()))
    throw MoveError(std::string(who) + ": base id out of range");
  return bc.bases[static_cast<std::size_t>(i)];
}

// the coordinate of connection c on the side of base `side` of its band
inline int side_coord(const BandComplex& bc, const BoundaryConnection& c, int side) {
  const Band& bd = bc.bands[static_cast<std::size_t>(c.band)];
  return side == bd.b0 ? c.x : c.y;
}
inline int other_coord(const BandComplex& bc, const BoundaryConnection& c, int side) {
  const Band& bd = bc.bands[static_cast<std::size_t>(c.band)];
  return side == bd.b0 ? c.y : c.x;
}

// removes a band together with its two bases and all its connections; the
// caller must already have rewritten every cell traversal of those
// connections
inline void remove_band_in_place(BandComplex& bc, int band) {
  const Band bd = bc.bands[static_cast<std::size_t>(band)];
  int b0 = bd.b0, b1 = bd.b1;
  std::vector<int> cmap(bc.connections.size(), -1);
  std::vector<BoundaryConnection> nc;
  for (std::size_t i = 0; i < bc.connections.size(); ++i) {
    BoundaryConnection c = bc.connections[i];
    if (c.band == band) continue;
    if (c.band > band) --c.band;
    cmap[i] = static_cast<int>(nc.size());
    nc.push_back(c);
  }
  for (CellAttachment& cell : bc.cells)
    for (CellSegment& s : cell.segments)
      if (auto* t = std::get_if<BandTraversal>(&s)) {
        if (cmap[static_cast<std::size_t>(t->conn)] < 0)
          throw MoveError("remove band: a cell still traverses it");
        t->conn = cmap[static_cast<std::size_t>(t->conn)];
      }
  bc.connections = std::move(nc);
  auto bmap = [&](int i) { return i - (i > b0 ? 1 : 0) - (i > b1 ? 1 : 0); };
  bc.bases.erase(bc.bases.begin() + b1);
  bc.bases.erase(bc.bases.begin() + b0);
  bc.bands.erase(bc.bands.begin() + band);
  for (Base& b : bc.bases) {
    b.dual = bmap(b.dual);
    if (b.band > band) --b.band;
  }
  for (Band& b : bc.bands) {
    b.b0 = bmap(b.b0);
    b.b1 = bmap(b.b1);
  }
}

// splits item h at a fresh interior boundary; returns the pullback
inline PullbackMap split_item(BandComplex& bc, int h) {
  if (h < 0 || h >= bc.nitems) throw MoveError("split: item out of range");
  for (Base& b : bc.bases) {
    if (b.first > h) ++b.first;
    if (b.last >= h) ++b.last;
  }
  auto shift = [&](int b) { return b > h ? b + 1 : b; };
  for (BoundaryConnection& c : bc.connections) {
    c.x = shift(c.x);
    c.y = shift(c.y);
  }
  for (CellAttachment& cell : bc.cells)
    for (CellSegment& s : cell.segments)
      if (auto* p = std::get_if<IntervalPath>(&s)) {
        p->from = shift(p->from);
        p->to = shift(p->to);
      }
  bc.item_anchor.insert(bc.item_anchor.begin() + h, bc.item_anchor[static_cast<std::size_t>(h)]);
  if (!bc.periodic_block.empty())
    bc.periodic_block.insert(bc.periodic_block.begin() + h,
                             bc.periodic_block[static_cast<std::size_t>(h)]);
  ++bc.nitems;
  PullbackMap pb(static_cast<std::size_t>(bc.nitems - 1));
  for (int i = 0; i < bc.nitems - 1; ++i) {
    if (i < h)
      pb[static_cast<std::size_t>(i)] = {{i, 1}};
    else if (i == h)
      pb[static_cast<std::size_t>(i)] = {{h, 1}, {h + 1, 1}};
    else
      pb[static_cast<std::size_t>(i)] = {{i + 1, 1}};
  }
  return pb;
}

// deletes the flagged items; no base may contain any of them.  Returns the
// boundary renumbering.
inline std::vector<int> delete_items(BandComplex& bc, const std::vector<char>& del) {
  std::vector<int> bmap(static_cast<std::size_t>(bc.nboundaries()));
  int removed = 0;
  for (int b = 0; b <= bc.nitems; ++b) {
    bmap[static_cast<std::size_t>(b)] = b - removed;
    if (b < bc.nitems && del[static_cast<std::size_t>(b)]) ++removed;
  }
  for (Base& b : bc.bases) {
    for (int h = b.first; h <= b.last; ++h)
      if (del[static_cast<std::size_t>(h)]) throw MoveError("delete items: base in the way");
    int f = bmap[static_cast<std::size_t>(b.first)];
    int l = bmap[static_cast<std::size_t>(b.last + 1)] - 1;
    b.first = f;
    b.last = l;
  }
  for (BoundaryConnection& c : bc.connections) {
    c.x = bmap[static_cast<std::size_t>(c.x)];
    c.y = bmap[static_cast<std::size_t>(c.y)];
  }
  for (CellAttachment& cell : bc.cells)
    for (CellSegment& s : cell.segments)
      if (auto* p = std::get_if<IntervalPath>(&s)) {
        p->from = bmap[static_cast<std::size_t>(p->from)];
        p->to = bmap[static_cast<std::size_t>(p->to)];
      }
  for (int h = bc.nitems - 1; h >= 0; --h)
    if (del[static_cast<std::size_t>(h)]) {
      bc.item_anchor.erase(bc.item_anchor.begin() + h);
      if (!bc.periodic_block.empty()) bc.periodic_block.erase(bc.periodic_block.begin() + h);
    }
  bc.nitems -= removed;
  return bmap;
}

// Tietze cleanups that never change the group: drop cells whose relator is
// freely trivial, and eliminate a loop generator that occurs exactly once in
// exactly one two-sided bigon cell together with that cell.
inline void scrub_cells(BandComplex& bc) {
  for (bool again = true; again;) {
    again = false;
    for (std::size_t i = 0; i < bc.cells.size(); ++i) {
      if (cell_relator(bc, bc.cells[i]).empty()) {
        bc.cells.erase(bc.cells.begin() + static_cast<long>(i));
        again = true;
        break;
      }
    }
    if (again) continue;
    for (std::size_t i = 0; i < bc.cells.size() && !again; ++i) {
      const CellAttachment& cell = bc.cells[i];
      if (cell.segments.size() != 2) continue;
      const IntervalPath* p = nullptr;
      bool has_trav = false;
      for (const CellSegment& s : cell.segments) {
        if (std::holds_alternative<BandTraversal>(s))
          has_trav = true;
        else
          p = &std::get<IntervalPath>(s);
      }
      if (!has_trav || !p || p->via_loops.size() != 1) continue;
      int loop = std::abs(p->via_loops[0]);
      int uses = 0;
      for (const CellAttachment& c2 : bc.cells)
        for (const CellSegment& s : c2.segments)
          if (auto* q = std::get_if<IntervalPath>(&s))
            for (int l : q->via_loops)
              if (std::abs(l) == loop) ++uses;
      if (uses != 1) continue;
      bc.cells.erase(bc.cells.begin() + static_cast<long>(i));
      bc.base_loops.erase(bc.base_loops.begin() + (loop - 1));
      for (CellAttachment& c2 : bc.cells)
        for (CellSegment& s : c2.segments)
          if (auto* q = std::get_if<IntervalPath>(&s))
            for (int& l : q->via_loops)
              if (std::abs(l) > loop) l += l > 0 ? -1 : 1;
      again = true;
    }
  }
}

// ---- elementary steps -----------------------------------------------------

// delete naked (gamma = 0) items and scrub
inline Step step_normalize(const BandComplex& in) {
  Step st{in, {}};
  std::vector<char> del(static_cast<std::size_t>(in.nitems), 0);
  bool any = false;
  for (int h = 0; h < in.nitems; ++h)
    if (gamma(in, h) == 0) {
      del[static_cast<std::size_t>(h)] = 1;
      any = true;
    }
  PullbackMap pb(static_cast<std::size_t>(in.nitems));
  if (any) {
    int k = 0;
    for (int h = 0; h < in.nitems; ++h)
      if (!del[static_cast<std::size_t>(h)]) pb[static_cast<std::size_t>(h)] = {{k++, 1}};
    delete_items(st.bc, del);
  } else {
    pb = identity_pullback(in.nitems);
  }
  scrub_cells(st.bc);
  st.pb = std::move(pb);
  return st;
}

// cut a band along one marked connection into two bands joined by a bigon
// cell.  The two new band pairs are appended after the surviving bases (left
// piece first), the two new bands after the surviving bands.
inline Step step_et1(const BandComplex& in, int ci) {
  if (ci < 0 || ci >= static_cast<int>(in.connections.size()))
    throw MoveError("cut: connection id out of range");
  const BoundaryConnection cut = in.connections[static_cast<std::size_t>(ci)];
  int band = cut.band;
  const Band bd = in.bands[static_cast<std::size_t>(band)];
  const Base m0 = in.bases[static_cast<std::size_t>(bd.b0)];
  const Base m1 = in.bases[static_cast<std::size_t>(bd.b1)];
  bool pres = m0.orientation > 0;
  int x = cut.x, y = cut.y;
  if (x <= m0.alpha() || x >= m0.beta()) throw MoveError("cut: at a band edge");
  if (y <= m1.alpha() || y >= m1.beta()) throw MoveError("cut: collapses a base");

  // piece intervals: A keeps the alpha side of the b0 base
  int a0f = m0.first, a0l = x - 1, b0f = x, b0l = m0.last;
  int a1f, a1l, b1f, b1l;
  if (pres) {
    a1f = m1.first;
    a1l = y - 1;
    b1f = y;
    b1l = m1.last;
  } else {
    a1f = y;
    a1l = m1.last;
    b1f = m1.first;
    b1l = y - 1;
  }

  BandComplex out = in;
  // drop the old pair, append piece pairs
  auto new_base = [&](int i) {
    return i - (i > bd.b0 ? 1 : 0) - (i > bd.b1 ? 1 : 0);
  };
  out.bases.erase(out.bases.begin() + std::max(bd.b0, bd.b1));
  out.bases.erase(out.bases.begin() + std::min(bd.b0, bd.b1));
  out.bands.erase(out.bands.begin() + band);
  for (Base& b : out.bases) {
    b.dual = new_base(b.dual);
    if (b.band > band) --b.band;
  }
  for (Band& b : out.bands) {
    b.b0 = new_base(b.b0);
    b.b1 = new_base(b.b1);
  }
  int nA0 = static_cast<int>(out.bases.size());
  int nA1 = nA0 + 1, nB0 = nA0 + 2, nB1 = nA0 + 3;
  int bandA = static_cast<int>(out.bands.size());
  int bandB = bandA + 1;
  out.bases.push_back(Base{a0f, a0l, m0.orientation, nA1, bandA});
  out.bases.push_back(Base{a1f, a1l, m0.orientation, nA0, bandA});
  out.bases.push_back(Base{b0f, b0l, m0.orientation, nB1, bandB});
  out.bases.push_back(Base{b1f, b1l, m0.orientation, nB0, bandB});
  out.bands.push_back(Band{nA0, nA1, bd.left_label, bd.spanning});
  out.bands.push_back(Band{nB0, nB1, bd.left_label, bd.spanning});

  // connections: redistribute by position, fold the cut line into B's left
  // edge; piece edge connections appended fresh
  std::vector<int> cmap(in.connections.size(), -1);
  std::vector<BoundaryConnection> nc;
  std::vector<std::size_t> at_cut;
  for (std::size_t i = 0; i < in.connections.size(); ++i) {
    BoundaryConnection c = in.connections[i];
    if (c.band != band) {
      if (c.band > band) --c.band;
      cmap[i] = static_cast<int>(nc.size());
      nc.push_back(c);
      continue;
    }
    if (c.x == x) {
      at_cut.push_back(i);  // same x forces same y; folds into the cut edge
      continue;
    }
    c.band = c.x < x ? bandA : bandB;
    cmap[i] = static_cast<int>(nc.size());
    nc.push_back(c);
  }
  int cA_right = static_cast<int>(nc.size());
  nc.push_back(BoundaryConnection{bandA, x, y, ConnSource::BandEdge});
  int cB_left = static_cast<int>(nc.size());
  nc.push_back(BoundaryConnection{bandB, x, y, ConnSource::BandEdge});
  for (std::size_t i : at_cut) cmap[i] = cB_left;
  out.connections = std::move(nc);
  for (CellAttachment& cell : out.cells)
    for (CellSegment& s : cell.segments)
      if (auto* t = std::get_if<BandTraversal>(&s)) t->conn = cmap[static_cast<std::size_t>(t->conn)];
  out.cells.push_back(
      CellAttachment{{BandTraversal{cA_right, 1}, BandTraversal{cB_left, -1}}});
  return Step{std::move(out), identity_pullback(in.nitems)};
}

// transfer base lam through the band of mu onto the dual side; every
// boundary of lam must be tied through mu's band
inline Step step_et2(const BandComplex& in, int mu, int lam) {
  const Base& m = base_at(in, mu, "transfer");
  const Base& l = base_at(in, lam, "transfer");
  if (lam == mu || lam == m.dual) throw MoveError("transfer: base through its own band");
  const Band& mbd = in.bands[static_cast<std::size_t>(m.band)];
  const Band& lbd = in.bands[static_cast<std::size_t>(l.band)];
  if (l.band == m.band) throw MoveError("transfer: base through its own band");

  // tie table over [alpha(lam)..beta(lam)]
  std::map<int, int> tie;  // mu-side coord -> dual-side coord
  std::map<int, int> tie_conn;
  for (std::size_t i = 0; i < in.connections.size(); ++i) {
    const BoundaryConnection& c = in.connections[i];
    if (c.band != m.band) continue;
    int p = side_coord(in, c, mu), z = other_coord(in, c, mu);
    tie[p] = z;
    tie_conn[p] = static_cast<int>(i);
  }
  for (int b = l.alpha(); b <= l.beta(); ++b)
    if (!tie.count(b))
      throw MissingBoundaryConnections("transfer: boundary " + std::to_string(b) +
                                       " of the base is not tied");
  int za = tie[l.alpha()], zb = tie[l.beta()];
  if (za == zb) throw MoveError("transfer: degenerate, base crushed to a point");

  int s = mu == mbd.b0 ? 1 : -1;  // traversal direction running mu -> dual
  bool lam_is_b0 = lam == lbd.b0;

  BandComplex out = in;
  // bridge cells first, while old coordinates are still in place
  for (CellAttachment& cell : out.cells) {
    std::vector<CellSegment> ns;
    for (const CellSegment& seg : cell.segments) {
      const auto* t = std::get_if<BandTraversal>(&seg);
      if (!t || in.connections[static_cast<std::size_t>(t->conn)].band != l.band) {
        ns.push_back(seg);
        continue;
      }
      const BoundaryConnection& c = in.connections[static_cast<std::size_t>(t->conn)];
      int p = lam_is_b0 ? c.x : c.y;
      bool starts_on_lam = (t->dir > 0) == lam_is_b0;
      if (starts_on_lam) ns.push_back(BandTraversal{tie_conn[p], s});
      ns.push_back(*t);
      if (!starts_on_lam) ns.push_back(BandTraversal{tie_conn[p], -s});
    }
    cell.segments = std::move(ns);
  }
  // move lam's side of every connection of its band
  for (BoundaryConnection& c : out.connections) {
    if (c.band != l.band) continue;
    if (lam_is_b0)
      c.x = tie[c.x];
    else
      c.y = tie[c.y];
  }
  // new interval and orientation
  Base& nl = out.bases[static_cast<std::size_t>(lam)];
  if (m.orientation > 0) {
    nl.first = za;
    nl.last = zb - 1;
  } else {
    nl.first = zb;
    nl.last = za - 1;
  }
  int nor = l.orientation * m.orientation;
  out.bases[static_cast<std::size_t>(lam)].orientation = nor;
  out.bases[static_cast<std::size_t>(l.dual)].orientation = nor;
  // label: conjugating the crossing by the detour through mu's band
  Word w = mu == mbd.b0 ? mbd.left_label : inverse(mbd.left_label);
  Word& lab = out.bands[static_cast<std::size_t>(l.band)].left_label;
  lab = lam_is_b0 ? free_reduce(concat(inverse(w), lab)) : free_reduce(concat(lab, w));
  // the tie map sends the old edge lines exactly onto the new band edges
  // (swapping left and right when mu reverses), so the moved connections
  // already are the edge connections
  return Step{std::move(out), identity_pullback(in.nitems)};
}

// remove a matched (coincident, orientation-preserving) band whose crossing
// class the oracle certified trivial; traversals become interval paths
inline Step step_et3(const BandComplex& in, int mu) {
  const Base& m = base_at(in, mu, "matched removal");
  const Base& d = in.bases[static_cast<std::size_t>(m.dual)];
  if (m.first != d.first || m.last != d.last) throw MoveError("matched removal: bases differ");
  if (m.orientation < 0) throw MoveError("matched removal: reversing pair");
  BandComplex out = in;
  for (CellAttachment& cell : out.cells)
    for (CellSegment& seg : cell.segments)
      if (auto* t = std::get_if<BandTraversal>(&seg)) {
        const BoundaryConnection& c = in.connections[static_cast<std::size_t>(t->conn)];
        if (c.band != m.band) continue;
        seg = t->dir > 0 ? IntervalPath{c.x, c.y, {}} : IntervalPath{c.y, c.x, {}};
      }
  remove_band_in_place(out, m.band);
  scrub_cells(out);
  return Step{std::move(out), identity_pullback(in.nitems)};
}

// collapse a lonely band: its crossing class survives as a fresh loop, every
// traversal becomes a basepoint-routed path carrying that loop, and the
// stretch is deleted.  This is a plain renaming of the band generator, so the
// group is untouched unconditionally.
inline Step step_et4(const BandComplex& in, int mu) {
  const Base m = base_at(in, mu, "collapse");
  for (std::size_t i = 0; i < in.bases.size(); ++i) {
    if (static_cast<int>(i) == mu) continue;
    const Base& v = in.bases[i];
    if (v.first <= m.last && m.first <= v.last)
      throw NotLonely("collapse: another base meets the stretch");
  }
  const Band& bd = in.bands[static_cast<std::size_t>(m.band)];

  BandComplex out = in;
  int L = add_loop(out, bd.left_label);
  for (CellAttachment& cell : out.cells)
    for (CellSegment& seg : cell.segments)
      if (auto* t = std::get_if<BandTraversal>(&seg)) {
        const BoundaryConnection& c = in.connections[static_cast<std::size_t>(t->conn)];
        if (c.band != m.band) continue;
        // same endpoints; the crossing content moves into the via word
        seg = t->dir > 0 ? IntervalPath{c.x, c.y, Word{L}}
                         : IntervalPath{c.y, c.x, Word{-L}};
      }
  remove_band_in_place(out, m.band);
  std::vector<char> del(static_cast<std::size_t>(out.nitems), 0);
  for (int h = m.first; h <= m.last; ++h) del[static_cast<std::size_t>(h)] = 1;
  auto bmap = delete_items(out, del);

  // pullback: ties of the collapsed band distribute dual-side lengths over
  // the stretch; the first item after each tie takes the whole gap
  const Base& dualb = in.bases[static_cast<std::size_t>(m.dual)];
  std::map<int, int> tie;
  for (const BoundaryConnection& c : in.connections)
    if (c.band == m.band) tie[side_coord(in, c, mu)] = other_coord(in, c, mu);
  std::vector<std::pair<int, int>> tv(tie.begin(), tie.end());
  auto child_item = [&](int old_item) {
    // items of the dual base survive deletion untouched by position shifts
    // left of them only
    int shift = 0;
    for (int h = m.first; h <= m.last; ++h)
      if (h < old_item) ++shift;
    return old_item - shift;
  };
  (void)bmap;
  PullbackMap pb(static_cast<std::size_t>(in.nitems));
  for (int i = 0; i < in.nitems; ++i) {
    if (i < m.first || i > m.last) {
      pb[static_cast<std::size_t>(i)] = {{child_item(i), 1}};
      continue;
    }
    // deleted: nonzero only at tie positions
    for (std::size_t k = 0; k + 1 < tv.size(); ++k) {
      if (tv[k].first != i) continue;
      int y0 = tv[k].second, y1 = tv[k + 1].second;
      int lo = std::min(y0, y1), hi = std::max(y0, y1);
      (void)dualb;
      for (int h = lo; h < hi; ++h)
        pb[static_cast<std::size_t>(i)].push_back({child_item(h), 1});
      break;
    }
  }
  scrub_cells(out);
  return Step{std::move(out), pb};
}

struct TiePlacement {
  bool split = false;
  int pos = 0;  // boundary on the dual side, or the item to split
};

// deterministic enumeration of the combinatorially distinct landing spots of
// a new tie at boundary x of base mu; empty means x is already tied
inline std::vector<TiePlacement> et5_placements(const BandComplex& bc, int mu, int x,
                                                bool* already = nullptr) {
  const Base& m = base_at(bc, mu, "tie");
  if (x < m.alpha() || x > m.beta()) throw MoveError("tie: boundary outside the base");
  const Base& d = bc.bases[static_cast<std::size_t>(m.dual)];
  bool pres = m.orientation > 0;
  int lo = d.alpha(), hi = d.beta();
  if (already) *already = false;
  for (const BoundaryConnection& c : bc.connections) {
    if (c.band != m.band) continue;
    int p = side_coord(bc, c, mu), z = other_coord(bc, c, mu);
    if (p == x) {
      if (already) *already = true;
      return {};
    }
    if ((p < x) == pres)
      lo = std::max(lo, z);
    else
      hi = std::min(hi, z);
  }
  if (lo > hi) throw MoveError("tie: crossing connections");
  std::vector<TiePlacement> out;
  if (lo == hi) {
    out.push_back({false, lo});  // pinched: the only landing spot
    return out;
  }
  // ascending along the dual side: split of item b, then boundary b+1
  for (int b = lo; b < hi; ++b) {
    out.push_back({true, b});
    if (b + 1 < hi) out.push_back({false, b + 1});
  }
  return out;
}

inline Step step_et5(const BandComplex& in, int mu, int x, int placement) {
  bool already = false;
  auto pl = et5_placements(in, mu, x, &already);
  if (already) {
    if (placement != 0) throw MoveError("tie: boundary already tied");
    return Step{in, identity_pullback(in.nitems)};
  }
  if (placement < 0 || placement >= static_cast<int>(pl.size()))
    throw MoveError("tie: placement index out of range");
  const TiePlacement t = pl[static_cast<std::size_t>(placement)];
  BandComplex out = in;
  PullbackMap pb = identity_pullback(in.nitems);
  int z = t.pos, xs = x;
  if (t.split) {
    pb = split_item(out, t.pos);
    z = t.pos + 1;
    if (x > t.pos) ++xs;
  }
  const Base& m = out.bases[static_cast<std::size_t>(mu)];
  const Band& bd = out.bands[static_cast<std::size_t>(m.band)];
  out.connections.push_back(mu == bd.b0
                                ? BoundaryConnection{m.band, xs, z, ConnSource::Introduced}
                                : BoundaryConnection{m.band, z, xs, ConnSource::Introduced});
  return Step{std::move(out), pb};
}

// hang a fresh spanning band from the segment [f..l] to new items appended
// on the right
inline Step step_et6(const BandComplex& in, int f, int l) {
  if (f < 0 || l < f || l >= in.nitems) throw MoveError("hanging band: bad segment");
  BandComplex out = in;
  int k = l - f + 1, n0 = out.nitems;
  out.nitems += k;
  for (int i = 0; i < k; ++i) {
    out.item_anchor.push_back({});
    if (!out.periodic_block.empty()) out.periodic_block.push_back(-1);
  }
  make_band(out, f, l, n0, n0 + k - 1, 1, {});
  out.bands.back().spanning = true;
  return Step{std::move(out), identity_pullback(in.nitems)};
}

// merge band of lam onto band of mu across coincident bases: transfer then
// collapse
inline Step step_et7(const BandComplex& in, int mu, int lam) {
  const Base& m = base_at(in, mu, "merge");
  const Base& l = base_at(in, lam, "merge");
  if (m.band == l.band) throw PreconditionFailed("merge: same band");
  if (m.first != l.first || m.last != l.last)
    throw PreconditionFailed("merge: bases not coincident");
  for (std::size_t i = 0; i < in.bases.size(); ++i) {
    if (static_cast<int>(i) == mu || static_cast<int>(i) == lam) continue;
    const Base& v = in.bases[i];
    if (v.first <= m.last && m.first <= v.last)
      throw PreconditionFailed("merge: a third base meets the stretch");
  }
  std::set<int> tied;
  for (const BoundaryConnection& c : in.connections)
    if (c.band == m.band) tied.insert(side_coord(in, c, mu));
  for (int b = m.alpha(); b <= m.beta(); ++b)
    if (!tied.count(b))
      throw PreconditionFailed("merge: boundary " + std::to_string(b) + " untied");
  Step a = step_et2(in, mu, lam);
  Step b = step_et4(a.bc, mu);
  return Step{std::move(b.bc), compose_pullback(a.pb, b.pb)};
}

// widen an orientation-preserving pair over the covered segment [jf..jl]
inline Step step_widen(const BandComplex& in, int lam, int jf, int jl) {
  const Base& l = base_at(in, lam, "widen");
  if (l.orientation < 0) throw MoveError("widen: reversing pair");
  const Base& d = in.bases[static_cast<std::size_t>(l.dual)];
  if (jf < 0 || jl >= in.nitems || jf > std::min(l.first, d.first) ||
      jl < std::max(l.last, d.last))
    throw MoveError("widen: segment must contain both bases");
  for (int h = jf; h <= jl; ++h)
    if (gamma(in, h) == 0) throw MoveError("widen: segment not covered");
  BandComplex out = in;
  int left = l.alpha() <= d.alpha() ? lam : l.dual;
  int right = left == lam ? l.dual : lam;
  out.bases[static_cast<std::size_t>(left)].first = jf;
  out.bases[static_cast<std::size_t>(right)].last = jl;
  auto [el, er] = edge_connections(out, l.band);
  int seen = 0;
  for (BoundaryConnection& c : out.connections)
    if (c.band == l.band && c.source == ConnSource::BandEdge) c = seen++ ? er : el;
  if (seen != 2) throw MoveError("widen: band lost its edges");
  return Step{std::move(out), identity_pullback(in.nitems)};
}

// zip every traversal of band `victim` into |k| crossings of band `target`,
// routed through the target's left edge; k is the exponent of the victim's
// crossing class in terms of the target's, adjusted per side orientation
inline void zip_band(BandComplex& bc, int victim, int target, long k) {
  if (k == 0) throw MoveError("zip: zero exponent");
  const Band& vb = bc.bands[static_cast<std::size_t>(victim)];
  int edge = -1;
  for (std::size_t i = 0; i < bc.connections.size(); ++i) {
    const BoundaryConnection& c = bc.connections[i];
    if (c.band == target && c.source == ConnSource::BandEdge) {
      edge = static_cast<int>(i);
      break;
    }
  }
  if (edge < 0) throw MoveError("zip: target band has no edge connection");
  const BoundaryConnection ec = bc.connections[static_cast<std::size_t>(edge)];
  (void)vb;
  for (CellAttachment& cell : bc.cells) {
    std::vector<CellSegment> ns;
    for (const CellSegment& seg : cell.segments) {
      const auto* t = std::get_if<BandTraversal>(&seg);
      if (!t || bc.connections[static_cast<std::size_t>(t->conn)].band != victim) {
        ns.push_back(seg);
        continue;
      }
      const BoundaryConnection& c = bc.connections[static_cast<std::size_t>(t->conn)];
      int from = t->dir > 0 ? c.x : c.y;
      int to = t->dir > 0 ? c.y : c.x;
      int dir = t->dir * (k > 0 ? 1 : -1);
      int a = dir > 0 ? ec.x : ec.y, b = dir > 0 ? ec.y : ec.x;
      int cur = from;
      for (long i = 0; i < std::labs(k); ++i) {
        if (cur != a) ns.push_back(IntervalPath{cur, a, {}});
        ns.push_back(BandTraversal{edge, dir});
        cur = b;
      }
      if (cur != to) ns.push_back(IntervalPath{cur, to, {}});
    }
    cell.segments = std::move(ns);
  }
}

// merge the overlapping pair of mu with the pair of lam: both crossing
// classes are powers u^n (lam) and u^m (mu) of a common root in the parent,
// so both bands zip onto a band for u^gcd and disappear
inline Step step_et8(const BandComplex& in, int mu, int lam, long n, long m) {
  const Base& mb = base_at(in, mu, "merger");
  const Base& lb = base_at(in, lam, "merger");
  if (mb.band == lb.band) throw MoveError("merger: same band");
  if (n == 0 || m == 0) throw MoveError("merger: trivial exponent");
  auto od = overlapping_data(in, mu);
  if (!od.overlapping) throw MoveError("merger: carrier pair not overlapping");
  int jf = od.j_first, jl = od.j_last;
  const Band& mband = in.bands[static_cast<std::size_t>(mb.band)];
  const Band& lband = in.bands[static_cast<std::size_t>(lb.band)];
  int smu = mu == mband.b0 ? 1 : -1;
  int slam = lam == lband.b0 ? 1 : -1;
  long d = std::gcd(std::labs(n), std::labs(m));

  BandComplex out = in;
  int vb_mu = mb.band, vb_lam = lb.band;
  if (d == std::labs(m)) {
    // lam's class is a power of mu's: zip lam away
    zip_band(out, vb_lam, vb_mu, (n / m) * smu * slam);
    remove_band_in_place(out, vb_lam);
  } else if (d == std::labs(n)) {
    zip_band(out, vb_mu, vb_lam, (m / n) * smu * slam);
    remove_band_in_place(out, vb_mu);
  } else {
    // general: introduce the band of the common power u^d over the periodic
    // segment, record the defining relation as a cell, zip both bands onto
    // it; the relation cell's relator then reduces to nothing and is
    // scrubbed
    long t_mu = od.tr_items;
    long t_lam = overlapping_data(in, lam).tr_items;
    int sigma = static_cast<int>(t_lam > 0 ? std::gcd(t_mu, t_lam) : t_mu);
    if (sigma <= 0 || jf + sigma > jl) throw MoveError("merger: degenerate period");
    auto seq = gcd_sequence(std::labs(n), std::labs(m));
    long p0 = seq.back().first, q0 = seq.back().second;
    long P = n > 0 ? p0 : -p0;
    long Q = m > 0 ? q0 : -q0;
    Word wl = slam > 0 ? lband.left_label : inverse(lband.left_label);
    Word wm = smu > 0 ? mband.left_label : inverse(mband.left_label);
    Word wd = free_reduce(concat(power(wl, P), power(wm, -Q)));
    int delta = make_band(out, jf, jl - sigma, jf + sigma, jl, 1, wd);
    int e_lam = -1, e_mu = -1, e_delta = -1;
    for (std::size_t i = 0; i < out.connections.size(); ++i) {
      const BoundaryConnection& c = out.connections[i];
      if (c.source != ConnSource::BandEdge) continue;
      if (c.band == vb_lam && e_lam < 0) e_lam = static_cast<int>(i);
      if (c.band == vb_mu && e_mu < 0) e_mu = static_cast<int>(i);
      if (c.band == delta && e_delta < 0) e_delta = static_cast<int>(i);
    }
    if (e_lam < 0 || e_mu < 0 || e_delta < 0) throw MoveError("merger: missing edges");
    // relation cell gamma_lam^P gamma_mu^-Q gamma_delta^-1, bridged by
    // whisker paths
    std::vector<CellSegment> segs;
    auto add_travs = [&](int edge, int dir, long count) {
      const BoundaryConnection& ec = out.connections[static_cast<std::size_t>(edge)];
      int a = dir > 0 ? ec.x : ec.y, b = dir > 0 ? ec.y : ec.x;
      for (long i = 0; i < count; ++i) {
        if (!segs.empty()) {
          int prev_end = std::visit(
              [&](const auto& sg) -> int {
                using T = std::decay_t<decltype(sg)>;
                if constexpr (std::is_same_v<T, BandTraversal>) {
                  const BoundaryConnection& pc =
                      out.connections[static_cast<std::size_t>(sg.conn)];
                  return sg.dir > 0 ? pc.y : pc.x;
                } else {
                  return sg.to;
                }
              },
              segs.back());
          if (prev_end != a) segs.push_back(IntervalPath{prev_end, a, {}});
        }
        segs.push_back(BandTraversal{edge, dir});
        (void)b;
      }
    };
    add_travs(e_lam, slam * (P > 0 ? 1 : -1), std::labs(P));
    add_travs(e_mu, -smu * (Q > 0 ? 1 : -1), std::labs(Q));
    add_travs(e_delta, -1, 1);
    // close the cycle
    const BoundaryConnection& lc = out.connections[static_cast<std::size_t>(
        std::get<BandTraversal>(segs.back()).conn)];
    int last_end = std::get<BandTraversal>(segs.back()).dir > 0 ? lc.y : lc.x;
    const BoundaryConnection& fc = out.connections[static_cast<std::size_t>(
        std::get<BandTraversal>(segs.front()).conn)];
    int first_start = std::get<BandTraversal>(segs.front()).dir > 0 ? fc.x : fc.y;
    if (last_end != first_start) segs.push_back(IntervalPath{last_end, first_start, {}});
    out.cells.push_back(CellAttachment{std::move(segs)});
    // zip both onto delta: gamma_lam = gamma_delta^(n/d), gamma_mu likewise
    zip_band(out, vb_lam, delta, (n / d) * slam);
    zip_band(out, vb_mu, delta, (m / d) * smu);
    int hi = std::max(vb_lam, vb_mu), lo2 = std::min(vb_lam, vb_mu);
    remove_band_in_place(out, hi);
    remove_band_in_place(out, lo2);
  }
  scrub_cells(out);
  return Step{std::move(out), identity_pullback(in.nitems)};
}

// set both bases of mu's band to explicit spans (extension only)
inline Step step_widen2(const BandComplex& in, int mu, int f0, int l0, int f1, int l1) {
  const Base& m = base_at(in, mu, "widen2");
  const Band& bd = in.bands[static_cast<std::size_t>(m.band)];
  if (m.orientation < 0) throw MoveError("widen2: reversing pair");
  const Base& b0 = in.bases[static_cast<std::size_t>(bd.b0)];
  const Base& b1 = in.bases[static_cast<std::size_t>(bd.b1)];
  if (f0 > b0.first || l0 < b0.last || f1 > b1.first || l1 < b1.last)
    throw MoveError("widen2: not an extension");
  if (f0 < 0 || l1 >= in.nitems || l0 >= in.nitems || f1 < 0)
    throw MoveError("widen2: out of range");
  BandComplex out = in;
  out.bases[static_cast<std::size_t>(bd.b0)].first = f0;
  out.bases[static_cast<std::size_t>(bd.b0)].last = l0;
  out.bases[static_cast<std::size_t>(bd.b1)].first = f1;
  out.bases[static_cast<std::size_t>(bd.b1)].last = l1;
  auto [el, er] = edge_connections(out, m.band);
  int seen = 0;
  for (BoundaryConnection& c : out.connections)
    if (c.band == m.band && c.source == ConnSource::BandEdge) c = seen++ ? er : el;
  if (seen != 2) throw MoveError("widen2: band lost its edges");
  return Step{std::move(out), identity_pullback(in.nitems)};
}

// ---- replay ---------------------------------------------------------------

inline Step replay_step(const BandComplex& bc, const MoveLabel& l) {
  if (l.composite()) {
    Step acc{bc, identity_pullback(bc.nitems)};
    for (const MoveLabel& c : l.children) {
      Step s = replay_step(acc.bc, c);
      acc.pb = compose_pullback(acc.pb, s.pb);
      acc.bc = std::move(s.bc);
    }
    return acc;
  }
  const std::string& n = l.name;
  if (n == "NORM") return step_normalize(bc);
  if (n == "ET1") return step_et1(bc, static_cast<int>(l.get("c")));
  if (n == "ET2")
    return step_et2(bc, static_cast<int>(l.get("mu")), static_cast<int>(l.get("lam")));
  if (n == "ET3") return step_et3(bc, static_cast<int>(l.get("mu")));
  if (n == "ET4") return step_et4(bc, static_cast<int>(l.get("mu")));
  if (n == "ET5")
    return step_et5(bc, static_cast<int>(l.get("mu")), static_cast<int>(l.get("x")),
                    static_cast<int>(l.get("placement")));
  if (n == "ET6") return step_et6(bc, static_cast<int>(l.get("f")), static_cast<int>(l.get("l")));
  if (n == "ET7")
    return step_et7(bc, static_cast<int>(l.get("mu")), static_cast<int>(l.get("lam")));
  if (n == "WID")
    return step_widen(bc, static_cast<int>(l.get("lam")), static_cast<int>(l.get("jf")),
                      static_cast<int>(l.get("jl")));
  if (n == "WID2")
    return step_widen2(bc, static_cast<int>(l.get("mu")), static_cast<int>(l.get("f0")),
                       static_cast<int>(l.get("l0")), static_cast<int>(l.get("f1")),
                       static_cast<int>(l.get("l1")));
  if (n == "ET8")
    return step_et8(bc, static_cast<int>(l.get("mu")), static_cast<int>(l.get("lam")),
                    l.get("n"), l.get("m"));
  throw LabelMismatch("unknown move label " + n);
}

// ---- composite bookkeeping ------------------------------------------------

struct ResourceLimit : MoveError {
  using MoveError::MoveError;
};

struct Branch {
  BandComplex bc;
  std::vector<MoveLabel> steps;
};

inline MoveLabel mk(const char* name,
                    std::initializer_list<std::pair<const char*, long>> ps = {}) {
  MoveLabel l;
  l.name = name;
  for (const auto& [k, v] : ps) l.params.push_back({k, v});
  return l;
}

constexpr std::size_t kBranchCap = 4096;
constexpr int kTieRoundCap = 64;

// tie boundary c (re-resolved per branch) of base mu, branching over the
// distinct landing spots; returns branches paired with the connection index
inline std::vector<std::pair<Branch, int>> expand_tie_at(
    std::vector<Branch> in, int mu, const std::function<int(const BandComplex&)>& c_of) {
  std::vector<std::pair<Branch, int>> out;
  for (Branch& br : in) {
    int c = c_of(br.bc);
    bool already = false;
    auto pl = et5_placements(br.bc, mu, c, &already);
    if (already) {
      int idx = -1;
      const Base& m = base_at(br.bc, mu, "tie");
      for (std::size_t i = 0; i < br.bc.connections.size(); ++i)
        if (br.bc.connections[i].band == m.band &&
            side_coord(br.bc, br.bc.connections[i], mu) == c)
          idx = static_cast<int>(i);
      br.steps.push_back(mk("ET5", {{"mu", mu}, {"x", c}, {"placement", 0}}));
      out.push_back({std::move(br), idx});
      continue;
    }
    for (std::size_t k = 0; k < pl.size(); ++k) {
      Branch nb = br;
      Step st = step_et5(nb.bc, mu, c, static_cast<int>(k));
      nb.bc = std::move(st.bc);
      nb.steps.push_back(mk("ET5", {{"mu", mu}, {"x", c}, {"placement", static_cast<long>(k)}}));
      int conn = static_cast<int>(nb.bc.connections.size()) - 1;
      out.push_back({std::move(nb), conn});
      if (out.size() > kBranchCap) throw ResourceLimit("tie branching exceeded cap");
    }
  }
  return out;
}

// tie every boundary of the (re-resolved) range of base nu through the band
// of mu, branching
inline std::vector<Branch> expand_ties_over(std::vector<Branch> in, int mu, int nu) {
  std::vector<Branch> done;
  std::vector<Branch> work = std::move(in);
  for (int round = 0; !work.empty(); ++round) {
    if (round > kTieRoundCap) throw ResourceLimit("tie rounds exceeded cap");
    std::vector<Branch> next;
    for (Branch& br : work) {
      const Base& m = base_at(br.bc, mu, "tie range");
      const Base& v = base_at(br.bc, nu, "tie range");
      std::set<int> tied;
      for (const BoundaryConnection& c : br.bc.connections)
        if (c.band == m.band) tied.insert(side_coord(br.bc, c, mu));
      int missing = -1;
      for (int b = v.alpha(); b <= v.beta(); ++b)
        if (!tied.count(b)) {
          missing = b;
          break;
        }
      if (missing < 0) {
        done.push_back(std::move(br));
        continue;
      }
      auto expanded = expand_tie_at({std::move(br)}, mu, [missing](const BandComplex&) {
        return missing;
      });
      for (auto& [nb, conn] : expanded) {
        (void)conn;
        next.push_back(std::move(nb));
      }
      if (done.size() + next.size() > kBranchCap)
        throw ResourceLimit("tie branching exceeded cap");
    }
    work = std::move(next);
  }
  return done;
}

inline std::vector<MoveOutcome> finish_branches(std::vector<Branch>& branches,
                                                const char* wrapper) {
  std::vector<MoveOutcome> out;
  std::set<std::string> seen;
  for (Branch& br : branches) {
    if (!seen.insert(to_text(br.bc)).second) continue;
    MoveLabel l = mk(wrapper);
    l.children = std::move(br.steps);
    validate_band_complex(br.bc);
    out.push_back(MoveOutcome{std::move(br.bc), l.str()});
  }
  return out;
}

// matched pairs: coincident orientation-preserving pairs, lowest base id
inline int find_matched(const BandComplex& bc) {
  for (std::size_t i = 0; i < bc.bases.size(); ++i) {
    const Base& b = bc.bases[i];
    if (static_cast<int>(i) > b.dual) continue;
    const Base& d = bc.bases[static_cast<std::size_t>(b.dual)];
    if (b.orientation > 0 && b.first == d.first && b.last == d.last)
      return static_cast<int>(i);
  }
  return -1;
}

}  // namespace detail

// ---- public elementary moves ---------------------------------------------

inline BandComplex et1_cut(const BandComplex& bc, int conn) {
  BandComplex out = detail::step_et1(bc, conn).bc;
  validate_band_complex(out);
  return out;
}

inline BandComplex et2_transfer(const BandComplex& bc, int mu, int lam) {
  BandComplex out = detail::step_et2(bc, mu, lam).bc;
  validate_band_complex(out);
  return out;
}

inline MoveResult et3_remove_matched(const BandComplex& bc, int mu, const OracleRef& o) {
  const Base& m = detail::base_at(bc, mu, "matched removal");
  const Base& d = bc.bases[static_cast<std::size_t>(m.dual)];
  if (m.first != d.first || m.last != d.last || m.orientation < 0)
    throw MoveError("matched removal: pair is not matched");
  const Word& core = bc.bands[static_cast<std::size_t>(m.band)].left_label;
  Truth t = o->is_trivial(core);
  if (t == Truth::False)
    return {MoveStatus::Unsuitable, {}, "matched pair carries a nontrivial annulus"};
  if (t == Truth::Unknown)
    return {MoveStatus::OracleUnknown, {}, "oracle could not settle the annulus core"};
  detail::Step st = detail::step_et3(bc, mu);
  validate_band_complex(st.bc);
  MoveLabel l = detail::mk("ET3", {{"mu", mu}});
  return {MoveStatus::Ok, {MoveOutcome{std::move(st.bc), l.str()}}, ""};
}

inline BandComplex et4_remove_lonely(const BandComplex& bc, int mu) {
  BandComplex out = detail::step_et4(bc, mu).bc;
  validate_band_complex(out);
  return out;
}

inline MoveResult et5_introduce(const BandComplex& bc, int mu, int x) {
  bool already = false;
  auto pl = detail::et5_placements(bc, mu, x, &already);
  MoveResult res;
  if (already) {
    MoveLabel l = detail::mk("ET5", {{"mu", mu}, {"x", x}, {"placement", 0}});
    res.outcomes.push_back(MoveOutcome{bc, l.str()});
    return res;
  }
  for (std::size_t k = 0; k < pl.size(); ++k) {
    detail::Step st = detail::step_et5(bc, mu, x, static_cast<int>(k));
    validate_band_complex(st.bc);
    MoveLabel l =
        detail::mk("ET5", {{"mu", mu}, {"x", x}, {"placement", static_cast<long>(k)}});
    res.outcomes.push_back(MoveOutcome{std::move(st.bc), l.str()});
  }
  return res;
}

inline BandComplex et6_hanging_band(const BandComplex& bc, std::pair<int, int> seg) {
  BandComplex out = detail::step_et6(bc, seg.first, seg.second).bc;
  validate_band_complex(out);
  return out;
}

inline BandComplex et7_merge(const BandComplex& bc, int mu, int lam) {
  BandComplex out = detail::step_et7(bc, mu, lam).bc;
  validate_band_complex(out);
  return out;
}

inline BandComplex widen_band(const BandComplex& bc, int lam, std::pair<int, int> seg) {
  BandComplex out = detail::step_widen(bc, lam, seg.first, seg.second).bc;
  validate_band_complex(out);
  return out;
}

inline BandComplex normalize_complex(const BandComplex& bc) {
  BandComplex out = detail::step_normalize(bc).bc;
  validate_band_complex(out);
  return out;
}

// replays a recorded move label on the parent and transports a measure on
// the child back to the parent
inline ItemMeasure pull_back_measure(const BandComplex& parent, const BandComplex& child,
                                     const std::string& label, const ItemMeasure& m_child) {
  if (static_cast<int>(m_child.size()) != child.nitems)
    throw std::invalid_argument("pull back: measure size does not match the child");
  detail::Step st = detail::replay_step(parent, MoveLabel::parse(label));
  if (canonical_form(st.bc) != canonical_form(child))
    throw LabelMismatch("replayed label does not reproduce the child complex");
  return detail::apply_pullback(st.pb, m_child);
}

// ---- periodic merger ------------------------------------------------------

namespace detail {

// tubular value of a base's crossing class under trivial anchors
inline Word crossing_word(const BandComplex& bc, int base) {
  const Base& b = bc.bases[static_cast<std::size_t>(base)];
  const Band& bd = bc.bands[static_cast<std::size_t>(b.band)];
  return base == bd.b0 ? bd.left_label : inverse(bd.left_label);
}

inline bool items_meet(const Base& a, const Base& b) {
  return a.first <= b.last && b.first <= a.last;
}

struct Et8Pick {
  int mu = -1, lam = -1;
  bool case_overlap = false;  // candidate pair itself overlaps
};

// carrier pair must genuinely overlap; candidate pairs live inside the
// periodic segment and either overlap themselves or meet the carrier pair
// (the overlap criterion)
inline std::optional<Et8Pick> et8_candidate(const BandComplex& bc) {
  if (bc.bases.empty()) return std::nullopt;
  auto cls = classify_bases(bc);
  int mu = cls.carrier;
  const Base& m = bc.bases[static_cast<std::size_t>(mu)];
  const Base& md = bc.bases[static_cast<std::size_t>(m.dual)];
  if (m.orientation < 0) return std::nullopt;
  if (!items_meet(m, md)) return std::nullopt;
  auto od = overlapping_data(bc, mu);
  if (od.tr_items < 1) return std::nullopt;  // coincident pair is matched, not periodic
  int jf = od.j_first, jl = od.j_last;
  std::optional<Et8Pick> second;
  for (std::size_t i = 0; i < bc.bases.size(); ++i) {
    int lam = static_cast<int>(i);
    const Base& l = bc.bases[i];
    if (lam == mu || lam == m.dual || lam > l.dual) continue;
    const Base& ld = bc.bases[static_cast<std::size_t>(l.dual)];
    if (l.orientation < 0) continue;
    if (l.first < jf || l.last > jl || ld.first < jf || ld.last > jl) continue;
    if (items_meet(l, ld)) {
      if (overlapping_data(bc, lam).tr_items < 1) continue;
      return Et8Pick{mu, lam, true};
    }
    bool meets = items_meet(l, m) || items_meet(l, md) || items_meet(ld, m) ||
                 items_meet(ld, md);
    if (meets && !second) second = Et8Pick{mu, lam, false};
  }
  return second;
}

}  // namespace detail

// merge the carrier's overlapping pair with a second pair inside its
// periodic segment via a common root of the two crossing classes
inline MoveResult et8_periodic_merger(const BandComplex& bc, const OracleRef& o,
                                      long bulitko_cap) {
  auto pick = detail::et8_candidate(bc);
  if (!pick) return {MoveStatus::Ok, {}, "no overlapping carrier or merger candidate"};
  Word gl = detail::crossing_word(bc, pick->lam);
  Word gm = detail::crossing_word(bc, pick->mu);
  Truth comm = o->is_trivial(commutator(gl, gm));
  if (comm == Truth::Unknown)
    return {MoveStatus::ResourceExhausted, {}, "oracle could not settle commutation"};
  if (comm == Truth::False) {
    if (pick->case_overlap)
      return {MoveStatus::Unsuitable, {},
              "overlapping periodic classes fail to commute"};
    return {MoveStatus::Ok, {}, "candidate does not commute with the carrier class"};
  }
  RootSearchResult rs;
  try {
    rs = bulitko_root_search(gl, gm, o, bulitko_cap);
  } catch (const NotCommuting&) {
    return {MoveStatus::Unsuitable, {}, "overlapping periodic classes fail to commute"};
  }
  if (rs.kind == RootSearchResult::Kind::Inconclusive)
    return {MoveStatus::ResourceExhausted, {}, "root search hit the oracle horizon"};
  if (rs.kind == RootSearchResult::Kind::NoCommonRoot)
    return {MoveStatus::Unsuitable, {},
            "commuting periodic classes without a common root"};
  if (rs.n == 0 || rs.m == 0)
    return {MoveStatus::Ok, {}, "a periodic class is trivial; nothing to merge"};
  detail::Step st = detail::step_et8(bc, pick->mu, pick->lam, rs.n, rs.m);
  validate_band_complex(st.bc);
  MoveLabel l = detail::mk(
      "ET8", {{"mu", pick->mu}, {"lam", pick->lam}, {"n", rs.n}, {"m", rs.m}});
  return {MoveStatus::Ok, {MoveOutcome{std::move(st.bc), l.str()}}, ""};
}

// ---- thinning -------------------------------------------------------------

inline MoveResult thinning_move(const BandComplex& in, const OracleRef& o) {
  using namespace detail;
  Branch root{step_normalize(in).bc, {mk("NORM")}};

  // matched pairs are one of the thinning cases; resolve them first
  bool resolved_any = false;
  for (;;) {
    int mu = find_matched(root.bc);
    if (mu < 0) break;
    const Word& core =
        root.bc.bands[static_cast<std::size_t>(root.bc.bases[static_cast<std::size_t>(mu)].band)]
            .left_label;
    Truth t = o->is_trivial(core);
    if (t == Truth::False)
      return {MoveStatus::Unsuitable, {}, "matched pair carries a nontrivial annulus"};
    if (t == Truth::Unknown)
      return {MoveStatus::ResourceExhausted, {}, "oracle could not settle an annulus core"};
    root.bc = step_et3(root.bc, mu).bc;
    root.steps.push_back(mk("ET3", {{"mu", mu}}));
    resolved_any = true;
  }
  Branch renorm{step_normalize(root.bc).bc, root.steps};
  renorm.steps.push_back(mk("NORM"));
  root = std::move(renorm);

  bool has_thin = false;
  for (int h = 0; h < root.bc.nitems; ++h)
    if (gamma(root.bc, h) == 1) has_thin = true;
  if (!has_thin && !resolved_any)
    throw NotThinnable("thinning: no item of weight one and no matched pair");

  std::vector<Branch> branches;
  try {
    if (!has_thin) {
      branches.push_back(std::move(root));
    } else {
      // unique covering base of the lowest weight-one item, then the
      // trichotomy: free, half-naked, splittable
      auto pick_case = [&](const BandComplex& bc, int& mu, int& rf, int& rl, int& kind) {
        mu = -1;
        // candidate bases: those covering some weight-one item
        std::vector<int> cands;
        for (std::size_t i = 0; i < bc.bases.size(); ++i) {
          const Base& b = bc.bases[i];
          bool has = false;
          for (int h = b.first; h <= b.last; ++h)
            if (gamma(bc, h) == 1) has = true;
          if (has) cands.push_back(static_cast<int>(i));
        }
        if (cands.empty()) {
          kind = -1;
          return;
        }
        auto lonely = [&](int b) {
          const Base& m = bc.bases[static_cast<std::size_t>(b)];
          for (std::size_t i = 0; i < bc.bases.size(); ++i)
            if (static_cast<int>(i) != b &&
                items_meet(m, bc.bases[i]))
              return false;
          return true;
        };
        for (int b : cands)
          if (lonely(b)) {
            mu = b;
            kind = 0;
            return;
          }
        auto run_of = [&](int b, int& f, int& l, bool prefer_left) {
          const Base& m = bc.bases[static_cast<std::size_t>(b)];
          // leftmost run by default
          f = -1;
          for (int h = m.first; h <= m.last; ++h) {
            if (gamma(bc, h) != 1) continue;
            f = h;
            l = h;
            while (l + 1 <= m.last && gamma(bc, l + 1) == 1) ++l;
            if (prefer_left) return;
            if (f == m.first || l == m.last) return;
            h = l;
          }
        };
        for (int b : cands) {
          int f, l;
          run_of(b, f, l, false);
          const Base& m = bc.bases[static_cast<std::size_t>(b)];
          if (f >= 0 && (f == m.first || l == m.last)) {
            mu = b;
            rf = f;
            rl = l;
            kind = 1;
            return;
          }
        }
        mu = cands.front();
        int f, l;
        run_of(mu, f, l, true);
        rf = f;
        rl = l;
        kind = 2;
      };

      int mu, rf, rl, kind;
      pick_case(root.bc, mu, rf, rl, kind);
      if (kind < 0) {
        branches.push_back(std::move(root));
      } else if (kind == 0) {
        Step st = step_et4(root.bc, mu);
        root.bc = std::move(st.bc);
        root.steps.push_back(mk("ET4", {{"mu", mu}}));
        branches.push_back(std::move(root));
      } else {
        // locate the run per branch right before each surgery: earlier ties
        // may have shifted item numbering
        auto run_now = [mu](const BandComplex& bc, bool leftmost) {
          const Base& m = bc.bases[static_cast<std::size_t>(mu)];
          std::pair<int, int> best{-1, -1};
          for (int h = m.first; h <= m.last; ++h) {
            if (gamma(bc, h) != 1) continue;
            int f = h, l = h;
            while (l + 1 <= m.last && gamma(bc, l + 1) == 1) ++l;
            if (leftmost || f == m.first || l == m.last) return std::pair<int, int>{f, l};
            if (best.first < 0) best = {f, l};
            h = l;
          }
          return best;
        };
        auto cut_and_collapse = [&](std::vector<std::pair<Branch, int>> tied,
                                    std::function<std::pair<int, int>(const BandComplex&)>
                                        piece_of) {
          std::vector<Branch> outb;
          for (auto& [br, conn] : tied) {
            try {
              auto want = piece_of(br.bc);
              Step cut = step_et1(br.bc, conn);
              br.bc = std::move(cut.bc);
              br.steps.push_back(mk("ET1", {{"c", conn}}));
              int nb = static_cast<int>(br.bc.bases.size());
              int target = -1;
              for (int i = nb - 4; i < nb; ++i) {
                const Base& b = br.bc.bases[static_cast<std::size_t>(i)];
                if (b.first == want.first && b.last == want.second) {
                  if (target >= 0) throw MoveError("ambiguous collapse piece");
                  target = i;
                }
              }
              if (target < 0) throw MoveError("collapse piece not found");
              Step col = step_et4(br.bc, target);
              br.bc = std::move(col.bc);
              br.steps.push_back(mk("ET4", {{"mu", target}}));
              outb.push_back(std::move(br));
            } catch (const MoveError&) {
              // branch died on degenerate geometry
            }
          }
          return outb;
        };
        if (kind == 1) {
          bool left;
          {
            const Base& m = root.bc.bases[static_cast<std::size_t>(mu)];
            left = rf == m.first;
          }
          auto tied = expand_tie_at({std::move(root)}, mu, [&, left](const BandComplex& bc) {
            auto r = run_now(bc, false);
            return left ? r.second + 1 : r.first;
          });
          branches = cut_and_collapse(std::move(tied), [&, left](const BandComplex& bc) {
            return run_now(bc, false);
          });
        } else {
          // splittable: tie both endpoints, cut twice, collapse the middle
          auto tied2 = expand_tie_at({std::move(root)}, mu, [&](const BandComplex& bc) {
            return run_now(bc, true).first;
          });
          std::vector<Branch> mid;
          for (auto& [br, cl] : tied2) {
            (void)cl;
            mid.push_back(std::move(br));
          }
          auto tied3 = expand_tie_at(std::move(mid), mu, [&](const BandComplex& bc) {
            return run_now(bc, true).second + 1;
          });
          // first cut at the right endpoint, then find the left tie again on
          // the piece containing the run, cut there, collapse the middle
          std::vector<Branch> outb;
          for (auto& [br, conn] : tied3) {
            try {
              auto run = run_now(br.bc, true);
              Step cut = step_et1(br.bc, conn);
              br.bc = std::move(cut.bc);
              br.steps.push_back(mk("ET1", {{"c", conn}}));
              int nb = static_cast<int>(br.bc.bases.size());
              int holder = -1;
              for (int i = nb - 4; i < nb; ++i) {
                const Base& b = br.bc.bases[static_cast<std::size_t>(i)];
                if (b.first <= run.first && run.second <= b.last) {
                  if (holder >= 0) throw MoveError("ambiguous run holder");
                  holder = i;
                }
              }
              if (holder < 0) throw MoveError("run holder not found");
              int conn2 = -1;
              for (std::size_t i = 0; i < br.bc.connections.size(); ++i)
                if (br.bc.connections[i].band ==
                        br.bc.bases[static_cast<std::size_t>(holder)].band &&
                    side_coord(br.bc, br.bc.connections[i], holder) == run.first)
                  conn2 = static_cast<int>(i);
              if (conn2 < 0) throw MoveError("left tie lost across the cut");
              Step cut2 = step_et1(br.bc, conn2);
              br.bc = std::move(cut2.bc);
              br.steps.push_back(mk("ET1", {{"c", conn2}}));
              nb = static_cast<int>(br.bc.bases.size());
              int target = -1;
              for (int i = nb - 4; i < nb; ++i) {
                const Base& b = br.bc.bases[static_cast<std::size_t>(i)];
                if (b.first == run.first && b.last == run.second) {
                  if (target >= 0) throw MoveError("ambiguous collapse piece");
                  target = i;
                }
              }
              if (target < 0) throw MoveError("collapse piece not found");
              Step col = step_et4(br.bc, target);
              br.bc = std::move(col.bc);
              br.steps.push_back(mk("ET4", {{"mu", target}}));
              outb.push_back(std::move(br));
            } catch (const MoveError&) {
            }
          }
          branches = std::move(outb);
        }
      }
    }

    // post phase: merge coincident two-base sections, resolving matched
    // pairs as they surface
    std::vector<Branch> done;
    while (!branches.empty()) {
      Branch br = std::move(branches.back());
      branches.pop_back();
      br.bc = step_normalize(br.bc).bc;
      br.steps.push_back(mk("NORM"));
      int mu = find_matched(br.bc);
      if (mu >= 0) {
        const Word& core = br.bc.bands[static_cast<std::size_t>(
                                           br.bc.bases[static_cast<std::size_t>(mu)].band)]
                               .left_label;
        Truth t = o->is_trivial(core);
        if (t == Truth::False)
          return {MoveStatus::Unsuitable, {}, "matched pair carries a nontrivial annulus"};
        if (t == Truth::Unknown)
          return {MoveStatus::ResourceExhausted, {},
                  "oracle could not settle an annulus core"};
        br.bc = step_et3(br.bc, mu).bc;
        br.steps.push_back(mk("ET3", {{"mu", mu}}));
        branches.push_back(std::move(br));
        continue;
      }
      // find a section carried by exactly two coincident bases of different
      // bands
      int sa = -1, sb = -1;
      for (auto [sf, sl] : sections(br.bc)) {
        std::vector<int> in_sec;
        for (std::size_t i = 0; i < br.bc.bases.size(); ++i)
          if (br.bc.bases[i].first >= sf && br.bc.bases[i].last <= sl)
            in_sec.push_back(static_cast<int>(i));
        if (in_sec.size() != 2) continue;
        const Base& a = br.bc.bases[static_cast<std::size_t>(in_sec[0])];
        const Base& b = br.bc.bases[static_cast<std::size_t>(in_sec[1])];
        if (a.band == b.band) continue;
        if (a.first != sf || a.last != sl || b.first != sf || b.last != sl) continue;
        sa = in_sec[0];
        sb = in_sec[1];
        break;
      }
      if (sa < 0) {
        done.push_back(std::move(br));
        continue;
      }
      auto tied = expand_ties_over({std::move(br)}, sa, sb);
      for (Branch& tb : tied) {
        try {
          Step st = step_et7(tb.bc, sa, sb);
          tb.bc = std::move(st.bc);
          tb.steps.push_back(mk("ET7", {{"mu", sa}, {"lam", sb}}));
          branches.push_back(std::move(tb));
          if (branches.size() + done.size() > kBranchCap)
            throw ResourceLimit("merge branching exceeded cap");
        } catch (const PreconditionFailed&) {
        } catch (const MoveError&) {
        }
      }
    }
    branches = std::move(done);
  } catch (const ResourceLimit& e) {
    return {MoveStatus::ResourceExhausted, {}, e.what()};
  }
  if (branches.empty())
    return {MoveStatus::ResourceExhausted, {}, "all thinning branches degenerated"};
  MoveResult res;
  res.outcomes = finish_branches(branches, "THIN");
  return res;
}

// ---- entire transformation ------------------------------------------------

inline MoveResult entire_transformation(const BandComplex& in, const OracleRef& o,
                                        long bulitko_cap) {
  using namespace detail;
  Branch root{step_normalize(in).bc, {mk("NORM")}};
  if (root.bc.nitems == 0 || root.bc.bases.empty())
    throw NotUnthinnable("entire transformation: empty complex");
  for (int h = 0; h < root.bc.nitems; ++h)
    if (gamma(root.bc, h) == 1)
      throw NotUnthinnable("entire transformation: complex is thinnable");
  if (find_matched(root.bc) >= 0)
    throw NotUnthinnable("entire transformation: matched pair present");

  // optional merger first; it may change the carrier
  MoveResult m8 = et8_periodic_merger(root.bc, o, bulitko_cap);
  if (m8.status != MoveStatus::Ok) return {m8.status, {}, m8.reason};
  if (!m8.outcomes.empty()) {
    root.bc = m8.outcomes.front().bc;
    root.steps.push_back(MoveLabel::parse(m8.outcomes.front().label));
  }

  auto cls = classify_bases(root.bc);
  int mu = cls.carrier;
  int mud = root.bc.bases[static_cast<std::size_t>(mu)].dual;

  std::vector<Branch> branches{std::move(root)};
  try {
    // transfer the other leading bases through the carrier
    for (int nu : cls.transfers) {
      if (nu == mu || nu == mud) continue;
      branches = expand_ties_over(std::move(branches), mu, nu);
      std::vector<Branch> next;
      for (Branch& br : branches) {
        try {
          Step st = step_et2(br.bc, mu, nu);
          br.bc = std::move(st.bc);
          br.steps.push_back(mk("ET2", {{"mu", mu}, {"lam", nu}}));
          next.push_back(std::move(br));
        } catch (const MoveError&) {
          // degenerate transfer: that measure family has the base crushed
        }
      }
      branches = std::move(next);
      if (branches.empty())
        return {MoveStatus::ResourceExhausted, {}, "all transfer branches degenerated"};
    }

    // cut off and collapse the initial segment of the carrier, unless the
    // carrier overlaps its dual (the merger's territory)
    const Base& m0 = branches.front().bc.bases[static_cast<std::size_t>(mu)];
    const Base& d0 = branches.front().bc.bases[static_cast<std::size_t>(mud)];
    if (!items_meet(m0, d0)) {
      std::vector<Branch> next;
      for (Branch& br : branches) {
        const Base& m = br.bc.bases[static_cast<std::size_t>(mu)];
        int c = m.beta();
        for (const Base& v : br.bc.bases)
          if (v.alpha() > m.alpha() && v.alpha() < m.beta()) c = std::min(c, v.alpha());
        if (c == m.beta()) {
          try {
            Step st = step_et4(br.bc, mu);
            br.bc = std::move(st.bc);
            br.steps.push_back(mk("ET4", {{"mu", mu}}));
            next.push_back(std::move(br));
          } catch (const MoveError&) {
          }
          continue;
        }
        int cc = c;
        auto tied = expand_tie_at({std::move(br)}, mu, [cc](const BandComplex&) { return cc; });
        for (auto& [tb, conn] : tied) {
          try {
            int t0 = tb.bc.bases[static_cast<std::size_t>(mu)].first;
            int cut_at = side_coord(tb.bc, tb.bc.connections[static_cast<std::size_t>(conn)],
                                    mu);
            Step st = step_et1(tb.bc, conn);
            tb.bc = std::move(st.bc);
            tb.steps.push_back(mk("ET1", {{"c", conn}}));
            int nb = static_cast<int>(tb.bc.bases.size());
            int target = -1;
            for (int i = nb - 4; i < nb; ++i) {
              const Base& b = tb.bc.bases[static_cast<std::size_t>(i)];
              if (b.first == t0 && b.last == cut_at - 1) {
                if (target >= 0) throw MoveError("ambiguous collapse piece");
                target = i;
              }
            }
            if (target < 0) throw MoveError("collapse piece not found");
            Step col = step_et4(tb.bc, target);
            tb.bc = std::move(col.bc);
            tb.steps.push_back(mk("ET4", {{"mu", target}}));
            next.push_back(std::move(tb));
          } catch (const MoveError&) {
          }
        }
      }
      branches = std::move(next);
      if (branches.empty())
        return {MoveStatus::ResourceExhausted, {}, "all cut branches degenerated"};
    }

    // matched pairs surfaced by the schedule stay in the result; the next
    // thinning pass deals with them
  } catch (const ResourceLimit& e) {
    return {MoveStatus::ResourceExhausted, {}, e.what()};
  }
  MoveResult res;
  res.outcomes = finish_branches(branches, "ENT");
  return res;
}

// ---- second periodic merger -----------------------------------------------

// identify two periodic blocks joined by a long connector band: everything
// resident in the far block transfers through the connector, which then
// collapses
inline MoveResult second_periodic_merger(const BandComplex& in, int connector,
                                         const OracleRef& o) {
  using namespace detail;
  const Base& m = base_at(in, connector, "second merger");
  int mud = m.dual;
  const Base& md = in.bases[static_cast<std::size_t>(mud)];
  if (in.periodic_block.size() != static_cast<std::size_t>(in.nitems) || in.nitems == 0)
    throw PreconditionFailed("second merger: complex is not in block form");
  if (m.orientation < 0)
    throw PreconditionFailed("second merger: reversing connector");
  auto block_of = [&](const Base& b) {
    int tag = in.periodic_block[static_cast<std::size_t>(b.first)];
    for (int h = b.first; h <= b.last; ++h)
      if (in.periodic_block[static_cast<std::size_t>(h)] != tag) return -1;
    return tag;
  };
  int tj = block_of(m), tl = block_of(md);
  if (tj < 0 || tl < 0 || tj == tl)
    throw PreconditionFailed("second merger: connector does not join two blocks");
  auto block_range = [&](int tag) {
    int f = -1, l = -1;
    for (int h = 0; h < in.nitems; ++h)
      if (in.periodic_block[static_cast<std::size_t>(h)] == tag) {
        if (f < 0) f = h;
        l = h;
      }
    for (int h = f; h <= l; ++h)
      if (in.periodic_block[static_cast<std::size_t>(h)] != tag)
        throw PreconditionFailed("second merger: block is not contiguous");
    return std::pair<int, int>{f, l};
  };
  auto [jf, jl] = block_range(tj);
  auto [lf, ll] = block_range(tl);

  // each block must hold a genuine overlapping pair; its translation is the
  // block period, and the connector must be long on both sides
  auto period_pair = [&](int f, int l) {
    int best = -1;
    long tr = 0;
    for (std::size_t i = 0; i < in.bases.size(); ++i) {
      const Base& b = in.bases[i];
      if (static_cast<int>(i) > b.dual || b.orientation < 0) continue;
      const Base& d = in.bases[static_cast<std::size_t>(b.dual)];
      if (b.first < f || b.last > l || d.first < f || d.last > l) continue;
      if (!items_meet(b, d)) continue;
      long t = overlapping_data(in, static_cast<int>(i)).tr_items;
      if (t < 1) continue;
      if (best < 0 || t < tr) {
        best = static_cast<int>(i);
        tr = t;
      }
    }
    return std::pair<int, long>{best, tr};
  };
  auto [pj, trj] = period_pair(jf, jl);
  auto [pl, trl] = period_pair(lf, ll);
  if (pj < 0 || pl < 0)
    throw PreconditionFailed("second merger: a block has no overlapping pair");
  if (m.last - m.first + 1 < 2 * trj + 1 || md.last - md.first + 1 < 2 * trl + 1)
    throw PreconditionFailed("second merger: connector is short");
  for (std::size_t i = 0; i < in.bases.size(); ++i) {
    const Base& b = in.bases[i];
    if (static_cast<int>(i) == mud) continue;
    bool meets_l = b.first <= ll && lf <= b.last;
    if (meets_l && (b.first < lf || b.last > ll))
      throw PreconditionFailed("second merger: a base straddles the far block");
  }

  // the two block periods must agree through the connector
  Word wj = crossing_word(in, pj);
  Word wl = crossing_word(in, pl);
  Word c = crossing_word(in, connector);
  Word conj = free_reduce(concat(concat(c, wl), inverse(c)));
  Truth t = o->is_trivial(commutator(wj, conj));
  if (t == Truth::Unknown)
    return {MoveStatus::ResourceExhausted, {},
            "oracle could not settle block commensurability"};
  if (t == Truth::False)
    throw PreconditionFailed("second merger: blocks are not commensurable");

  const Band& cb = in.bands[static_cast<std::size_t>(m.band)];
  int f0, l0, f1, l1;
  if (connector == cb.b0) {
    f0 = jf;
    l0 = jl;
    f1 = lf;
    l1 = ll;
  } else {
    f0 = lf;
    l0 = ll;
    f1 = jf;
    l1 = jl;
  }
  Branch root{in, {}};
  try {
    Step w2 = step_widen2(in, connector, f0, l0, f1, l1);
    root.bc = std::move(w2.bc);
    root.steps.push_back(mk(
        "WID2", {{"mu", connector}, {"f0", f0}, {"l0", l0}, {"f1", f1}, {"l1", l1}}));
  } catch (const MoveError& e) {
    throw PreconditionFailed(std::string("second merger: ") + e.what());
  }

  std::vector<int> residents;
  for (std::size_t i = 0; i < root.bc.bases.size(); ++i) {
    const Base& b = root.bc.bases[i];
    if (static_cast<int>(i) == mud) continue;
    if (b.first >= lf && b.last <= ll) residents.push_back(static_cast<int>(i));
  }
  std::vector<Branch> branches{std::move(root)};
  try {
    for (int nu : residents) {
      branches = expand_ties_over(std::move(branches), mud, nu);
      std::vector<Branch> next;
      for (Branch& br : branches) {
        try {
          Step st = step_et2(br.bc, mud, nu);
          br.bc = std::move(st.bc);
          br.steps.push_back(mk("ET2", {{"mu", mud}, {"lam", nu}}));
          next.push_back(std::move(br));
        } catch (const MoveError&) {
        }
      }
      branches = std::move(next);
      if (branches.empty())
        return {MoveStatus::ResourceExhausted, {}, "all transfer branches degenerated"};
    }
    std::vector<Branch> next;
    for (Branch& br : branches) {
      try {
        Step st = step_et4(br.bc, mud);
        br.bc = std::move(st.bc);
        br.steps.push_back(mk("ET4", {{"mu", mud}}));
        next.push_back(std::move(br));
      } catch (const MoveError&) {
      }
    }
    branches = std::move(next);
  } catch (const ResourceLimit& e) {
    return {MoveStatus::ResourceExhausted, {}, e.what()};
  }
  if (branches.empty())
    return {MoveStatus::ResourceExhausted, {}, "all merger branches degenerated"};
  MoveResult res;
  res.outcomes = detail::finish_branches(branches, "SPM");
  return res;
}

}  // namespace grushko
