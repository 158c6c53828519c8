#pragma once

// Band complex realization of a train track.  Bands are strip neighbourhoods
// of the branches, the interval collects one arc per tracked edge (plus one
// hanging section per bare class), and the 2-cells are the regions a face
// decomposes into after the strips are removed.  Within each page the branch
// blocks sit in descending-span order, matching the embedded layout of any
// measure the track carries; the relative order of cut points coming from
// different pages of one edge is not determined combinatorially, so the
// plural constructor enumerates the admissible interleavings.

#include <map>
#include <optional>
#include <tuple>

#include "grushko/bandcomplex.hpp"
#include "grushko/traintrack.hpp"

namespace grushko {

// one branch-end block within a page, with its item range along the edge
struct PageAtom {
  int branch = -1;
  int end = 0;             // s1 end / first half, or s2 end / second half
  int first = 0, last = 0; // item range within the edge, in edge order
};

struct TrackCorrespondence {
  BandComplex bc;
  const TrainTrack* tt = nullptr;
  std::vector<std::pair<int, int>> edge_items;  // per edge: [first,last] global arc items
  std::vector<int> band_branch;                 // band id -> branch index
  std::vector<int> branch_band;                 // branch index -> band id
  std::vector<int> hanging_item;                // band id -> hanging item, or -1
  // per edge, per page (corner order), atoms in edge order
  std::vector<std::vector<std::vector<PageAtom>>> atoms;
};

namespace detail {

// side-order block list of page (f, s): descending forward span as in
// pattern_from_measured; a same-side class contributes two adjacent halves
inline std::vector<PageAtom> page_atoms(const TrainTrack& tt, int f, int s) {
  int L = tt.cx->face_len(f);
  std::vector<std::tuple<int, int, int>> blocks;  // (span, branch, kind 0/1/2)
  for (std::size_t j = 0; j < tt.branches.size(); ++j) {
    const Branch& b = tt.branches[j];
    if (b.face != f) continue;
    if (b.s1 == s && b.s2 == s)
      blocks.push_back({0, static_cast<int>(j), 2});
    else if (b.s1 == s)
      blocks.push_back({b.s2 - b.s1, static_cast<int>(j), 0});
    else if (b.s2 == s)
      blocks.push_back({L - (b.s2 - b.s1), static_cast<int>(j), 1});
  }
  std::sort(blocks.begin(), blocks.end(), [](const auto& a, const auto& b) {
    return std::get<0>(a) != std::get<0>(b) ? std::get<0>(a) > std::get<0>(b)
                                            : std::get<1>(a) < std::get<1>(b);
  });
  std::vector<PageAtom> out;
  for (auto [span, j, kind] : blocks) {
    if (kind == 2) {
      out.push_back(PageAtom{j, 0, 0, 0});
      out.push_back(PageAtom{j, 1, 0, 0});
    } else {
      out.push_back(PageAtom{j, kind, 0, 0});
    }
  }
  return out;
}

// all merges of the pages' ordered cut lists into common levels (weak
// shuffles); the first one emitted is the diagonal, with every page's j-th
// cut at level j
inline std::vector<std::vector<std::vector<int>>> cut_interleavings(
    const std::vector<std::size_t>& ncuts, std::size_t cap) {
  std::vector<std::vector<std::vector<int>>> out;
  std::vector<std::vector<int>> levels(ncuts.size());
  std::vector<std::size_t> taken(ncuts.size(), 0);
  auto rec = [&](auto&& self, int level) -> void {
    if (out.size() >= cap) return;
    std::vector<std::size_t> avail;
    for (std::size_t i = 0; i < ncuts.size(); ++i)
      if (taken[i] < ncuts[i]) avail.push_back(i);
    if (avail.empty()) {
      out.push_back(levels);
      return;
    }
    for (unsigned mask = (1u << avail.size()) - 1; mask >= 1; --mask) {
      for (std::size_t b = 0; b < avail.size(); ++b)
        if (mask & (1u << b)) {
          levels[avail[b]].push_back(level);
          taken[avail[b]]++;
        }
      self(self, level + 1);
      for (std::size_t b = 0; b < avail.size(); ++b)
        if (mask & (1u << b)) {
          levels[avail[b]].pop_back();
          taken[avail[b]]--;
        }
      if (out.size() >= cap) return;
    }
  };
  rec(rec, 1);
  return out;
}

struct EdgeLayout {
  std::vector<std::vector<PageAtom>> pages;  // edge-order atoms, ranges filled
  int nitems = 1;
};

// fix item ranges for one edge given cut levels per page
inline EdgeLayout layout_edge(std::vector<std::vector<PageAtom>> pages,
                              const std::vector<std::vector<int>>& levels) {
  EdgeLayout el;
  int L = 0;
  for (const auto& lv : levels)
    for (int v : lv) L = std::max(L, v);
  el.nitems = L + 1;
  for (std::size_t p = 0; p < pages.size(); ++p) {
    auto& at = pages[p];
    for (std::size_t i = 0; i < at.size(); ++i) {
      at[i].first = i == 0 ? 0 : levels[p][i - 1];
      at[i].last = i + 1 == at.size() ? L : levels[p][i] - 1;
    }
  }
  el.pages = std::move(pages);
  return el;
}

// conn id and endpoint side (0 = x, 1 = y) of the strip edge meeting the
// given end of one of the band's bases; edge connections are created by
// make_band as ids 2*band (left) and 2*band+1 (right)
inline std::pair<int, int> strip_side_at(const BandComplex& bc, int band, bool on_b1,
                                         bool at_beta) {
  bool pres = bc.bases[static_cast<std::size_t>(bc.bands[static_cast<std::size_t>(band)].b0)]
                  .orientation > 0;
  int left = 2 * band, right = 2 * band + 1;
  if (!on_b1) return {at_beta ? right : left, 0};
  if (pres) return {at_beta ? right : left, 1};
  return {at_beta ? left : right, 1};
}

}  // namespace detail

// the realization for one choice of per-edge cut interleavings
inline TrackCorrespondence realize_track(
    const TrainTrack& tt, const std::vector<std::vector<std::vector<int>>>& edge_levels) {
  const TwoComplex& cx = *tt.cx;
  validate_traintrack(tt);
  if (!covers_pages(cx, tt.branches))
    throw std::invalid_argument("realize_track: track does not cover its pages");
  TrackCorrespondence tc;
  tc.tt = &tt;
  BandComplex& bc = tc.bc;

  auto corners = cx.corners();
  std::vector<int> edge_off(static_cast<std::size_t>(cx.nedges), -1);
  tc.atoms.resize(static_cast<std::size_t>(cx.nedges));
  std::map<std::pair<int, int>, std::pair<int, int>> page_of;  // (face, side) -> (edge, page)

  for (int e = 0; e < cx.nedges; ++e) {
    const auto& pages = corners[static_cast<std::size_t>(e)];
    std::vector<std::vector<PageAtom>> lists;
    bool tracked = false;
    for (std::size_t p = 0; p < pages.size(); ++p) {
      page_of[pages[p]] = {e, static_cast<int>(p)};
      auto at = detail::page_atoms(tt, pages[p].first, pages[p].second);
      if (cx.side_sign(pages[p].first, pages[p].second) < 0)
        std::reverse(at.begin(), at.end());
      tracked = tracked || !at.empty();
      lists.push_back(std::move(at));
    }
    for (const Branch& b : tt.branches)
      if (b.face < 0 && b.edge == e) tracked = true;
    if (!tracked) {
      // untracked edge: no section; crossed through its petal only
      tc.edge_items.push_back({-1, -1});
      tc.atoms[static_cast<std::size_t>(e)] = std::move(lists);
      continue;
    }
    auto el = detail::layout_edge(std::move(lists), edge_levels[static_cast<std::size_t>(e)]);
    edge_off[static_cast<std::size_t>(e)] = bc.nitems;
    tc.edge_items.push_back({bc.nitems, bc.nitems + el.nitems - 1});
    bc.nitems += el.nitems;
    tc.atoms[static_cast<std::size_t>(e)] = std::move(el.pages);
  }

  // bands in branch order; bare classes hang their dual on a fresh section
  std::map<std::pair<int, int>, int> base_of;  // (branch, end) -> base id
  tc.branch_band.assign(tt.branches.size(), -1);
  std::vector<int> pending_hang;  // bare branch indices
  for (std::size_t j = 0; j < tt.branches.size(); ++j) {
    const Branch& b = tt.branches[j];
    if (b.face < 0) {
      pending_hang.push_back(static_cast<int>(j));
      continue;
    }
    auto find_atom = [&](int end) -> std::pair<int, std::pair<int, int>> {
      // returns (edge, item range) of the (branch, end) atom
      for (int s : {b.s1, b.s2}) {
        auto [e, p] = page_of.at({b.face, s});
        for (const PageAtom& a : tc.atoms[static_cast<std::size_t>(e)][static_cast<std::size_t>(p)])
          if (a.branch == static_cast<int>(j) && a.end == end)
            return {e, {edge_off[static_cast<std::size_t>(e)] + a.first,
                        edge_off[static_cast<std::size_t>(e)] + a.last}};
      }
      throw std::logic_error("realize_track: atom not found");
    };
    auto [e0, r0] = find_atom(0);
    auto [e1, r1] = find_atom(1);
    int orientation;
    if (b.s1 == b.s2)
      orientation = -1;
    else
      orientation = cx.side_sign(b.face, b.s1) * cx.side_sign(b.face, b.s2) > 0 ? -1 : 1;
    int bd = make_band(bc, r0.first, r0.second, r1.first, r1.second, orientation,
                       chord_word(cx, b.face, b.s1, b.s2));
    tc.band_branch.push_back(static_cast<int>(j));
    tc.branch_band[j] = bd;
    tc.hanging_item.push_back(-1);
    base_of[{static_cast<int>(j), 0}] = bc.bands[static_cast<std::size_t>(bd)].b0;
    base_of[{static_cast<int>(j), 1}] = bc.bands[static_cast<std::size_t>(bd)].b1;
  }
  for (int j : pending_hang) {
    const Branch& b = tt.branches[static_cast<std::size_t>(j)];
    int arc = edge_off[static_cast<std::size_t>(b.edge)];
    int hang = bc.nitems++;
    int bd = make_band(bc, arc, arc, hang, hang, 1, {});
    bc.bands[static_cast<std::size_t>(bd)].spanning = true;
    tc.band_branch.push_back(j);
    tc.branch_band[static_cast<std::size_t>(j)] = bd;
    tc.hanging_item.push_back(hang);
  }

  // cells: regions of each face after the strips are removed.  Region
  // boundaries alternate free boundary arcs with strip sides; every strip
  // side joins an enter-type corner to an exit-type corner, so arcs are
  // always traversed in boundary order and the regions are the cycles of
  // arc -> (conn at its end) -> (arc at the partner corner).
  for (int f = 0; f < static_cast<int>(cx.faces.size()); ++f) {
    int L = cx.face_len(f);
    int first_side = -1;
    for (int s = 0; s < L && first_side < 0; ++s)
      if (!detail::page_atoms(tt, f, s).empty()) first_side = s;
    if (first_side < 0) {
      // untouched face: attach through the vertex petals alone
      CellAttachment cell;
      cell.segments.push_back(IntervalPath{0, 0, cx.faces[static_cast<std::size_t>(f)]});
      bc.cells.push_back(std::move(cell));
      continue;
    }

    struct WNode {
      int gbdy = 0;
      int conn = -1;
      int dir = 1;       // traversal direction when crossing from this corner
      bool enter = false;
      int arc = -1;      // arc ending here (enter) or starting here (exit)
    };
    std::vector<WNode> nodes;
    std::map<std::pair<int, int>, int> node_at;  // (conn, endpoint side) -> node
    struct WArc {
      int from_node = -1, to_node = -1;
      int from_bdy = 0, to_bdy = 0;
      Word via;
    };
    std::vector<WArc> arcs;
    Word via;
    int prev_exit = -1;

    for (int k = 0; k < L; ++k) {
      int s = (first_side + k) % L;
      int letter = cx.faces[static_cast<std::size_t>(f)][static_cast<std::size_t>(s)];
      int e = cx.side_edge(f, s);
      int sigma = cx.side_sign(f, s);
      auto [pe, pp] = page_of.at({f, s});
      auto side_atoms = tc.atoms[static_cast<std::size_t>(pe)][static_cast<std::size_t>(pp)];
      if (side_atoms.empty()) {
        via.push_back(letter);  // full crossing of an untracked edge
        continue;
      }
      if (sigma < 0) {
        via.push_back(letter);  // reach the edge's far end before the first block
        std::reverse(side_atoms.begin(), side_atoms.end());
      }
      for (const PageAtom& a : side_atoms) {
        int off = edge_off[static_cast<std::size_t>(e)];
        int enter_b = sigma > 0 ? off + a.first : off + a.last + 1;
        int exit_b = sigma > 0 ? off + a.last + 1 : off + a.first;
        int bid = base_of.at({a.branch, a.end});
        int band = bc.bases[static_cast<std::size_t>(bid)].band;
        bool on_b1 = bc.bands[static_cast<std::size_t>(band)].b1 == bid;
        const Base& base = bc.bases[static_cast<std::size_t>(bid)];
        auto ends = [&](int gb) { return gb == base.beta(); };
        auto [cin, sin] = detail::strip_side_at(bc, band, on_b1, ends(enter_b));
        auto [cout, sout] = detail::strip_side_at(bc, band, on_b1, ends(exit_b));
        int ne = static_cast<int>(nodes.size());
        nodes.push_back(WNode{enter_b, cin, on_b1 ? -1 : 1, true, -1});
        node_at[{cin, sin}] = ne;
        int nx = static_cast<int>(nodes.size());
        nodes.push_back(WNode{exit_b, cout, on_b1 ? -1 : 1, false, -1});
        node_at[{cout, sout}] = nx;
        if (prev_exit >= 0) {
          arcs.push_back(WArc{prev_exit, ne, nodes[static_cast<std::size_t>(prev_exit)].gbdy,
                              enter_b, via});
          via.clear();
        }
        prev_exit = nx;
      }
      if (sigma > 0) via.push_back(letter);  // leave through the edge's far end
    }
    // wrap around to the first node
    arcs.push_back(WArc{prev_exit, 0, nodes[static_cast<std::size_t>(prev_exit)].gbdy,
                        nodes[0].gbdy, via});
    via.clear();
    for (std::size_t i = 0; i < arcs.size(); ++i) {
      nodes[static_cast<std::size_t>(arcs[i].from_node)].arc = static_cast<int>(i);
      nodes[static_cast<std::size_t>(arcs[i].to_node)].arc = static_cast<int>(i);
    }

    std::vector<bool> used(arcs.size(), false);
    for (std::size_t start = 0; start < arcs.size(); ++start) {
      if (used[start]) continue;
      CellAttachment cell;
      std::size_t cur = start;
      do {
        used[cur] = true;
        const WArc& a = arcs[cur];
        cell.segments.push_back(IntervalPath{a.from_bdy, a.to_bdy, a.via});
        const WNode& n = nodes[static_cast<std::size_t>(a.to_node)];
        cell.segments.push_back(BandTraversal{n.conn, n.dir});
        // n sits on the b0 (x) endpoint iff it crosses in direction +1
        int other = node_at.at({n.conn, n.dir > 0 ? 1 : 0});
        cur = static_cast<std::size_t>(nodes[static_cast<std::size_t>(other)].arc);
      } while (cur != start);
      bc.cells.push_back(std::move(cell));
    }
  }

  // one petal per edge of the complex; anchors are trivial throughout
  for (int e = 0; e < cx.nedges; ++e) bc.base_loops.push_back(Word{e + 1});
  bc.item_anchor.assign(static_cast<std::size_t>(bc.nitems), Word{});
  validate_band_complex(bc);
  return tc;
}

// deterministic single realization: the diagonal interleaving on every edge
inline TrackCorrespondence band_complex_from_traintrack(const TrainTrack& tt) {
  const TwoComplex& cx = *tt.cx;
  auto corners = cx.corners();
  std::vector<std::vector<std::vector<int>>> levels(static_cast<std::size_t>(cx.nedges));
  for (int e = 0; e < cx.nedges; ++e) {
    const auto& pages = corners[static_cast<std::size_t>(e)];
    std::vector<std::size_t> ncuts;
    for (const auto& [f, s] : pages) {
      auto at = detail::page_atoms(tt, f, s);
      ncuts.push_back(at.empty() ? 0 : at.size() - 1);
    }
    levels[static_cast<std::size_t>(e)] = detail::cut_interleavings(ncuts, 1).at(0);
  }
  return realize_track(tt, levels);
}

// all realizations over the admissible cut interleavings, capped
inline std::vector<TrackCorrespondence> band_complexes_from_traintrack(const TrainTrack& tt,
                                                                       std::size_t cap = 64) {
  const TwoComplex& cx = *tt.cx;
  auto corners = cx.corners();
  std::vector<std::vector<std::vector<std::vector<int>>>> per_edge;
  for (int e = 0; e < cx.nedges; ++e) {
    const auto& pages = corners[static_cast<std::size_t>(e)];
    std::vector<std::size_t> ncuts;
    for (const auto& [f, s] : pages) {
      auto at = detail::page_atoms(tt, f, s);
      ncuts.push_back(at.empty() ? 0 : at.size() - 1);
    }
    per_edge.push_back(detail::cut_interleavings(ncuts, cap));
  }
  std::vector<TrackCorrespondence> out;
  std::vector<std::size_t> pick(per_edge.size(), 0);
  while (out.size() < cap) {
    std::vector<std::vector<std::vector<int>>> levels;
    for (std::size_t e = 0; e < per_edge.size(); ++e) levels.push_back(per_edge[e][pick[e]]);
    out.push_back(realize_track(tt, levels));
    std::size_t e = 0;
    while (e < pick.size() && ++pick[e] == per_edge[e].size()) pick[e++] = 0;
    if (e == pick.size()) break;
  }
  return out;
}

// the realization whose cut interleaving is the one a given branch weighting
// actually induces: cut positions are the block prefix sums, and cuts from
// different pages are ordered by position.  The weighting is then always
// admitted as an item measure; the capped enumeration can miss the required
// interleaving when the pages cut an edge many times.
inline TrackCorrespondence realization_for_measure(const TrainTrack& tt,
                                                   const std::vector<long>& w) {
  const TwoComplex& cx = *tt.cx;
  auto corners = cx.corners();
  std::vector<std::vector<std::vector<int>>> edge_levels(static_cast<std::size_t>(cx.nedges));
  for (int e = 0; e < cx.nedges; ++e) {
    const auto& pages = corners[static_cast<std::size_t>(e)];
    std::vector<std::tuple<long, int, int>> cuts;  // (position, page, index)
    for (std::size_t p = 0; p < pages.size(); ++p) {
      auto at = detail::page_atoms(tt, pages[p].first, pages[p].second);
      if (at.empty()) continue;
      if (cx.side_sign(pages[p].first, pages[p].second) < 0)
        std::reverse(at.begin(), at.end());
      long prefix = 0;
      for (std::size_t i = 0; i + 1 < at.size(); ++i) {
        prefix += w[static_cast<std::size_t>(at[i].branch)];
        cuts.push_back({prefix, static_cast<int>(p), static_cast<int>(i)});
      }
    }
    std::sort(cuts.begin(), cuts.end());
    // cuts at equal positions share a level, except that one page cutting the
    // same position twice bounds a zero-width item of its own
    std::vector<std::vector<int>> lv(pages.size());
    std::vector<char> in_level(pages.size(), 0);
    int level = 0;
    long at = 0;
    for (const auto& [v, p, k] : cuts) {
      if (level == 0 || v != at || in_level[static_cast<std::size_t>(p)]) {
        ++level;
        at = v;
        std::fill(in_level.begin(), in_level.end(), 0);
      }
      in_level[static_cast<std::size_t>(p)] = 1;
      lv[static_cast<std::size_t>(p)].push_back(level);
    }
    edge_levels[static_cast<std::size_t>(e)] = std::move(lv);
  }
  return realize_track(tt, edge_levels);
}

// width of every branch under an item measure of the realization
inline std::vector<long> branch_measure(const TrackCorrespondence& tc, const ItemMeasure& m) {
  std::vector<long> out(tc.tt->branches.size(), 0);
  for (std::size_t bd = 0; bd < tc.bc.bands.size(); ++bd) {
    const Base& b0 = tc.bc.bases[static_cast<std::size_t>(tc.bc.bands[bd].b0)];
    long w = 0;
    for (int i = b0.first; i <= b0.last; ++i) w += m[static_cast<std::size_t>(i)];
    out[static_cast<std::size_t>(tc.band_branch[bd])] = w;
  }
  return out;
}

// item measure realizing a branch weighting under this correspondence's cut
// interleaving, if the induced cut positions order compatibly
inline std::optional<ItemMeasure> item_measure(const TrackCorrespondence& tc,
                                               const std::vector<long>& w) {
  const TwoComplex& cx = *tc.tt->cx;
  ItemMeasure m(static_cast<std::size_t>(tc.bc.nitems), 0);
  for (int e = 0; e < cx.nedges; ++e) {
    auto [lo, hi] = tc.edge_items[static_cast<std::size_t>(e)];
    if (lo < 0) continue;  // untracked edge: no items
    int L = hi - lo + 1;
    std::vector<long> pos(static_cast<std::size_t>(L) + 1, -1);
    pos[0] = 0;
    long total = -1;
    const auto& pages = tc.atoms[static_cast<std::size_t>(e)];
    if (pages.empty()) {
      // bare edge: a single arc item, width from its isolated-point classes
      long n = 0;
      for (std::size_t j = 0; j < tc.tt->branches.size(); ++j)
        if (tc.tt->branches[j].face < 0 && tc.tt->branches[j].edge == e)
          n += w[j];
      m[static_cast<std::size_t>(lo)] = n;
      continue;
    }
    for (const auto& page : pages) {
      long prefix = 0;
      for (const PageAtom& a : page) {
        prefix += w[static_cast<std::size_t>(a.branch)];
        std::size_t v = static_cast<std::size_t>(a.last) + 1;
        if (pos[v] < 0)
          pos[v] = prefix;
        else if (pos[v] != prefix)
          return std::nullopt;
      }
      if (total < 0)
        total = prefix;
      else if (total != prefix)
        return std::nullopt;
    }
    for (int v = 0; v < L; ++v) {
      if (pos[static_cast<std::size_t>(v) + 1] < pos[static_cast<std::size_t>(v)])
        return std::nullopt;
      m[static_cast<std::size_t>(lo + v)] =
          pos[static_cast<std::size_t>(v) + 1] - pos[static_cast<std::size_t>(v)];
    }
  }
  for (std::size_t bd = 0; bd < tc.bc.bands.size(); ++bd)
    if (tc.hanging_item[bd] >= 0)
      m[static_cast<std::size_t>(tc.hanging_item[bd])] =
          w[static_cast<std::size_t>(tc.band_branch[bd])];
  return m;
}

}  // namespace grushko
