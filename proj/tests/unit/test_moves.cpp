#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <numeric>

#include "grushko/moves.hpp"
#include "helpers.hpp"

using namespace grushko;
using testutil::P;

namespace {

BandComplex empty_bc(int nitems) {
  BandComplex bc;
  bc.nitems = nitems;
  bc.item_anchor.assign(static_cast<std::size_t>(nitems), Word{});
  return bc;
}

// independent check that a move left the fundamental group alone
AbelianInvariants h1(const BandComplex& bc) { return abelianization(presentation_of(bc)); }

void check_anchors_trivial(const BandComplex& bc) {
  for (const Word& w : bc.item_anchor) CHECK(w.empty());
}

// every 2-cell must stay null-homotopic in the parent group
void check_cells_null(const BandComplex& bc, const OracleRef& o) {
  for (const CellAttachment& c : bc.cells)
    CHECK(o->is_trivial(cell_parent_word(bc, c)) == Truth::True);
}

// exhaustively pull back every small valid measure on the child and require
// a valid measure on the parent; also exercises label replay
void pullback_exhaustive(const BandComplex& parent, const BandComplex& child,
                         const std::string& label, long radix = 3) {
  std::size_t n = static_cast<std::size_t>(child.nitems);
  long total = 1;
  for (std::size_t i = 0; i < n; ++i) total *= radix;
  int checked = 0;
  for (long code = 0; code < total; ++code) {
    ItemMeasure m(n);
    long c = code;
    for (std::size_t i = 0; i < n; ++i) {
      m[i] = c % radix;
      c /= radix;
    }
    if (!validate_measure(child, m)) continue;
    ItemMeasure up = pull_back_measure(parent, child, label, m);
    INFO("label " << label << " code " << code);
    REQUIRE(validate_measure(parent, up));
    ++checked;
  }
  CHECK(checked > 0);
}

// ---- fixtures -------------------------------------------------------------

// single matched band over a torsion class, with cells presenting Z/3
BandComplex z3_annulus() {
  BandComplex bc = empty_bc(1);
  make_band(bc, 0, 0, 0, 0, 1, Word{1, 1, 1});
  bc.base_loops.push_back(Word{1});
  bc.cells.push_back({{BandTraversal{0, 1}, IntervalPath{0, 0, Word{-1, -1, -1}}}});
  bc.cells.push_back({{IntervalPath{0, 0, Word{1, 1, 1}}}});
  return bc;
}

// one lonely band plus a defining cell tying the band class to a loop
BandComplex lonely_band() {
  BandComplex bc = empty_bc(3);
  make_band(bc, 0, 0, 2, 2, 1, Word{1});
  bc.base_loops.push_back(Word{1});
  bc.cells.push_back({{BandTraversal{0, 1}, IntervalPath{2, 0, Word{-1}}}});
  return bc;
}

// two disjoint bands; the second is transferable through the first
BandComplex transfer_bc() {
  BandComplex bc = empty_bc(5);
  make_band(bc, 0, 0, 2, 2, 1, Word{1});
  make_band(bc, 0, 0, 4, 4, 1, Word{2});
  bc.base_loops.push_back(Word{2});
  bc.cells.push_back({{BandTraversal{2, 1}, IntervalPath{4, 0, Word{-1}}}});
  return bc;
}

BandComplex cut_bc() {
  BandComplex bc = empty_bc(6);
  make_band(bc, 0, 2, 3, 5, 1, Word{1});
  bc.connections.push_back({0, 1, 4, ConnSource::Introduced});
  return bc;
}

BandComplex tie_bc() {
  BandComplex bc = empty_bc(4);
  make_band(bc, 0, 1, 2, 3, 1, Word{1});
  return bc;
}

// two overlapping periodic pairs over one segment, classes a^p and a^q, with
// defining cells mapping everything onto the loop U = a
BandComplex stacked_periodic(int p, int q) {
  BandComplex bc = empty_bc(4);
  make_band(bc, 0, 2, 1, 3, 1, power(Word{1}, p));
  make_band(bc, 0, 2, 1, 3, 1, power(Word{1}, q));
  bc.base_loops.push_back(Word{1});
  bc.cells.push_back({{BandTraversal{0, 1}, IntervalPath{1, 0, power(Word{-1}, p)}}});
  bc.cells.push_back({{BandTraversal{2, 1}, IntervalPath{1, 0, power(Word{-1}, q)}}});
  return bc;
}

}  // namespace

// ---- labels ---------------------------------------------------------------

TEST_CASE("move labels round-trip") {
  MoveLabel l = MoveLabel::parse("ET5[mu=3,x=1,placement=0]");
  CHECK(l.name == "ET5");
  CHECK(l.get("mu") == 3);
  CHECK(l.get("placement") == 0);
  CHECK_THROWS_AS(l.get("absent"), LabelMismatch);
  CHECK(MoveLabel::parse(l.str()).str() == l.str());

  MoveLabel c = MoveLabel::parse("THIN[NORM;ET5[mu=0,x=1,placement=2];ET4[mu=1]]");
  REQUIRE(c.composite());
  REQUIRE(c.children.size() == 3);
  CHECK(c.children[0].name == "NORM");
  CHECK(c.children[1].get("x") == 1);
  CHECK(MoveLabel::parse(c.str()).str() == c.str());

  CHECK(MoveLabel::parse("NORM").name == "NORM");
  CHECK(MoveLabel::parse("NORM[]").name == "NORM");
}

// ---- normalize ------------------------------------------------------------

TEST_CASE("normalize deletes uncovered items") {
  BandComplex bc = empty_bc(3);
  make_band(bc, 0, 0, 2, 2, 1, Word{1});
  BandComplex out = normalize_complex(bc);
  CHECK(out.nitems == 2);
  CHECK(out.bases[0].first == 0);
  CHECK(out.bases[1].first == 1);
  CHECK(h1(out) == h1(bc));
  pullback_exhaustive(bc, out, "NORM", 4);
}

// ---- cuts -----------------------------------------------------------------

TEST_CASE("cut splits a band in two") {
  BandComplex bc = cut_bc();
  BandComplex out = et1_cut(bc, 2);
  REQUIRE_NOTHROW(validate_band_complex(out));
  CHECK(out.bases.size() == 4);
  CHECK(out.bands.size() == 2);
  CHECK(out.nitems == 6);
  // both pieces inherit the label; a bigon cell records they agree
  CHECK(out.bands[0].left_label == Word{1});
  CHECK(out.bands[1].left_label == Word{1});
  REQUIRE(out.cells.size() == 1);
  CHECK(out.cells[0].vertical_length() == 2);
  CHECK(h1(out) == h1(bc));
  check_anchors_trivial(out);
  pullback_exhaustive(bc, out, "ET1[c=2]");

  SECTION("cutting at a band edge is refused") {
    CHECK_THROWS_AS(et1_cut(bc, 0), MoveError);
    CHECK_THROWS_AS(et1_cut(bc, 1), MoveError);
  }
}

// ---- ties -----------------------------------------------------------------

TEST_CASE("tie introduction branches over placements") {
  BandComplex bc = tie_bc();
  MoveResult r = et5_introduce(bc, 0, 1);
  REQUIRE(r.status == MoveStatus::Ok);
  REQUIRE(r.outcomes.size() == 3);
  std::set<std::string> texts;
  for (const MoveOutcome& o : r.outcomes) {
    REQUIRE_NOTHROW(validate_band_complex(o.bc));
    CHECK(o.bc.connections.size() == 3);
    CHECK(h1(o.bc) == h1(bc));
    texts.insert(to_text(o.bc));
    pullback_exhaustive(bc, o.bc, o.label);
  }
  CHECK(texts.size() == 3);  // the placements are genuinely different complexes
  // middle placement lands on the existing boundary, the others split an item
  CHECK(r.outcomes[1].bc.nitems == 4);
  CHECK(r.outcomes[0].bc.nitems == 5);
  CHECK(r.outcomes[2].bc.nitems == 5);

  SECTION("an already-tied boundary is a single no-op outcome") {
    MoveResult r0 = et5_introduce(bc, 0, 0);
    REQUIRE(r0.status == MoveStatus::Ok);
    REQUIRE(r0.outcomes.size() == 1);
    CHECK(to_text(r0.outcomes[0].bc) == to_text(bc));
  }
}

// ---- transfers ------------------------------------------------------------

TEST_CASE("transfer carries a base through a band") {
  BandComplex bc = transfer_bc();
  BandComplex out = et2_transfer(bc, 0, 2);
  REQUIRE_NOTHROW(validate_band_complex(out));
  // the base moved to the far side of the carrier, label conjugated
  CHECK(out.bases[2].first == 2);
  CHECK(out.bases[2].last == 2);
  CHECK(out.bands[1].left_label == Word{-1, 2});
  // the cell through the moved base picked up a bridging traversal
  REQUIRE(out.cells.size() == 1);
  CHECK(out.cells[0].vertical_length() == 2);
  CHECK(h1(out) == h1(bc));
  check_cells_null(out, oracle_free(P("< a, b | >")));
  pullback_exhaustive(bc, out, "ET2[mu=0,lam=2]");
}

// ---- annulus removal ------------------------------------------------------

TEST_CASE("matched pair with torsion class is removed when the oracle agrees") {
  BandComplex bc = z3_annulus();
  REQUIRE(h1(bc) == AbelianInvariants{0, {3}});

  auto z3 = testutil::abelian_oracle(1, {3});
  MoveResult r = et3_remove_matched(bc, 0, z3);
  REQUIRE(r.status == MoveStatus::Ok);
  REQUIRE(r.outcomes.size() == 1);
  const BandComplex& out = r.outcomes[0].bc;
  CHECK(out.bands.empty());
  CHECK(h1(out) == AbelianInvariants{0, {3}});
  check_cells_null(out, z3);
  pullback_exhaustive(bc, out, r.outcomes[0].label, 4);

  SECTION("a free oracle rejects the same annulus") {
    MoveResult f = et3_remove_matched(bc, 0, oracle_free(P("< a | >")));
    CHECK(f.status == MoveStatus::Unsuitable);
    CHECK(f.outcomes.empty());
  }
  SECTION("an uninformative oracle reports unknown") {
    auto mute = make_function_oracle("mute", false, [](const Word&) { return Truth::Unknown; });
    CHECK(et3_remove_matched(bc, 0, mute).status == MoveStatus::OracleUnknown);
  }
  SECTION("non-matched base is refused") {
    BandComplex t = tie_bc();
    CHECK_THROWS_AS(et3_remove_matched(t, 0, z3), MoveError);
  }
}

// ---- lonely collapse ------------------------------------------------------

TEST_CASE("lonely band collapses to a loop") {
  BandComplex bc = lonely_band();
  BandComplex out = et4_remove_lonely(bc, 0);
  REQUIRE_NOTHROW(validate_band_complex(out));
  CHECK(out.nitems == 2);
  CHECK(out.bands.empty());
  REQUIRE(out.base_loops.size() == 2);
  CHECK(out.base_loops[1] == Word{1});  // the dead band's class survives as a loop
  CHECK(h1(out) == h1(bc));
  check_cells_null(out, oracle_free(P("< a | >")));
  check_anchors_trivial(out);

  // the deleted stretch is re-expressed over the far side of the band
  CHECK(pull_back_measure(bc, out, "ET4[mu=0]", {5, 7}) == ItemMeasure{7, 5, 7});
  pullback_exhaustive(bc, out, "ET4[mu=0]", 4);

  SECTION("a base meeting another is not lonely") {
    BandComplex t = transfer_bc();  // bases 0 and 2 share item 0
    CHECK_THROWS_AS(et4_remove_lonely(t, 0), NotLonely);
  }
}

// ---- hanging bands and widening -------------------------------------------

TEST_CASE("hanging band introduction") {
  BandComplex bc = tie_bc();
  BandComplex out = et6_hanging_band(bc, {0, 1});
  REQUIRE_NOTHROW(validate_band_complex(out));
  CHECK(out.nitems == 6);
  CHECK(out.bands.size() == 2);
  CHECK(out.bands[1].spanning);
  CHECK(out.bases[2].first == 0);
  CHECK(out.bases[3].first == 4);
  // the new band letter is killed by its spanning relation
  CHECK(h1(out) == h1(bc));
  pullback_exhaustive(bc, out, "ET6[f=0,l=1]");
}

TEST_CASE("widening extends an overlapping pair across its section") {
  BandComplex bc = empty_bc(6);
  make_band(bc, 1, 2, 3, 4, 1, Word{1});
  make_band(bc, 0, 0, 5, 5, 1, Word{3});
  BandComplex out = widen_band(bc, 0, {0, 5});
  REQUIRE_NOTHROW(validate_band_complex(out));
  CHECK(out.bases[0].first == 0);
  CHECK(out.bases[0].last == 2);
  CHECK(out.bases[1].first == 3);
  CHECK(out.bases[1].last == 5);
  CHECK(h1(out) == h1(bc));
  pullback_exhaustive(bc, out, "WID[lam=0,jf=0,jl=5]");
}

// ---- merge of coincident bases --------------------------------------------

TEST_CASE("coincident bases of different bands merge") {
  BandComplex bc = empty_bc(4);
  make_band(bc, 0, 1, 2, 3, 1, Word{1});
  make_band(bc, 0, 1, 2, 3, 1, Word{2});
  bc.connections.push_back({0, 1, 3, ConnSource::Introduced});
  BandComplex out = et7_merge(bc, 0, 2);
  REQUIRE_NOTHROW(validate_band_complex(out));
  CHECK(out.bands.size() == 1);
  CHECK(out.nitems == 2);
  CHECK(out.base_loops.size() == 1);
  CHECK(h1(out) == h1(bc));
  pullback_exhaustive(bc, out, "ET7[mu=0,lam=2]");

  SECTION("untied interior boundary is a missing precondition") {
    BandComplex raw = empty_bc(4);
    make_band(raw, 0, 1, 2, 3, 1, Word{1});
    make_band(raw, 0, 1, 2, 3, 1, Word{2});
    CHECK_THROWS_AS(et7_merge(raw, 0, 2), MoveError);
  }
}

// ---- periodic merger ------------------------------------------------------

TEST_CASE("merger zips a power pair directly") {
  BandComplex bc = stacked_periodic(1, 2);  // carrier a, second pair a^2
  REQUIRE(h1(bc) == AbelianInvariants{1, {}});
  auto o = oracle_free(P("< a | >"));
  MoveResult r = et8_periodic_merger(bc, o, 8);
  REQUIRE(r.status == MoveStatus::Ok);
  REQUIRE(r.outcomes.size() == 1);
  CHECK(r.outcomes[0].label == "ET8[mu=0,lam=2,n=2,m=1]");
  const BandComplex& out = r.outcomes[0].bc;
  REQUIRE_NOTHROW(validate_band_complex(out));
  CHECK(out.bands.size() == 1);
  CHECK(out.bases.size() == 2);
  CHECK(h1(out) == AbelianInvariants{1, {}});
  check_cells_null(out, o);
  pullback_exhaustive(bc, out, r.outcomes[0].label);
}

TEST_CASE("merger finds a common root and rebuilds both pairs over it") {
  BandComplex bc = stacked_periodic(3, 2);  // carrier a^3, second pair a^2
  REQUIRE(h1(bc) == AbelianInvariants{1, {}});
  int tau_before = tau(bc);
  auto o = oracle_free(P("< a | >"));
  MoveResult r = et8_periodic_merger(bc, o, 8);
  REQUIRE(r.status == MoveStatus::Ok);
  REQUIRE(r.outcomes.size() == 1);
  CHECK(r.outcomes[0].label == "ET8[mu=0,lam=2,n=2,m=3]");
  const BandComplex& out = r.outcomes[0].bc;
  REQUIRE_NOTHROW(validate_band_complex(out));
  // two bases fewer, tau dropped by two, and the root class labels the band
  CHECK(out.bases.size() == bc.bases.size() - 2);
  CHECK(tau(out) == tau_before - 2);
  REQUIRE(out.bands.size() == 1);
  CHECK(out.bands[0].left_label == Word{1});
  // the relation cell reduced away; only the two defining cells remain
  CHECK(out.cells.size() == 2);
  CHECK(h1(out) == AbelianInvariants{1, {}});
  check_cells_null(out, o);
  pullback_exhaustive(bc, out, r.outcomes[0].label);
}

TEST_CASE("merger status mapping") {
  SECTION("non-overlapping carrier is not applicable") {
    BandComplex bc = empty_bc(3);
    make_band(bc, 0, 0, 2, 2, 1, Word{1});
    MoveResult r = et8_periodic_merger(bc, oracle_free(P("< a | >")), 8);
    CHECK(r.status == MoveStatus::Ok);
    CHECK(r.outcomes.empty());
    CHECK_FALSE(r.reason.empty());
  }
  SECTION("overlapping classes that do not commute are unsuitable") {
    BandComplex bc = empty_bc(4);
    make_band(bc, 0, 2, 1, 3, 1, Word{1});
    make_band(bc, 0, 2, 1, 3, 1, Word{2});
    MoveResult r = et8_periodic_merger(bc, oracle_free(P("< a, b | >")), 8);
    CHECK(r.status == MoveStatus::Unsuitable);
  }
  SECTION("an uninformative oracle exhausts the search") {
    BandComplex bc = stacked_periodic(3, 2);
    auto mute = make_function_oracle("mute", false, [](const Word&) { return Truth::Unknown; });
    CHECK(et8_periodic_merger(bc, mute, 8).status == MoveStatus::ResourceExhausted);
  }
}

// ---- thinning -------------------------------------------------------------

TEST_CASE("thinning a lonely weight-one band") {
  BandComplex bc = lonely_band();
  auto o = oracle_free(P("< a | >"));
  MoveResult r = thinning_move(bc, o);
  REQUIRE(r.status == MoveStatus::Ok);
  REQUIRE(r.outcomes.size() == 1);
  const BandComplex& out = r.outcomes[0].bc;
  CHECK(out.nitems == 0);
  CHECK(out.bands.empty());
  CHECK(h1(out) == h1(bc));
  check_cells_null(out, o);
  pullback_exhaustive(bc, out, r.outcomes[0].label, 4);
}

TEST_CASE("thinning resolves matched pairs through the oracle") {
  BandComplex bc = z3_annulus();
  auto z3 = testutil::abelian_oracle(1, {3});
  MoveResult r = thinning_move(bc, z3);
  REQUIRE(r.status == MoveStatus::Ok);
  REQUIRE(r.outcomes.size() == 1);
  const BandComplex& out = r.outcomes[0].bc;
  CHECK(out.nitems == 0);
  CHECK(h1(out) == AbelianInvariants{0, {3}});
  check_cells_null(out, z3);

  SECTION("nontrivial annulus core makes the complex unsuitable") {
    CHECK(thinning_move(bc, oracle_free(P("< a | >"))).status == MoveStatus::Unsuitable);
  }
  SECTION("unresolvable core exhausts the oracle") {
    auto mute = make_function_oracle("mute", false, [](const Word&) { return Truth::Unknown; });
    CHECK(thinning_move(bc, mute).status == MoveStatus::ResourceExhausted);
  }
}

TEST_CASE("thinning requires a weight-one item or a matched pair") {
  BandComplex bc = empty_bc(4);
  make_band(bc, 0, 1, 2, 3, 1, Word{1});
  make_band(bc, 0, 1, 2, 3, 1, Word{2});
  CHECK_THROWS_AS(thinning_move(bc, oracle_free(P("< a, b | >"))), NotThinnable);
}

TEST_CASE("thinning an interior weight-one run cascades to a full collapse") {
  BandComplex bc = empty_bc(6);
  make_band(bc, 0, 2, 3, 5, 1, Word{1});  // M
  make_band(bc, 0, 0, 3, 3, 1, Word{1});  // C
  make_band(bc, 2, 2, 5, 5, 1, Word{1});  // D
  bc.base_loops.push_back(Word{1});
  bc.cells.push_back({{BandTraversal{0, 1}, IntervalPath{3, 0, Word{-1}}}});
  bc.cells.push_back({{BandTraversal{2, 1}, IntervalPath{3, 0, Word{-1}}}});
  bc.cells.push_back({{BandTraversal{4, 1}, IntervalPath{5, 2, Word{-1}}}});
  REQUIRE_NOTHROW(validate_band_complex(bc));
  AbelianInvariants before = h1(bc);
  REQUIRE(before == AbelianInvariants{1, {}});
  int tau_before = tau(bc);

  auto o = oracle_free(P("< a | >"));
  MoveResult r = thinning_move(bc, o);
  REQUIRE(r.status == MoveStatus::Ok);
  REQUIRE_FALSE(r.outcomes.empty());
  for (const MoveOutcome& oc : r.outcomes) {
    INFO(oc.label);
    CHECK(h1(oc.bc) == before);
    CHECK(tau(oc.bc) <= tau_before);
    CHECK(oc.bc.nitems < bc.nitems);
    check_anchors_trivial(oc.bc);
    check_cells_null(oc.bc, o);
  }
  // replay one schedule end to end, composing the per-step pullbacks
  pullback_exhaustive(bc, r.outcomes[0].bc, r.outcomes[0].label);
}

// ---- entire transformation ------------------------------------------------

TEST_CASE("entire transformation rejects thinnable complexes") {
  CHECK_THROWS_AS(entire_transformation(tie_bc(), oracle_free(P("< a | >")), 8),
                  NotUnthinnable);
  CHECK_THROWS_AS(entire_transformation(z3_annulus(), oracle_free(P("< a | >")), 8),
                  NotUnthinnable);
}

TEST_CASE("entire transformation collapses the carrier") {
  BandComplex bc = empty_bc(4);
  make_band(bc, 0, 1, 2, 3, 1, Word{1});
  make_band(bc, 0, 1, 2, 3, 1, Word{2});
  AbelianInvariants before = h1(bc);
  auto o = oracle_free(P("< a, b | >"));
  MoveResult r = entire_transformation(bc, o, 8);
  REQUIRE(r.status == MoveStatus::Ok);
  // the untied boundary lands as a split or between items; both splits give
  // the same complex, so two distinct children remain
  REQUIRE(r.outcomes.size() == 2);
  std::vector<int> sizes;
  for (const MoveOutcome& oc : r.outcomes) {
    INFO(oc.label);
    sizes.push_back(oc.bc.nitems);
    // the carrier band is gone; its class survives as a loop
    CHECK(oc.bc.bands.size() == 1);
    CHECK(oc.bc.base_loops.size() == 1);
    CHECK(oc.bc.base_loops[0] == Word{1});
    CHECK(oc.bc.bands[0].left_label == Word{-1, 2});
    CHECK(h1(oc.bc) == before);
    check_anchors_trivial(oc.bc);
  }
  std::sort(sizes.begin(), sizes.end());
  CHECK(sizes == std::vector<int>{2, 3});
  pullback_exhaustive(bc, r.outcomes[0].bc, r.outcomes[0].label);
}

TEST_CASE("entire transformation runs the merger when the carrier overlaps") {
  BandComplex bc = stacked_periodic(3, 2);
  auto o = oracle_free(P("< a | >"));
  MoveResult r = entire_transformation(bc, o, 8);
  REQUIRE(r.status == MoveStatus::Ok);
  REQUIRE(r.outcomes.size() == 1);
  const BandComplex& out = r.outcomes[0].bc;
  CHECK(out.bands.size() == 1);
  CHECK(out.bands[0].left_label == Word{1});
  CHECK(h1(out) == AbelianInvariants{1, {}});
  CHECK(r.outcomes[0].label.rfind("ENT[", 0) == 0);
  pullback_exhaustive(bc, out, r.outcomes[0].label);
}

// ---- second periodic merger -----------------------------------------------

namespace {

// two periodic blocks joined by a long connector band
BandComplex two_block_bc() {
  BandComplex bc = empty_bc(8);
  make_band(bc, 0, 2, 1, 3, 1, Word{1});  // period of block 0: a
  make_band(bc, 4, 6, 5, 7, 1, Word{2});  // period of block 1: b
  make_band(bc, 0, 3, 4, 7, 1, Word{3});  // connector: c
  bc.periodic_block = {0, 0, 0, 0, 1, 1, 1, 1};
  return bc;
}

}  // namespace

TEST_CASE("second merger pulls the far block through the connector") {
  BandComplex bc = two_block_bc();
  AbelianInvariants before = h1(bc);
  auto o = testutil::abelian_oracle(3);
  MoveResult r = second_periodic_merger(bc, 4, o);
  REQUIRE(r.status == MoveStatus::Ok);
  REQUIRE_FALSE(r.outcomes.empty());
  bool saw_splitless = false;
  for (const MoveOutcome& oc : r.outcomes) {
    INFO(oc.label);
    REQUIRE_NOTHROW(validate_band_complex(oc.bc));
    CHECK(oc.bc.bases.size() == 4);
    CHECK(oc.bc.bands.size() == 2);
    // the far block's items went with the connector; one block tag remains
    for (int t : oc.bc.periodic_block) CHECK(t == 0);
    // the transferred pair's class is the connector-conjugate of its old one
    CHECK(oc.bc.bands[1].left_label == Word{3, 2, -3});
    CHECK(h1(oc.bc) == before);
    check_anchors_trivial(oc.bc);
    if (oc.bc.nitems == 4) saw_splitless = true;
  }
  CHECK(saw_splitless);
  pullback_exhaustive(bc, r.outcomes[0].bc, r.outcomes[0].label);
}

TEST_CASE("second merger preconditions") {
  SECTION("needs block structure") {
    BandComplex bc = two_block_bc();
    bc.periodic_block.clear();
    CHECK_THROWS_AS(second_periodic_merger(bc, 4, testutil::abelian_oracle(3)),
                    PreconditionFailed);
  }
  SECTION("connector must join two distinct blocks") {
    BandComplex bc = two_block_bc();
    bc.periodic_block.assign(8, 0);
    CHECK_THROWS_AS(second_periodic_merger(bc, 4, testutil::abelian_oracle(3)),
                    PreconditionFailed);
  }
  SECTION("block classes must be commensurable through the connector") {
    BandComplex bc = two_block_bc();
    CHECK_THROWS_AS(second_periodic_merger(bc, 4, oracle_free(P("< a, b, c | >"))),
                    PreconditionFailed);
  }
  SECTION("an uninformative oracle exhausts the check") {
    BandComplex bc = two_block_bc();
    auto mute = make_function_oracle("mute", false, [](const Word&) { return Truth::Unknown; });
    CHECK(second_periodic_merger(bc, 4, mute).status == MoveStatus::ResourceExhausted);
  }
}

// ---- label replay guards --------------------------------------------------

TEST_CASE("pull back rejects mismatched children") {
  BandComplex bc = tie_bc();
  MoveResult r = et5_introduce(bc, 0, 1);
  REQUIRE(r.outcomes.size() == 3);
  // replaying outcome 0's label must not accept outcome 1's complex
  ItemMeasure m(static_cast<std::size_t>(r.outcomes[1].bc.nitems), 0);
  CHECK_THROWS_AS(pull_back_measure(bc, r.outcomes[1].bc, r.outcomes[0].label, m),
                  LabelMismatch);
  ItemMeasure wrong(2, 0);
  CHECK_THROWS_AS(pull_back_measure(bc, r.outcomes[0].bc, r.outcomes[0].label, wrong),
                  std::invalid_argument);
  CHECK_THROWS_AS(MoveLabel::parse("BOGUS[x=1]").get("y"), LabelMismatch);
}
