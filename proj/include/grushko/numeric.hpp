#pragma once

// exact integer/rational helpers: Smith normal form for abelianization
// invariants, and a small phase-1 simplex used to decide whether a
// homogeneous system admits a nonzero nonnegative rational solution.

#include <boost/multiprecision/cpp_int.hpp>
#include <cassert>
#include <cstdint>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace grushko {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

using IntMatrix = std::vector<std::vector<Int>>;  // row-major, ragged rows padded by caller

// abelianization type Z^free_rank + Z/t1 + ... (t_i the torsion coefficients,
// in divisibility order t1 | t2 | ...)
struct AbelianInvariants {
  long free_rank = 0;
  std::vector<Int> torsion;

  bool operator==(const AbelianInvariants& o) const {
    return free_rank == o.free_rank && torsion == o.torsion;
  }
  bool operator!=(const AbelianInvariants& o) const { return !(*this == o); }

  std::string str() const {
    std::string s = "Z^" + std::to_string(free_rank);
    for (const auto& t : torsion) s += " + Z/" + t.str();
    return s;
  }
};

// direct sum (used when checking additivity across free splittings)
inline AbelianInvariants abelian_sum(const AbelianInvariants& a, const AbelianInvariants& b) {
  // recombining torsion into divisibility order needs the primary decomposition;
  // we only ever compare multisets, so keep torsion sorted instead.
  AbelianInvariants r;
  r.free_rank = a.free_rank + b.free_rank;
  r.torsion = a.torsion;
  r.torsion.insert(r.torsion.end(), b.torsion.begin(), b.torsion.end());
  std::sort(r.torsion.begin(), r.torsion.end());
  return r;
}

namespace detail {

inline Int iabs(const Int& x) { return x < 0 ? Int(-x) : x; }

// rounded division q = round(a/b) so that |a - q b| <= |b|/2 (speeds up reduction)
inline Int round_div(const Int& a, const Int& b) {
  Int q = a / b, r = a - q * b;
  if (2 * iabs(r) > iabs(b)) q += (a < 0) == (b < 0) ? 1 : -1;
  return q;
}

}  // namespace detail

// Smith normal form diagonal of an integer matrix given as a list of rows,
// each implicitly padded with zeros to `ncols`. Returns the invariant factors
// (nonzero diagonal entries, positive, in divisibility order).
inline std::vector<Int> smith_diagonal(IntMatrix m, std::size_t ncols) {
  for (auto& row : m) row.resize(ncols, Int(0));
  std::size_t nr = m.size(), nc = ncols;
  std::vector<Int> diag;
  std::size_t t = 0;
  while (t < nr && t < nc) {
    // locate minimal nonzero entry in the remaining block
    std::size_t pi = nr, pj = nc;
    for (std::size_t i = t; i < nr; ++i)
      for (std::size_t j = t; j < nc; ++j)
        if (m[i][j] != 0 && (pi == nr || detail::iabs(m[i][j]) < detail::iabs(m[pi][pj]))) {
          pi = i;
          pj = j;
        }
    if (pi == nr) break;  // rest is zero
    std::swap(m[t], m[pi]);
    for (std::size_t i = 0; i < nr; ++i) std::swap(m[i][t], m[i][pj]);
    bool clean = true;
    for (std::size_t i = t + 1; i < nr && clean; ++i)
      if (m[i][t] % m[t][t] != 0) clean = false;
    for (std::size_t j = t + 1; j < nc && clean; ++j)
      if (m[t][j] % m[t][t] != 0) clean = false;
    if (!clean) {
      // knock entries down; pivot shrinks each pass, so this terminates
      for (std::size_t i = t + 1; i < nr; ++i) {
        Int q = detail::round_div(m[i][t], m[t][t]);
        for (std::size_t j = t; j < nc; ++j) m[i][j] -= q * m[t][j];
      }
      for (std::size_t j = t + 1; j < nc; ++j) {
        Int q = detail::round_div(m[t][j], m[t][t]);
        for (std::size_t i = t; i < nr; ++i) m[i][j] -= q * m[i][t];
      }
      continue;
    }
    // row/col cleared up to multiples; eliminate them exactly
    for (std::size_t i = t + 1; i < nr; ++i) {
      Int q = m[i][t] / m[t][t];
      for (std::size_t j = t; j < nc; ++j) m[i][j] -= q * m[t][j];
    }
    for (std::size_t j = t + 1; j < nc; ++j) {
      Int q = m[t][j] / m[t][t];
      for (std::size_t i = t; i < nr; ++i) m[i][j] -= q * m[i][t];
    }
    // enforce divisibility towards later entries: fold in any bad entry
    bool fixed = false;
    for (std::size_t i = t + 1; i < nr && !fixed; ++i)
      for (std::size_t j = t + 1; j < nc && !fixed; ++j)
        if (m[i][j] % m[t][t] != 0) {
          for (std::size_t jj = t; jj < nc; ++jj) m[t][jj] += m[i][jj];
          fixed = true;
        }
    if (fixed) continue;
    diag.push_back(detail::iabs(m[t][t]));
    ++t;
  }
  return diag;
}

// cokernel invariants of the relation matrix: Z^ncols / rowspace(m)
inline AbelianInvariants abelian_invariants(const IntMatrix& m, std::size_t ncols) {
  auto d = smith_diagonal(m, ncols);
  AbelianInvariants out;
  out.free_rank = static_cast<long>(ncols) - static_cast<long>(d.size());
  for (auto& x : d)
    if (x > 1) out.torsion.push_back(x);
  std::sort(out.torsion.begin(), out.torsion.end());
  return out;
}

// Does {A x = 0, x >= 0, sum x = 1} have a rational solution?  Phase-1 simplex
// with Bland's rule, exact arithmetic.  Equivalently: the homogeneous system
// has a nonzero nonnegative solution.
inline bool nonneg_kernel_nonzero(const IntMatrix& a, std::size_t ncols) {
  if (ncols == 0) return false;
  std::size_t r = a.size();
  std::size_t rows = r + 1, structs = ncols, total = structs + rows;
  // tableau rows: [structural | artificial | rhs]
  std::vector<std::vector<Rat>> t(rows, std::vector<Rat>(total + 1, Rat(0)));
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < ncols && j < a[i].size(); ++j) t[i][j] = Rat(a[i][j]);
  for (std::size_t j = 0; j < ncols; ++j) t[r][j] = 1;
  t[r][total] = 1;  // sum x = 1
  for (std::size_t i = 0; i < rows; ++i) {
    if (t[i][total] < 0)
      for (auto& v : t[i]) v = -v;
    t[i][structs + i] = 1;
  }
  std::vector<std::size_t> basis(rows);
  for (std::size_t i = 0; i < rows; ++i) basis[i] = structs + i;

  for (;;) {
    // reduced cost of column j under cost = 1 on artificials (recomputed; tiny systems)
    std::size_t enter = total;
    for (std::size_t j = 0; j < total && enter == total; ++j) {
      bool basic = false;
      for (auto b : basis)
        if (b == j) basic = true;
      if (basic) continue;
      Rat red = j >= structs ? Rat(1) : Rat(0);
      for (std::size_t i = 0; i < rows; ++i)
        if (basis[i] >= structs) red -= t[i][j];
      if (red < 0) enter = j;  // Bland: first improving column
    }
    if (enter == total) break;
    std::size_t leave = rows;
    Rat best;
    for (std::size_t i = 0; i < rows; ++i)
      if (t[i][enter] > 0) {
        Rat ratio = t[i][total] / t[i][enter];
        if (leave == rows || ratio < best || (ratio == best && basis[i] < basis[leave])) {
          leave = i;
          best = ratio;
        }
      }
    if (leave == rows) break;  // unbounded: cannot happen in phase 1
    Rat piv = t[leave][enter];
    for (auto& v : t[leave]) v /= piv;
    for (std::size_t i = 0; i < rows; ++i)
      if (i != leave && t[i][enter] != 0) {
        Rat f = t[i][enter];
        for (std::size_t j = 0; j <= total; ++j) t[i][j] -= f * t[leave][j];
      }
    basis[leave] = enter;
  }
  Rat value(0);
  for (std::size_t i = 0; i < rows; ++i)
    if (basis[i] >= structs) value += t[i][total];
  return value == 0;
}

// enumerate all nonzero solutions m in N^ncols of A m = 0 with every entry
// <= bound, in lexicographic order.
inline std::vector<std::vector<long>> enumerate_nonneg_solutions(const IntMatrix& a,
                                                                std::size_t ncols, long bound) {
  std::vector<std::vector<long>> out;
  if (ncols == 0) return out;
  std::vector<long> cur(ncols, 0);
  std::vector<Int> partial(a.size(), Int(0));
  auto coef = [&](std::size_t i, std::size_t j) -> Int {
    return j < a[i].size() ? a[i][j] : Int(0);
  };
  // prune: once all columns >= j are decided... simple bound check per row:
  // remaining columns can move row sum by at most bound * sum |remaining coefs|
  std::vector<std::vector<Int>> slack(a.size(), std::vector<Int>(ncols + 1, Int(0)));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = ncols; j-- > 0;)
      slack[i][j] = slack[i][j + 1] + detail::iabs(coef(i, j));
  auto rec = [&](auto&& self, std::size_t j) -> void {
    if (j == ncols) {
      for (std::size_t i = 0; i < a.size(); ++i)
        if (partial[i] != 0) return;
      for (long v : cur)
        if (v != 0) {
          out.push_back(cur);
          return;
        }
      return;
    }
    for (long v = 0; v <= bound; ++v) {
      cur[j] = v;
      for (std::size_t i = 0; i < a.size(); ++i) partial[i] += coef(i, j) * v;
      bool ok = true;
      for (std::size_t i = 0; i < a.size() && ok; ++i)
        if (detail::iabs(partial[i]) > Int(bound) * slack[i][j + 1]) ok = false;
      if (ok) self(self, j + 1);
      for (std::size_t i = 0; i < a.size(); ++i) partial[i] -= coef(i, j) * v;
    }
    cur[j] = 0;
  };
  rec(rec, 0);
  return out;
}

// sparse integer linear form over item variables (used by the excess ledger
// and by measure pull-backs)
struct LinearForm {
  std::map<int, Int> coef;  // var id -> coefficient

  void add(int v, const Int& c) {
    if (c == 0) return;
    auto it = coef.find(v);
    if (it == coef.end())
      coef.emplace(v, c);
    else {
      it->second += c;
      if (it->second == 0) coef.erase(it);
    }
  }
  LinearForm& operator+=(const LinearForm& o) {
    for (auto& [v, c] : o.coef) add(v, c);
    return *this;
  }
  LinearForm scaled(const Int& k) const {
    LinearForm r;
    if (k == 0) return r;
    for (auto& [v, c] : coef) r.coef.emplace(v, c * k);
    return r;
  }
  // substitute each variable by a form over new variables
  LinearForm substituted(const std::map<int, LinearForm>& sub) const {
    LinearForm r;
    for (auto& [v, c] : coef) {
      auto it = sub.find(v);
      if (it == sub.end()) throw std::runtime_error("LinearForm: unmapped variable");
      r += it->second.scaled(c);
    }
    return r;
  }
  Int eval(const std::vector<long>& x) const {
    Int s = 0;
    for (auto& [v, c] : coef) s += c * (v < static_cast<int>(x.size()) ? x[v] : 0);
    return s;
  }
  bool operator==(const LinearForm& o) const { return coef == o.coef; }
};

}  // namespace grushko
