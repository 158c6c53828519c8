#pragma once

// HLT-style Todd-Coxeter enumeration of the trivial-subgroup coset table
// (i.e. the regular representation).  Budgeted: gives up once more than
// `max_rows` cosets would be live at once.

#include <optional>

#include "grushko/presentation.hpp"

namespace grushko {

struct CosetTable {
  // tab[c][2g] = c.g , tab[c][2g+1] = c.g^-1 ; complete (no -1) once finished
  std::vector<std::vector<int>> tab;
  int order() const { return static_cast<int>(tab.size()); }

  int trace(int c, const Word& w) const {
    for (int l : w) {
      int col = 2 * gen_of(l) + (l > 0 ? 0 : 1);
      c = tab[c][col];
    }
    return c;
  }
  bool is_identity(const Word& w) const { return trace(0, w) == 0; }
};

namespace detail {

class HLT {
 public:
  HLT(const Presentation& p, int max_rows) : pres_(p), max_rows_(max_rows), ncols_(2 * p.ngens) {
    for (const auto& r : pres_.relators) rels_.push_back(free_reduce(r));
    new_coset();
  }

  std::optional<CosetTable> run() {
    for (std::size_t c = 0; c < tab_.size(); ++c) {
      if (dead_[c]) continue;
      for (const auto& r : rels_)
        if (!scan_and_fill(static_cast<int>(c), r)) return std::nullopt;
      if (dead_[c]) continue;
      // fill remaining entries so the table is the full regular action
      for (int col = 0; col < ncols_; ++col)
        if (tab_[c][col] < 0) {
          int d = new_coset();
          if (d < 0) return std::nullopt;
          link(static_cast<int>(c), col, d);
        }
    }
    return compress();
  }

 private:
  const Presentation& pres_;
  int max_rows_, ncols_;
  std::vector<Word> rels_;
  std::vector<std::vector<int>> tab_;
  std::vector<int> rep_;
  std::vector<bool> dead_;
  int live_ = 0;

  static int col_fwd(int l) { return 2 * gen_of(l) + (l > 0 ? 0 : 1); }
  static int col_bwd(int l) { return 2 * gen_of(l) + (l > 0 ? 1 : 0); }

  int find(int c) {
    while (rep_[c] != c) c = rep_[c] = rep_[rep_[c]];
    return c;
  }

  int new_coset() {
    if (live_ >= max_rows_) return -1;
    tab_.emplace_back(ncols_, -1);
    rep_.push_back(static_cast<int>(tab_.size()) - 1);
    dead_.push_back(false);
    ++live_;
    return static_cast<int>(tab_.size()) - 1;
  }

  void link(int a, int col, int b) {
    tab_[a][col] = b;
    tab_[b][col ^ 1] = a;
  }

  void merge(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a > b) std::swap(a, b);
    std::vector<std::pair<int, int>> queue{{a, b}};
    while (!queue.empty()) {
      auto [x, y] = queue.back();
      queue.pop_back();
      x = find(x);
      y = find(y);
      if (x == y) continue;
      if (x > y) std::swap(x, y);
      rep_[y] = x;
      dead_[y] = true;
      --live_;
      for (int col = 0; col < ncols_; ++col) {
        int t = tab_[y][col];
        if (t < 0) continue;
        t = find(t);
        int u = tab_[x][col] < 0 ? -1 : find(tab_[x][col]);
        if (u < 0) {
          link(x, col, t);
        } else if (u != t) {
          queue.emplace_back(u, t);
        }
        // keep inverse entry of t consistent
        if (tab_[t][col ^ 1] >= 0 && find(tab_[t][col ^ 1]) == y) tab_[t][col ^ 1] = x;
      }
    }
  }

  bool scan_and_fill(int c, const Word& r) {
    c = find(c);
    if (r.empty()) return true;
    int f = c;
    std::size_t i = 0;
    int b = c;
    std::size_t j = r.size();
    for (;;) {
      while (i < j) {
        int t = tab_[f][col_fwd(r[i])];
        if (t < 0) break;
        f = find(t);
        ++i;
      }
      while (j > i) {
        int t = tab_[b][col_bwd(r[j - 1])];
        if (t < 0) break;
        b = find(t);
        --j;
      }
      if (i == j) {
        // closed: forward endpoint must equal backward endpoint
        merge(f, b);
        return true;
      }
      if (i + 1 == j) {
        // deduction fills the gap
        link(f, col_fwd(r[i]), b);
        merge(f, f);  // no-op; keeps structure uniform
        return true;
      }
      int d = new_coset();
      if (d < 0) return false;
      link(f, col_fwd(r[i]), d);
    }
  }

  CosetTable compress() {
    std::vector<int> newid(tab_.size(), -1);
    int n = 0;
    for (std::size_t c = 0; c < tab_.size(); ++c)
      if (find(static_cast<int>(c)) == static_cast<int>(c)) newid[c] = n++;
    CosetTable out;
    out.tab.assign(n, std::vector<int>(ncols_, -1));
    for (std::size_t c = 0; c < tab_.size(); ++c) {
      if (newid[c] < 0) continue;
      for (int col = 0; col < ncols_; ++col) {
        int t = tab_[c][col];
        out.tab[newid[c]][col] = t < 0 ? -1 : newid[find(t)];
      }
    }
    return out;
  }
};

}  // namespace detail

inline std::optional<CosetTable> coset_enumerate(const Presentation& p, int max_rows) {
  if (p.ngens == 0) {
    CosetTable t;
    t.tab.assign(1, {});
    return t;
  }
  return detail::HLT(p, max_rows).run();
}

}  // namespace grushko
