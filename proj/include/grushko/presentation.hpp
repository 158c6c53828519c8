#pragma once

// finite presentations < x1,...,xn | r1,...,rk > with parsing, printing,
// abelianization invariants and a conservative Tietze simplifier.

#include <set>

#include "grushko/numeric.hpp"
#include "grushko/word.hpp"

namespace grushko {

struct Presentation {
  int ngens = 0;
  std::vector<Word> relators;
  std::vector<std::string> names;  // optional; filled by the parser

  std::string name_of(int g) const {
    if (g < static_cast<int>(names.size())) return names[g];
    return "g" + std::to_string(g);
  }
  std::vector<std::string> all_names() const {
    std::vector<std::string> out;
    for (int g = 0; g < ngens; ++g) out.push_back(name_of(g));
    return out;
  }
  void check() const {
    for (const auto& r : relators)
      for (int l : r)
        if (l == 0 || gen_of(l) >= ngens) throw std::invalid_argument("relator letter out of range");
  }
};

// < a, b | a b a^-1 b^-1 , a^2 >
inline Presentation parse_presentation(const std::string& text) {
  detail::Cursor c{text};
  if (!c.eat('<')) throw ParseError("expected '<'", c.i);
  Presentation p;
  if (c.peek() != '|') {
    for (;;) {
      std::size_t pos = c.i;
      std::string id = c.ident();
      if (id.empty()) throw ParseError("expected generator name", c.i);
      for (const auto& n : p.names)
        if (n == id) throw ParseError("duplicate generator '" + id + "'", pos);
      p.names.push_back(id);
      if (!c.eat(',')) break;
    }
  }
  p.ngens = static_cast<int>(p.names.size());
  if (!c.eat('|')) throw ParseError("expected '|'", c.i);
  if (c.peek() != '>') {
    for (;;) {
      p.relators.push_back(detail::parse_word_at(c, p.names));
      if (!c.eat(',')) break;
    }
  }
  if (!c.eat('>')) throw ParseError("expected '>'", c.i);
  if (!c.eof()) throw ParseError("trailing input after presentation", c.i);
  return p;
}

inline std::string format_presentation(const Presentation& p) {
  std::string out = "< ";
  for (int g = 0; g < p.ngens; ++g) {
    if (g) out += ", ";
    out += p.name_of(g);
  }
  out += " | ";
  for (std::size_t i = 0; i < p.relators.size(); ++i) {
    if (i) out += ", ";
    out += format_word(p.relators[i], p.all_names());
  }
  out += " >";
  return out;
}

inline IntMatrix exponent_matrix(const Presentation& p) {
  IntMatrix m;
  for (const auto& r : p.relators) {
    std::vector<Int> row(p.ngens, Int(0));
    for (int l : r) row[gen_of(l)] += sign_of(l);
    m.push_back(std::move(row));
  }
  return m;
}

inline AbelianInvariants abelianization(const Presentation& p) {
  return abelian_invariants(exponent_matrix(p), p.ngens);
}

inline Word abelian_vector_word(const Word& w, int ngens) {
  // exponent-sum normal form (used by tests and the Z^n oracle)
  std::vector<long> e(ngens, 0);
  for (int l : w) e[gen_of(l)] += sign_of(l);
  Word out;
  for (int g = 0; g < ngens; ++g)
    for (long k = 0; k < std::labs(e[g]); ++k) out.push_back(letter(g, e[g] >= 0 ? 1 : -1));
  return out;
}

// greedy Tietze passes: drop trivial relators, kill generators that are
// forced trivial by a length-1 relator, eliminate generators occurring
// exactly once in exactly one relator.  Never increases gens or relators.
inline Presentation simplify_presentation(Presentation p) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto& r : p.relators) r = cyclically_reduce(r);
    std::vector<Word> kept;
    std::set<Word> seen;
    for (auto& r : p.relators) {
      if (r.empty()) {
        changed = true;
        continue;
      }
      Word key = r;
      Word alt = cyclically_reduce(inverse(r));
      // cheap cyclic dedup: minimal rotation of r and of r^-1
      auto minrot = [](Word w) {
        Word best = w;
        for (std::size_t i = 1; i < w.size(); ++i) {
          std::rotate(w.begin(), w.begin() + 1, w.end());
          best = std::min(best, w);
        }
        return best;
      };
      key = std::min(minrot(key), minrot(alt));
      if (seen.insert(key).second)
        kept.push_back(r);
      else
        changed = true;
    }
    p.relators = std::move(kept);

    // occurrence counts
    std::vector<int> occ(p.ngens, 0);
    for (const auto& r : p.relators)
      for (int l : r) occ[gen_of(l)]++;

    int kill_gen = -1;  // generator to eliminate
    std::size_t kill_rel = p.relators.size();
    for (std::size_t i = 0; i < p.relators.size() && kill_gen < 0; ++i) {
      const Word& r = p.relators[i];
      if (r.size() == 1) {  // x = 1
        kill_gen = gen_of(r[0]);
        kill_rel = i;
      } else {
        for (int l : r)
          if (occ[gen_of(l)] == 1) {  // x appears once globally: x = word in others
            kill_gen = gen_of(l);
            kill_rel = i;
            break;
          }
      }
    }
    if (kill_gen >= 0) {
      changed = true;
      bool forced_trivial = p.relators[kill_rel].size() == 1;
      p.relators.erase(p.relators.begin() + kill_rel);
      if (forced_trivial) {
        for (auto& r : p.relators) {
          Word nr;
          for (int l : r)
            if (gen_of(l) != kill_gen) nr.push_back(l);
          r = nr;
        }
      }
      // renumber generators above kill_gen down by one
      for (auto& r : p.relators)
        for (auto& l : r) {
          int g = gen_of(l), s = sign_of(l);
          if (g > kill_gen) l = letter(g - 1, s);
        }
      if (kill_gen < static_cast<int>(p.names.size())) p.names.erase(p.names.begin() + kill_gen);
      p.ngens--;
    }
  }
  return p;
}

inline bool is_visibly_free(const Presentation& p) {
  return simplify_presentation(p).relators.empty();
}

}  // namespace grushko
