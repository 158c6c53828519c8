#pragma once

// words in a free group: letters are nonzero ints, +(g+1) / -(g+1) for
// generator g traversed positively / negatively.

#include <algorithm>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

namespace grushko {

using Word = std::vector<int>;

inline int letter(int gen, int sign) { return sign >= 0 ? gen + 1 : -(gen + 1); }
inline int gen_of(int l) { return std::abs(l) - 1; }
inline int sign_of(int l) { return l > 0 ? 1 : -1; }

inline Word inverse(const Word& w) {
  Word r(w.rbegin(), w.rend());
  for (auto& l : r) l = -l;
  return r;
}

inline Word concat(const Word& a, const Word& b) {
  Word r = a;
  r.insert(r.end(), b.begin(), b.end());
  return r;
}

inline Word free_reduce(const Word& w) {
  Word r;
  for (int l : w) {
    if (!r.empty() && r.back() == -l)
      r.pop_back();
    else
      r.push_back(l);
  }
  return r;
}

inline bool freely_trivial(const Word& w) { return free_reduce(w).empty(); }

// conjugacy representative: freely reduce, then strip matching ends
inline Word cyclically_reduce(const Word& w) {
  Word r = free_reduce(w);
  while (r.size() >= 2 && r.front() == -r.back()) {
    r.erase(r.begin());
    r.pop_back();
  }
  return r;
}

inline Word power(const Word& w, long n) {
  Word base = n >= 0 ? w : inverse(w);
  long k = n >= 0 ? n : -n;
  Word r;
  for (long i = 0; i < k; ++i) r.insert(r.end(), base.begin(), base.end());
  return r;
}

inline Word commutator(const Word& a, const Word& b) {
  return concat(concat(a, b), concat(inverse(a), inverse(b)));
}

// ---- text form ----------------------------------------------------------

struct ParseError : std::runtime_error {
  std::size_t pos;
  ParseError(const std::string& what, std::size_t p)
      : std::runtime_error(what + " (at offset " + std::to_string(p) + ")"), pos(p) {}
};

inline std::string format_word(const Word& w, const std::vector<std::string>& names) {
  if (w.empty()) return "1";
  std::string out;
  std::size_t i = 0;
  while (i < w.size()) {
    std::size_t j = i;
    while (j < w.size() && w[j] == w[i]) ++j;
    long e = static_cast<long>(j - i) * sign_of(w[i]);
    if (!out.empty()) out += ' ';
    int g = gen_of(w[i]);
    out += g < static_cast<int>(names.size()) ? names[g] : "g" + std::to_string(g);
    if (e != 1) out += "^" + std::to_string(e);
    i = j;
  }
  return out;
}

namespace detail {

struct Cursor {
  const std::string& s;
  std::size_t i = 0;
  void skip_ws() {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\n' || s[i] == '\r')) ++i;
  }
  bool eof() {
    skip_ws();
    return i >= s.size();
  }
  char peek() {
    skip_ws();
    return i < s.size() ? s[i] : '\0';
  }
  bool eat(char c) {
    skip_ws();
    if (i < s.size() && s[i] == c) {
      ++i;
      return true;
    }
    return false;
  }
  std::string ident() {
    skip_ws();
    std::size_t start = i;
    auto alpha = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; };
    auto alnum = [&](char c) { return alpha(c) || (c >= '0' && c <= '9'); };
    if (i >= s.size() || !alpha(s[i])) return "";
    while (i < s.size() && alnum(s[i])) ++i;
    return s.substr(start, i - start);
  }
  long integer() {
    skip_ws();
    std::size_t start = i;
    if (i < s.size() && (s[i] == '-' || s[i] == '+')) ++i;
    std::size_t digits = i;
    while (i < s.size() && s[i] >= '0' && s[i] <= '9') ++i;
    if (i == digits) throw ParseError("expected integer", start);
    return std::stol(s.substr(start, i - start));
  }
};

inline int lookup_gen(const std::vector<std::string>& names, const std::string& id,
                      std::size_t pos) {
  for (std::size_t g = 0; g < names.size(); ++g)
    if (names[g] == id) return static_cast<int>(g);
  throw ParseError("unknown generator '" + id + "'", pos);
}

// word = (ident ('^' int)?)* ; "1" stands for the empty word
inline Word parse_word_at(Cursor& c, const std::vector<std::string>& names) {
  Word w;
  for (;;) {
    c.skip_ws();
    if (c.i < c.s.size() && c.s[c.i] == '1') {
      ++c.i;
      continue;
    }
    std::size_t pos = c.i;
    std::string id = c.ident();
    if (id.empty()) break;
    int g = lookup_gen(names, id, pos);
    long e = 1;
    if (c.eat('^')) e = c.integer();
    for (long k = 0; k < std::labs(e); ++k) w.push_back(letter(g, e >= 0 ? 1 : -1));
  }
  return w;
}

}  // namespace detail

inline Word parse_word(const std::string& text, const std::vector<std::string>& names) {
  detail::Cursor c{text};
  Word w = detail::parse_word_at(c, names);
  if (!c.eof()) throw ParseError("trailing input after word", c.i);
  return w;
}

}  // namespace grushko
