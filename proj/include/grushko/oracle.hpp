#pragma once

// word-problem oracles with the three-valued contract: True/False are
// authoritative, Unknown only signals exhausted resources.

#include <atomic>
#include <cstdio>
#include <functional>
#include <memory>
#include <mutex>

#include <fcntl.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include "grushko/coset_enumeration.hpp"
#include "grushko/presentation.hpp"

namespace grushko {

enum class Truth { True, False, Unknown };

inline const char* to_string(Truth t) {
  switch (t) {
    case Truth::True: return "true";
    case Truth::False: return "false";
    default: return "unknown";
  }
}

struct NotSmallCancellation : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ExternalOracleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class WordOracle {
 public:
  virtual ~WordOracle() = default;

  Truth is_trivial(const Word& w) const {
    ++calls_;
    return query(free_reduce(w));
  }
  virtual bool exact() const { return true; }
  virtual std::string name() const = 0;
  std::uint64_t call_count() const { return calls_.load(); }

 protected:
  virtual Truth query(const Word& w) const = 0;

 private:
  mutable std::atomic<std::uint64_t> calls_{0};
};

using OracleRef = std::shared_ptr<const WordOracle>;

// ---- free groups ---------------------------------------------------------

class FreeOracle final : public WordOracle {
 public:
  std::string name() const override { return "free"; }

 protected:
  Truth query(const Word& w) const override { return w.empty() ? Truth::True : Truth::False; }
};

inline OracleRef oracle_free(const Presentation& p) {
  if (!p.relators.empty()) {
    for (const auto& r : p.relators)
      if (!free_reduce(r).empty())
        throw std::invalid_argument("oracle_free: presentation has nontrivial relators");
  }
  return std::make_shared<FreeOracle>();
}

// ---- C'(1/6) + Dehn's algorithm -----------------------------------------

namespace detail {

inline std::vector<Word> symmetrize(const Presentation& p) {
  std::set<Word> out;
  for (const auto& r0 : p.relators) {
    Word r = cyclically_reduce(r0);
    if (r.empty()) continue;
    for (int invert = 0; invert < 2; ++invert) {
      Word w = invert ? inverse(r) : r;
      for (std::size_t i = 0; i < w.size(); ++i) {
        out.insert(w);
        std::rotate(w.begin(), w.begin() + 1, w.end());
      }
    }
  }
  return {out.begin(), out.end()};
}

inline std::size_t lcp(const Word& a, const Word& b) {
  std::size_t n = std::min(a.size(), b.size()), i = 0;
  while (i < n && a[i] == b[i]) ++i;
  return i;
}

}  // namespace detail

class DehnOracle final : public WordOracle {
 public:
  explicit DehnOracle(const Presentation& p) : sym_(detail::symmetrize(p)) {
    // metric condition: every piece p satisfies 6|p| < |r| for both relators
    for (std::size_t i = 0; i < sym_.size(); ++i)
      for (std::size_t j = i + 1; j < sym_.size(); ++j) {
        std::size_t l = detail::lcp(sym_[i], sym_[j]);
        if (l == 0) continue;
        if (6 * l >= sym_[i].size() || 6 * l >= sym_[j].size())
          throw NotSmallCancellation("presentation is not C'(1/6)");
      }
  }
  std::string name() const override { return "dehn"; }

 protected:
  Truth query(const Word& w0) const override {
    Word w = cyclically_reduce(w0);
    while (!w.empty()) {
      bool replaced = false;
      for (std::size_t rot = 0; rot < w.size() && !replaced; ++rot) {
        for (const auto& r : sym_) {
          std::size_t l = detail::lcp(w, r);
          if (2 * l > r.size()) {
            // w = s t with s half of r: replace s by (r minus s)^-1
            Word tail(r.begin() + static_cast<long>(l), r.end());
            Word rest(w.begin() + static_cast<long>(l), w.end());
            w = cyclically_reduce(concat(inverse(tail), rest));
            replaced = true;
            break;
          }
        }
        if (!replaced) std::rotate(w.begin(), w.begin() + 1, w.end());
      }
      if (!replaced) return Truth::False;
    }
    return Truth::True;
  }

 private:
  std::vector<Word> sym_;
};

inline OracleRef oracle_dehn(const Presentation& p) { return std::make_shared<DehnOracle>(p); }

// ---- finite groups via coset enumeration --------------------------------

class FiniteOracle final : public WordOracle {
 public:
  explicit FiniteOracle(CosetTable t) : table_(std::move(t)) {}
  std::string name() const override { return "finite"; }
  int group_order() const { return table_.order(); }

 protected:
  Truth query(const Word& w) const override {
    return table_.is_identity(w) ? Truth::True : Truth::False;
  }

 private:
  CosetTable table_;
};

class BoundedOracle final : public WordOracle {
 public:
  bool exact() const override { return false; }
  std::string name() const override { return "bounded"; }

 protected:
  Truth query(const Word& w) const override {
    return w.empty() ? Truth::True : Truth::Unknown;
  }
};

// exact table oracle when enumeration finishes within the row budget,
// otherwise a bounded oracle that only recognises the empty word
inline OracleRef oracle_finite(const Presentation& p, int max_rows) {
  auto t = coset_enumerate(p, max_rows);
  if (t) return std::make_shared<FiniteOracle>(std::move(*t));
  return std::make_shared<BoundedOracle>();
}

// ---- arbitrary callback (tests, induced oracles) ------------------------

class FunctionOracle final : public WordOracle {
 public:
  FunctionOracle(std::string name, bool exact, std::function<Truth(const Word&)> f)
      : name_(std::move(name)), exact_(exact), f_(std::move(f)) {}
  bool exact() const override { return exact_; }
  std::string name() const override { return name_; }

 protected:
  Truth query(const Word& w) const override { return f_(w); }

 private:
  std::string name_;
  bool exact_;
  std::function<Truth(const Word&)> f_;
};

inline OracleRef make_function_oracle(std::string name, bool exact,
                                      std::function<Truth(const Word&)> f) {
  return std::make_shared<FunctionOracle>(std::move(name), exact, std::move(f));
}

// factor-group oracle: answer queries by pushing words through the
// injection into the parent group
inline OracleRef induced_oracle(OracleRef parent, std::vector<Word> injections,
                                std::string name = "induced") {
  return make_function_oracle(std::move(name), parent->exact(),
                              [parent, injections = std::move(injections)](const Word& w) {
                                Word img;
                                for (int l : w) {
                                  const Word& j = injections.at(static_cast<std::size_t>(gen_of(l)));
                                  Word piece = l > 0 ? j : inverse(j);
                                  img.insert(img.end(), piece.begin(), piece.end());
                                }
                                return parent->is_trivial(img);
                              });
}

// ---- external subprocess speaking the W/T/N/U line protocol --------------

class ExternalOracle final : public WordOracle {
 public:
  ExternalOracle(const std::string& command, std::vector<std::string> names)
      : command_(command), names_(std::move(names)) {
    int to_child[2], from_child[2];
    if (pipe(to_child) != 0 || pipe(from_child) != 0)
      throw ExternalOracleError("pipe() failed");
    pid_ = fork();
    if (pid_ < 0) throw ExternalOracleError("fork() failed");
    if (pid_ == 0) {
      dup2(to_child[0], 0);
      dup2(from_child[1], 1);
      close(to_child[0]);
      close(to_child[1]);
      close(from_child[0]);
      close(from_child[1]);
      execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
      _exit(127);
    }
    close(to_child[0]);
    close(from_child[1]);
    out_ = fdopen(to_child[1], "w");
    in_ = fdopen(from_child[0], "r");
    if (!out_ || !in_) throw ExternalOracleError("fdopen() failed");
  }

  ~ExternalOracle() override {
    if (out_) fclose(out_);
    if (in_) fclose(in_);
    if (pid_ > 0) {
      int status = 0;
      waitpid(pid_, &status, 0);
    }
  }

  std::string name() const override { return "external:" + command_; }

 protected:
  Truth query(const Word& w) const override {
    std::lock_guard<std::mutex> lock(mu_);
    std::string line = "W " + format_word(w, names_) + "\n";
    if (fputs(line.c_str(), out_) == EOF || fflush(out_) == EOF)
      throw ExternalOracleError("external oracle: write failed");
    char buf[64];
    if (!fgets(buf, sizeof buf, in_))
      throw ExternalOracleError("external oracle: no response");
    switch (buf[0]) {
      case 'T': return Truth::True;
      case 'N': return Truth::False;
      case 'U': return Truth::Unknown;
      default: throw ExternalOracleError("external oracle: bad response line");
    }
  }

 private:
  std::string command_;
  std::vector<std::string> names_;
  pid_t pid_ = -1;
  FILE* out_ = nullptr;
  FILE* in_ = nullptr;
  mutable std::mutex mu_;
};

inline OracleRef oracle_external(const std::string& command, std::vector<std::string> names) {
  return std::make_shared<ExternalOracle>(command, std::move(names));
}

// ---- derived queries -----------------------------------------------------

// is <gens> trivial?  False beats Unknown beats True.
inline Truth subgroup_is_trivial(const std::vector<Word>& gens, const WordOracle& o) {
  bool unknown = false;
  for (const auto& g : gens) {
    Truth t = o.is_trivial(g);
    if (t == Truth::False) return Truth::False;
    if (t == Truth::Unknown) unknown = true;
  }
  return unknown ? Truth::Unknown : Truth::True;
}

}  // namespace grushko
