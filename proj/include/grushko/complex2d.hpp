#pragma once

// the canonical based polygonal 2-complex of a presentation: one 0-cell,
// one loop edge per generator, one polygonal face per relator.

#include "grushko/presentation.hpp"

namespace grushko {

struct TwoComplex {
  int nedges = 0;
  std::vector<Word> faces;         // boundary words over edge letters
  std::vector<std::string> names;  // edge names for IO

  // occurrences of edge e in face boundaries ("pages" of the midpoint book),
  // deterministic order: face ascending, side ascending
  std::vector<std::vector<std::pair<int, int>>> corners() const {
    std::vector<std::vector<std::pair<int, int>>> out(static_cast<std::size_t>(nedges));
    for (std::size_t f = 0; f < faces.size(); ++f)
      for (std::size_t s = 0; s < faces[f].size(); ++s)
        out[static_cast<std::size_t>(gen_of(faces[f][s]))].emplace_back(static_cast<int>(f),
                                                                        static_cast<int>(s));
    return out;
  }

  int side_edge(int f, int s) const { return gen_of(faces[static_cast<std::size_t>(f)][static_cast<std::size_t>(s)]); }
  int side_sign(int f, int s) const { return sign_of(faces[static_cast<std::size_t>(f)][static_cast<std::size_t>(s)]); }
  int face_len(int f) const { return static_cast<int>(faces[static_cast<std::size_t>(f)].size()); }

  std::string name_of(int e) const {
    return e < static_cast<int>(names.size()) ? names[static_cast<std::size_t>(e)]
                                              : "e" + std::to_string(e);
  }
};

inline TwoComplex canonical_complex(const Presentation& p) {
  p.check();
  TwoComplex c;
  c.nedges = p.ngens;
  c.faces = p.relators;
  c.names = p.all_names();
  return c;
}

inline Presentation presentation_of(const TwoComplex& c) {
  Presentation p;
  p.ngens = c.nedges;
  p.relators = c.faces;
  p.names = c.names;
  return p;
}

}  // namespace grushko
