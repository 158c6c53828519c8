// Example external oracle for the W/T/N/U line protocol: the word problem
// in Z^n (free abelian).  A word is trivial iff every generator's exponent
// sum vanishes; generator names are learned on the fly, so the same binary
// serves any rank.
//
//   request:  W a b^-1 a^2\n      response: T\n | N\n | U\n

#include <cctype>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

int main() {
  std::string line;
  while (std::getline(std::cin, line)) {
    if (line.empty()) continue;
    if (line[0] != 'W') {
      std::cout << "U\n" << std::flush;
      continue;
    }
    std::map<std::string, long> expo;
    bool bad = false;
    std::size_t i = 1;
    auto skip = [&] { while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i; };
    for (skip(); i < line.size() && !bad; skip()) {
      if (line[i] == '1') {  // empty-word marker
        ++i;
        continue;
      }
      std::size_t start = i;
      while (i < line.size() && (std::isalnum(static_cast<unsigned char>(line[i])) || line[i] == '_')) ++i;
      if (i == start) {
        bad = true;
        break;
      }
      std::string name = line.substr(start, i - start);
      long e = 1;
      if (i < line.size() && line[i] == '^') {
        ++i;
        std::size_t estart = i;
        if (i < line.size() && (line[i] == '-' || line[i] == '+')) ++i;
        while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
        if (i == estart) {
          bad = true;
          break;
        }
        e = std::stol(line.substr(estart, i - estart));
      }
      expo[name] += e;
    }
    if (bad) {
      std::cout << "U\n" << std::flush;
      continue;
    }
    bool trivial = true;
    for (const auto& [_, e] : expo)
      if (e != 0) trivial = false;
    std::cout << (trivial ? "T\n" : "N\n") << std::flush;
  }
  return 0;
}
