#ifndef BFF_WORD_HPP
#define BFF_WORD_HPP

#include <set>
#include <string>

namespace bff {

// A word is a finite symbol string; every symbol must belong to the active
// alphabet, which always contains '0' and '1'.
using Word = std::string;

class Alphabet {
 public:
  Alphabet() : symbols_{'0', '1'} {}
  explicit Alphabet(const std::string& symbols) : symbols_{'0', '1'} {
    for (char c : symbols) symbols_.insert(c);
  }

  bool contains(char c) const { return symbols_.count(c) != 0; }
  bool valid_word(const Word& w) const {
    for (char c : w)
      if (!contains(c)) return false;
    return true;
  }
  const std::set<char>& symbols() const { return symbols_; }

 private:
  std::set<char> symbols_;
};

// Truncate v to its first min(|u|,|v|) symbols, then pad with 1 0^k so the
// result has length exactly |u| + 1. Depends on u only through |u|.
Word restrict_word(const Word& v, const Word& u);

// Same, with an explicit numeric bound.
Word restrict_word_to(const Word& v, size_t n);

}  // namespace bff

#endif
