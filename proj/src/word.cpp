#include "bff/word.hpp"

#include <algorithm>

namespace bff {

Word restrict_word_to(const Word& v, size_t n) {
  Word r = v.substr(0, std::min(n, v.size()));
  r += '1';
  r.append(n + 1 - r.size(), '0');
  return r;
}

Word restrict_word(const Word& v, const Word& u) {
  return restrict_word_to(v, u.size());
}

}  // namespace bff
