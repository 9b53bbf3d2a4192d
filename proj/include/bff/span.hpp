#ifndef BFF_SPAN_HPP
#define BFF_SPAN_HPP

#include <cstdint>
#include <string>

namespace bff {

// Half-open byte range into a source buffer, with the line/column of both ends.
struct SourceSpan {
  uint32_t begin = 0;
  uint32_t end = 0;
  uint32_t begin_line = 1;
  uint32_t begin_col = 1;
  uint32_t end_line = 1;
  uint32_t end_col = 1;

  static SourceSpan join(const SourceSpan& a, const SourceSpan& b) {
    SourceSpan s = a;
    if (b.end > s.end) {
      s.end = b.end;
      s.end_line = b.end_line;
      s.end_col = b.end_col;
    }
    return s;
  }
  std::string to_string() const {
    return std::to_string(begin_line) + ":" + std::to_string(begin_col);
  }
};

enum class DiagCategory {
  NameClash,
  FreeVariable,
  UnknownProcedure,
  CallArity,
  ReturnVar,
  NotClosed,
};

struct Diagnostic {
  DiagCategory category;
  std::string message;
  SourceSpan span;
};

const char* diag_category_name(DiagCategory c);

}  // namespace bff

#endif
