#ifndef BFF_PARSER_HPP
#define BFF_PARSER_HPP

#include <optional>
#include <string>
#include <vector>

#include "bff/ast.hpp"
#include "bff/operators.hpp"

namespace bff {

struct ParseError {
  SourceSpan span;
  std::string expected;  // human description of what was admissible here
  std::string found;     // offending token text
  std::string to_string() const;
};

struct ParseResult {
  std::optional<Program> program;
  std::vector<ParseError> errors;
  bool ok() const { return program.has_value() && errors.empty(); }
};

// Parses a complete program. Operator applications are validated against the
// registry (known name, declared arity); word literals against its alphabet.
ParseResult parse_program(const std::string& text,
                          const OperatorRegistry& registry);

}  // namespace bff

#endif
