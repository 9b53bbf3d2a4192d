#ifndef BFF_LEXER_HPP
#define BFF_LEXER_HPP

#include <string>
#include <vector>

#include "bff/span.hpp"

namespace bff {

enum class TokenKind {
  Ident,       // variable / procedure / operator name
  Keyword,     // box declare in call while if else skip var return
  WordLit,     // "1001" (text holds the unquoted symbols)
  Eps,         // ~
  Assign,      // :=
  Semi,        // ;
  Comma,       // ,
  LParen,      // (
  RParen,      // )
  LBrace,      // {
  RBrace,      // }
  LBracket,    // [
  RBracket,    // ]
  Restrict,    // |>
  Neq,         // !=
  Eq,          // ==
  Arrow,       // ->
  At,          // @
  Lambda,      // backslash
  Dot,         // .
  Eof,
};

struct Token {
  TokenKind kind;
  std::string text;
  SourceSpan span;
};

struct LexError {
  std::string message;
  SourceSpan span;
};

struct LexResult {
  std::vector<Token> tokens;  // always ends with Eof on success
  std::vector<LexError> errors;
  bool ok() const { return errors.empty(); }
};

// Tokenizes a .bff source. `//` comments run to end of line. Word literals
// are validated against the alphabet later (parser), not here.
LexResult lex(const std::string& text);

const char* token_kind_name(TokenKind k);

}  // namespace bff

#endif
