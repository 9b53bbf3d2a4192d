#include "bff/lexer.hpp"

#include <cctype>
#include <set>

namespace bff {

const char* token_kind_name(TokenKind k) {
  switch (k) {
    case TokenKind::Ident: return "identifier";
    case TokenKind::Keyword: return "keyword";
    case TokenKind::WordLit: return "word literal";
    case TokenKind::Eps: return "~";
    case TokenKind::Assign: return ":=";
    case TokenKind::Semi: return ";";
    case TokenKind::Comma: return ",";
    case TokenKind::LParen: return "(";
    case TokenKind::RParen: return ")";
    case TokenKind::LBrace: return "{";
    case TokenKind::RBrace: return "}";
    case TokenKind::LBracket: return "[";
    case TokenKind::RBracket: return "]";
    case TokenKind::Restrict: return "|>";
    case TokenKind::Neq: return "!=";
    case TokenKind::Eq: return "==";
    case TokenKind::Arrow: return "->";
    case TokenKind::At: return "@";
    case TokenKind::Lambda: return "\\";
    case TokenKind::Dot: return ".";
    case TokenKind::Eof: return "end of input";
  }
  return "?";
}

namespace {
const std::set<std::string>& keywords() {
  static const std::set<std::string> kw = {"box",  "declare", "in",
                                           "call", "while",   "if",
                                           "else", "skip",    "var",
                                           "return"};
  return kw;
}
}  // namespace

LexResult lex(const std::string& text) {
  LexResult res;
  size_t i = 0;
  uint32_t line = 1, col = 1;

  auto here = [&]() {
    SourceSpan s;
    s.begin = s.end = static_cast<uint32_t>(i);
    s.begin_line = s.end_line = line;
    s.begin_col = s.end_col = col;
    return s;
  };
  auto advance = [&](size_t n) {
    for (size_t k = 0; k < n && i < text.size(); ++k, ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  auto push = [&](TokenKind kind, SourceSpan start, std::string tok_text) {
    start.end = static_cast<uint32_t>(i);
    start.end_line = line;
    start.end_col = col;
    res.tokens.push_back({kind, std::move(tok_text), start});
  };

  while (i < text.size()) {
    char c = text[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance(1);
      continue;
    }
    if (c == '/' && i + 1 < text.size() && text[i + 1] == '/') {
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }

    SourceSpan start = here();
    if (std::isalpha(static_cast<unsigned char>(c))) {
      size_t j = i;
      while (j < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[j])) ||
              text[j] == '_'))
        ++j;
      std::string word = text.substr(i, j - i);
      advance(j - i);
      push(keywords().count(word) ? TokenKind::Keyword : TokenKind::Ident,
           start, word);
      continue;
    }
    if (c == '"') {
      size_t j = i + 1;
      while (j < text.size() && text[j] != '"' && text[j] != '\n') ++j;
      if (j >= text.size() || text[j] != '"') {
        advance(j - i);
        res.errors.push_back({"unterminated word literal", start});
        break;
      }
      std::string body = text.substr(i + 1, j - i - 1);
      advance(j - i + 1);
      push(TokenKind::WordLit, start, body);
      continue;
    }

    auto two = [&](char a, char b) {
      return c == a && i + 1 < text.size() && text[i + 1] == b;
    };
    if (two(':', '=')) { advance(2); push(TokenKind::Assign, start, ":="); continue; }
    if (two('|', '>')) { advance(2); push(TokenKind::Restrict, start, "|>"); continue; }
    if (two('!', '=')) { advance(2); push(TokenKind::Neq, start, "!="); continue; }
    if (two('=', '=')) { advance(2); push(TokenKind::Eq, start, "=="); continue; }
    if (two('-', '>')) { advance(2); push(TokenKind::Arrow, start, "->"); continue; }

    TokenKind kind;
    switch (c) {
      case '~': kind = TokenKind::Eps; break;
      case ';': kind = TokenKind::Semi; break;
      case ',': kind = TokenKind::Comma; break;
      case '(': kind = TokenKind::LParen; break;
      case ')': kind = TokenKind::RParen; break;
      case '{': kind = TokenKind::LBrace; break;
      case '}': kind = TokenKind::RBrace; break;
      case '[': kind = TokenKind::LBracket; break;
      case ']': kind = TokenKind::RBracket; break;
      case '@': kind = TokenKind::At; break;
      case '\\': kind = TokenKind::Lambda; break;
      case '.': kind = TokenKind::Dot; break;
      default: {
        advance(1);
        res.errors.push_back(
            {std::string("invalid character '") +
                 (std::isprint(static_cast<unsigned char>(c))
                      ? std::string(1, c)
                      : "\\x" + std::to_string(static_cast<int>(
                                    static_cast<unsigned char>(c)))) +
                 "'",
             start});
        continue;
      }
    }
    advance(1);
    push(kind, start, std::string(1, c));
  }

  SourceSpan eof = here();
  res.tokens.push_back({TokenKind::Eof, "", eof});
  return res;
}

}  // namespace bff
