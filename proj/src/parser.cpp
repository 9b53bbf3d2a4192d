#include "bff/parser.hpp"

#include <sstream>

#include "bff/lexer.hpp"

namespace bff {

std::string ParseError::to_string() const {
  std::ostringstream os;
  os << span.begin_line << ":" << span.begin_col << ": expected " << expected;
  if (!found.empty()) os << ", found '" << found << "'";
  return os.str();
}

namespace {

struct Stop {};  // unwinds to parse_program after the first recorded error

class Parser {
 public:
  Parser(std::vector<Token> tokens, const OperatorRegistry& registry,
         std::vector<ParseError>& errors)
      : tokens_(std::move(tokens)), registry_(registry), errors_(errors) {}

  Program program() {
    Program prg;
    prg.span = peek().span;
    while (true) {
      if (at_keyword("box")) {
        prg.layers.emplace_back(box_layer());
      } else if (at_keyword("declare")) {
        prg.layers.emplace_back(declare_layer());
      } else {
        break;
      }
    }
    prg.main = term();
    expect(TokenKind::Eof, "end of input");
    return prg;
  }

 private:
  std::vector<Token> tokens_;
  const OperatorRegistry& registry_;
  std::vector<ParseError>& errors_;
  size_t pos_ = 0;

  const Token& peek(size_t ahead = 0) const {
    size_t i = pos_ + ahead;
    return i < tokens_.size() ? tokens_[i] : tokens_.back();
  }
  const Token& advance() {
    const Token& t = peek();
    if (pos_ + 1 < tokens_.size()) ++pos_;
    return t;
  }
  bool at(TokenKind k) const { return peek().kind == k; }
  bool at_keyword(const char* kw) const {
    return peek().kind == TokenKind::Keyword && peek().text == kw;
  }
  [[noreturn]] void fail(const std::string& expected) {
    errors_.push_back({peek().span, expected, peek().text});
    throw Stop{};
  }
  Token expect(TokenKind k, const std::string& what) {
    if (!at(k)) fail(what);
    return advance();
  }
  Token expect_keyword(const char* kw) {
    if (!at_keyword(kw)) fail(std::string("'") + kw + "'");
    return advance();
  }

  Identifier ident(const char* what) {
    Token t = expect(TokenKind::Ident, what);
    return {t.text, t.span};
  }

  // box [a, b] in
  BoxLayer box_layer() {
    BoxLayer layer;
    layer.span = expect_keyword("box").span;
    expect(TokenKind::LBracket, "'['");
    if (!at(TokenKind::RBracket)) {
      layer.vars.push_back(ident("boxed variable"));
      while (at(TokenKind::Comma)) {
        advance();
        layer.vars.push_back(ident("boxed variable"));
      }
    }
    expect(TokenKind::RBracket, "']'");
    expect_keyword("in");
    return layer;
  }

  DeclareLayer declare_layer() {
    DeclareLayer layer;
    layer.span = expect_keyword("declare").span;
    layer.procs.push_back(procedure());
    while (at(TokenKind::Ident) && peek(1).kind == TokenKind::LParen)
      layer.procs.push_back(procedure());
    expect_keyword("in");
    return layer;
  }

  Procedure procedure() {
    Procedure p;
    p.name = ident("procedure name");
    p.span = p.name.span;
    expect(TokenKind::LParen, "'('");
    bool seen_word = false;
    if (!at(TokenKind::RParen)) {
      while (true) {
        Identifier v = ident("parameter");
        if (is_oracle_name(v.name)) {
          if (seen_word)
            errors_.push_back({v.span,
                               "type-1 parameters before type-0 parameters",
                               v.name});
          p.oracle_params.push_back(v);
        } else {
          seen_word = true;
          p.word_params.push_back(v);
        }
        if (!at(TokenKind::Comma)) break;
        advance();
      }
    }
    expect(TokenKind::RParen, "')'");
    expect(TokenKind::LBrace, "'{'");
    if (at_keyword("var")) {
      advance();
      p.locals.push_back(word_ident("local variable"));
      while (at(TokenKind::Comma)) {
        advance();
        p.locals.push_back(word_ident("local variable"));
      }
      expect(TokenKind::Semi, "';'");
    }
    p.body = stmt_seq();
    expect_keyword("return");
    p.return_var = word_ident("return variable");
    Token close = expect(TokenKind::RBrace, "'}'");
    p.span = SourceSpan::join(p.span, close.span);
    return p;
  }

  Identifier word_ident(const char* what) {
    Identifier v = ident(what);
    if (is_oracle_name(v.name))
      errors_.push_back(
          {v.span, std::string(what) + " must be a type-0 (lowercase) name",
           v.name});
    return v;
  }

  StmtPtr stmt_seq() {
    std::vector<StmtPtr> stmts;
    stmts.push_back(statement());
    while (at(TokenKind::Semi)) {
      advance();
      if (at_keyword("return") || at(TokenKind::RBrace))
        break;  // tolerate a trailing ';'
      stmts.push_back(statement());
    }
    return seq_of(std::move(stmts));
  }

  StmtPtr statement() {
    if (at_keyword("skip")) {
      Token t = advance();
      return make_skip(t.span);
    }
    if (at_keyword("while")) {
      Token kw = advance();
      expect(TokenKind::LParen, "'('");
      ExprPtr guard = expression();
      expect(TokenKind::RParen, "')'");
      expect(TokenKind::LBrace, "'{'");
      StmtPtr body = stmt_seq();
      Token close = expect(TokenKind::RBrace, "'}'");
      return make_while(guard, body, SourceSpan::join(kw.span, close.span));
    }
    if (at_keyword("if")) {
      Token kw = advance();
      expect(TokenKind::LParen, "'('");
      ExprPtr guard = expression();
      expect(TokenKind::RParen, "')'");
      expect(TokenKind::LBrace, "'{'");
      StmtPtr then_branch = stmt_seq();
      expect(TokenKind::RBrace, "'}'");
      expect_keyword("else");
      expect(TokenKind::LBrace, "'{'");
      StmtPtr else_branch = stmt_seq();
      Token close = expect(TokenKind::RBrace, "'}'");
      return make_if(guard, then_branch, else_branch,
                     SourceSpan::join(kw.span, close.span));
    }
    if (at(TokenKind::Ident)) {
      Identifier target = word_ident("assignment target");
      expect(TokenKind::Assign, "':='");
      ExprPtr value = expression();
      return make_assign(target, value,
                         SourceSpan::join(target.span, value->span));
    }
    fail("a statement (skip, while, if, or an assignment)");
  }

  // expression := atom (("!=" | "==") atom)?      -- comparisons do not nest
  ExprPtr expression() {
    ExprPtr lhs = atom();
    if (at(TokenKind::Neq) || at(TokenKind::Eq)) {
      Token op = advance();
      ExprPtr rhs = atom();
      SourceSpan sp = SourceSpan::join(lhs->span, rhs->span);
      return make_op_expr({op.text, op.span}, {lhs, rhs}, sp);
    }
    return lhs;
  }

  ExprPtr atom() {
    if (at(TokenKind::Eps)) {
      Token t = advance();
      return make_op_expr({"~", t.span}, {}, t.span);
    }
    if (at(TokenKind::WordLit)) {
      Token t = advance();
      if (!registry_.alphabet().valid_word(t.text))
        errors_.push_back(
            {t.span, "a word over the alphabet", '"' + t.text + '"'});
      return make_op_expr({'"' + t.text + '"', t.span}, {}, t.span);
    }
    if (at(TokenKind::LParen)) {
      advance();
      ExprPtr e = expression();
      expect(TokenKind::RParen, "')'");
      return e;
    }
    if (!at(TokenKind::Ident)) fail("an expression");
    Identifier name = ident("an expression");
    if (is_oracle_name(name.name)) {
      // oracle call X(e |> e)
      expect(TokenKind::LParen, "'(' (oracle call)");
      ExprPtr data = expression();
      expect(TokenKind::Restrict, "'|>'");
      ExprPtr bound = expression();
      Token close = expect(TokenKind::RParen, "')'");
      return make_oracle_expr(name, data, bound,
                              SourceSpan::join(name.span, close.span));
    }
    if (at(TokenKind::LParen)) {
      // prefix operator application
      advance();
      std::vector<ExprPtr> args;
      if (!at(TokenKind::RParen)) {
        args.push_back(expression());
        while (at(TokenKind::Comma)) {
          advance();
          args.push_back(expression());
        }
      }
      Token close = expect(TokenKind::RParen, "')'");
      SourceSpan sp = SourceSpan::join(name.span, close.span);
      check_operator(name, args.size());
      return make_op_expr(name, std::move(args), sp);
    }
    return make_var_expr(name);
  }

  void check_operator(const Identifier& op, size_t nargs) {
    auto info = registry_.lookup(op.name);
    if (!info) {
      errors_.push_back({op.span, "a registered operator", op.name});
      return;
    }
    if (info->arity != static_cast<int>(nargs))
      errors_.push_back({op.span,
                         "operator " + op.name + " applied to " +
                             std::to_string(info->arity) + " argument(s)",
                         op.name + "/" + std::to_string(nargs)});
  }

  // --- Terms ---------------------------------------------------------------

  TermPtr term() {
    if (at(TokenKind::Lambda)) {
      Token t = advance();
      Identifier binder = ident("lambda binder");
      expect(TokenKind::Dot, "'.'");
      TermPtr body = term();
      return make_lambda(binder, body, SourceSpan::join(t.span, body->span));
    }
    TermPtr acc = term_atom();
    while (at(TokenKind::At)) {
      advance();
      TermPtr arg = term_atom();
      acc = make_app(acc, arg, SourceSpan::join(acc->span, arg->span));
    }
    return acc;
  }

  TermPtr term_atom() {
    if (at(TokenKind::LParen)) {
      advance();
      TermPtr t = term();
      expect(TokenKind::RParen, "')'");
      return t;
    }
    if (at_keyword("call")) {
      Token kw = advance();
      Identifier proc = ident("procedure name");
      expect(TokenKind::LParen, "'('");
      std::vector<Closure> closures;
      std::vector<TermPtr> args;
      if (!at(TokenKind::RParen)) {
        while (true) {
          if (at(TokenKind::LBrace)) {
            if (!args.empty())
              errors_.push_back({peek().span,
                                 "closure arguments before term arguments",
                                 peek().text});
            closures.push_back(closure());
          } else {
            args.push_back(term());
          }
          if (!at(TokenKind::Comma)) break;
          advance();
        }
      }
      Token close = expect(TokenKind::RParen, "')'");
      return make_call(proc, std::move(closures), std::move(args),
                       SourceSpan::join(kw.span, close.span));
    }
    if (at(TokenKind::Lambda)) return term();
    if (at(TokenKind::Ident)) return make_var_term(ident("a term"));
    fail("a term");
  }

  Closure closure() {
    Token open = expect(TokenKind::LBrace, "'{'");
    Identifier param = word_ident("closure parameter");
    expect(TokenKind::Arrow, "'->'");
    TermPtr body = term();
    Token close = expect(TokenKind::RBrace, "'}'");
    return Closure{param, body, SourceSpan::join(open.span, close.span)};
  }
};

}  // namespace

ParseResult parse_program(const std::string& text,
                          const OperatorRegistry& registry) {
  ParseResult res;
  LexResult lexed = lex(text);
  for (const auto& e : lexed.errors)
    res.errors.push_back({e.span, "a valid token", e.message});
  if (!lexed.ok()) return res;

  Parser parser(std::move(lexed.tokens), registry, res.errors);
  try {
    Program prg = parser.program();
    if (res.errors.empty()) res.program = std::move(prg);
  } catch (const Stop&) {
    // first error already recorded
  }
  return res;
}

}  // namespace bff
