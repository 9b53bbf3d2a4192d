#ifndef BFF_AST_HPP
#define BFF_AST_HPP

#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "bff/span.hpp"
#include "bff/word.hpp"

namespace bff {

// Identifier kind is carried lexically: lowercase first letter = type-0
// (word) variable, uppercase = type-1 (oracle) variable. Procedure and
// operator names are resolved by grammar position.
struct Identifier {
  std::string name;
  SourceSpan span;
};

bool is_oracle_name(const std::string& name);

// --- Expressions (statement layer) ------------------------------------

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct VarExpr {
  Identifier var;
};

// Fully applied operator. Word literals (`~`, "101") are nullary operators
// whose name is their source form.
struct OpExpr {
  Identifier op;
  std::vector<ExprPtr> args;
};

// X(data |> bound)
struct OracleExpr {
  Identifier oracle;
  ExprPtr data;
  ExprPtr bound;
};

struct Expr {
  std::variant<VarExpr, OpExpr, OracleExpr> node;
  SourceSpan span;
};

ExprPtr make_var_expr(Identifier v);
ExprPtr make_op_expr(Identifier op, std::vector<ExprPtr> args, SourceSpan sp);
ExprPtr make_oracle_expr(Identifier x, ExprPtr data, ExprPtr bound,
                         SourceSpan sp);

// --- Statements --------------------------------------------------------

struct Stmt;
using StmtPtr = std::shared_ptr<const Stmt>;

struct SkipStmt {};
struct AssignStmt {
  Identifier target;
  ExprPtr value;
};
struct SeqStmt {
  StmtPtr first;
  StmtPtr second;
};
struct IfStmt {
  ExprPtr guard;
  StmtPtr then_branch;
  StmtPtr else_branch;
};
struct WhileStmt {
  ExprPtr guard;
  StmtPtr body;
};

struct Stmt {
  std::variant<SkipStmt, AssignStmt, SeqStmt, IfStmt, WhileStmt> node;
  SourceSpan span;
};

StmtPtr make_skip(SourceSpan sp);
StmtPtr make_assign(Identifier target, ExprPtr value, SourceSpan sp);
StmtPtr make_seq(StmtPtr a, StmtPtr b, SourceSpan sp);
StmtPtr make_if(ExprPtr guard, StmtPtr t, StmtPtr e, SourceSpan sp);
StmtPtr make_while(ExprPtr guard, StmtPtr body, SourceSpan sp);
StmtPtr seq_of(std::vector<StmtPtr> stmts);  // right-nested; empty -> skip

// --- Terms ---------------------------------------------------------------

struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct Closure {
  Identifier param;  // type-0
  TermPtr body;
  SourceSpan span;
};

struct VarTerm {
  Identifier var;
};
struct LambdaTerm {
  Identifier binder;
  TermPtr body;
};
struct AppTerm {
  TermPtr fn;
  TermPtr arg;
};
struct CallTerm {
  Identifier proc;
  std::vector<Closure> closures;
  std::vector<TermPtr> args;
};

struct Term {
  std::variant<VarTerm, LambdaTerm, AppTerm, CallTerm> node;
  SourceSpan span;
};

TermPtr make_var_term(Identifier v);
TermPtr make_lambda(Identifier binder, TermPtr body, SourceSpan sp);
TermPtr make_app(TermPtr fn, TermPtr arg, SourceSpan sp);
TermPtr make_call(Identifier proc, std::vector<Closure> closures,
                  std::vector<TermPtr> args, SourceSpan sp);

// --- Procedures and programs ---------------------------------------------

struct Procedure {
  Identifier name;
  std::vector<Identifier> oracle_params;  // type-1 parameters, in order
  std::vector<Identifier> word_params;    // type-0 parameters, in order
  std::vector<Identifier> locals;         // optional `var ...;` block
  StmtPtr body;
  Identifier return_var;
  SourceSpan span;
};

struct BoxLayer {
  std::vector<Identifier> vars;
  SourceSpan span;
};
struct DeclareLayer {
  std::vector<Procedure> procs;
  SourceSpan span;
};
using Layer = std::variant<BoxLayer, DeclareLayer>;

// A program is a stack of box/declare layers around a main term. Normal form
// means: one box group listing all type-1 then all type-0 inputs, then one
// declare group, then the term.
struct Program {
  std::vector<Layer> layers;
  TermPtr main;
  SourceSpan span;

  std::vector<Identifier> boxed_vars() const;     // in layer order
  std::vector<Identifier> boxed_oracles() const;  // type-1 subset, in order
  std::vector<Identifier> boxed_words() const;    // type-0 subset, in order
  std::vector<const Procedure*> procedures() const;
  const Procedure* find_procedure(const std::string& name) const;
  bool is_normal_form() const;
};

// --- Core operations -------------------------------------------------------

// Free variables: everything not bound by a lambda, a closure parameter,
// procedure parameters/locals, or an enclosing box.
std::set<std::string> free_vars(const Term& t);
std::set<std::string> free_vars(const Closure& c);
std::set<std::string> free_vars(const Stmt& st);
std::set<std::string> free_vars(const Expr& e);
std::set<std::string> free_vars(const Procedure& p);  // body minus params/locals
std::set<std::string> free_vars(const Program& p);

// Structural well-formedness diagnostics; empty result means OK.
std::vector<Diagnostic> check_well_formed(const Program& p);

struct NotClosedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Commute box/declare layers into normal form. Semantics-preserving on
// closed well-formed programs; throws NotClosedError otherwise.
Program normalize(const Program& p);

// Structural equality, ignoring source spans.
bool structurally_equal(const Expr& a, const Expr& b);
bool structurally_equal(const Stmt& a, const Stmt& b);
bool structurally_equal(const Term& a, const Term& b);
bool structurally_equal(const Procedure& a, const Procedure& b);
bool structurally_equal(const Program& a, const Program& b);

// Node counts (expressions, statements, terms, closures, procedures, layers).
size_t ast_size(const Expr& e);
size_t ast_size(const Stmt& st);
size_t ast_size(const Term& t);
size_t ast_size(const Procedure& p);
size_t ast_size(const Program& p);

// All while statements of a statement tree, outermost first.
void collect_whiles(const StmtPtr& st, std::vector<const Stmt*>& out);

}  // namespace bff

#endif
