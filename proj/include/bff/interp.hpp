#ifndef BFF_INTERP_HPP
#define BFF_INTERP_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "bff/ast.hpp"
#include "bff/operators.hpp"
#include "bff/word.hpp"

namespace bff {

enum class EvalErrorKind {
  UnboundVariable,
  FuelExhausted,
  GuardNotBoolean,
  StuckTerm,
  UnknownOperator,
  ArityMismatch,
  UnknownProcedure,
};

struct EvalError : std::runtime_error {
  EvalErrorKind kind;
  EvalError(EvalErrorKind k, const std::string& msg)
      : std::runtime_error(msg), kind(k) {}
};

const char* eval_error_kind_name(EvalErrorKind k);

// A program-level oracle: a total deterministic word function.
struct OracleFn {
  std::string name;
  std::function<Word(const Word&)> fn;
};

// Disjoint maps from type-0 variables to words and type-1 variables to
// oracle functions.
class Store {
 public:
  const Word* word(const std::string& name) const;
  const OracleFn* oracle(const std::string& name) const;
  void set_word(const std::string& name, Word w) { words_[name] = std::move(w); }
  void set_oracle(const std::string& name, OracleFn f) {
    oracles_[name] = std::move(f);
  }
  const std::map<std::string, Word>& words() const { return words_; }
  const std::map<std::string, OracleFn>& oracles() const { return oracles_; }

 private:
  std::map<std::string, Word> words_;
  std::map<std::string, OracleFn> oracles_;
};

// Per-activation map from a procedure's oracle parameters to the closures
// supplied at the call site; never updated within the activation.
using Continuation = std::map<std::string, Closure>;

// Step budget making evaluation total: ticked on statement rules, term
// reduction steps, and oracle invocations.
struct Fuel {
  int64_t remaining;
  explicit Fuel(int64_t n = kDefault) : remaining(n) {}
  void tick() {
    if (remaining-- <= 0)
      throw EvalError(EvalErrorKind::FuelExhausted, "fuel exhausted");
  }
  static constexpr int64_t kDefault = 1000000;
};

using ProcMap = std::map<std::string, const Procedure*>;

ProcMap procedures_of(const Program& p);

Word eval_expr(const ProcMap& decls, const OperatorRegistry& registry,
               const Store& store, const Continuation& cont, const Expr& e,
               Fuel& fuel);

Store eval_stmt(const ProcMap& decls, const OperatorRegistry& registry,
                Store store, const Continuation& cont, const Stmt& st,
                Fuel& fuel);

// Call-by-name evaluation of a type-0 term.
Word eval_term(const ProcMap& decls, const OperatorRegistry& registry,
               const Store& store, const Term& t, Fuel& fuel);

// Specialized evaluator for lambda-free terms; differential-testing mode.
Word eval_term_rank0(const ProcMap& decls, const OperatorRegistry& registry,
                     const Store& store, const Term& t, Fuel& fuel);

struct RunOptions {
  int64_t fuel = Fuel::kDefault;
  bool rank0_mode = false;
};

// Runs a closed program: binds `oracles` to the type-1 boxes and `words` to
// the type-0 boxes in order, then evaluates the main term.
Word run_program(const Program& prg, const OperatorRegistry& registry,
                 const std::vector<OracleFn>& oracles,
                 const std::vector<Word>& words,
                 const RunOptions& opts = RunOptions());

// Capture-avoiding substitution of `replacement` for `var` in `t`.
TermPtr substitute(const TermPtr& t, const std::string& var,
                   const TermPtr& replacement);

// Oracle specification mini-language used by the CLI:
//   id | const:<word> | prepend:<word> | reverse | dup | lenones
//   | compose(a,b)            (compose(a,b)(w) = a(b(w)))
// <word> is a symbol string, or `~` for the empty word.
OracleFn parse_oracle_spec(const std::string& spec, const Alphabet& alphabet);

// The atomic oracle specs above, for test sweeps.
std::vector<std::string> builtin_oracle_specs();

}  // namespace bff

#endif
