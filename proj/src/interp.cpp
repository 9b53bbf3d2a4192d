#include "bff/interp.hpp"

#include <algorithm>
#include <atomic>

namespace bff {

const char* eval_error_kind_name(EvalErrorKind k) {
  switch (k) {
    case EvalErrorKind::UnboundVariable: return "UnboundVariable";
    case EvalErrorKind::FuelExhausted: return "FuelExhausted";
    case EvalErrorKind::GuardNotBoolean: return "GuardNotBoolean";
    case EvalErrorKind::StuckTerm: return "StuckTerm";
    case EvalErrorKind::UnknownOperator: return "UnknownOperator";
    case EvalErrorKind::ArityMismatch: return "ArityMismatch";
    case EvalErrorKind::UnknownProcedure: return "UnknownProcedure";
  }
  return "?";
}

const Word* Store::word(const std::string& name) const {
  auto it = words_.find(name);
  return it == words_.end() ? nullptr : &it->second;
}

const OracleFn* Store::oracle(const std::string& name) const {
  auto it = oracles_.find(name);
  return it == oracles_.end() ? nullptr : &it->second;
}

ProcMap procedures_of(const Program& p) {
  ProcMap m;
  for (const auto* proc : p.procedures()) m[proc->name.name] = proc;
  return m;
}

// --- Substitution -----------------------------------------------------------

namespace {

std::string fresh_name(const std::string& base,
                       const std::set<std::string>& avoid) {
  static std::atomic<uint64_t> counter{0};
  std::string candidate;
  do {
    candidate = base + "_" + std::to_string(++counter);
  } while (avoid.count(candidate));
  return candidate;
}

TermPtr rename_term(const TermPtr& t, const std::string& from,
                    const std::string& to);

Closure rename_closure(const Closure& c, const std::string& from,
                       const std::string& to) {
  if (c.param.name == from) return c;
  return Closure{c.param, rename_term(c.body, from, to), c.span};
}

TermPtr rename_term(const TermPtr& t, const std::string& from,
                    const std::string& to) {
  if (auto* v = std::get_if<VarTerm>(&t->node)) {
    if (v->var.name != from) return t;
    return make_var_term({to, v->var.span});
  }
  if (auto* l = std::get_if<LambdaTerm>(&t->node)) {
    if (l->binder.name == from) return t;
    return make_lambda(l->binder, rename_term(l->body, from, to), t->span);
  }
  if (auto* a = std::get_if<AppTerm>(&t->node)) {
    return make_app(rename_term(a->fn, from, to), rename_term(a->arg, from, to),
                    t->span);
  }
  const auto& c = std::get<CallTerm>(t->node);
  std::vector<Closure> closures;
  closures.reserve(c.closures.size());
  for (const auto& cl : c.closures) closures.push_back(rename_closure(cl, from, to));
  std::vector<TermPtr> args;
  args.reserve(c.args.size());
  for (const auto& arg : c.args) args.push_back(rename_term(arg, from, to));
  return make_call(c.proc, std::move(closures), std::move(args), t->span);
}

Closure substitute_closure(const Closure& c, const std::string& var,
                           const TermPtr& replacement,
                           const std::set<std::string>& repl_free) {
  if (c.param.name == var) return c;
  if (repl_free.count(c.param.name)) {
    std::set<std::string> avoid = repl_free;
    auto bf = free_vars(*c.body);
    avoid.insert(bf.begin(), bf.end());
    std::string fresh = fresh_name(c.param.name, avoid);
    Closure renamed{{fresh, c.param.span}, rename_term(c.body, c.param.name, fresh),
                    c.span};
    return Closure{renamed.param,
                   substitute(renamed.body, var, replacement), c.span};
  }
  return Closure{c.param, substitute(c.body, var, replacement), c.span};
}

}  // namespace

TermPtr substitute(const TermPtr& t, const std::string& var,
                   const TermPtr& replacement) {
  if (auto* v = std::get_if<VarTerm>(&t->node))
    return v->var.name == var ? replacement : t;

  std::set<std::string> repl_free = free_vars(*replacement);

  if (auto* l = std::get_if<LambdaTerm>(&t->node)) {
    if (l->binder.name == var) return t;
    if (repl_free.count(l->binder.name)) {
      std::set<std::string> avoid = repl_free;
      auto bf = free_vars(*l->body);
      avoid.insert(bf.begin(), bf.end());
      std::string fresh = fresh_name(l->binder.name, avoid);
      TermPtr body = rename_term(l->body, l->binder.name, fresh);
      return make_lambda({fresh, l->binder.span},
                         substitute(body, var, replacement), t->span);
    }
    return make_lambda(l->binder, substitute(l->body, var, replacement),
                       t->span);
  }
  if (auto* a = std::get_if<AppTerm>(&t->node)) {
    return make_app(substitute(a->fn, var, replacement),
                    substitute(a->arg, var, replacement), t->span);
  }
  const auto& c = std::get<CallTerm>(t->node);
  std::vector<Closure> closures;
  closures.reserve(c.closures.size());
  for (const auto& cl : c.closures)
    closures.push_back(substitute_closure(cl, var, replacement, repl_free));
  std::vector<TermPtr> args;
  args.reserve(c.args.size());
  for (const auto& arg : c.args)
    args.push_back(substitute(arg, var, replacement));
  return make_call(c.proc, std::move(closures), std::move(args), t->span);
}

// --- Evaluation --------------------------------------------------------------

namespace {

// Call-by-name reduction to a value shape: a variable, a lambda, an oracle
// application X @ t, or a procedure call.
TermPtr whnf(const TermPtr& t, Fuel& fuel) {
  TermPtr cur = t;
  while (true) {
    auto* app = std::get_if<AppTerm>(&cur->node);
    if (!app) return cur;
    TermPtr fn = whnf(app->fn, fuel);
    if (auto* l = std::get_if<LambdaTerm>(&fn->node)) {
      fuel.tick();
      cur = substitute(l->body, l->binder.name, app->arg);
      continue;
    }
    if (auto* v = std::get_if<VarTerm>(&fn->node)) {
      if (is_oracle_name(v->var.name)) {
        // X @ t is a value shape
        if (fn == app->fn) return cur;
        return make_app(fn, app->arg, cur->span);
      }
      throw EvalError(EvalErrorKind::StuckTerm,
                      "type-0 variable " + v->var.name + " applied");
    }
    throw EvalError(EvalErrorKind::StuckTerm,
                    "application of a non-function value");
  }
}

Word eval_call(const ProcMap& decls, const OperatorRegistry& registry,
               const Store& store, const CallTerm& call, Fuel& fuel,
               bool rank0_mode);

Word eval_term_impl(const ProcMap& decls, const OperatorRegistry& registry,
                    const Store& store, const TermPtr& t, Fuel& fuel,
                    bool rank0_mode) {
  fuel.tick();
  TermPtr v = t;
  if (!rank0_mode) {
    v = whnf(t, fuel);
  }
  if (auto* var = std::get_if<VarTerm>(&v->node)) {
    if (is_oracle_name(var->var.name))
      throw EvalError(EvalErrorKind::StuckTerm,
                      "type-1 variable " + var->var.name +
                          " is not a type-0 term");
    const Word* w = store.word(var->var.name);
    if (!w)
      throw EvalError(EvalErrorKind::UnboundVariable,
                      "unbound variable " + var->var.name);
    return *w;
  }
  if (std::holds_alternative<LambdaTerm>(v->node))
    throw EvalError(EvalErrorKind::StuckTerm,
                    "a lambda is not a type-0 value");
  if (auto* app = std::get_if<AppTerm>(&v->node)) {
    auto* fn = std::get_if<VarTerm>(&app->fn->node);
    if (!fn || !is_oracle_name(fn->var.name))
      throw EvalError(EvalErrorKind::StuckTerm,
                      "application did not reduce to an oracle call");
    Word arg = eval_term_impl(decls, registry, store, app->arg, fuel,
                              rank0_mode);
    const OracleFn* oracle = store.oracle(fn->var.name);
    if (!oracle)
      throw EvalError(EvalErrorKind::UnboundVariable,
                      "unbound oracle " + fn->var.name);
    fuel.tick();  // oracle invocation
    return oracle->fn(arg);
  }
  return eval_call(decls, registry, store, std::get<CallTerm>(v->node), fuel,
                   rank0_mode);
}

Store eval_stmt_impl(const ProcMap& decls, const OperatorRegistry& registry,
                     Store store, const Continuation& cont, const Stmt& st,
                     Fuel& fuel, bool rank0_mode);

Word eval_expr_impl(const ProcMap& decls, const OperatorRegistry& registry,
                    const Store& store, const Continuation& cont,
                    const Expr& e, Fuel& fuel, bool rank0_mode) {
  if (auto* v = std::get_if<VarExpr>(&e.node)) {
    const Word* w = store.word(v->var.name);
    if (!w)
      throw EvalError(EvalErrorKind::UnboundVariable,
                      "unbound variable " + v->var.name);
    return *w;
  }
  if (auto* op = std::get_if<OpExpr>(&e.node)) {
    std::vector<Word> args;
    args.reserve(op->args.size());
    for (const auto& a : op->args)
      args.push_back(
          eval_expr_impl(decls, registry, store, cont, *a, fuel, rank0_mode));
    try {
      return registry.apply(op->op.name, args);
    } catch (const OperatorError& err) {
      throw EvalError(EvalErrorKind::UnknownOperator, err.what());
    }
  }
  const auto& oc = std::get<OracleExpr>(e.node);
  Word data =
      eval_expr_impl(decls, registry, store, cont, *oc.data, fuel, rank0_mode);
  Word bound =
      eval_expr_impl(decls, registry, store, cont, *oc.bound, fuel, rank0_mode);
  auto it = cont.find(oc.oracle.name);
  if (it == cont.end())
    throw EvalError(EvalErrorKind::UnboundVariable,
                    "no closure bound to oracle parameter " + oc.oracle.name);
  const Closure& closure = it->second;
  fuel.tick();  // oracle-call application
  Store inner = store;
  inner.set_word(closure.param.name, restrict_word(data, bound));
  return eval_term_impl(decls, registry, inner, closure.body, fuel,
                        rank0_mode);
}

Store eval_stmt_impl(const ProcMap& decls, const OperatorRegistry& registry,
                     Store store, const Continuation& cont, const Stmt& st,
                     Fuel& fuel, bool rank0_mode) {
  fuel.tick();
  if (std::holds_alternative<SkipStmt>(st.node)) return store;
  if (auto* a = std::get_if<AssignStmt>(&st.node)) {
    Word w = eval_expr_impl(decls, registry, store, cont, *a->value, fuel,
                            rank0_mode);
    store.set_word(a->target.name, std::move(w));
    return store;
  }
  if (auto* s = std::get_if<SeqStmt>(&st.node)) {
    store = eval_stmt_impl(decls, registry, std::move(store), cont, *s->first,
                           fuel, rank0_mode);
    return eval_stmt_impl(decls, registry, std::move(store), cont, *s->second,
                          fuel, rank0_mode);
  }
  if (auto* i = std::get_if<IfStmt>(&st.node)) {
    Word g = eval_expr_impl(decls, registry, store, cont, *i->guard, fuel,
                            rank0_mode);
    if (g == "1")
      return eval_stmt_impl(decls, registry, std::move(store), cont,
                            *i->then_branch, fuel, rank0_mode);
    if (g == "0")
      return eval_stmt_impl(decls, registry, std::move(store), cont,
                            *i->else_branch, fuel, rank0_mode);
    throw EvalError(EvalErrorKind::GuardNotBoolean,
                    "if guard evaluated to \"" + g + "\"");
  }
  const auto& w = std::get<WhileStmt>(st.node);
  while (true) {
    Word g = eval_expr_impl(decls, registry, store, cont, *w.guard, fuel,
                            rank0_mode);
    if (g == "0") return store;
    if (g != "1")
      throw EvalError(EvalErrorKind::GuardNotBoolean,
                      "while guard evaluated to \"" + g + "\"");
    fuel.tick();  // one (Wh1) unfolding
    store = eval_stmt_impl(decls, registry, std::move(store), cont, *w.body,
                           fuel, rank0_mode);
  }
}

Word eval_call(const ProcMap& decls, const OperatorRegistry& registry,
               const Store& store, const CallTerm& call, Fuel& fuel,
               bool rank0_mode) {
  auto it = decls.find(call.proc.name);
  if (it == decls.end())
    throw EvalError(EvalErrorKind::UnknownProcedure,
                    "call to undeclared procedure " + call.proc.name);
  const Procedure& proc = *it->second;
  if (call.closures.size() != proc.oracle_params.size() ||
      call.args.size() != proc.word_params.size())
    throw EvalError(EvalErrorKind::ArityMismatch,
                    "call to " + call.proc.name +
                        " with mismatched argument counts");

  // Word arguments evaluate in the caller's store.
  std::vector<Word> words;
  words.reserve(call.args.size());
  for (const auto& arg : call.args)
    words.push_back(
        eval_term_impl(decls, registry, store, arg, fuel, rank0_mode));

  // The activation overlays the caller's store; the caller's bindings are
  // never written back.
  Store activation = store;
  for (size_t i = 0; i < words.size(); ++i)
    activation.set_word(proc.word_params[i].name, std::move(words[i]));
  for (const auto& local : proc.locals)
    activation.set_word(local.name, Word());

  Continuation cont;
  for (size_t i = 0; i < call.closures.size(); ++i)
    cont.emplace(proc.oracle_params[i].name, call.closures[i]);

  Store result = eval_stmt_impl(decls, registry, std::move(activation), cont,
                                *proc.body, fuel, rank0_mode);
  const Word* ret = result.word(proc.return_var.name);
  if (!ret)
    throw EvalError(EvalErrorKind::UnboundVariable,
                    "return variable " + proc.return_var.name + " unbound");
  return *ret;
}

}  // namespace

Word eval_expr(const ProcMap& decls, const OperatorRegistry& registry,
               const Store& store, const Continuation& cont, const Expr& e,
               Fuel& fuel) {
  return eval_expr_impl(decls, registry, store, cont, e, fuel, false);
}

Store eval_stmt(const ProcMap& decls, const OperatorRegistry& registry,
                Store store, const Continuation& cont, const Stmt& st,
                Fuel& fuel) {
  return eval_stmt_impl(decls, registry, std::move(store), cont, st, fuel,
                        false);
}

Word eval_term(const ProcMap& decls, const OperatorRegistry& registry,
               const Store& store, const Term& t, Fuel& fuel) {
  auto anchored = std::make_shared<Term>(t);
  return eval_term_impl(decls, registry, store, anchored, fuel, false);
}

Word eval_term_rank0(const ProcMap& decls, const OperatorRegistry& registry,
                     const Store& store, const Term& t, Fuel& fuel) {
  auto anchored = std::make_shared<Term>(t);
  return eval_term_impl(decls, registry, store, anchored, fuel, true);
}

Word run_program(const Program& prg, const OperatorRegistry& registry,
                 const std::vector<OracleFn>& oracles,
                 const std::vector<Word>& words, const RunOptions& opts) {
  auto boxed_oracles = prg.boxed_oracles();
  auto boxed_words = prg.boxed_words();
  if (oracles.size() != boxed_oracles.size() ||
      words.size() != boxed_words.size())
    throw EvalError(
        EvalErrorKind::ArityMismatch,
        "program expects " + std::to_string(boxed_oracles.size()) +
            " oracle(s) and " + std::to_string(boxed_words.size()) +
            " word input(s), got " + std::to_string(oracles.size()) + " and " +
            std::to_string(words.size()));

  Store store;
  for (size_t i = 0; i < oracles.size(); ++i)
    store.set_oracle(boxed_oracles[i].name, oracles[i]);
  for (size_t i = 0; i < words.size(); ++i) {
    if (!registry.alphabet().valid_word(words[i]))
      throw EvalError(EvalErrorKind::ArityMismatch,
                      "input word not over the alphabet: " + words[i]);
    store.set_word(boxed_words[i].name, words[i]);
  }

  ProcMap decls = procedures_of(prg);
  Fuel fuel(opts.fuel);
  return eval_term_impl(decls, registry, store, prg.main, fuel,
                        opts.rank0_mode);
}

// --- Oracle specs ------------------------------------------------------------

namespace {

Word parse_spec_word(const std::string& text, const Alphabet& alphabet) {
  if (text == "~") return Word();
  for (char c : text)
    if (!alphabet.contains(c))
      throw EvalError(EvalErrorKind::UnknownOperator,
                      "oracle spec word not over the alphabet: " + text);
  return text;
}

}  // namespace

OracleFn parse_oracle_spec(const std::string& spec, const Alphabet& alphabet) {
  auto invalid = [&](const std::string& why) {
    return EvalError(EvalErrorKind::UnknownOperator,
                     "bad oracle spec '" + spec + "': " + why);
  };
  if (spec == "id") return {"id", [](const Word& w) { return w; }};
  if (spec == "reverse")
    return {"reverse", [](const Word& w) { return Word(w.rbegin(), w.rend()); }};
  if (spec == "dup") return {"dup", [](const Word& w) { return w + w; }};
  if (spec == "lenones")
    return {"lenones", [](const Word& w) { return Word(w.size(), '1'); }};
  if (spec.rfind("const:", 0) == 0) {
    Word v = parse_spec_word(spec.substr(6), alphabet);
    return {spec, [v](const Word&) { return v; }};
  }
  if (spec.rfind("prepend:", 0) == 0) {
    Word v = parse_spec_word(spec.substr(8), alphabet);
    return {spec, [v](const Word& w) { return v + w; }};
  }
  if (spec.rfind("compose(", 0) == 0 && spec.back() == ')') {
    std::string inner = spec.substr(8, spec.size() - 9);
    int depth = 0;
    size_t split = std::string::npos;
    for (size_t i = 0; i < inner.size(); ++i) {
      if (inner[i] == '(') ++depth;
      if (inner[i] == ')') --depth;
      if (inner[i] == ',' && depth == 0) {
        split = i;
        break;
      }
    }
    if (split == std::string::npos) throw invalid("compose needs two parts");
    OracleFn a = parse_oracle_spec(inner.substr(0, split), alphabet);
    OracleFn b = parse_oracle_spec(inner.substr(split + 1), alphabet);
    return {spec, [a, b](const Word& w) { return a.fn(b.fn(w)); }};
  }
  throw invalid("unknown combinator");
}

std::vector<std::string> builtin_oracle_specs() {
  return {"id", "reverse", "dup", "lenones", "prepend:1", "const:101"};
}

}  // namespace bff
