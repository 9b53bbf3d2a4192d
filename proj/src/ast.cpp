#include "bff/ast.hpp"

#include <algorithm>
#include <cctype>

namespace bff {

const char* diag_category_name(DiagCategory c) {
  switch (c) {
    case DiagCategory::NameClash: return "name-clash";
    case DiagCategory::FreeVariable: return "free-variable";
    case DiagCategory::UnknownProcedure: return "unknown-procedure";
    case DiagCategory::CallArity: return "call-arity";
    case DiagCategory::ReturnVar: return "return-var";
    case DiagCategory::NotClosed: return "not-closed";
  }
  return "?";
}

bool is_oracle_name(const std::string& name) {
  return !name.empty() && std::isupper(static_cast<unsigned char>(name[0]));
}

ExprPtr make_var_expr(Identifier v) {
  auto e = std::make_shared<Expr>();
  e->span = v.span;
  e->node = VarExpr{std::move(v)};
  return e;
}

ExprPtr make_op_expr(Identifier op, std::vector<ExprPtr> args, SourceSpan sp) {
  auto e = std::make_shared<Expr>();
  e->span = sp;
  e->node = OpExpr{std::move(op), std::move(args)};
  return e;
}

ExprPtr make_oracle_expr(Identifier x, ExprPtr data, ExprPtr bound,
                         SourceSpan sp) {
  auto e = std::make_shared<Expr>();
  e->span = sp;
  e->node = OracleExpr{std::move(x), std::move(data), std::move(bound)};
  return e;
}

StmtPtr make_skip(SourceSpan sp) {
  auto s = std::make_shared<Stmt>();
  s->span = sp;
  s->node = SkipStmt{};
  return s;
}

StmtPtr make_assign(Identifier target, ExprPtr value, SourceSpan sp) {
  auto s = std::make_shared<Stmt>();
  s->span = sp;
  s->node = AssignStmt{std::move(target), std::move(value)};
  return s;
}

StmtPtr make_seq(StmtPtr a, StmtPtr b, SourceSpan sp) {
  auto s = std::make_shared<Stmt>();
  s->span = sp;
  s->node = SeqStmt{std::move(a), std::move(b)};
  return s;
}

StmtPtr make_if(ExprPtr guard, StmtPtr t, StmtPtr e, SourceSpan sp) {
  auto s = std::make_shared<Stmt>();
  s->span = sp;
  s->node = IfStmt{std::move(guard), std::move(t), std::move(e)};
  return s;
}

StmtPtr make_while(ExprPtr guard, StmtPtr body, SourceSpan sp) {
  auto s = std::make_shared<Stmt>();
  s->span = sp;
  s->node = WhileStmt{std::move(guard), std::move(body)};
  return s;
}

StmtPtr seq_of(std::vector<StmtPtr> stmts) {
  if (stmts.empty()) return make_skip({});
  StmtPtr acc = stmts.back();
  for (size_t i = stmts.size() - 1; i-- > 0;) {
    SourceSpan sp = SourceSpan::join(stmts[i]->span, acc->span);
    acc = make_seq(stmts[i], acc, sp);
  }
  return acc;
}

TermPtr make_var_term(Identifier v) {
  auto t = std::make_shared<Term>();
  t->span = v.span;
  t->node = VarTerm{std::move(v)};
  return t;
}

TermPtr make_lambda(Identifier binder, TermPtr body, SourceSpan sp) {
  auto t = std::make_shared<Term>();
  t->span = sp;
  t->node = LambdaTerm{std::move(binder), std::move(body)};
  return t;
}

TermPtr make_app(TermPtr fn, TermPtr arg, SourceSpan sp) {
  auto t = std::make_shared<Term>();
  t->span = sp;
  t->node = AppTerm{std::move(fn), std::move(arg)};
  return t;
}

TermPtr make_call(Identifier proc, std::vector<Closure> closures,
                  std::vector<TermPtr> args, SourceSpan sp) {
  auto t = std::make_shared<Term>();
  t->span = sp;
  t->node = CallTerm{std::move(proc), std::move(closures), std::move(args)};
  return t;
}

// --- Program accessors ----------------------------------------------------

std::vector<Identifier> Program::boxed_vars() const {
  std::vector<Identifier> out;
  for (const auto& layer : layers)
    if (auto* box = std::get_if<BoxLayer>(&layer))
      out.insert(out.end(), box->vars.begin(), box->vars.end());
  return out;
}

std::vector<Identifier> Program::boxed_oracles() const {
  std::vector<Identifier> out;
  for (const auto& v : boxed_vars())
    if (is_oracle_name(v.name)) out.push_back(v);
  return out;
}

std::vector<Identifier> Program::boxed_words() const {
  std::vector<Identifier> out;
  for (const auto& v : boxed_vars())
    if (!is_oracle_name(v.name)) out.push_back(v);
  return out;
}

std::vector<const Procedure*> Program::procedures() const {
  std::vector<const Procedure*> out;
  for (const auto& layer : layers)
    if (auto* dec = std::get_if<DeclareLayer>(&layer))
      for (const auto& p : dec->procs) out.push_back(&p);
  return out;
}

const Procedure* Program::find_procedure(const std::string& name) const {
  for (const auto* p : procedures())
    if (p->name.name == name) return p;
  return nullptr;
}

bool Program::is_normal_form() const {
  if (layers.empty()) return true;
  size_t i = 0;
  if (std::holds_alternative<BoxLayer>(layers[0])) {
    const auto& box = std::get<BoxLayer>(layers[0]);
    bool seen_word = false;
    for (const auto& v : box.vars) {
      if (is_oracle_name(v.name)) {
        if (seen_word) return false;  // type-1 after a type-0
      } else {
        seen_word = true;
      }
    }
    i = 1;
  }
  if (i < layers.size()) {
    if (!std::holds_alternative<DeclareLayer>(layers[i])) return false;
    ++i;
  }
  return i == layers.size();
}

// --- Free variables ---------------------------------------------------------

namespace {

void free_term(const Term& t, std::set<std::string>& bound,
               std::set<std::string>& out);

void free_closure(const Closure& c, std::set<std::string>& bound,
                  std::set<std::string>& out) {
  bool inserted = bound.insert(c.param.name).second;
  free_term(*c.body, bound, out);
  if (inserted) bound.erase(c.param.name);
}

void free_term(const Term& t, std::set<std::string>& bound,
               std::set<std::string>& out) {
  if (auto* v = std::get_if<VarTerm>(&t.node)) {
    if (!bound.count(v->var.name)) out.insert(v->var.name);
  } else if (auto* l = std::get_if<LambdaTerm>(&t.node)) {
    bool inserted = bound.insert(l->binder.name).second;
    free_term(*l->body, bound, out);
    if (inserted) bound.erase(l->binder.name);
  } else if (auto* a = std::get_if<AppTerm>(&t.node)) {
    free_term(*a->fn, bound, out);
    free_term(*a->arg, bound, out);
  } else if (auto* c = std::get_if<CallTerm>(&t.node)) {
    for (const auto& cl : c->closures) free_closure(cl, bound, out);
    for (const auto& arg : c->args) free_term(*arg, bound, out);
  }
}

void free_expr(const Expr& e, const std::set<std::string>& bound,
               std::set<std::string>& out) {
  if (auto* v = std::get_if<VarExpr>(&e.node)) {
    if (!bound.count(v->var.name)) out.insert(v->var.name);
  } else if (auto* op = std::get_if<OpExpr>(&e.node)) {
    for (const auto& a : op->args) free_expr(*a, bound, out);
  } else if (auto* oc = std::get_if<OracleExpr>(&e.node)) {
    if (!bound.count(oc->oracle.name)) out.insert(oc->oracle.name);
    free_expr(*oc->data, bound, out);
    free_expr(*oc->bound, bound, out);
  }
}

void free_stmt(const Stmt& st, const std::set<std::string>& bound,
               std::set<std::string>& out) {
  if (std::holds_alternative<SkipStmt>(st.node)) return;
  if (auto* a = std::get_if<AssignStmt>(&st.node)) {
    if (!bound.count(a->target.name)) out.insert(a->target.name);
    free_expr(*a->value, bound, out);
  } else if (auto* s = std::get_if<SeqStmt>(&st.node)) {
    free_stmt(*s->first, bound, out);
    free_stmt(*s->second, bound, out);
  } else if (auto* i = std::get_if<IfStmt>(&st.node)) {
    free_expr(*i->guard, bound, out);
    free_stmt(*i->then_branch, bound, out);
    free_stmt(*i->else_branch, bound, out);
  } else if (auto* w = std::get_if<WhileStmt>(&st.node)) {
    free_expr(*w->guard, bound, out);
    free_stmt(*w->body, bound, out);
  }
}

}  // namespace

std::set<std::string> free_vars(const Term& t) {
  std::set<std::string> bound, out;
  free_term(t, bound, out);
  return out;
}

std::set<std::string> free_vars(const Closure& c) {
  std::set<std::string> bound, out;
  free_closure(c, bound, out);
  return out;
}

std::set<std::string> free_vars(const Expr& e) {
  std::set<std::string> out;
  free_expr(e, {}, out);
  return out;
}

std::set<std::string> free_vars(const Stmt& st) {
  std::set<std::string> out;
  free_stmt(st, {}, out);
  return out;
}

std::set<std::string> free_vars(const Procedure& p) {
  std::set<std::string> bound;
  for (const auto& v : p.oracle_params) bound.insert(v.name);
  for (const auto& v : p.word_params) bound.insert(v.name);
  for (const auto& v : p.locals) bound.insert(v.name);
  std::set<std::string> out;
  free_stmt(*p.body, bound, out);
  if (!bound.count(p.return_var.name)) out.insert(p.return_var.name);
  return out;
}

std::set<std::string> free_vars(const Program& p) {
  std::set<std::string> out;
  for (const auto* proc : p.procedures()) {
    auto fv = free_vars(*proc);
    out.insert(fv.begin(), fv.end());
  }
  std::set<std::string> boxed;
  for (const auto& v : p.boxed_vars()) boxed.insert(v.name);
  for (const auto& name : free_vars(*p.main))
    if (!boxed.count(name)) out.insert(name);
  return out;
}

// --- Well-formedness ---------------------------------------------------------

namespace {

void check_calls(const Term& t, const Program& prg,
                 std::vector<Diagnostic>& diags) {
  if (auto* l = std::get_if<LambdaTerm>(&t.node)) {
    check_calls(*l->body, prg, diags);
  } else if (auto* a = std::get_if<AppTerm>(&t.node)) {
    check_calls(*a->fn, prg, diags);
    check_calls(*a->arg, prg, diags);
  } else if (auto* c = std::get_if<CallTerm>(&t.node)) {
    const Procedure* proc = prg.find_procedure(c->proc.name);
    if (!proc) {
      diags.push_back({DiagCategory::UnknownProcedure,
                       "call to undeclared procedure " + c->proc.name,
                       c->proc.span});
    } else if (c->closures.size() != proc->oracle_params.size() ||
               c->args.size() != proc->word_params.size()) {
      diags.push_back(
          {DiagCategory::CallArity,
           "call to " + c->proc.name + " expects " +
               std::to_string(proc->oracle_params.size()) + " closure(s) and " +
               std::to_string(proc->word_params.size()) + " argument(s), got " +
               std::to_string(c->closures.size()) + " and " +
               std::to_string(c->args.size()),
           t.span});
    }
    for (const auto& cl : c->closures) check_calls(*cl.body, prg, diags);
    for (const auto& arg : c->args) check_calls(*arg, prg, diags);
  }
}

}  // namespace

std::vector<Diagnostic> check_well_formed(const Program& p) {
  std::vector<Diagnostic> diags;

  std::set<std::string> proc_names;
  for (const auto* proc : p.procedures()) {
    if (!proc_names.insert(proc->name.name).second)
      diags.push_back({DiagCategory::NameClash,
                       "duplicate procedure name " + proc->name.name,
                       proc->name.span});

    std::set<std::string> seen;
    auto check_dup = [&](const Identifier& v, const char* what) {
      if (!seen.insert(v.name).second)
        diags.push_back({DiagCategory::NameClash,
                         std::string(what) + " " + v.name +
                             " clashes with another parameter or local",
                         v.span});
    };
    for (const auto& v : proc->oracle_params) check_dup(v, "parameter");
    for (const auto& v : proc->word_params) check_dup(v, "parameter");
    for (const auto& v : proc->locals) check_dup(v, "local");

    for (const auto& name : free_vars(*proc))
      diags.push_back({DiagCategory::FreeVariable,
                       "variable " + name + " is free in procedure " +
                           proc->name.name,
                       proc->span});

    if (!seen.count(proc->return_var.name))
      diags.push_back({DiagCategory::ReturnVar,
                       "return variable " + proc->return_var.name +
                           " is neither a parameter nor a local",
                       proc->return_var.span});
  }

  std::set<std::string> boxed;
  for (const auto& v : p.boxed_vars())
    if (!boxed.insert(v.name).second)
      diags.push_back({DiagCategory::NameClash,
                       "variable " + v.name + " boxed twice", v.span});

  for (const auto& name : free_vars(*p.main))
    if (!boxed.count(name))
      diags.push_back({DiagCategory::NotClosed,
                       "variable " + name + " is free at program level",
                       p.main->span});

  check_calls(*p.main, p, diags);
  return diags;
}

Program normalize(const Program& p) {
  auto fv = free_vars(p);
  if (!fv.empty())
    throw NotClosedError("program is not closed: " + *fv.begin() +
                         " is free");

  Program out;
  out.span = p.span;
  out.main = p.main;

  BoxLayer box;
  for (const auto& v : p.boxed_vars())
    if (is_oracle_name(v.name)) box.vars.push_back(v);
  for (const auto& v : p.boxed_vars())
    if (!is_oracle_name(v.name)) box.vars.push_back(v);

  DeclareLayer dec;
  for (const auto* proc : p.procedures()) dec.procs.push_back(*proc);

  if (!box.vars.empty()) out.layers.emplace_back(std::move(box));
  if (!dec.procs.empty()) out.layers.emplace_back(std::move(dec));
  return out;
}

// --- Structural equality ---------------------------------------------------

namespace {
bool eq_ident(const Identifier& a, const Identifier& b) {
  return a.name == b.name;
}
}  // namespace

bool structurally_equal(const Expr& a, const Expr& b) {
  if (a.node.index() != b.node.index()) return false;
  if (auto* va = std::get_if<VarExpr>(&a.node))
    return eq_ident(va->var, std::get<VarExpr>(b.node).var);
  if (auto* oa = std::get_if<OpExpr>(&a.node)) {
    const auto& ob = std::get<OpExpr>(b.node);
    if (!eq_ident(oa->op, ob.op) || oa->args.size() != ob.args.size())
      return false;
    for (size_t i = 0; i < oa->args.size(); ++i)
      if (!structurally_equal(*oa->args[i], *ob.args[i])) return false;
    return true;
  }
  const auto& ca = std::get<OracleExpr>(a.node);
  const auto& cb = std::get<OracleExpr>(b.node);
  return eq_ident(ca.oracle, cb.oracle) &&
         structurally_equal(*ca.data, *cb.data) &&
         structurally_equal(*ca.bound, *cb.bound);
}

bool structurally_equal(const Stmt& a, const Stmt& b) {
  if (a.node.index() != b.node.index()) return false;
  if (std::holds_alternative<SkipStmt>(a.node)) return true;
  if (auto* aa = std::get_if<AssignStmt>(&a.node)) {
    const auto& ab = std::get<AssignStmt>(b.node);
    return eq_ident(aa->target, ab.target) &&
           structurally_equal(*aa->value, *ab.value);
  }
  if (auto* sa = std::get_if<SeqStmt>(&a.node)) {
    const auto& sb = std::get<SeqStmt>(b.node);
    return structurally_equal(*sa->first, *sb.first) &&
           structurally_equal(*sa->second, *sb.second);
  }
  if (auto* ia = std::get_if<IfStmt>(&a.node)) {
    const auto& ib = std::get<IfStmt>(b.node);
    return structurally_equal(*ia->guard, *ib.guard) &&
           structurally_equal(*ia->then_branch, *ib.then_branch) &&
           structurally_equal(*ia->else_branch, *ib.else_branch);
  }
  const auto& wa = std::get<WhileStmt>(a.node);
  const auto& wb = std::get<WhileStmt>(b.node);
  return structurally_equal(*wa.guard, *wb.guard) &&
         structurally_equal(*wa.body, *wb.body);
}

bool structurally_equal(const Term& a, const Term& b) {
  if (a.node.index() != b.node.index()) return false;
  if (auto* va = std::get_if<VarTerm>(&a.node))
    return eq_ident(va->var, std::get<VarTerm>(b.node).var);
  if (auto* la = std::get_if<LambdaTerm>(&a.node)) {
    const auto& lb = std::get<LambdaTerm>(b.node);
    return eq_ident(la->binder, lb.binder) &&
           structurally_equal(*la->body, *lb.body);
  }
  if (auto* aa = std::get_if<AppTerm>(&a.node)) {
    const auto& ab = std::get<AppTerm>(b.node);
    return structurally_equal(*aa->fn, *ab.fn) &&
           structurally_equal(*aa->arg, *ab.arg);
  }
  const auto& ca = std::get<CallTerm>(a.node);
  const auto& cb = std::get<CallTerm>(b.node);
  if (!eq_ident(ca.proc, cb.proc) || ca.closures.size() != cb.closures.size() ||
      ca.args.size() != cb.args.size())
    return false;
  for (size_t i = 0; i < ca.closures.size(); ++i) {
    if (!eq_ident(ca.closures[i].param, cb.closures[i].param) ||
        !structurally_equal(*ca.closures[i].body, *cb.closures[i].body))
      return false;
  }
  for (size_t i = 0; i < ca.args.size(); ++i)
    if (!structurally_equal(*ca.args[i], *cb.args[i])) return false;
  return true;
}

bool structurally_equal(const Procedure& a, const Procedure& b) {
  auto eq_ids = [](const std::vector<Identifier>& x,
                   const std::vector<Identifier>& y) {
    if (x.size() != y.size()) return false;
    for (size_t i = 0; i < x.size(); ++i)
      if (x[i].name != y[i].name) return false;
    return true;
  };
  return eq_ident(a.name, b.name) && eq_ids(a.oracle_params, b.oracle_params) &&
         eq_ids(a.word_params, b.word_params) && eq_ids(a.locals, b.locals) &&
         structurally_equal(*a.body, *b.body) &&
         eq_ident(a.return_var, b.return_var);
}

bool structurally_equal(const Program& a, const Program& b) {
  if (a.layers.size() != b.layers.size()) return false;
  for (size_t i = 0; i < a.layers.size(); ++i) {
    if (a.layers[i].index() != b.layers[i].index()) return false;
    if (auto* ba = std::get_if<BoxLayer>(&a.layers[i])) {
      const auto& bb = std::get<BoxLayer>(b.layers[i]);
      if (ba->vars.size() != bb.vars.size()) return false;
      for (size_t j = 0; j < ba->vars.size(); ++j)
        if (ba->vars[j].name != bb.vars[j].name) return false;
    } else {
      const auto& da = std::get<DeclareLayer>(a.layers[i]);
      const auto& db = std::get<DeclareLayer>(b.layers[i]);
      if (da.procs.size() != db.procs.size()) return false;
      for (size_t j = 0; j < da.procs.size(); ++j)
        if (!structurally_equal(da.procs[j], db.procs[j])) return false;
    }
  }
  return structurally_equal(*a.main, *b.main);
}

// --- Sizes -------------------------------------------------------------------

size_t ast_size(const Expr& e) {
  size_t n = 1;
  if (auto* op = std::get_if<OpExpr>(&e.node)) {
    for (const auto& a : op->args) n += ast_size(*a);
  } else if (auto* oc = std::get_if<OracleExpr>(&e.node)) {
    n += ast_size(*oc->data) + ast_size(*oc->bound);
  }
  return n;
}

size_t ast_size(const Stmt& st) {
  size_t n = 1;
  if (auto* a = std::get_if<AssignStmt>(&st.node)) {
    n += ast_size(*a->value);
  } else if (auto* s = std::get_if<SeqStmt>(&st.node)) {
    n += ast_size(*s->first) + ast_size(*s->second);
  } else if (auto* i = std::get_if<IfStmt>(&st.node)) {
    n += ast_size(*i->guard) + ast_size(*i->then_branch) +
         ast_size(*i->else_branch);
  } else if (auto* w = std::get_if<WhileStmt>(&st.node)) {
    n += ast_size(*w->guard) + ast_size(*w->body);
  }
  return n;
}

size_t ast_size(const Term& t) {
  size_t n = 1;
  if (auto* l = std::get_if<LambdaTerm>(&t.node)) {
    n += ast_size(*l->body);
  } else if (auto* a = std::get_if<AppTerm>(&t.node)) {
    n += ast_size(*a->fn) + ast_size(*a->arg);
  } else if (auto* c = std::get_if<CallTerm>(&t.node)) {
    for (const auto& cl : c->closures) n += 1 + ast_size(*cl.body);
    for (const auto& arg : c->args) n += ast_size(*arg);
  }
  return n;
}

size_t ast_size(const Procedure& p) { return 1 + ast_size(*p.body); }

size_t ast_size(const Program& p) {
  size_t n = 1 + ast_size(*p.main);
  for (const auto* proc : p.procedures()) n += ast_size(*proc);
  n += p.boxed_vars().size();
  return n;
}

void collect_whiles(const StmtPtr& st, std::vector<const Stmt*>& out) {
  if (auto* s = std::get_if<SeqStmt>(&st->node)) {
    collect_whiles(s->first, out);
    collect_whiles(s->second, out);
  } else if (auto* i = std::get_if<IfStmt>(&st->node)) {
    collect_whiles(i->then_branch, out);
    collect_whiles(i->else_branch, out);
  } else if (auto* w = std::get_if<WhileStmt>(&st->node)) {
    out.push_back(st.get());
    collect_whiles(w->body, out);
  }
}

}  // namespace bff
