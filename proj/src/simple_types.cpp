#include "bff/simple_types.hpp"

#include <cassert>
#include <functional>
#include <sstream>
#include <vector>

namespace bff {

SimpleTypePtr SimpleType::word() {
  static SimpleTypePtr w = SimpleTypePtr(new SimpleType());
  return w;
}

SimpleTypePtr SimpleType::arrow(SimpleTypePtr from, SimpleTypePtr to) {
  auto t = new SimpleType();
  t->from_ = std::move(from);
  t->to_ = std::move(to);
  return SimpleTypePtr(t);
}

int SimpleType::order() const {
  if (is_word()) return 0;
  return std::max(1 + from_->order(), to_->order());
}

std::string SimpleType::to_string() const {
  if (is_word()) return "W";
  std::string lhs = from_->to_string();
  if (!from_->is_word()) lhs = "(" + lhs + ")";
  return lhs + " -> " + to_->to_string();
}

bool same_type(const SimpleTypePtr& a, const SimpleTypePtr& b) {
  if (a.get() == b.get()) return true;
  if (!a || !b) return false;
  if (a->is_word() != b->is_word()) return false;
  if (a->is_word()) return true;
  return same_type(a->from(), b->from()) && same_type(a->to(), b->to());
}

namespace {

// Unification nodes: W, arrows, or free variables, with union-find links.
struct TypeTable {
  struct Node {
    enum Kind { Var, W, Arrow } kind = Var;
    int a = -1, b = -1;  // arrow children
    int parent = -1;     // union-find
  };
  std::vector<Node> nodes;

  int fresh() {
    nodes.push_back({});
    return static_cast<int>(nodes.size()) - 1;
  }
  int word() {
    nodes.push_back({Node::W, -1, -1, -1});
    return static_cast<int>(nodes.size()) - 1;
  }
  int arrow(int a, int b) {
    nodes.push_back({Node::Arrow, a, b, -1});
    return static_cast<int>(nodes.size()) - 1;
  }
  int find(int i) {
    while (nodes[i].parent >= 0) {
      int p = nodes[i].parent;
      if (nodes[p].parent >= 0) nodes[i].parent = nodes[p].parent;
      i = p;
    }
    return i;
  }

  bool occurs(int var, int t) {
    t = find(t);
    if (t == var) return true;
    if (nodes[t].kind == Node::Arrow)
      return occurs(var, nodes[t].a) || occurs(var, nodes[t].b);
    return false;
  }

  struct UnifyFail {
    int lhs, rhs;
    bool occurs_check;
  };

  void unify(int x, int y) {
    x = find(x);
    y = find(y);
    if (x == y) return;
    Node& nx = nodes[x];
    Node& ny = nodes[y];
    if (nx.kind == Node::Var) {
      if (occurs(x, y)) throw UnifyFail{x, y, true};
      nx.parent = y;
      return;
    }
    if (ny.kind == Node::Var) {
      if (occurs(y, x)) throw UnifyFail{y, x, true};
      ny.parent = x;
      return;
    }
    if (nx.kind != ny.kind) throw UnifyFail{x, y, false};
    if (nx.kind == Node::W) {
      nx.parent = y;
      return;
    }
    int xa = nx.a, xb = nx.b, ya = ny.a, yb = ny.b;
    nodes[x].parent = y;
    unify(xa, ya);
    unify(xb, yb);
  }

  // Resolves to a concrete type; unconstrained variables default to W.
  SimpleTypePtr resolve(int t) {
    t = find(t);
    switch (nodes[t].kind) {
      case Node::W:
      case Node::Var:
        return SimpleType::word();
      case Node::Arrow:
        return SimpleType::arrow(resolve(nodes[t].a), resolve(nodes[t].b));
    }
    return SimpleType::word();
  }

  std::string print(int t) {
    t = find(t);
    switch (nodes[t].kind) {
      case Node::W: return "W";
      case Node::Var: return "t" + std::to_string(t);
      case Node::Arrow: {
        std::string lhs = print(nodes[t].a);
        if (nodes[find(nodes[t].a)].kind == Node::Arrow) lhs = "(" + lhs + ")";
        return lhs + " -> " + print(nodes[t].b);
      }
    }
    return "?";
  }
};

struct TypeErrorException {
  TypeErrorInfo info;
};

class Inferencer {
 public:
  explicit Inferencer(const Program& p) : prg_(p) {}

  InferResult run() {
    InferResult res;
    try {
      infer_program();
      res.ok = true;
      res.program_type = table_.resolve(program_type_);
      res.program_type_str = res.program_type->to_string();
      for (const auto& [name, t] : env_) res.env[name] = table_.resolve(t);
      for (const auto& [node, t] : term_types_)
        res.term_types[node] = table_.resolve(t);
      res.rank = 0;
      for (const auto& [node, t] : res.term_types)
        if (std::holds_alternative<LambdaTerm>(node->node))
          res.rank = std::max(res.rank, t->order());
    } catch (const TypeErrorException& e) {
      res.ok = false;
      res.error = e.info;
    }
    return res;
  }

 private:
  const Program& prg_;
  TypeTable table_;
  std::map<std::string, int> env_;  // boxed vars (flat namespace; boxes are
                                    // globally unique in well-formed programs)
  std::map<const Term*, int> term_types_;
  int program_type_ = -1;

  [[noreturn]] void type_error(const std::string& msg, int lhs, int rhs,
                               SourceSpan span) {
    TypeErrorInfo info;
    info.message = msg;
    info.lhs = table_.print(lhs);
    info.rhs = table_.print(rhs);
    info.span = span;
    throw TypeErrorException{info};
  }

  void unify_or_error(int a, int b, SourceSpan span, const std::string& what) {
    try {
      table_.unify(a, b);
    } catch (const TypeTable::UnifyFail& f) {
      type_error(f.occurs_check ? "occurs check failed in " + what
                                : "cannot unify types in " + what,
                 f.lhs, f.rhs, span);
    }
  }

  void infer_program() {
    // Boxed inputs are pinned by kind: the well-typed program shape demands
    // W -> W for type-1 boxes and W for type-0 boxes.
    for (const auto& v : prg_.boxed_vars()) {
      int t = is_oracle_name(v.name)
                  ? table_.arrow(table_.word(), table_.word())
                  : table_.word();
      env_[v.name] = t;
    }
    for (const auto* proc : prg_.procedures()) check_procedure(*proc);

    std::map<std::string, int> scope = env_;
    int main_t = infer_term(*prg_.main, scope);
    unify_or_error(main_t, table_.word(), prg_.main->span,
                   "the main term (must be a word)");

    // Overall program type folds the boxes around W.
    int acc = table_.word();
    auto boxes = prg_.boxed_vars();
    for (auto it = boxes.rbegin(); it != boxes.rend(); ++it)
      acc = table_.arrow(env_[it->name], acc);
    program_type_ = acc;
  }

  // Procedure bodies are structurally typed: every expression is W, oracle
  // parameters are W -> W.
  void check_procedure(const Procedure& proc) {
    env_[proc.name.name] = procedure_type(proc);
    check_stmt(*proc.body);
  }

  int procedure_type(const Procedure& proc) {
    int acc = table_.word();
    for (size_t i = proc.word_params.size(); i-- > 0;)
      acc = table_.arrow(table_.word(), acc);
    for (size_t i = proc.oracle_params.size(); i-- > 0;)
      acc = table_.arrow(table_.arrow(table_.word(), table_.word()), acc);
    return acc;
  }

  void check_stmt(const Stmt& st) {
    if (auto* s = std::get_if<SeqStmt>(&st.node)) {
      check_stmt(*s->first);
      check_stmt(*s->second);
    } else if (auto* i = std::get_if<IfStmt>(&st.node)) {
      check_stmt(*i->then_branch);
      check_stmt(*i->else_branch);
    } else if (auto* w = std::get_if<WhileStmt>(&st.node)) {
      check_stmt(*w->body);
    }
    // expressions are W by construction (parser validated operator arities)
  }

  int infer_term(const Term& t, std::map<std::string, int>& scope) {
    int result = -1;
    if (auto* v = std::get_if<VarTerm>(&t.node)) {
      auto it = scope.find(v->var.name);
      if (it == scope.end()) {
        TypeErrorInfo info;
        info.message = "unbound variable " + v->var.name + " in term";
        info.span = v->var.span;
        throw TypeErrorException{info};
      }
      result = it->second;
    } else if (auto* l = std::get_if<LambdaTerm>(&t.node)) {
      // Lowercase binders are type-0 by lexical convention.
      int binder_t = is_oracle_name(l->binder.name) ? table_.fresh()
                                                    : table_.word();
      auto saved = scope.find(l->binder.name) != scope.end()
                       ? std::optional<int>(scope[l->binder.name])
                       : std::nullopt;
      scope[l->binder.name] = binder_t;
      int body_t = infer_term(*l->body, scope);
      if (saved)
        scope[l->binder.name] = *saved;
      else
        scope.erase(l->binder.name);
      result = table_.arrow(binder_t, body_t);
    } else if (auto* a = std::get_if<AppTerm>(&t.node)) {
      int fn_t = infer_term(*a->fn, scope);
      int arg_t = infer_term(*a->arg, scope);
      int res_t = table_.fresh();
      unify_or_error(fn_t, table_.arrow(arg_t, res_t), t.span,
                     "an application");
      result = res_t;
    } else {
      const auto& c = std::get<CallTerm>(t.node);
      const Procedure* proc = prg_.find_procedure(c.proc.name);
      if (!proc || c.closures.size() != proc->oracle_params.size() ||
          c.args.size() != proc->word_params.size()) {
        TypeErrorInfo info;
        info.message = "call to " + c.proc.name +
                       (proc ? " with mismatched arity" : " (undeclared)");
        info.span = t.span;
        throw TypeErrorException{info};
      }
      for (const auto& cl : c.closures) {
        int body_t = infer_closure_body(cl, scope);
        unify_or_error(body_t, table_.word(), cl.body->span,
                       "a closure body (must be a word)");
      }
      for (const auto& arg : c.args) {
        int arg_t = infer_term(*arg, scope);
        unify_or_error(arg_t, table_.word(), arg->span,
                       "a call argument (must be a word)");
      }
      result = table_.word();
    }
    term_types_[&t] = result;
    return result;
  }

  int infer_closure_body(const Closure& cl, std::map<std::string, int>& scope) {
    int param_t = table_.word();
    auto saved = scope.find(cl.param.name) != scope.end()
                     ? std::optional<int>(scope[cl.param.name])
                     : std::nullopt;
    scope[cl.param.name] = param_t;
    int body_t = infer_term(*cl.body, scope);
    if (saved)
      scope[cl.param.name] = *saved;
    else
      scope.erase(cl.param.name);
    return body_t;
  }
};

}  // namespace

InferResult infer_simple(const Program& p) { return Inferencer(p).run(); }

int compute_rank(const Program& p, const InferResult& inference) {
  (void)p;
  return inference.ok ? inference.rank : 0;
}

namespace {

bool terms_rank0(const Term& t) {
  if (std::holds_alternative<LambdaTerm>(t.node)) return false;
  if (auto* a = std::get_if<AppTerm>(&t.node))
    return terms_rank0(*a->fn) && terms_rank0(*a->arg);
  if (auto* c = std::get_if<CallTerm>(&t.node)) {
    for (const auto& cl : c->closures)
      if (!terms_rank0(*cl.body)) return false;
    for (const auto& arg : c->args)
      if (!terms_rank0(*arg)) return false;
  }
  return true;
}

}  // namespace

bool is_rank0(const Program& p) { return terms_rank0(*p.main); }

namespace {

// Local rule replay over the annotation; no inference.
class AnnotationChecker {
 public:
  AnnotationChecker(const Program& p, const InferResult& inf)
      : prg_(p), inf_(inf) {}

  bool run() {
    if (!inf_.ok) return false;
    std::map<std::string, SimpleTypePtr> scope;
    for (const auto& v : prg_.boxed_vars()) {
      auto it = inf_.env.find(v.name);
      if (it == inf_.env.end()) return false;
      bool oracle = is_oracle_name(v.name);
      if (oracle && !(it->second->order() == 1 &&
                      it->second->from()->is_word() &&
                      it->second->to()->is_word()))
        return false;
      if (!oracle && !it->second->is_word()) return false;
      scope[v.name] = it->second;
    }
    auto main_t = check(*prg_.main, scope);
    return main_t && (*main_t)->is_word();
  }

 private:
  const Program& prg_;
  const InferResult& inf_;

  std::optional<SimpleTypePtr> annotated(const Term& t) {
    auto it = inf_.term_types.find(&t);
    if (it == inf_.term_types.end()) return std::nullopt;
    return it->second;
  }

  std::optional<SimpleTypePtr> check(const Term& t,
                                     std::map<std::string, SimpleTypePtr>& scope) {
    auto ann = annotated(t);
    if (!ann) return std::nullopt;
    if (auto* v = std::get_if<VarTerm>(&t.node)) {
      auto it = scope.find(v->var.name);
      if (it == scope.end() || !same_type(it->second, *ann))
        return std::nullopt;
      return ann;
    }
    if (auto* l = std::get_if<LambdaTerm>(&t.node)) {
      if ((*ann)->is_word()) return std::nullopt;
      auto saved = scope;
      scope[l->binder.name] = (*ann)->from();
      auto body = check(*l->body, scope);
      scope = saved;
      if (!body || !same_type(*body, (*ann)->to())) return std::nullopt;
      return ann;
    }
    if (auto* a = std::get_if<AppTerm>(&t.node)) {
      auto fn = check(*a->fn, scope);
      auto arg = check(*a->arg, scope);
      if (!fn || !arg || (*fn)->is_word()) return std::nullopt;
      if (!same_type((*fn)->from(), *arg)) return std::nullopt;
      if (!same_type((*fn)->to(), *ann)) return std::nullopt;
      return ann;
    }
    const auto& c = std::get<CallTerm>(t.node);
    const Procedure* proc = prg_.find_procedure(c.proc.name);
    if (!proc || !(*ann)->is_word()) return std::nullopt;
    if (c.closures.size() != proc->oracle_params.size() ||
        c.args.size() != proc->word_params.size())
      return std::nullopt;
    for (const auto& cl : c.closures) {
      auto saved = scope;
      scope[cl.param.name] = SimpleType::word();
      auto body = check(*cl.body, scope);
      scope = saved;
      if (!body || !(*body)->is_word()) return std::nullopt;
    }
    for (const auto& arg : c.args) {
      auto arg_t = check(*arg, scope);
      if (!arg_t || !(*arg_t)->is_word()) return std::nullopt;
    }
    return ann;
  }
};

}  // namespace

bool check_annotation(const Program& p, const InferResult& inference) {
  return AnnotationChecker(p, inference).run();
}

}  // namespace bff
