#include "bff/sct.hpp"

#include <algorithm>
#include <sstream>

namespace bff {

// --- Flattening ----------------------------------------------------------------

namespace {

bool is_var(const Expr& e) { return std::holds_alternative<VarExpr>(e.node); }

bool flat_assignment(const AssignStmt& a) {
  const Expr& e = *a.value;
  if (is_var(e)) return true;
  if (auto* op = std::get_if<OpExpr>(&e.node)) {
    for (const auto& arg : op->args)
      if (!is_var(*arg)) return false;
    return true;
  }
  const auto& oc = std::get<OracleExpr>(e.node);
  return is_var(*oc.data) && is_var(*oc.bound);
}

bool stmt_flat(const Stmt& st) {
  if (auto* a = std::get_if<AssignStmt>(&st.node)) return flat_assignment(*a);
  if (auto* s = std::get_if<SeqStmt>(&st.node))
    return stmt_flat(*s->first) && stmt_flat(*s->second);
  if (auto* i = std::get_if<IfStmt>(&st.node))
    return stmt_flat(*i->then_branch) && stmt_flat(*i->else_branch);
  if (auto* w = std::get_if<WhileStmt>(&st.node)) return stmt_flat(*w->body);
  return true;
}

class Flattener {
 public:
  explicit Flattener(const Procedure& proc) : proc_(proc) {
    for (const auto& v : proc.oracle_params) used_.insert(v.name);
    for (const auto& v : proc.word_params) used_.insert(v.name);
    for (const auto& v : proc.locals) used_.insert(v.name);
  }

  Procedure run() {
    Procedure out = proc_;
    out.body = flatten_stmt(*proc_.body);
    out.locals = proc_.locals;
    for (const auto& t : temps_) out.locals.push_back({t, {}});
    return out;
  }

 private:
  const Procedure& proc_;
  std::set<std::string> used_;
  std::vector<std::string> temps_;
  int counter_ = 0;

  Identifier fresh_temp() {
    std::string name;
    do {
      name = "t" + std::to_string(++counter_);
    } while (used_.count(name));
    used_.insert(name);
    temps_.push_back(name);
    return {name, {}};
  }

  // Reduces e to a variable, emitting prefix assignments.
  ExprPtr atomize(const Expr& e, std::vector<StmtPtr>& prefix) {
    if (is_var(e)) return std::make_shared<Expr>(e);
    ExprPtr flat = flatten_expr(e, prefix);
    Identifier temp = fresh_temp();
    prefix.push_back(make_assign(temp, flat, e.span));
    return make_var_expr(temp);
  }

  // One operator/oracle level over variables.
  ExprPtr flatten_expr(const Expr& e, std::vector<StmtPtr>& prefix) {
    if (is_var(e)) return std::make_shared<Expr>(e);
    if (auto* op = std::get_if<OpExpr>(&e.node)) {
      std::vector<ExprPtr> args;
      args.reserve(op->args.size());
      for (const auto& a : op->args) args.push_back(atomize(*a, prefix));
      return make_op_expr(op->op, std::move(args), e.span);
    }
    const auto& oc = std::get<OracleExpr>(e.node);
    ExprPtr data = atomize(*oc.data, prefix);
    ExprPtr bound = atomize(*oc.bound, prefix);
    return make_oracle_expr(oc.oracle, data, bound, e.span);
  }

  StmtPtr flatten_stmt(const Stmt& st) {
    if (std::holds_alternative<SkipStmt>(st.node))
      return std::make_shared<Stmt>(st);
    if (auto* a = std::get_if<AssignStmt>(&st.node)) {
      std::vector<StmtPtr> prefix;
      ExprPtr value = flatten_expr(*a->value, prefix);
      prefix.push_back(make_assign(a->target, value, st.span));
      return seq_of(std::move(prefix));
    }
    if (auto* s = std::get_if<SeqStmt>(&st.node))
      return make_seq(flatten_stmt(*s->first), flatten_stmt(*s->second),
                      st.span);
    if (auto* i = std::get_if<IfStmt>(&st.node))
      return make_if(i->guard, flatten_stmt(*i->then_branch),
                     flatten_stmt(*i->else_branch), st.span);
    const auto& w = std::get<WhileStmt>(st.node);
    return make_while(w.guard, flatten_stmt(*w.body), st.span);
  }
};

}  // namespace

bool is_flat(const Procedure& proc) { return stmt_flat(*proc.body); }

Procedure flatten(const Procedure& proc) {
  if (is_flat(proc)) return proc;
  return Flattener(proc).run();
}

Program flatten(const Program& prg) {
  Program out = prg;
  for (auto& layer : out.layers)
    if (auto* dec = std::get_if<DeclareLayer>(&layer))
      for (auto& proc : dec->procs) proc = flatten(proc);
  return out;
}

// --- SCGs ------------------------------------------------------------------

Scg scg_of_assignment(const AssignStmt& asg, const std::vector<std::string>& V,
                      const OperatorRegistry& registry) {
  Scg g;
  g.vars = V;
  std::set<std::string> vs(V.begin(), V.end());
  const std::string& target = asg.target.name;

  for (const auto& v : V)
    if (v != target) g.in_edge[v] = {v, false};

  if (!vs.count(target)) return g;

  const Expr& e = *asg.value;
  if (auto* var = std::get_if<VarExpr>(&e.node)) {
    if (vs.count(var->var.name)) g.in_edge[target] = {var->var.name, false};
    return g;
  }
  if (auto* op = std::get_if<OpExpr>(&e.node)) {
    auto info = registry.lookup(op->op.name);
    if (!info) throw OperatorError("unknown operator: " + op->op.name);
    if (info->decrease) {
      int i = info->decrease->index - 1;
      if (i >= 0 && i < static_cast<int>(op->args.size())) {
        auto* src = std::get_if<VarExpr>(&op->args[i]->node);
        if (src && vs.count(src->var.name))
          g.in_edge[target] = {src->var.name, info->decrease->strict};
      }
    }
    return g;
  }
  // oracle call: no arrow into the target
  return g;
}

// --- Trace summaries -----------------------------------------------------------

namespace {
void require_same_vars(const TraceSummary& a, const TraceSummary& b) {
  if (a.vars != b.vars)
    throw VariableSetMismatch("trace summaries over different variable sets");
}
}  // namespace

TraceSummary summary_identity(const std::vector<std::string>& V) {
  TraceSummary s;
  s.vars = V;
  for (const auto& v : V) s.at[v].traced.insert({v, false});
  return s;
}

TraceSummary summary_of_scg(const Scg& g) {
  TraceSummary s;
  s.vars = g.vars;
  for (const auto& v : g.vars) {
    auto it = g.in_edge.find(v);
    if (it == g.in_edge.end())
      s.at[v].broken = true;
    else
      s.at[v].traced.insert({it->second.first, it->second.second});
  }
  return s;
}

TraceSummary summary_compose(const TraceSummary& s1, const TraceSummary& s2) {
  require_same_vars(s1, s2);
  TraceSummary out;
  out.vars = s1.vars;
  for (const auto& v : out.vars) {
    const auto& second = s2.at.at(v);
    auto& target = out.at[v];
    if (second.broken) target.broken = true;
    for (const auto& [mid, down2] : second.traced) {
      const auto& first = s1.at.at(mid);
      if (first.broken) target.broken = true;
      for (const auto& [origin, down1] : first.traced)
        target.traced.insert({origin, down1 || down2});
    }
  }
  return out;
}

TraceSummary summary_union(const TraceSummary& s1, const TraceSummary& s2) {
  require_same_vars(s1, s2);
  TraceSummary out = s1;
  for (const auto& v : out.vars) {
    const auto& add = s2.at.at(v);
    auto& target = out.at[v];
    target.broken |= add.broken;
    target.traced.insert(add.traced.begin(), add.traced.end());
  }
  return out;
}

TraceSummary summary_star(const TraceSummary& s) {
  TraceSummary acc = summary_identity(s.vars);
  while (true) {
    TraceSummary next = summary_union(acc, summary_compose(acc, s));
    if (next == acc) return acc;
    acc = std::move(next);
  }
}

TraceSummary summarize(const Stmt& st, const std::vector<std::string>& V,
                       const OperatorRegistry& registry) {
  if (std::holds_alternative<SkipStmt>(st.node)) return summary_identity(V);
  if (auto* a = std::get_if<AssignStmt>(&st.node))
    return summary_of_scg(scg_of_assignment(*a, V, registry));
  if (auto* s = std::get_if<SeqStmt>(&st.node))
    return summary_compose(summarize(*s->first, V, registry),
                           summarize(*s->second, V, registry));
  if (auto* i = std::get_if<IfStmt>(&st.node))
    return summary_union(summarize(*i->then_branch, V, registry),
                         summarize(*i->else_branch, V, registry));
  const auto& w = std::get<WhileStmt>(st.node);
  return summary_star(summarize(*w.body, V, registry));
}

// --- SCP_S ----------------------------------------------------------------------

namespace {

void collect_guard_vars(const Stmt& st, std::set<std::string>& out) {
  if (auto* s = std::get_if<SeqStmt>(&st.node)) {
    collect_guard_vars(*s->first, out);
    collect_guard_vars(*s->second, out);
  } else if (auto* i = std::get_if<IfStmt>(&st.node)) {
    collect_guard_vars(*i->then_branch, out);
    collect_guard_vars(*i->else_branch, out);
  } else if (auto* w = std::get_if<WhileStmt>(&st.node)) {
    for (const auto& name : free_vars(*w->guard))
      if (!is_oracle_name(name)) out.insert(name);
    collect_guard_vars(*w->body, out);
  }
}

// `x != ~` for a single variable x.
std::optional<std::string> canonical_guard(const Expr& guard) {
  auto* op = std::get_if<OpExpr>(&guard.node);
  if (!op || op->op.name != "!=" || op->args.size() != 2) return std::nullopt;
  auto* lhs = std::get_if<VarExpr>(&op->args[0]->node);
  auto* rhs = std::get_if<OpExpr>(&op->args[1]->node);
  if (!lhs || !rhs || rhs->op.name != "~" || !rhs->args.empty())
    return std::nullopt;
  if (is_oracle_name(lhs->var.name)) return std::nullopt;
  return lhs->var.name;
}

void check_loops(const Stmt& st, const std::string& proc_name,
                 const std::vector<std::string>& V,
                 const OperatorRegistry& registry,
                 std::vector<LoopCheck>& out) {
  if (auto* s = std::get_if<SeqStmt>(&st.node)) {
    check_loops(*s->first, proc_name, V, registry, out);
    check_loops(*s->second, proc_name, V, registry, out);
    return;
  }
  if (auto* i = std::get_if<IfStmt>(&st.node)) {
    check_loops(*i->then_branch, proc_name, V, registry, out);
    check_loops(*i->else_branch, proc_name, V, registry, out);
    return;
  }
  auto* w = std::get_if<WhileStmt>(&st.node);
  if (!w) return;

  LoopCheck check;
  check.proc = proc_name;
  check.span = st.span;
  auto guard = canonical_guard(*w->guard);
  if (!guard) {
    check.accepted = false;
    check.reason = "non-canonical-guard (expected `x != ~`)";
  } else {
    check.guard_var = *guard;
    TraceSummary s = summarize(*w->body, V, registry);
    const auto& origins = s.at.at(*guard);
    TraceSummary::Origins wanted;
    wanted.traced.insert({*guard, true});
    if (origins == wanted) {
      check.accepted = true;
    } else {
      check.accepted = false;
      if (origins.broken) {
        check.reason = "missing-down-thread (broken trace)";
      } else if (origins.traced.count({*guard, false})) {
        check.reason = "missing-down-thread (no down-arrow on some trace)";
      } else {
        std::string other;
        for (const auto& [v, d] : origins.traced)
          if (v != *guard) other = v;
        check.reason = "missing-down-thread (trace from " +
                       (other.empty() ? std::string("elsewhere") : other) +
                       ")";
      }
    }
  }
  out.push_back(check);
  check_loops(*w->body, proc_name, V, registry, out);
}

}  // namespace

std::vector<std::string> guard_variable_set(const Procedure& proc) {
  std::set<std::string> vars;
  collect_guard_vars(*proc.body, vars);
  return {vars.begin(), vars.end()};
}

ScpVerdict check_scps(const Program& prg, const OperatorRegistry& registry) {
  ScpVerdict verdict;
  verdict.accepted = true;
  for (const auto* proc : prg.procedures()) {
    Procedure flat = flatten(*proc);
    std::vector<std::string> V = guard_variable_set(flat);
    check_loops(*flat.body, proc->name.name, V, registry, verdict.loops);
  }
  for (const auto& loop : verdict.loops)
    if (!loop.accepted) verdict.accepted = false;
  return verdict;
}

// --- DOT export -------------------------------------------------------------

namespace {

std::string dot_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

void emit_column(std::ostream& os, const std::vector<std::string>& vars,
                 int col) {
  os << "  { rank=same;";
  for (const auto& v : vars)
    os << " " << dot_quote(v + "_" + std::to_string(col)) << " [label="
       << dot_quote(v) << "];";
  os << " }\n";
}

void emit_edges(std::ostream& os, const Scg& g, int from_col) {
  for (const auto& [target, edge] : g.in_edge) {
    os << "  " << dot_quote(edge.first + "_" + std::to_string(from_col))
       << " -> " << dot_quote(target + "_" + std::to_string(from_col + 1));
    if (edge.second) os << " [label=\"down\", style=bold]";
    os << ";\n";
  }
}

}  // namespace

std::string scg_to_dot(const Scg& g, const std::string& label) {
  std::ostringstream os;
  os << "digraph scg {\n  rankdir=LR;\n  node [shape=plaintext];\n  label="
     << dot_quote(label) << ";\n";
  emit_column(os, g.vars, 0);
  emit_column(os, g.vars, 1);
  emit_edges(os, g, 0);
  os << "}\n";
  return os.str();
}

std::string scg_concat_to_dot(const std::vector<Scg>& gs,
                              const std::string& label) {
  std::ostringstream os;
  os << "digraph scg_concat {\n  rankdir=LR;\n  node [shape=plaintext];\n"
     << "  label=" << dot_quote(label) << ";\n";
  if (gs.empty()) {
    os << "}\n";
    return os.str();
  }
  for (size_t i = 0; i <= gs.size(); ++i) emit_column(os, gs[0].vars, static_cast<int>(i));
  for (size_t i = 0; i < gs.size(); ++i) emit_edges(os, gs[i], static_cast<int>(i));
  os << "}\n";
  return os.str();
}

}  // namespace bff
