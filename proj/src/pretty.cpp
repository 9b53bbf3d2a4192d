#include "bff/pretty.hpp"

#include <sstream>

namespace bff {

namespace {

bool is_infix(const std::string& op) { return op == "!=" || op == "=="; }

void print_expr(std::ostream& os, const Expr& e, bool parenthesize_infix) {
  if (auto* v = std::get_if<VarExpr>(&e.node)) {
    os << v->var.name;
  } else if (auto* op = std::get_if<OpExpr>(&e.node)) {
    if (is_infix(op->op.name) && op->args.size() == 2) {
      if (parenthesize_infix) os << "(";
      print_expr(os, *op->args[0], true);
      os << " " << op->op.name << " ";
      print_expr(os, *op->args[1], true);
      if (parenthesize_infix) os << ")";
    } else if (op->args.empty()) {
      os << op->op.name;  // `~` or a quoted literal; name is the source form
    } else {
      os << op->op.name << "(";
      for (size_t i = 0; i < op->args.size(); ++i) {
        if (i) os << ", ";
        print_expr(os, *op->args[i], false);
      }
      os << ")";
    }
  } else {
    const auto& oc = std::get<OracleExpr>(e.node);
    os << oc.oracle.name << "(";
    print_expr(os, *oc.data, false);
    os << " |> ";
    print_expr(os, *oc.bound, false);
    os << ")";
  }
}

void indent_to(std::ostream& os, int indent) {
  for (int i = 0; i < indent; ++i) os << ' ';
}

void print_stmt(std::ostream& os, const Stmt& st, int indent) {
  if (std::holds_alternative<SkipStmt>(st.node)) {
    indent_to(os, indent);
    os << "skip";
  } else if (auto* a = std::get_if<AssignStmt>(&st.node)) {
    indent_to(os, indent);
    os << a->target.name << " := ";
    print_expr(os, *a->value, false);
  } else if (auto* s = std::get_if<SeqStmt>(&st.node)) {
    print_stmt(os, *s->first, indent);
    os << ";\n";
    print_stmt(os, *s->second, indent);
  } else if (auto* i = std::get_if<IfStmt>(&st.node)) {
    indent_to(os, indent);
    os << "if (";
    print_expr(os, *i->guard, false);
    os << ") {\n";
    print_stmt(os, *i->then_branch, indent + 2);
    os << "\n";
    indent_to(os, indent);
    os << "} else {\n";
    print_stmt(os, *i->else_branch, indent + 2);
    os << "\n";
    indent_to(os, indent);
    os << "}";
  } else {
    const auto& w = std::get<WhileStmt>(st.node);
    indent_to(os, indent);
    os << "while (";
    print_expr(os, *w.guard, false);
    os << ") {\n";
    print_stmt(os, *w.body, indent + 2);
    os << "\n";
    indent_to(os, indent);
    os << "}";
  }
}

void print_term(std::ostream& os, const Term& t, bool atom_position);

void print_closure(std::ostream& os, const Closure& c) {
  os << "{" << c.param.name << " -> ";
  print_term(os, *c.body, false);
  os << "}";
}

void print_term(std::ostream& os, const Term& t, bool atom_position) {
  if (auto* v = std::get_if<VarTerm>(&t.node)) {
    os << v->var.name;
  } else if (auto* l = std::get_if<LambdaTerm>(&t.node)) {
    if (atom_position) os << "(";
    os << "\\" << l->binder.name << ". ";
    print_term(os, *l->body, false);
    if (atom_position) os << ")";
  } else if (auto* a = std::get_if<AppTerm>(&t.node)) {
    if (atom_position) os << "(";
    // left-associative: the function side keeps applications unparenthesized
    if (std::holds_alternative<AppTerm>(a->fn->node)) {
      print_term(os, *a->fn, false);
    } else {
      print_term(os, *a->fn, true);
    }
    os << " @ ";
    print_term(os, *a->arg, true);
    if (atom_position) os << ")";
  } else {
    const auto& c = std::get<CallTerm>(t.node);
    os << "call " << c.proc.name << "(";
    bool first = true;
    for (const auto& cl : c.closures) {
      if (!first) os << ", ";
      first = false;
      print_closure(os, cl);
    }
    for (const auto& arg : c.args) {
      if (!first) os << ", ";
      first = false;
      print_term(os, *arg, false);
    }
    os << ")";
  }
}

void print_procedure(std::ostream& os, const Procedure& p, int indent) {
  indent_to(os, indent);
  os << p.name.name << "(";
  bool first = true;
  for (const auto& v : p.oracle_params) {
    if (!first) os << ", ";
    first = false;
    os << v.name;
  }
  for (const auto& v : p.word_params) {
    if (!first) os << ", ";
    first = false;
    os << v.name;
  }
  os << ") {\n";
  if (!p.locals.empty()) {
    indent_to(os, indent + 2);
    os << "var ";
    for (size_t i = 0; i < p.locals.size(); ++i) {
      if (i) os << ", ";
      os << p.locals[i].name;
    }
    os << ";\n";
  }
  print_stmt(os, *p.body, indent + 2);
  os << "\n";
  indent_to(os, indent + 2);
  os << "return " << p.return_var.name << "\n";
  indent_to(os, indent);
  os << "}";
}

}  // namespace

std::string pretty(const Expr& e) {
  std::ostringstream os;
  print_expr(os, e, false);
  return os.str();
}

std::string pretty(const Stmt& st, int indent) {
  std::ostringstream os;
  print_stmt(os, st, indent);
  return os.str();
}

std::string pretty(const Term& t) {
  std::ostringstream os;
  print_term(os, t, false);
  return os.str();
}

std::string pretty(const Closure& c) {
  std::ostringstream os;
  print_closure(os, c);
  return os.str();
}

std::string pretty(const Procedure& p, int indent) {
  std::ostringstream os;
  print_procedure(os, p, indent);
  return os.str();
}

std::string pretty(const Program& p) {
  std::ostringstream os;
  for (const auto& layer : p.layers) {
    if (auto* box = std::get_if<BoxLayer>(&layer)) {
      os << "box [";
      for (size_t i = 0; i < box->vars.size(); ++i) {
        if (i) os << ", ";
        os << box->vars[i].name;
      }
      os << "] in\n";
    } else {
      const auto& dec = std::get<DeclareLayer>(layer);
      os << "declare\n";
      for (const auto& proc : dec.procs) {
        print_procedure(os, proc, 0);
        os << "\n";
      }
      os << "in\n";
    }
  }
  print_term(os, *p.main, false);
  os << "\n";
  return os.str();
}

}  // namespace bff
