#include "bff/tier.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

namespace bff {

const char* while_mode_name(WhileMode m) {
  return m == WhileMode::WInit ? "WINIT" : "WH";
}

const char* safe_verdict_name(SafeVerdict v) {
  switch (v) {
    case SafeVerdict::Safe0: return "SAFE0";
    case SafeVerdict::Safe: return "SAFE";
    case SafeVerdict::NotSafe: return "NotSafe";
  }
  return "?";
}

int TierConstraints::fresh(const std::string& name) {
  names.push_back(name);
  return nvars++;
}

// --- Constraint generation ---------------------------------------------------

namespace {

struct GenCtx {
  int kin;
  int kout;
  int depth;  // number of enclosing while loops
};

class Generator {
 public:
  Generator(const Procedure& proc, const OperatorRegistry& registry,
            WhileMode mode)
      : proc_(proc), registry_(registry), mode_(mode) {}

  TierConstraints run() {
    cs_.mode = mode_;
    cs_.k_var = cs_.fresh("k");
    cs_.kin_var = cs_.fresh("k_in");
    cs_.kout_var = cs_.fresh("k_out");
    for (const auto& v : proc_.word_params)
      cs_.gamma_vars[v.name] = cs_.fresh("tier(" + v.name + ")");
    for (const auto& v : proc_.locals)
      cs_.gamma_vars[v.name] = cs_.fresh("tier(" + v.name + ")");
    if (mode_ == WhileMode::WInit) cs_.must_be_zero.push_back(cs_.kout_var);
    stmt(*proc_.body, cs_.k_var, {cs_.kin_var, cs_.kout_var, 0});
    return std::move(cs_);
  }

 private:
  const Procedure& proc_;
  const OperatorRegistry& registry_;
  WhileMode mode_;
  TierConstraints cs_;

  int gamma(const std::string& name) {
    auto it = cs_.gamma_vars.find(name);
    if (it != cs_.gamma_vars.end()) return it->second;
    // Unknown variables only occur in ill-formed procedures; keep generation
    // total by materializing a tier variable for them.
    int v = cs_.fresh("tier(" + name + ")");
    cs_.gamma_vars[name] = v;
    return v;
  }

  // t: the statement's post-subsumption tier variable.
  void stmt(const Stmt& st, int t, GenCtx ctx) {
    if (std::holds_alternative<SkipStmt>(st.node)) return;

    if (auto* a = std::get_if<AssignStmt>(&st.node)) {
      int te = expr(*a->value, ctx);
      int gx = gamma(a->target.name);
      cs_.le(gx, te);  // the written variable's tier bounds the source
      cs_.le(gx, t);
      return;
    }
    if (auto* s = std::get_if<SeqStmt>(&st.node)) {
      stmt(*s->first, t, ctx);
      stmt(*s->second, t, ctx);
      return;
    }
    if (auto* i = std::get_if<IfStmt>(&st.node)) {
      int b = cs_.fresh("if");
      int tg = expr(*i->guard, ctx);
      cs_.eq(tg, b);
      stmt(*i->then_branch, b, ctx);
      stmt(*i->else_branch, b, ctx);
      cs_.le(b, t);
      return;
    }
    const auto& w = std::get<WhileStmt>(st.node);
    cs_.has_while = true;
    int b = cs_.fresh("while");
    cs_.at_least_one.push_back(b);
    if (mode_ == WhileMode::WInit && ctx.depth == 0) {
      // guard sits under the loop's own outermost tier; body runs at (b, b)
      int tg = expr(*w.guard, {ctx.kin, b, ctx.depth});
      cs_.eq(tg, b);
      stmt(*w.body, b, {b, b, ctx.depth + 1});
    } else {
      int tg = expr(*w.guard, ctx);
      cs_.eq(tg, b);
      cs_.le(b, ctx.kout);
      stmt(*w.body, b, {b, ctx.kout, ctx.depth + 1});
    }
    cs_.le(b, t);
  }

  int expr(const Expr& e, GenCtx ctx) {
    if (auto* v = std::get_if<VarExpr>(&e.node)) return gamma(v->var.name);

    if (auto* op = std::get_if<OpExpr>(&e.node)) {
      int te = cs_.fresh(op->op.name);
      for (const auto& a : op->args) {
        int ta = expr(*a, ctx);
        cs_.le(te, ta);       // result tier below every argument tier
        cs_.le(ta, ctx.kin);  // arguments below the innermost tier
      }
      auto info = registry_.lookup(op->op.name);
      bool positive = info && info->category == OpCategory::Positive;
      if (op->args.empty()) cs_.le(te, ctx.kin);
      if (positive) cs_.le(te, ctx.kin, 1);  // strict drop for positive ops
      return te;
    }

    const auto& oc = std::get<OracleExpr>(e.node);
    int td = expr(*oc.data, ctx);
    int tb = expr(*oc.bound, ctx);
    cs_.eq(tb, ctx.kout);     // the input bound carries the outermost tier
    cs_.le(td, ctx.kin, 1);   // node tier strictly below the innermost tier
    cs_.le(td, ctx.kout);
    return td;  // the oracle call's tier is its input data's tier
  }
};

}  // namespace

TierConstraints gen_constraints(const Procedure& proc,
                                const OperatorRegistry& registry,
                                WhileMode mode) {
  return Generator(proc, registry, mode).run();
}

// --- Solver -------------------------------------------------------------------

SolveResult solve(const TierConstraints& cs, int kmax) {
  std::vector<int> value(cs.nvars, 0);
  for (int v : cs.at_least_one) value[v] = 1;

  // Index constraints by their left variable for worklist relaxation.
  std::vector<std::vector<const TierConstraints::Le*>> out(cs.nvars);
  for (const auto& atom : cs.atoms) out[atom.a].push_back(&atom);

  std::deque<int> queue;
  std::vector<bool> queued(cs.nvars, false);
  for (int i = 0; i < cs.nvars; ++i) {
    queue.push_back(i);
    queued[i] = true;
  }

  // Values only grow and are capped by kmax, so total work is O(|atoms|*kmax).
  while (!queue.empty()) {
    int a = queue.front();
    queue.pop_front();
    queued[a] = false;
    for (const auto* atom : out[a]) {
      int lower = value[atom->a] + atom->add;
      if (lower > value[atom->b]) {
        value[atom->b] = lower;
        if (value[atom->b] > kmax)
          return TierUnsat{cs.names[atom->b] + " pushed past kmax=" +
                           std::to_string(kmax)};
        if (!queued[atom->b]) {
          queue.push_back(atom->b);
          queued[atom->b] = true;
        }
      }
    }
  }

  for (int v : cs.must_be_zero)
    if (value[v] != 0)
      return TierUnsat{cs.names[v] + " must be 0 but needs at least " +
                       std::to_string(value[v])};

  TierSolution sol;
  sol.value = std::move(value);
  for (const auto& [name, idx] : cs.gamma_vars) sol.gamma[name] = sol.value[idx];
  sol.triple = {sol.value[cs.k_var], sol.value[cs.kin_var],
                sol.value[cs.kout_var]};
  return sol;
}

// --- Rule replay ---------------------------------------------------------------

namespace {

struct Interval {
  int lo = 0;
  int hi = -1;  // empty when hi < lo
  bool empty() const { return hi < lo; }
  bool contains(int v) const { return !empty() && lo <= v && v <= hi; }
};

class Replay {
 public:
  Replay(const TierEnv& gamma, const OperatorRegistry& registry, int kmax)
      : gamma_(gamma), registry_(registry), kmax_(kmax) {}

  // Minimal derivable statement tier in context (kin, kout), or nullopt.
  std::optional<int> min_tier(const Stmt& st, int kin, int kout) {
    if (std::holds_alternative<SkipStmt>(st.node)) return 0;

    if (auto* a = std::get_if<AssignStmt>(&st.node)) {
      auto it = gamma_.find(a->target.name);
      if (it == gamma_.end()) return std::nullopt;
      Interval rhs = tiers(*a->value, kin, kout);
      if (rhs.empty() || rhs.hi < it->second) return std::nullopt;
      return it->second;
    }
    if (auto* s = std::get_if<SeqStmt>(&st.node)) {
      auto m1 = min_tier(*s->first, kin, kout);
      auto m2 = min_tier(*s->second, kin, kout);
      if (!m1 || !m2) return std::nullopt;
      return std::max(*m1, *m2);
    }
    if (auto* i = std::get_if<IfStmt>(&st.node)) {
      Interval guard = tiers(*i->guard, kin, kout);
      auto m1 = min_tier(*i->then_branch, kin, kout);
      auto m0 = min_tier(*i->else_branch, kin, kout);
      if (guard.empty() || !m1 || !m0) return std::nullopt;
      int b = std::max({guard.lo, *m1, *m0});
      if (b > guard.hi) return std::nullopt;
      return b;
    }

    const auto& w = std::get<WhileStmt>(st.node);
    if (kout == 0) {
      // No enclosing while: only (S-WINIT) fits, and it re-roots the
      // outermost tier at the guard's own tier.
      for (int b = 1; b <= kmax_; ++b) {
        Interval guard = tiers(*w.guard, kin, b);
        if (!guard.contains(b)) continue;
        auto mb = min_tier(*w.body, b, b);
        if (mb && *mb <= b) return b;
      }
      return std::nullopt;
    }
    Interval guard = tiers(*w.guard, kin, kout);
    if (guard.empty()) return std::nullopt;
    int lo = std::max(1, guard.lo);
    int hi = std::min({kout, guard.hi, kmax_});
    for (int b = lo; b <= hi; ++b) {
      auto mb = min_tier(*w.body, b, kout);
      if (mb && *mb <= b) return b;
    }
    return std::nullopt;
  }

 private:
  const TierEnv& gamma_;
  const OperatorRegistry& registry_;
  int kmax_;

  // Derivable tiers of an expression in context (kin, kout); always an
  // interval: variables are points, operator results close downward.
  Interval tiers(const Expr& e, int kin, int kout) {
    if (auto* v = std::get_if<VarExpr>(&e.node)) {
      auto it = gamma_.find(v->var.name);
      if (it == gamma_.end()) return {0, -1};
      return {it->second, it->second};
    }
    if (auto* op = std::get_if<OpExpr>(&e.node)) {
      int cap = kin;
      for (const auto& a : op->args) {
        Interval ia = tiers(*a, kin, kout);
        if (ia.empty() || ia.lo > kin) return {0, -1};
        cap = std::min(cap, ia.hi);
      }
      auto info = registry_.lookup(op->op.name);
      if (info && info->category == OpCategory::Positive)
        cap = std::min(cap, kin - 1);
      return {0, cap};
    }
    const auto& oc = std::get<OracleExpr>(e.node);
    if (kin == 0) return {0, -1};
    Interval data = tiers(*oc.data, kin, kout);
    Interval bound = tiers(*oc.bound, kin, kout);
    if (data.empty() || !bound.contains(kout)) return {0, -1};
    return {data.lo, std::min({data.hi, kin - 1, kout})};
  }
};

}  // namespace

bool verify_typing(const Procedure& proc, const TierEnv& gamma,
                   const TierTriple& triple, const OperatorRegistry& registry,
                   int kmax) {
  for (const auto& v : proc.word_params)
    if (!gamma.count(v.name)) return false;
  for (const auto& v : proc.locals)
    if (!gamma.count(v.name)) return false;
  if (triple.k < 0 || triple.k_in < 0 || triple.k_out < 0) return false;

  Replay replay(gamma, registry, kmax);
  auto m = replay.min_tier(*proc.body, triple.k_in, triple.k_out);
  return m && *m <= triple.k;
}

std::optional<ProcTyping> brute_force(const Procedure& proc, int kmax,
                                      const OperatorRegistry& registry) {
  std::vector<std::string> vars;
  for (const auto& v : proc.word_params) vars.push_back(v.name);
  for (const auto& v : proc.locals) vars.push_back(v.name);
  std::sort(vars.begin(), vars.end());

  std::vector<int> assignment(vars.size(), 0);
  while (true) {
    TierEnv gamma;
    for (size_t i = 0; i < vars.size(); ++i) gamma[vars[i]] = assignment[i];
    for (int k = 0; k <= kmax; ++k)
      for (int kin = 0; kin <= kmax; ++kin)
        for (int kout = 0; kout <= kmax; ++kout) {
          TierTriple triple{k, kin, kout};
          if (verify_typing(proc, gamma, triple, registry, kmax))
            return ProcTyping{gamma, triple};
        }
    size_t i = 0;
    for (; i < assignment.size(); ++i) {
      if (assignment[i] < kmax) {
        ++assignment[i];
        std::fill(assignment.begin(), assignment.begin() + i, 0);
        break;
      }
    }
    if (i == assignment.size()) break;
  }
  return std::nullopt;
}

// --- SAFE / SAFE0 -------------------------------------------------------------

int default_kmax(const Procedure& proc) {
  std::vector<const Stmt*> whiles;
  collect_whiles(proc.body, whiles);
  return static_cast<int>(whiles.size()) + 2;
}

SafeReport check_safe(const Program& prg, const OperatorRegistry& registry,
                      int kmax_override) {
  SafeReport report;

  InferResult inf = infer_simple(prg);
  report.simple_ok = inf.ok;
  if (inf.ok) {
    report.simple_type = inf.program_type_str;
    report.rank = inf.rank;
    report.rank0 = is_rank0(prg);
  } else {
    report.type_error = inf.error;
  }

  bool all_sat = true;
  for (const auto* proc : prg.procedures()) {
    ProcTierResult result;
    result.name = proc->name.name;
    int kmax = kmax_override >= 0 ? kmax_override : default_kmax(*proc);

    std::string reasons;
    for (WhileMode mode : {WhileMode::WInit, WhileMode::Wh}) {
      TierConstraints cs = gen_constraints(*proc, registry, mode);
      SolveResult solved = solve(cs, kmax);
      if (auto* sol = std::get_if<TierSolution>(&solved)) {
        result.sat = true;
        result.mode = mode;
        result.typing.triple = sol->triple;
        for (const auto& v : proc->word_params)
          result.typing.gamma[v.name] = sol->gamma.at(v.name);
        for (const auto& v : proc->locals)
          result.typing.gamma[v.name] = sol->gamma.at(v.name);
        break;
      }
      if (!reasons.empty()) reasons += "; ";
      reasons += std::string(while_mode_name(mode)) + ": " +
                 std::get<TierUnsat>(solved).witness;
      if (!cs.has_while) break;  // both modes coincide without loops
    }
    if (!result.sat) {
      result.unsat_reason = reasons;
      all_sat = false;
    }
    report.procedures.push_back(std::move(result));
  }

  if (!inf.ok || !all_sat)
    report.verdict = SafeVerdict::NotSafe;
  else if (report.rank0)
    report.verdict = SafeVerdict::Safe0;
  else
    report.verdict = SafeVerdict::Safe;
  return report;
}

}  // namespace bff
