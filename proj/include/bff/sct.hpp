#ifndef BFF_SCT_HPP
#define BFF_SCT_HPP

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bff/ast.hpp"
#include "bff/operators.hpp"

namespace bff {

// Every assignment of a flat procedure is x := y, x := op(vars...), or
// x := X(y |> z); guard expressions are untouched.
bool is_flat(const Procedure& proc);
Procedure flatten(const Procedure& proc);
Program flatten(const Program& prg);

// Size-change graph of one flattened assignment over a variable set V:
// an arrow u -> v means |v_new| <= |u_old| (down: strictly smaller, assuming
// nonempty arguments). Fan-in free: at most one in-arrow per target.
struct Scg {
  std::vector<std::string> vars;
  // target -> (source, down)
  std::map<std::string, std::pair<std::string, bool>> in_edge;
};

struct VariableSetMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Scg scg_of_assignment(const AssignStmt& asg, const std::vector<std::string>& V,
                      const OperatorRegistry& registry);

// Backward-trace summary over V. For each variable, the set of origins its
// unique backward traces can reach: (source variable, saw-a-down-arrow), or
// `broken` when some trace falls off a graph.
struct TraceSummary {
  struct Origins {
    std::set<std::pair<std::string, bool>> traced;
    bool broken = false;
    bool operator==(const Origins&) const = default;
  };
  std::vector<std::string> vars;
  std::map<std::string, Origins> at;
  bool operator==(const TraceSummary& o) const {
    return vars == o.vars && at == o.at;
  }
};

TraceSummary summary_identity(const std::vector<std::string>& V);
TraceSummary summary_of_scg(const Scg& g);
// Sequential composition: s1 first, then s2.
TraceSummary summary_compose(const TraceSummary& s1, const TraceSummary& s2);
TraceSummary summary_union(const TraceSummary& s1, const TraceSummary& s2);
// Least fixpoint of s* = identity U compose(s*, s).
TraceSummary summary_star(const TraceSummary& s);

// Structural recursion over a flat statement: assignment -> its graph's
// summary, sequence -> compose, if -> union of branches, while -> star,
// skip -> identity.
TraceSummary summarize(const Stmt& st, const std::vector<std::string>& V,
                       const OperatorRegistry& registry);

struct LoopCheck {
  std::string proc;
  SourceSpan span;
  std::string guard_var;  // empty when the guard is non-canonical
  bool accepted = false;
  std::string reason;  // empty when accepted
};

struct ScpVerdict {
  bool accepted = false;  // all loops of all procedures accepted
  std::vector<LoopCheck> loops;
};

// Per while loop: the guard must be exactly `x != ~`, and the backward-trace
// summary of the loop body over the procedure's guard-variable set must be
// S(x) = {(x, down)}.
ScpVerdict check_scps(const Program& prg, const OperatorRegistry& registry);

// Guard variables of all while loops in a procedure.
std::vector<std::string> guard_variable_set(const Procedure& proc);

// DOT export: one bipartite graph per assignment, and a concatenation of
// several graphs in sequence.
std::string scg_to_dot(const Scg& g, const std::string& label);
std::string scg_concat_to_dot(const std::vector<Scg>& gs,
                              const std::string& label);

}  // namespace bff

#endif
