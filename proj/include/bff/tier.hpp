#ifndef BFF_TIER_HPP
#define BFF_TIER_HPP

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "bff/ast.hpp"
#include "bff/operators.hpp"
#include "bff/simple_types.hpp"

namespace bff {

// Statement tier, innermost tier, outermost tier.
struct TierTriple {
  int k = 0;
  int k_in = 0;
  int k_out = 0;
  bool operator==(const TierTriple&) const = default;
};

using TierEnv = std::map<std::string, int>;  // type-0 variable -> tier

struct ProcTyping {
  TierEnv gamma;
  TierTriple triple;
};

// Which rule shape non-nested while loops take. The two cases place
// non-overlapping requirements on the ambient outermost tier (= 0 vs >= 1),
// so a procedure is typable iff one of the two global cases is satisfiable;
// whiles nested inside another while always take the standard shape.
enum class WhileMode { WInit, Wh };

const char* while_mode_name(WhileMode m);

// Integer difference constraints over tier variables:
//   a + add <= b  (add in {0,1}),  1 <= v,  v = 0.
struct TierConstraints {
  struct Le {
    int a;
    int b;
    int add;
  };
  int nvars = 0;
  std::vector<std::string> names;
  std::vector<Le> atoms;
  std::vector<int> at_least_one;
  std::vector<int> must_be_zero;

  TierEnv gamma_vars;  // program variable -> tier variable index
  int k_var = -1, kin_var = -1, kout_var = -1;
  WhileMode mode = WhileMode::Wh;
  bool has_while = false;

  int fresh(const std::string& name);
  void le(int a, int b, int add = 0) { atoms.push_back({a, b, add}); }
  void eq(int a, int b) {
    le(a, b);
    le(b, a);
  }
};

// Emits the constraint system for one procedure body under the maximal safe
// operator environment. Total on well-formed procedures; nesting needs no
// prior flattening.
TierConstraints gen_constraints(const Procedure& proc,
                                const OperatorRegistry& registry,
                                WhileMode mode);

struct TierSolution {
  std::vector<int> value;  // pointwise-least solution
  TierEnv gamma;
  TierTriple triple;
};

struct TierUnsat {
  std::string witness;  // variable pushed past kmax, or the violated atom
};

using SolveResult = std::variant<TierSolution, TierUnsat>;

// Least-fixpoint solver: monotone lower-bound propagation, reporting Unsat
// when a variable exceeds kmax (covers positive cycles) or a must-be-zero
// variable acquires a positive lower bound.
SolveResult solve(const TierConstraints& cs, int kmax);

// Independent rule replay: decides whether a derivation of
//   Gamma, Delta |- body : triple
// exists with Gamma fixed, via a bottom-up pass computing the derivable-tier
// interval of every node (subsumption closes statement tiers upward).
bool verify_typing(const Procedure& proc, const TierEnv& gamma,
                   const TierTriple& triple, const OperatorRegistry& registry,
                   int kmax);

// Exhaustive enumeration over [0,kmax]^vars x [0,kmax]^3, first accepted
// typing in lexicographic order. Testing oracle; exponential.
std::optional<ProcTyping> brute_force(const Procedure& proc, int kmax,
                                      const OperatorRegistry& registry);

enum class SafeVerdict { Safe0, Safe, NotSafe };

const char* safe_verdict_name(SafeVerdict v);

struct ProcTierResult {
  std::string name;
  bool sat = false;
  ProcTyping typing;     // valid when sat
  WhileMode mode = WhileMode::Wh;
  std::string unsat_reason;
};

struct SafeReport {
  bool simple_ok = false;
  std::string simple_type;
  std::optional<TypeErrorInfo> type_error;
  int rank = 0;
  bool rank0 = false;
  std::vector<ProcTierResult> procedures;
  SafeVerdict verdict = SafeVerdict::NotSafe;
};

// Default solver bound for a procedure: number of while loops + 2.
int default_kmax(const Procedure& proc);

// SAFE / SAFE0 membership: simple typing must give (W->W)^k -> W^l -> W and
// every procedure's constraints must be satisfiable (WInit case tried first,
// then Wh). kmax_override < 0 selects the per-procedure default.
SafeReport check_safe(const Program& prg, const OperatorRegistry& registry,
                      int kmax_override = -1);

}  // namespace bff

#endif
