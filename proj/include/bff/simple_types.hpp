#ifndef BFF_SIMPLE_TYPES_HPP
#define BFF_SIMPLE_TYPES_HPP

#include <map>
#include <memory>
#include <optional>
#include <string>

#include "bff/ast.hpp"

namespace bff {

// Simple types over W: T ::= W | T -> T.
class SimpleType;
using SimpleTypePtr = std::shared_ptr<const SimpleType>;

class SimpleType {
 public:
  static SimpleTypePtr word();
  static SimpleTypePtr arrow(SimpleTypePtr from, SimpleTypePtr to);

  bool is_word() const { return !from_; }
  const SimpleTypePtr& from() const { return from_; }
  const SimpleTypePtr& to() const { return to_; }

  // ord(W) = 0, ord(T1 -> T2) = max(1 + ord(T1), ord(T2)).
  int order() const;
  std::string to_string() const;

 private:
  SimpleType() = default;
  SimpleTypePtr from_;  // null for W
  SimpleTypePtr to_;
};

bool same_type(const SimpleTypePtr& a, const SimpleTypePtr& b);

struct TypeErrorInfo {
  std::string message;
  std::string lhs;  // the two conflicting types, printed
  std::string rhs;
  SourceSpan span;
};

struct InferResult {
  bool ok = false;
  std::optional<TypeErrorInfo> error;

  SimpleTypePtr program_type;  // (W->W)^k -> W^l -> W on success
  std::string program_type_str;
  std::map<std::string, SimpleTypePtr> env;  // boxed vars and procedure names
  // Per-term annotation (main term, closure bodies, call arguments).
  std::map<const Term*, SimpleTypePtr> term_types;
  int rank = 0;
};

// Unification-based monomorphic inference for the whole program: boxed
// type-1 vars are pinned to W->W, boxed type-0 vars to W, procedures are
// checked structurally, and the main term plus all closure bodies are
// inferred. Unconstrained residual type variables default to W.
InferResult infer_simple(const Program& p);

// Smallest r such that every lambda's annotated type has order <= r.
int compute_rank(const Program& p, const InferResult& inference);

// True iff no lambda node occurs in any term (closure bodies included).
bool is_rank0(const Program& p);

// Rule-replay pass over an annotation: re-checks every term node locally
// without doing inference. Used as the soundness oracle for infer_simple.
bool check_annotation(const Program& p, const InferResult& inference);

}  // namespace bff

#endif
