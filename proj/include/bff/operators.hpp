#ifndef BFF_OPERATORS_HPP
#define BFF_OPERATORS_HPP

#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bff/word.hpp"

namespace bff {

enum class OpCategory { Neutral, Positive };

// Declared decrease metadata used by the size-change analysis: the operator's
// output is never longer than argument `index` (strictly shorter when
// `strict`), and it maps the all-empty tuple to the empty word.
struct Decrease {
  int index = 1;  // 1-based argument position
  bool strict = false;
};

struct OperatorInfo {
  std::string name;
  int arity = 0;
  OpCategory category = OpCategory::Neutral;
  int growth = 0;  // length slack c for positive operators
  std::optional<Decrease> decrease;
  std::function<Word(const std::vector<Word>&)> semantics;
};

struct OperatorError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Immutable registry of named operators. Word literals are admitted as
// implicit nullary operators: `~` is the empty word and any name of the form
// "..." is the quoted constant, so lookups for those always succeed.
class OperatorRegistry {
 public:
  static OperatorRegistry builtins(const Alphabet& alphabet = Alphabet());

  void add(OperatorInfo info);  // pre-freeze only; throws on duplicate name

  bool known(const std::string& name) const;
  // Returns the operator description, synthesizing literal constants.
  std::optional<OperatorInfo> lookup(const std::string& name) const;

  // Applies a registered operator; throws OperatorError for unknown names or
  // an argument count different from the declared arity.
  Word apply(const std::string& name, const std::vector<Word>& args) const;

  const Alphabet& alphabet() const { return alphabet_; }
  std::vector<std::string> names() const;

  static bool is_literal_name(const std::string& name);
  static std::optional<Word> literal_value(const std::string& name,
                                           const Alphabet& alphabet);

 private:
  Alphabet alphabet_;
  std::map<std::string, OperatorInfo> ops_;
};

// Membership test for the maximal safe operator typing environment: signature
// arg_tiers -> result admissible at innermost tier k iff
// result <= min(arg_tiers) <= max(arg_tiers) <= k, and result < k when the
// operator is positive. Nullary operators degenerate to result <= k.
bool admissible_signature(const OperatorInfo& info,
                          const std::vector<int>& arg_tiers, int result_tier,
                          int k);

struct CategoryCounterexample {
  std::vector<Word> args;
  Word result;
  std::string violation;
};

struct CategoryReport {
  int samples = 0;
  std::vector<CategoryCounterexample> counterexamples;
  bool consistent() const { return counterexamples.empty(); }
};

// Randomized consistency check of the declared category/decrease metadata
// against the semantics (argument lengths <= 16). A sampling check, not a
// proof. Throws std::invalid_argument when samples <= 0.
CategoryReport validate_category(const OperatorInfo& info, int samples,
                                 const Alphabet& alphabet = Alphabet(),
                                 unsigned seed = 0x5eed);

// Registry extension config: JSON file with user operators assembled from a
// closed set of semantics templates (constant, prepend-symbol, drop-prefix,
// length-min, predicate-equal). Optional "alphabet" key lists extra symbols.
OperatorRegistry load_registry_config(const std::string& path);

}  // namespace bff

#endif
