#include "bff/operators.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>

#include "json.hpp"

namespace bff {

namespace {

Word sem_eps(const std::vector<Word>&) { return Word(); }

Word sem_pred(const std::vector<Word>& a) {
  return a[0].empty() ? Word() : a[0].substr(1);
}

Word sem_head(const std::vector<Word>& a) {
  return a[0].empty() ? Word() : a[0].substr(0, 1);
}

Word sem_neq(const std::vector<Word>& a) { return a[0] != a[1] ? "1" : "0"; }

Word sem_eqw(const std::vector<Word>& a) { return a[0] == a[1] ? "1" : "0"; }

Word sem_lmin(const std::vector<Word>& a) {
  return a[0].size() < a[1].size() ? a[0] : a[1];
}

OperatorInfo make_suc(char symbol) {
  OperatorInfo info;
  info.name = std::string("suc") + symbol;
  info.arity = 1;
  info.category = OpCategory::Positive;
  info.growth = 1;
  info.semantics = [symbol](const std::vector<Word>& a) {
    return symbol + a[0];
  };
  return info;
}

}  // namespace

OperatorRegistry OperatorRegistry::builtins(const Alphabet& alphabet) {
  OperatorRegistry r;
  r.alphabet_ = alphabet;

  OperatorInfo eps{"~", 0, OpCategory::Neutral, 0, std::nullopt, sem_eps};
  r.add(eps);

  OperatorInfo pred{"pred", 1, OpCategory::Neutral, 0,
                    Decrease{1, true}, sem_pred};
  r.add(pred);

  r.add(make_suc('0'));
  r.add(make_suc('1'));

  OperatorInfo head{"head", 1, OpCategory::Neutral, 0,
                    Decrease{1, false}, sem_head};
  r.add(head);

  OperatorInfo neq{"!=", 2, OpCategory::Neutral, 0, std::nullopt, sem_neq};
  r.add(neq);

  OperatorInfo eqw{"==", 2, OpCategory::Neutral, 0, std::nullopt, sem_eqw};
  r.add(eqw);

  OperatorInfo lmin{"lmin", 2, OpCategory::Neutral, 0,
                    Decrease{2, false}, sem_lmin};
  r.add(lmin);

  return r;
}

void OperatorRegistry::add(OperatorInfo info) {
  if (ops_.count(info.name))
    throw OperatorError("duplicate operator name: " + info.name);
  ops_.emplace(info.name, std::move(info));
}

bool OperatorRegistry::is_literal_name(const std::string& name) {
  return name.size() >= 2 && name.front() == '"' && name.back() == '"';
}

std::optional<Word> OperatorRegistry::literal_value(const std::string& name,
                                                    const Alphabet& alphabet) {
  if (!is_literal_name(name)) return std::nullopt;
  Word w = name.substr(1, name.size() - 2);
  if (!alphabet.valid_word(w)) return std::nullopt;
  return w;
}

bool OperatorRegistry::known(const std::string& name) const {
  if (ops_.count(name)) return true;
  return literal_value(name, alphabet_).has_value();
}

std::optional<OperatorInfo> OperatorRegistry::lookup(
    const std::string& name) const {
  auto it = ops_.find(name);
  if (it != ops_.end()) return it->second;
  auto lit = literal_value(name, alphabet_);
  if (!lit) return std::nullopt;
  OperatorInfo info;
  info.name = name;
  info.arity = 0;
  info.category = OpCategory::Neutral;
  Word value = *lit;
  info.semantics = [value](const std::vector<Word>&) { return value; };
  return info;
}

Word OperatorRegistry::apply(const std::string& name,
                             const std::vector<Word>& args) const {
  auto info = lookup(name);
  if (!info) throw OperatorError("unknown operator: " + name);
  if (static_cast<int>(args.size()) != info->arity) {
    std::ostringstream os;
    os << "operator " << name << " expects " << info->arity
       << " argument(s), got " << args.size();
    throw OperatorError(os.str());
  }
  return info->semantics(args);
}

std::vector<std::string> OperatorRegistry::names() const {
  std::vector<std::string> out;
  out.reserve(ops_.size());
  for (const auto& [k, v] : ops_) out.push_back(k);
  return out;
}

bool admissible_signature(const OperatorInfo& info,
                          const std::vector<int>& arg_tiers, int result_tier,
                          int k) {
  if (static_cast<int>(arg_tiers.size()) != info.arity) return false;
  if (result_tier > k) return false;
  for (int t : arg_tiers) {
    if (t > k) return false;
    if (result_tier > t) return false;
  }
  if (info.category == OpCategory::Positive && result_tier >= k) return false;
  return true;
}

CategoryReport validate_category(const OperatorInfo& info, int samples,
                                 const Alphabet& alphabet, unsigned seed) {
  if (samples <= 0)
    throw std::invalid_argument("validate_category: samples must be positive");

  CategoryReport report;
  report.samples = samples;
  std::vector<char> symbols(alphabet.symbols().begin(),
                            alphabet.symbols().end());
  std::mt19937 rng(seed);
  std::uniform_int_distribution<size_t> len_dist(0, 16);
  std::uniform_int_distribution<size_t> sym_dist(0, symbols.size() - 1);

  auto is_subword = [](const Word& v, const Word& w) {
    return w.find(v) != std::string::npos;
  };

  auto check_tuple = [&](const std::vector<Word>& args) {
    Word result = info.semantics(args);
    std::string violation;

    if (info.category == OpCategory::Neutral) {
      bool ok = info.arity == 0;  // constants are neutral by definition
      if (!ok) ok = result == "0" || result == "1";
      if (!ok)
        for (const Word& a : args)
          if (is_subword(result, a)) {
            ok = true;
            break;
          }
      if (!ok) violation = "not constant/predicate/subword-of-an-argument";
    } else {
      size_t max_len = 0;
      for (const Word& a : args) max_len = std::max(max_len, a.size());
      if (result.size() > max_len + static_cast<size_t>(info.growth))
        violation = "output longer than max argument + declared growth";
    }

    if (violation.empty() && info.decrease) {
      bool all_empty = true;
      for (const Word& a : args) all_empty &= a.empty();
      int i = info.decrease->index - 1;
      if (all_empty) {
        if (!result.empty()) violation = "decrease: op(eps...) != eps";
      } else if (i < 0 || i >= info.arity) {
        violation = "decrease: index out of range";
      } else if (info.decrease->strict ? result.size() >= args[i].size()
                                       : result.size() > args[i].size()) {
        violation = "decrease: output not shorter than declared argument";
      }
    }

    if (!violation.empty())
      report.counterexamples.push_back({args, result, violation});
  };

  // Always include the all-empty tuple; it anchors the decrease clause.
  check_tuple(std::vector<Word>(info.arity));
  for (int s = 1; s < samples; ++s) {
    std::vector<Word> args(info.arity);
    for (auto& a : args) {
      size_t n = len_dist(rng);
      a.resize(n);
      for (auto& c : a) c = symbols[sym_dist(rng)];
    }
    check_tuple(args);
  }
  return report;
}

namespace {

std::function<Word(const std::vector<Word>&)> template_semantics(
    const nlohmann::json& sem, int arity, const Alphabet& alphabet) {
  std::string name = sem.at("template").get<std::string>();
  if (name == "constant") {
    std::string w = sem.value("word", "");
    if (w == "~") w.clear();
    if (!alphabet.valid_word(w))
      throw OperatorError("constant template: word not in alphabet");
    return [w](const std::vector<Word>&) { return w; };
  }
  if (name == "prepend-symbol") {
    std::string s = sem.at("symbol").get<std::string>();
    if (s.size() != 1 || !alphabet.contains(s[0]))
      throw OperatorError("prepend-symbol template: bad symbol");
    char c = s[0];
    if (arity != 1) throw OperatorError("prepend-symbol template: arity 1");
    return [c](const std::vector<Word>& a) { return c + a[0]; };
  }
  if (name == "drop-prefix") {
    int count = sem.value("count", 1);
    if (count < 0 || arity != 1)
      throw OperatorError("drop-prefix template: arity 1, count >= 0");
    size_t n = static_cast<size_t>(count);
    return [n](const std::vector<Word>& a) {
      return n >= a[0].size() ? Word() : a[0].substr(n);
    };
  }
  if (name == "length-min") {
    if (arity != 2) throw OperatorError("length-min template: arity 2");
    return sem_lmin;
  }
  if (name == "predicate-equal") {
    if (arity != 2) throw OperatorError("predicate-equal template: arity 2");
    return sem_eqw;
  }
  throw OperatorError("unknown semantics template: " + name);
}

}  // namespace

OperatorRegistry load_registry_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw OperatorError("cannot open registry config: " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw OperatorError("registry config " + path + ": " + e.what());
  }

  Alphabet alphabet(doc.value("alphabet", ""));
  OperatorRegistry r = OperatorRegistry::builtins(alphabet);

  try {
    for (const auto& op : doc.value("operators", nlohmann::json::array())) {
      OperatorInfo info;
      info.name = op.at("name").get<std::string>();
      info.arity = op.at("arity").get<int>();
      std::string cat = op.value("category", "neutral");
      info.category =
          cat == "positive" ? OpCategory::Positive : OpCategory::Neutral;
      info.growth = op.value("growth", info.category == OpCategory::Positive
                                           ? 1
                                           : 0);
      if (op.contains("decrease")) {
        Decrease d;
        d.index = op["decrease"].value("index", 1);
        d.strict = op["decrease"].value("strict", false);
        info.decrease = d;
      }
      info.semantics =
          template_semantics(op.at("semantics"), info.arity, alphabet);
      r.add(std::move(info));
    }
  } catch (const nlohmann::json::exception& e) {
    throw OperatorError("registry config " + path + ": " + e.what());
  }
  return r;
}

}  // namespace bff
