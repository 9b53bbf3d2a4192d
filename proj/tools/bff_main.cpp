#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "bff/check.hpp"
#include "bff/interp.hpp"
#include "bff/parser.hpp"
#include "bff/pretty.hpp"
#include "bff/sct.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Common {
  std::string ops_config;

  bff::OperatorRegistry registry() const {
    if (!ops_config.empty()) return bff::load_registry_config(ops_config);
    return bff::OperatorRegistry::builtins();
  }
};

int default_max_tier() {
  if (const char* env = std::getenv("BFF_MAX_TIER")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  return -1;  // per-procedure default
}

std::optional<std::string> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// nullopt: exit 2 already reported.
std::optional<bff::Program> load_program(const std::string& path,
                                         const bff::OperatorRegistry& registry) {
  auto text = read_file(path);
  if (!text) {
    std::cerr << path << ": cannot read file\n";
    return std::nullopt;
  }
  bff::ParseResult parsed = bff::parse_program(*text, registry);
  if (!parsed.ok()) {
    for (const auto& e : parsed.errors)
      std::cerr << path << ":" << e.to_string() << "\n";
    return std::nullopt;
  }
  return parsed.program;
}

int cmd_check(const Common& common, const std::string& file, int max_tier,
              bool as_json, bool require_rank0) {
  bff::OperatorRegistry registry = common.registry();
  auto prg = load_program(file, registry);
  if (!prg) return 2;

  bff::CheckReport report =
      bff::check_program(fs::path(file).filename().string(), *prg, registry,
                         max_tier);
  if (as_json)
    std::cout << bff::report_json(report).dump(2) << "\n";
  else
    std::cout << bff::report_text(report);
  return bff::report_exit_code(report, require_rank0);
}

int cmd_run(const Common& common, const std::string& file,
            const std::vector<std::string>& args,
            const std::vector<std::string>& oracle_specs, int64_t fuel) {
  bff::OperatorRegistry registry = common.registry();
  auto prg = load_program(file, registry);
  if (!prg) return 2;

  try {
    std::vector<bff::OracleFn> oracles;
    for (const auto& spec : oracle_specs)
      oracles.push_back(bff::parse_oracle_spec(spec, registry.alphabet()));
    std::vector<bff::Word> words;
    for (const auto& a : args) words.push_back(a == "~" ? bff::Word() : a);

    bff::RunOptions opts;
    opts.fuel = fuel;
    bff::Word result = bff::run_program(*prg, registry, oracles, words, opts);
    std::cout << (result.empty() ? "~" : result) << "\n";
    return 0;
  } catch (const bff::EvalError& e) {
    std::cerr << "runtime error [" << bff::eval_error_kind_name(e.kind)
              << "]: " << e.what() << "\n";
    return 3;
  }
}

int cmd_flatten(const Common& common, const std::string& file) {
  bff::OperatorRegistry registry = common.registry();
  auto prg = load_program(file, registry);
  if (!prg) return 2;
  std::cout << bff::pretty(bff::flatten(*prg));
  return 0;
}

int cmd_graphs(const Common& common, const std::string& file,
               const std::string& out_dir) {
  bff::OperatorRegistry registry = common.registry();
  auto prg = load_program(file, registry);
  if (!prg) return 2;

  std::error_code ec;
  fs::create_directories(out_dir, ec);

  int assignment_index = 0;
  int loop_index = 0;

  // DOT of every assignment's SCG, plus one unrolled concatenation per loop.
  std::function<void(const bff::Stmt&, const std::string&,
                     const std::vector<std::string>&)>
      walk = [&](const bff::Stmt& st, const std::string& proc,
                 const std::vector<std::string>& V) {
        if (auto* a = std::get_if<bff::AssignStmt>(&st.node)) {
          bff::Scg g = bff::scg_of_assignment(*a, V, registry);
          std::string label = proc + ": " + a->target.name + " := " +
                              bff::pretty(*a->value);
          std::string name =
              "scg_" + proc + "_" + std::to_string(assignment_index++) + ".dot";
          std::ofstream(fs::path(out_dir) / name) << bff::scg_to_dot(g, label);
        } else if (auto* s = std::get_if<bff::SeqStmt>(&st.node)) {
          walk(*s->first, proc, V);
          walk(*s->second, proc, V);
        } else if (auto* i = std::get_if<bff::IfStmt>(&st.node)) {
          walk(*i->then_branch, proc, V);
          walk(*i->else_branch, proc, V);
        } else if (auto* w = std::get_if<bff::WhileStmt>(&st.node)) {
          // One unrolled body word: leftmost if-branches, inner loops once.
          std::vector<bff::Scg> word;
          std::function<void(const bff::Stmt&)> unroll =
              [&](const bff::Stmt& body) {
                if (auto* ba = std::get_if<bff::AssignStmt>(&body.node)) {
                  word.push_back(bff::scg_of_assignment(*ba, V, registry));
                } else if (auto* bs = std::get_if<bff::SeqStmt>(&body.node)) {
                  unroll(*bs->first);
                  unroll(*bs->second);
                } else if (auto* bi = std::get_if<bff::IfStmt>(&body.node)) {
                  unroll(*bi->then_branch);
                } else if (auto* bw = std::get_if<bff::WhileStmt>(&body.node)) {
                  unroll(*bw->body);
                }
              };
          unroll(*w->body);
          std::string name =
              "loop_" + proc + "_" + std::to_string(loop_index++) + ".dot";
          std::ofstream(fs::path(out_dir) / name) << bff::scg_concat_to_dot(
              word, proc + ": while (" + bff::pretty(*w->guard) + ")");
          walk(*w->body, proc, V);
        }
      };

  for (const auto* proc : prg->procedures()) {
    bff::Procedure flat = bff::flatten(*proc);
    walk(*flat.body, proc->name.name, bff::guard_variable_set(flat));
  }
  std::cout << "wrote " << assignment_index << " assignment graph(s) and "
            << loop_index << " loop concatenation(s) to " << out_dir << "\n";
  return 0;
}

int cmd_corpus(const Common& common, const std::string& dir) {
  bff::OperatorRegistry registry = common.registry();
  fs::path manifest_path = fs::path(dir) / "manifest.json";

  if (!fs::exists(manifest_path)) {
    bool any_bff = false;
    if (fs::is_directory(dir))
      for (const auto& entry : fs::directory_iterator(dir))
        if (entry.path().extension() == ".bff") any_bff = true;
    if (!any_bff) {
      std::cerr << "warning: no corpus entries under " << dir << "\n";
      return 0;
    }
    std::cerr << dir << ": missing manifest.json\n";
    return 1;
  }

  json manifest;
  {
    std::ifstream in(manifest_path);
    try {
      in >> manifest;
    } catch (const json::exception& e) {
      std::cerr << manifest_path.string() << ": " << e.what() << "\n";
      return 1;
    }
  }

  std::vector<std::string> failures;
  int checked = 0;
  for (const auto& entry : manifest.value("entries", json::array())) {
    std::string name;
    try {
      name = entry.at("file").get<std::string>();
      std::string expect_verdict = entry.at("verdict").get<std::string>();
      auto prg = load_program((fs::path(dir) / name).string(), registry);
      if (!prg) {
        failures.push_back(name + ": parse failure");
        continue;
      }
      bff::CheckReport report =
          bff::check_program(name, *prg, registry, default_max_tier());
      std::string got = bff::final_verdict_name(report.verdict);
      if (got != expect_verdict) {
        failures.push_back(name + ": verdict " + got + ", expected " +
                           expect_verdict);
        continue;
      }
      for (const auto& run : entry.value("runs", json::array())) {
        std::vector<bff::OracleFn> oracles;
        for (const auto& spec : run.value("oracles", json::array()))
          oracles.push_back(bff::parse_oracle_spec(spec.get<std::string>(),
                                                   registry.alphabet()));
        std::vector<bff::Word> words;
        for (const auto& a : run.value("args", json::array())) {
          std::string w = a.get<std::string>();
          words.push_back(w == "~" ? bff::Word() : w);
        }
        std::string expect = run.at("expect").get<std::string>();
        if (expect == "~") expect.clear();
        bff::Word got_word =
            bff::run_program(*prg, registry, oracles, words);
        if (got_word != expect) {
          failures.push_back(name + ": run produced \"" + got_word +
                             "\", expected \"" + expect + "\"");
          break;
        }
      }
      ++checked;
    } catch (const std::exception& e) {
      failures.push_back((name.empty() ? "<entry>" : name) + ": " + e.what());
    }
  }

  std::cout << "corpus: " << checked << " entr" << (checked == 1 ? "y" : "ies")
            << " ok, " << failures.size() << " failure(s)\n";
  for (const auto& f : failures) std::cout << "  FAIL " << f << "\n";
  return failures.empty() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"analyzer and interpreter for .bff programs"};
  app.require_subcommand(1);

  Common common;
  app.add_option("--ops", common.ops_config,
                 "operator registry extension (JSON)");

  // check
  std::string check_file;
  int max_tier = default_max_tier();
  bool as_json = false, require_rank0 = false;
  auto* check = app.add_subcommand("check", "type/termination analysis");
  check->add_option("file", check_file, "program file")->required();
  check->add_option("--max-tier", max_tier, "tier solver bound");
  check->add_flag("--json", as_json, "JSON report");
  check->add_flag("--require-rank0", require_rank0,
                  "require the lambda-free fragment");

  // run
  std::string run_file;
  std::vector<std::string> run_args, run_oracles;
  int64_t fuel = bff::Fuel::kDefault;
  auto* run = app.add_subcommand("run", "evaluate a program");
  run->add_option("file", run_file, "program file")->required();
  run->add_option("--arg", run_args, "word input (repeatable; ~ = empty)");
  run->add_option("--oracle", run_oracles, "oracle spec (repeatable)");
  run->add_option("--fuel", fuel, "step budget");

  // flatten
  std::string flatten_file;
  auto* flat = app.add_subcommand("flatten", "print the flattened program");
  flat->add_option("file", flatten_file, "program file")->required();

  // graphs
  std::string graphs_file, dot_dir = "graphs";
  auto* graphs = app.add_subcommand("graphs", "export size-change graphs");
  graphs->add_option("file", graphs_file, "program file")->required();
  graphs->add_option("--dot", dot_dir, "output directory");

  // corpus
  std::string corpus_dir = "corpus";
  auto* corpus = app.add_subcommand("corpus", "run the corpus regression");
  corpus->add_option("--dir", corpus_dir, "corpus directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (check->parsed())
      return cmd_check(common, check_file, max_tier, as_json, require_rank0);
    if (run->parsed()) return cmd_run(common, run_file, run_args, run_oracles, fuel);
    if (flat->parsed()) return cmd_flatten(common, flatten_file);
    if (graphs->parsed()) return cmd_graphs(common, graphs_file, dot_dir);
    if (corpus->parsed()) return cmd_corpus(common, corpus_dir);
  } catch (const bff::OperatorError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const bff::EvalError& e) {
    std::cerr << "runtime error [" << bff::eval_error_kind_name(e.kind)
              << "]: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
