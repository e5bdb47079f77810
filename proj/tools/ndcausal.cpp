#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "ndcausal/ndcausal.hpp"

namespace {

using namespace ndcausal;

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// A query or sequence argument may name a file or hold the text itself.
std::pair<std::string, std::string> text_or_file(const std::string& arg) {
  std::error_code ec;
  if (std::filesystem::is_regular_file(arg, ec)) return {read_file(arg), arg};
  return {arg, "<argument>"};
}

template <typename T>
bool report(const ParseResult<T>& r) {
  for (const auto& d : r.diagnostics) std::cerr << format(d) << "\n";
  return r.ok();
}

NDBATheory load_domain(const std::string& path) {
  auto r = parse_domain(read_file(path), path);
  if (!report(r)) throw UsageError("failed to parse " + path);
  return *r.value;
}

RegressionOptions regression_options() {
  RegressionOptions o;
  if (const char* env = std::getenv("NDCAUSAL_STEP_BUDGET")) {
    char* end = nullptr;
    const long long v = std::strtoll(env, &end, 10);
    if (end == env || *end != '\0' || v <= 0) throw UsageError("NDCAUSAL_STEP_BUDGET must be a positive integer");
    o.step_budget = static_cast<std::size_t>(v);
  }
  return o;
}

bool structurally_valid(const NDBATheory& d) {
  const auto findings = validate_theory(d);
  for (const auto& f : findings) std::cerr << "finding [" << to_string(f.code) << "] " << f.message << "\n";
  return findings.empty();
}

// ---- validate

struct ValidateArgs {
  std::string domain;
  int depth = 4;
  bool json = false;
};

int run_validate(const ValidateArgs& a) {
  if (a.depth <= 0) throw UsageError("--depth must be positive");
  NDBATheory d = load_domain(a.domain);
  const auto findings = validate_theory(d);
  // Requirement checks evaluate the axioms, so they only run on a well-formed theory.
  RequirementReport req;
  req.depth = a.depth;
  if (findings.empty()) req = check_reaction_requirements(d, a.depth);
  const bool ok = findings.empty() && req.passed();
  if (a.json) {
    json j;
    j["domain"] = d.name;
    j["ok"] = ok;
    j["findings"] = to_json(findings);
    j["requirements"] = to_json(req);
    std::cout << j.dump(2) << "\n";
  } else {
    for (const auto& f : findings) std::cout << "finding [" << to_string(f.code) << "] " << f.subject << ": " << f.message << "\n";
    for (const auto& f : req.counterexamples) {
      std::cout << "requirement [" << to_string(f.code) << "] " << f.message;
      for (const auto& w : f.witness) std::cout << "\n  witness: " << w;
      std::cout << "\n";
    }
    std::cout << d.name << ": " << (ok ? "ok" : "invalid");
    if (findings.empty())
      std::cout << " (" << req.situations_checked << " situations checked up to depth " << a.depth << ")\n";
    else
      std::cout << " (reaction requirements not checked)\n";
  }
  return ok ? kOk : kFailure;
}

// ---- query

struct QueryArgs {
  std::string domain;
  std::string query;
  std::string mode = "verify";
  bool trace = false;
  bool json = false;
  bool at_position = false;
};

json query_record(const NDBATheory& d, const CausalQuery& q, const QueryArgs& a, bool& failed) {
  json j;
  j["query"] = print_query(q);
  j["kind"] = std::string(to_string(q.kind));
  j["mode"] = a.mode;
  Oracle o(d);
  if (a.mode != "regress") {
    OracleAnswer ans = answer_with_oracle(o, q);
    j["oracle"] = ans.value;
    if (ans.verdict) j["verdict"] = to_json(*ans.verdict);
    j["warnings"] = ans.warnings;
  }
  if (a.mode == "oracle") return j;

  Formula f = to_formula(q);
  if (auto diag = is_extended_regressable(f); !diag) {
    j["error"] = "NotRegressable: " + diag.reason;
    failed = true;
    return j;
  }
  try {
    RegressionResult r = Regressor(d, regression_options()).regress_star(f);
    const bool value = o.eval(r.fixpoint);
    j["fixpoint"] = to_string(r.fixpoint);
    j["regressed"] = value;
    j["passes"] = r.steps;
    j["extended_reductions"] = r.extended_reductions();
    if (a.mode == "verify") {
      const bool agree = j["oracle"].get<bool>() == value;
      j["agree"] = agree;
      if (!agree) failed = true;
    }
    if (a.trace) j["trace"] = to_json(r)["trace"];
  } catch (const Error& e) {
    j["error"] = e.what();
    failed = true;
  }
  return j;
}

void print_record(const json& j, bool trace) {
  std::cout << "query: " << j["query"].get<std::string>() << "\n";
  if (j.contains("warnings"))
    for (const auto& w : j["warnings"]) std::cout << "  warning: " << w.get<std::string>() << "\n";
  if (j.contains("oracle")) std::cout << "  oracle: " << (j["oracle"].get<bool>() ? "true" : "false") << "\n";
  if (j.contains("verdict")) {
    const auto& v = j["verdict"];
    std::cout << "  executions: " << v["executions"].get<std::size_t>() << ", satisfying the effect: "
              << v["satisfying"].get<std::size_t>() << "\n";
  }
  if (j.contains("error")) {
    std::cout << "  error: " << j["error"].get<std::string>() << "\n";
    return;
  }
  if (trace && j.contains("trace")) {
    std::size_t i = 0;
    for (const auto& s : j["trace"]) {
      std::cout << "  pass " << ++i << " [" << s["rule"].get<std::string>() << "]\n";
      std::cout << "    " << s["after"].get<std::string>() << "\n";
    }
  }
  if (j.contains("fixpoint")) {
    std::cout << "  fixpoint: " << j["fixpoint"].get<std::string>() << "\n";
    std::cout << "  regressed: " << (j["regressed"].get<bool>() ? "true" : "false") << "\n";
  }
  if (j.contains("agree")) std::cout << "  agree: " << (j["agree"].get<bool>() ? "true" : "false") << "\n";
}

int run_query(const QueryArgs& a) {
  NDBATheory d = load_domain(a.domain);
  auto [text, origin] = text_or_file(a.query);
  auto parsed = parse_queries(text, d, origin);
  if (!report(parsed)) return kUsage;
  std::vector<CausalQuery> queries = *parsed.value;
  if (a.at_position) {
    for (auto& q : queries) {
      if (q.kind == QueryKind::CAfter || q.kind == QueryKind::PAfter) continue;
      if (q.ts < 1) throw UsageError("with --at-position, positions start at 1");
      q.ts -= 1;
    }
  }
  if (!structurally_valid(d)) return kFailure;

  bool failed = false;
  json results = json::array();
  for (const auto& q : queries) results.push_back(query_record(d, q, a, failed));
  if (a.json) {
    json j;
    j["domain"] = d.name;
    j["results"] = std::move(results);
    std::cout << j.dump(2) << "\n";
  } else {
    for (const auto& r : results) print_record(r, a.trace);
  }
  return failed ? kFailure : kOk;
}

// ---- exec-tree

struct TreeArgs {
  std::string domain;
  std::string sequence;
  std::string format = "text";
  std::string effect;
};

int run_exec_tree(const TreeArgs& a) {
  NDBATheory d = load_domain(a.domain);
  auto [text, origin] = text_or_file(a.sequence);
  auto seq = parse_sequence(text, d);
  if (!report(seq)) return kUsage;
  std::optional<Formula> effect;
  if (!a.effect.empty()) {
    auto f = parse_formula(a.effect, d);
    if (!report(f)) return kUsage;
    if (auto diag = detail::check_regressable(*f.value, detail::Context::Effect); !diag) {
      std::cerr << "error: " << diag.reason << "\n";
      return kUsage;
    }
    effect = *f.value;
  }
  Oracle o(d);
  ExecutionTree t = o.execution_tree(*seq.value);
  if (!seq.value->empty() && t.leaves().empty())
    std::cerr << "warning: " << to_string(*seq.value) << " has no execution from S0\n";
  if (a.format == "json")
    std::cout << to_json(t, &o, effect).dump(2) << "\n";
  else
    std::cout << render_text(t, &o, effect);
  return kOk;
}

// ---- fuzz-verify

struct FuzzArgs {
  int domains = 20;
  int queries = 1000;
  std::uint64_t seed = 1;
  bool json = false;
};

int run_fuzz(const FuzzArgs& a) {
  if (a.domains <= 0 || a.queries < 0) throw UsageError("--domains must be positive and --queries non-negative");
  const RegressionOptions ro = regression_options();
  Generator g(a.seed);
  std::size_t total = 0, agree = 0, positives = 0;
  json failures = json::array();
  for (int k = 0; k < a.domains; ++k) {
    NDBATheory d = g.theory();
    Oracle o(d);
    const int n = a.queries / a.domains + (k < a.queries % a.domains ? 1 : 0);
    for (int i = 0; i < n; ++i) {
      CausalQuery q = g.query(d, o);
      ++total;
      try {
        TheoremVerdict v = check_regression_theorem(d, q, ro);
        positives += v.oracle ? 1 : 0;
        if (v.agree) {
          ++agree;
          continue;
        }
        json f;
        f["domain"] = print_domain(d);
        f["query"] = print_query(q);
        f["oracle"] = v.oracle;
        f["regressed"] = v.regressed;
        f["fixpoint"] = to_string(v.regression.fixpoint);
        failures.push_back(std::move(f));
      } catch (const Error& e) {
        json f;
        f["domain"] = print_domain(d);
        f["query"] = print_query(q);
        f["error"] = e.what();
        failures.push_back(std::move(f));
      }
    }
  }
  if (a.json) {
    json j;
    j["seed"] = a.seed;
    j["domains"] = a.domains;
    j["queries"] = total;
    j["agree"] = agree;
    j["oracle_true"] = positives;
    j["failures"] = failures;
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "seed " << a.seed << ": " << a.domains << " domains, " << total << " queries, " << agree
              << " agree, " << positives << " true\n";
    for (const auto& f : failures) {
      std::cout << "disagreement on " << f["query"].get<std::string>() << "\n" << f["domain"].get<std::string>();
      if (f.contains("error")) std::cout << "  error: " << f["error"].get<std::string>() << "\n";
    }
  }
  return agree == total ? kOk : kFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Actual causation in nondeterministic situation calculus domains"};
  app.require_subcommand(1);

  ValidateArgs va;
  auto* validate = app.add_subcommand("validate", "Check a domain file and its reaction requirements");
  validate->add_option("domain", va.domain, "Domain file")->required();
  validate->add_option("--depth", va.depth, "Depth for the reaction requirement checks");
  validate->add_flag("--json", va.json, "Emit JSON");

  QueryArgs qa;
  auto* query = app.add_subcommand("query", "Answer causal queries");
  query->add_option("domain", qa.domain, "Domain file")->required();
  query->add_option("query", qa.query, "Query file or query text")->required();
  query->add_option("--mode", qa.mode, "oracle, regress or verify")->check(CLI::IsMember({"oracle", "regress", "verify"}));
  query->add_flag("--trace", qa.trace, "Include the regression derivation");
  query->add_flag("--json", qa.json, "Emit JSON");
  query->add_flag("--at-position", qa.at_position, "Read timestamps as 1-based positions in the scenario");

  TreeArgs ta;
  auto* tree = app.add_subcommand("exec-tree", "Show the executions of an agent action sequence");
  tree->add_option("domain", ta.domain, "Domain file")->required();
  tree->add_option("sequence", ta.sequence, "Agent actions, e.g. \"[comm(I0), move(I0,I1)]\"")->required();
  tree->add_option("--format", ta.format, "text or json")->check(CLI::IsMember({"text", "json"}));
  tree->add_option("--effect", ta.effect, "Mark leaves by the truth of this formula");

  FuzzArgs fa;
  auto* fuzz = app.add_subcommand("fuzz-verify", "Cross-check regression against the oracle on random domains");
  fuzz->add_option("--domains", fa.domains, "Number of random domains");
  fuzz->add_option("--queries", fa.queries, "Total number of random queries");
  fuzz->add_option("--seed", fa.seed, "Random seed");
  fuzz->add_flag("--json", fa.json, "Emit JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*validate) return run_validate(va);
    if (*query) return run_query(qa);
    if (*tree) return run_exec_tree(ta);
    if (*fuzz) return run_fuzz(fa);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::DepthNonPositive ? kUsage : kFailure;
  }
  return kUsage;
}
