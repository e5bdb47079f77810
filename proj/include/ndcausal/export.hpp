#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ndcausal/dsl.hpp"
#include "ndcausal/oracle.hpp"
#include "ndcausal/query.hpp"
#include "ndcausal/regression.hpp"
#include "ndcausal/validate.hpp"

namespace ndcausal {

using json = nlohmann::ordered_json;

namespace export_detail {

inline json atoms(const std::vector<GroundAtom>& state) {
  json out = json::array();
  for (const auto& g : state) out.push_back(to_string(g));
  return out;
}

inline json node(const ExecutionNode& n, Oracle* o, const std::optional<Formula>& effect, std::size_t full) {
  json j;
  j["situation"] = to_string(n.situation);
  j["action"] = n.action ? json(to_string(*n.action)) : json(nullptr);
  j["depth"] = n.depth;
  j["state"] = atoms(n.state);
  if (effect && o) j["effect"] = o->eval_at(*effect, n.situation);
  j["leaf"] = n.depth == full;
  json kids = json::array();
  for (const auto& c : n.children) kids.push_back(node(c, o, effect, full));
  j["children"] = std::move(kids);
  return j;
}

inline void render(const ExecutionNode& n, Oracle* o, const std::optional<Formula>& effect, std::size_t full,
                   const std::string& prefix, bool last, bool root, std::string& out) {
  std::string line = root ? "S0" : (n.action ? to_string(*n.action) : "?");
  if (!n.state.empty()) {
    line += "  {";
    for (std::size_t i = 0; i < n.state.size(); ++i) line += (i ? ", " : "") + to_string(n.state[i]);
    line += "}";
  } else {
    line += "  {}";
  }
  if (effect && o && n.depth == full) line += o->eval_at(*effect, n.situation) ? "  [effect]" : "  [~effect]";
  if (root)
    out += line + "\n";
  else
    out += prefix + (last ? "`-- " : "|-- ") + line + "\n";
  const std::string child_prefix = root ? "" : prefix + (last ? "    " : "|   ");
  for (std::size_t i = 0; i < n.children.size(); ++i)
    render(n.children[i], o, effect, full, child_prefix, i + 1 == n.children.size(), false, out);
}

}  // namespace export_detail

// Leaves are tagged with the effect's truth value when an effect is given.
inline json to_json(const ExecutionTree& t, Oracle* o = nullptr, const std::optional<Formula>& effect = std::nullopt) {
  json j;
  j["sequence"] = to_string(t.sequence);
  const auto leaves = t.leaves();
  j["executions"] = leaves.size();
  if (effect && o) {
    j["effect"] = to_dsl(*effect);
    std::size_t sat = 0;
    for (const auto* l : leaves) sat += o->eval_at(*effect, l->situation) ? 1 : 0;
    j["satisfying"] = sat;
  }
  j["root"] = export_detail::node(t.root, o, effect, t.sequence.size());
  return j;
}

inline std::string render_text(const ExecutionTree& t, Oracle* o = nullptr,
                               const std::optional<Formula>& effect = std::nullopt) {
  std::string out;
  export_detail::render(t.root, o, effect, t.sequence.size(), "", true, true, out);
  return out;
}

// Number of children per level along the tree, taken as the maximum at each depth.
inline std::vector<std::size_t> branching_profile(const ExecutionTree& t) {
  std::vector<std::size_t> out(t.sequence.size(), 0);
  std::vector<const ExecutionNode*> level{&t.root};
  for (std::size_t d = 0; d < t.sequence.size(); ++d) {
    std::vector<const ExecutionNode*> next;
    for (const auto* n : level) {
      out[d] = std::max(out[d], n->children.size());
      for (const auto& c : n->children) next.push_back(&c);
    }
    level = std::move(next);
  }
  return out;
}

inline json to_json(const RegressionResult& r) {
  json j;
  j["fixpoint"] = to_string(r.fixpoint);
  j["passes"] = r.steps;
  j["extended_reductions"] = r.extended_reductions();
  json steps = json::array();
  for (const auto& s : r.trace) {
    json step;
    step["rule"] = std::string(to_string(s.rule));
    step["before"] = to_string(s.before);
    step["after"] = to_string(s.after);
    steps.push_back(std::move(step));
  }
  j["trace"] = std::move(steps);
  return j;
}

inline std::string render_text(const RegressionResult& r) {
  std::string out;
  for (std::size_t i = 0; i < r.trace.size(); ++i) {
    const auto& s = r.trace[i];
    out += "pass " + std::to_string(i + 1) + " [" + std::string(to_string(s.rule)) + "]\n";
    out += "  " + to_string(s.after) + "\n";
  }
  out += "fixpoint: " + to_string(r.fixpoint) + "\n";
  return out;
}

inline json to_json(const Finding& f) {
  json j;
  j["code"] = std::string(to_string(f.code));
  j["subject"] = f.subject;
  j["message"] = f.message;
  if (!f.witness.empty()) j["witness"] = f.witness;
  return j;
}

inline json to_json(const std::vector<Finding>& fs) {
  json out = json::array();
  for (const auto& f : fs) out.push_back(to_json(f));
  return out;
}

inline json to_json(const RequirementReport& r) {
  json j;
  j["depth"] = r.depth;
  j["situations_checked"] = r.situations_checked;
  j["passed"] = r.passed();
  j["counterexamples"] = to_json(r.counterexamples);
  return j;
}

inline json to_json(const ParseDiagnostic& d) {
  json j;
  j["severity"] = d.severity == Severity::Error ? "error" : "warning";
  j["code"] = std::string(to_string(d.code));
  j["message"] = d.message;
  j["file"] = d.span.file;
  j["line"] = d.span.line;
  j["column"] = d.span.column;
  j["length"] = d.span.length;
  if (!d.expected.empty()) j["expected"] = d.expected;
  return j;
}

inline json to_json(const CauseVerdict& v) {
  json j;
  j["holds"] = v.holds;
  j["vacuous"] = v.vacuous;
  j["candidate_in_scenario"] = v.candidate_in_scenario;
  j["executions"] = v.executions;
  j["satisfying"] = v.satisfying;
  return j;
}

}  // namespace ndcausal
