#pragma once

#include <cctype>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "ndcausal/formula.hpp"
#include "ndcausal/printer.hpp"

namespace ndcausal {

using Binding = std::map<std::string, Term>;

inline std::string fresh_name(const std::string& hint, const std::set<std::string>& avoid) {
  std::string base = hint;
  while (!base.empty() && (std::isdigit(static_cast<unsigned char>(base.back())) || base.back() == '\''))
    base.pop_back();
  if (base.empty()) base = "v";
  for (int n = 1;; ++n) {
    std::string cand = base + std::to_string(n);
    if (!avoid.count(cand)) return cand;
  }
}

inline Term substitute(const Term& t, const Binding& b) {
  if (t.is_variable()) {
    auto it = b.find(t.name);
    if (it == b.end()) return t;
    if (it->second.sort != t.sort)
      throw Error(ErrorCode::SortMismatch, "cannot bind " + t.name + ":" + t.sort.name + " to " +
                                               to_string(it->second) + ":" + it->second.sort.name);
    return it->second;
  }
  if (t.args.empty()) return t;
  Term out = t;
  for (auto& a : out.args) a = substitute(a, b);
  return out;
}

inline AgentAction substitute(const AgentAction& a, const Binding& b) {
  AgentAction out = a;
  for (auto& x : out.args) x = substitute(x, b);
  return out;
}

inline Situation substitute(const Situation& s, const Binding& b) {
  Situation out = s;
  for (auto& a : out.actions) a = substitute(a, b);
  return out;
}

inline void collect_term_variables(const Term& t, std::set<Variable>& out) {
  if (t.is_variable()) out.insert(Variable{t.name, t.sort});
  for (const auto& a : t.args) collect_term_variables(a, out);
}

namespace detail {

// Calls fn on every term mentioned directly by the node (not in children).
template <typename Fn>
void for_each_node_term(const Formula& f, Fn&& fn) {
  for (const auto& t : f.terms()) fn(t);
  if (f.node().agent)
    for (const auto& t : f.agent().args) fn(t);
  for (const auto& a : f.seq())
    for (const auto& t : a.args) fn(t);
  if (f.sit())
    for (const auto& t : f.sit()->actions) fn(t);
}

inline void free_vars(const Formula& f, const std::set<std::string>& bound, std::set<Variable>& out) {
  for_each_node_term(f, [&](const Term& t) {
    std::set<Variable> vs;
    collect_term_variables(t, vs);
    for (const auto& v : vs)
      if (!bound.count(v.name)) out.insert(v);
  });
  if (is_quantifier_kind(f.kind())) {
    auto inner = bound;
    for (const auto& v : f.vars()) inner.insert(v.name);
    free_vars(f.body(), inner, out);
    return;
  }
  for (const auto& c : f.children()) free_vars(c, bound, out);
}

inline void all_var_names(const Formula& f, std::set<std::string>& out) {
  for_each_node_term(f, [&](const Term& t) {
    std::set<Variable> vs;
    collect_term_variables(t, vs);
    for (const auto& v : vs) out.insert(v.name);
  });
  for (const auto& v : f.vars()) out.insert(v.name);
  for (const auto& c : f.children()) all_var_names(c, out);
}

inline void placeholders(const Formula& f, std::set<std::string>& out) {
  if (f.sit() && f.sit()->placeholder) out.insert(*f.sit()->placeholder);
  for (const auto& c : f.children()) placeholders(c, out);
}

}  // namespace detail

inline std::set<Variable> free_variables(const Formula& f) {
  std::set<Variable> out;
  detail::free_vars(f, {}, out);
  return out;
}

inline std::set<std::string> variable_names(const Formula& f) {
  std::set<std::string> out;
  detail::all_var_names(f, out);
  return out;
}

inline std::set<std::string> placeholder_names(const Formula& f) {
  std::set<std::string> out;
  detail::placeholders(f, out);
  return out;
}

inline std::size_t formula_size(const Formula& f) {
  std::size_t n = 1;
  for (const auto& c : f.children()) n += formula_size(c);
  return n;
}

// Capture-avoiding simultaneous substitution. Descends into effects and conditions.
inline Formula substitute(const Formula& f, const Binding& b) {
  if (b.empty()) return f;
  if (is_quantifier_kind(f.kind())) {
    Binding inner = b;
    for (const auto& v : f.vars()) inner.erase(v.name);
    std::set<Variable> fv = free_variables(f.body());
    std::set<std::string> fv_names;
    for (const auto& v : fv) fv_names.insert(v.name);
    for (auto it = inner.begin(); it != inner.end();)
      it = fv_names.count(it->first) ? std::next(it) : inner.erase(it);
    if (inner.empty()) return f;

    std::set<std::string> range;
    for (const auto& [k, t] : inner) {
      std::set<Variable> vs;
      collect_term_variables(t, vs);
      for (const auto& v : vs) range.insert(v.name);
    }
    std::set<std::string> avoid = variable_names(f.body());
    avoid.insert(range.begin(), range.end());
    for (const auto& [k, t] : inner) avoid.insert(k);
    for (const auto& v : f.vars()) avoid.insert(v.name);

    FormulaNode n = f.node();
    for (auto& v : n.vars) {
      if (!range.count(v.name)) continue;
      std::string nv = fresh_name(v.name, avoid);
      avoid.insert(nv);
      inner[v.name] = Term::variable(nv, v.sort);
      v.name = nv;
    }
    n.children = {substitute(f.body(), inner)};
    return Formula::from_node(std::move(n));
  }

  FormulaNode n = f.node();
  for (auto& t : n.terms) t = substitute(t, b);
  if (n.agent) n.agent = substitute(*n.agent, b);
  for (auto& a : n.seq) a = substitute(a, b);
  if (n.sit) n.sit = substitute(*n.sit, b);
  for (auto& c : n.children) c = substitute(c, b);
  if (n == f.node()) return f;
  return Formula::from_node(std::move(n));
}

// phi[s]: attaches s to every suppressed atom; After(a, psi) becomes psi[do(a, s)].
inline Formula restore(const Formula& f, const Situation& s) {
  switch (f.kind()) {
    case FormulaKind::Fluent:
    case FormulaKind::Poss:
    case FormulaKind::PossAg:
    case FormulaKind::Time:
    case FormulaKind::Causes:
    case FormulaKind::CAfter:
    case FormulaKind::PAfter:
      return f.sit() ? f : f.with_sit(s);
    case FormulaKind::After:
      return restore(f.body(), s.after(f.action()));
    case FormulaKind::Not:
    case FormulaKind::And:
    case FormulaKind::Or: {
      std::vector<Formula> cs;
      cs.reserve(f.children().size());
      for (const auto& c : f.children()) cs.push_back(restore(c, s));
      return f.with_children(std::move(cs));
    }
    case FormulaKind::Exists:
    case FormulaKind::Forall: {
      std::set<Variable> sv;
      for (const auto& a : s.actions) collect_term_variables(a, sv);
      std::set<std::string> in_sit;
      for (const auto& v : sv) in_sit.insert(v.name);
      Binding rename;
      FormulaNode n = f.node();
      std::set<std::string> avoid = variable_names(f);
      avoid.insert(in_sit.begin(), in_sit.end());
      for (auto& v : n.vars) {
        if (!in_sit.count(v.name)) continue;
        std::string nv = fresh_name(v.name, avoid);
        avoid.insert(nv);
        rename[v.name] = Term::variable(nv, v.sort);
        v.name = nv;
      }
      if (rename.empty()) return f.with_children({restore(f.body(), s)});
      n.children = {restore(substitute(f.body(), rename), s)};
      return Formula::from_node(std::move(n));
    }
    default:
      return f;
  }
}

namespace detail {

inline void collect_bases(const Formula& f, std::set<std::optional<std::string>>& out) {
  if (is_situated_kind(f.kind())) {
    if (f.sit()) out.insert(f.sit()->placeholder);
    return;
  }
  switch (f.kind()) {
    case FormulaKind::Not:
    case FormulaKind::And:
    case FormulaKind::Or:
    case FormulaKind::Exists:
    case FormulaKind::Forall:
    case FormulaKind::After:
      for (const auto& c : f.children()) collect_bases(c, out);
      break;
    default:
      break;
  }
}

inline Formula strip(const Formula& f, bool chains_to_after) {
  if (is_situated_kind(f.kind())) {
    if (!f.sit()) return f;
    Formula out = f.with_sit(std::nullopt);
    if (!chains_to_after) return out;
    const auto& acts = f.sit()->actions;
    for (auto it = acts.rbegin(); it != acts.rend(); ++it) out = Formula::after(*it, out);
    return out;
  }
  switch (f.kind()) {
    case FormulaKind::Not:
    case FormulaKind::And:
    case FormulaKind::Or:
    case FormulaKind::Exists:
    case FormulaKind::Forall:
    case FormulaKind::After: {
      std::vector<Formula> cs;
      for (const auto& c : f.children()) cs.push_back(strip(c, chains_to_after));
      return f.with_children(std::move(cs));
    }
    default:
      return f;
  }
}

inline void check_single_base(const Formula& f) {
  std::set<std::optional<std::string>> bases;
  collect_bases(f, bases);
  if (bases.size() > 1) {
    std::string names;
    for (const auto& b : bases) names += (names.empty() ? "" : ", ") + (b ? *b : std::string("S0"));
    throw Error(ErrorCode::MixedSituationBase, "atoms disagree on the base situation {" + names + "}");
  }
}

}  // namespace detail

// Drops the situation argument of every fluent and Poss atom, do-chain included.
inline Formula suppress(const Formula& f) {
  detail::check_single_base(f);
  return detail::strip(f, false);
}

// Removes only the common base; what is left of each do-chain becomes After
// wrappers, so restore(suppress_base(f), base) == f.
inline Formula suppress_base(const Formula& f) {
  detail::check_single_base(f);
  return detail::strip(f, true);
}

}  // namespace ndcausal
