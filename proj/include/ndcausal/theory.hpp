#pragma once

#include <algorithm>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ndcausal/formula.hpp"
#include "ndcausal/formula_ops.hpp"

namespace ndcausal {

struct GroundAtom {
  std::string name;
  std::vector<std::string> args;

  bool operator==(const GroundAtom&) const = default;
  std::strong_ordering operator<=>(const GroundAtom&) const = default;
};

inline std::string to_string(const GroundAtom& a) {
  if (a.args.empty()) return a.name;
  std::string out = a.name + "(";
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (i) out += ", ";
    out += a.args[i];
  }
  return out + ")";
}

struct ObjectDecl {
  std::string name;
  Sort sort;
  bool operator==(const ObjectDecl&) const = default;
};

struct FluentDecl {
  std::string name;
  std::vector<Sort> params;
  bool operator==(const FluentDecl&) const = default;
};

// Situation-independent relation with a fixed extension.
struct RigidDecl {
  std::string name;
  std::size_t arity = 0;
  std::set<std::vector<std::string>> tuples;
  bool operator==(const RigidDecl&) const = default;
};

struct ActionDecl {
  std::string name;
  std::vector<Variable> params;
  std::vector<std::string> reactions;
  Variable reaction_var{"e", Sort::reaction()};
  Formula poss_ag = Formula::top();
  Formula poss = Formula::top();

  AgentAction agent_pattern() const {
    AgentAction a{name, {}};
    for (const auto& p : params) a.args.push_back(p.term());
    return a;
  }
  bool operator==(const ActionDecl&) const = default;
};

struct SSADecl {
  std::string fluent;
  std::vector<Variable> params;
  Variable action_var{"a", Sort::action()};
  Formula body = Formula::bottom();
  bool operator==(const SSADecl&) const = default;
};

struct NDBATheory {
  std::string name;
  std::vector<std::string> sorts;
  std::vector<ObjectDecl> objects;
  std::vector<RigidDecl> rigids;
  std::vector<FluentDecl> fluents;
  std::vector<ActionDecl> actions;
  std::vector<SSADecl> ssas;
  std::set<GroundAtom> initial;  // closed world: everything else is false at S0
  bool unique_names = true;

  bool operator==(const NDBATheory&) const = default;

  const FluentDecl* find_fluent(const std::string& n) const {
    for (const auto& f : fluents)
      if (f.name == n) return &f;
    return nullptr;
  }
  const RigidDecl* find_rigid(const std::string& n) const {
    for (const auto& r : rigids)
      if (r.name == n) return &r;
    return nullptr;
  }
  const ActionDecl* find_action(const std::string& n) const {
    for (const auto& a : actions)
      if (a.name == n) return &a;
    return nullptr;
  }
  const SSADecl* find_ssa(const std::string& fluent) const {
    for (const auto& s : ssas)
      if (s.fluent == fluent) return &s;
    return nullptr;
  }
  const ObjectDecl* find_object(const std::string& n) const {
    for (const auto& o : objects)
      if (o.name == n) return &o;
    return nullptr;
  }

  // Union of all declared reactions, in order of first declaration.
  std::vector<std::string> reactions() const {
    std::vector<std::string> out;
    for (const auto& a : actions)
      for (const auto& r : a.reactions)
        if (std::find(out.begin(), out.end(), r) == out.end()) out.push_back(r);
    return out;
  }

  bool is_reaction(const std::string& n) const {
    for (const auto& a : actions)
      if (std::find(a.reactions.begin(), a.reactions.end(), n) != a.reactions.end()) return true;
    return false;
  }

  std::optional<Sort> constant_sort(const std::string& n) const {
    if (auto* o = find_object(n)) return o->sort;
    if (is_reaction(n)) return Sort::reaction();
    return std::nullopt;
  }

  Term constant(const std::string& n) const {
    auto s = constant_sort(n);
    if (!s) throw Error(ErrorCode::SortMismatch, "undeclared constant " + n);
    return Term::constant(n, *s);
  }

  std::vector<Term> domain(const Sort& s) const {
    std::vector<Term> out;
    if (s.is_reaction()) {
      for (const auto& r : reactions()) out.push_back(Term::constant(r, Sort::reaction()));
    } else if (s.is_action()) {
      out = ground_system_actions();
    } else if (s.is_situation()) {
      throw Error(ErrorCode::NotRegressable, "situations have no finite domain");
    } else {
      for (const auto& o : objects)
        if (o.sort == s) out.push_back(Term::constant(o.name, o.sort));
    }
    return out;
  }

  // Calls fn on every tuple of constants drawn from the given sorts.
  void for_each_tuple(const std::vector<Sort>& sorts, const std::function<void(const std::vector<Term>&)>& fn) const {
    std::vector<std::vector<Term>> doms;
    for (const auto& s : sorts) doms.push_back(domain(s));
    std::vector<Term> cur;
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
      if (i == doms.size()) {
        fn(cur);
        return;
      }
      for (const auto& t : doms[i]) {
        cur.push_back(t);
        rec(i + 1);
        cur.pop_back();
      }
    };
    rec(0);
  }

  std::vector<AgentAction> ground_agent_actions() const {
    std::vector<AgentAction> out;
    for (const auto& a : actions) {
      std::vector<Sort> sorts;
      for (const auto& p : a.params) sorts.push_back(p.sort);
      for_each_tuple(sorts, [&](const std::vector<Term>& args) { out.push_back(AgentAction{a.name, args}); });
    }
    return out;
  }

  std::vector<Term> ground_system_actions() const {
    std::vector<Term> out;
    for (const auto& ag : ground_agent_actions()) {
      for (const auto& r : find_action(ag.name)->reactions)
        out.push_back(with_reaction(ag, Term::constant(r, Sort::reaction())));
    }
    return out;
  }

  std::vector<GroundAtom> ground_fluent_atoms() const {
    std::vector<GroundAtom> out;
    for (const auto& f : fluents) {
      for_each_tuple(f.params, [&](const std::vector<Term>& args) {
        GroundAtom g{f.name, {}};
        for (const auto& t : args) g.args.push_back(t.name);
        out.push_back(std::move(g));
      });
    }
    return out;
  }

  // Every symbol a generated variable or placeholder name must avoid.
  std::set<std::string> symbol_names() const {
    std::set<std::string> out(sorts.begin(), sorts.end());
    for (const auto& o : objects) out.insert(o.name);
    for (const auto& r : rigids) out.insert(r.name);
    for (const auto& f : fluents) out.insert(f.name);
    for (const auto& r : reactions()) out.insert(r);
    for (const auto& a : actions) {
      out.insert(a.name);
      out.insert(a.reaction_var.name);
      for (const auto& p : a.params) out.insert(p.name);
      for (const auto& f : {a.poss_ag, a.poss}) {
        auto vs = variable_names(f);
        out.insert(vs.begin(), vs.end());
      }
    }
    for (const auto& s : ssas) {
      out.insert(s.action_var.name);
      for (const auto& p : s.params) out.insert(p.name);
      auto vs = variable_names(s.body);
      out.insert(vs.begin(), vs.end());
    }
    return out;
  }
};

}  // namespace ndcausal
