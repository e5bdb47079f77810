#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "ndcausal/formula_ops.hpp"
#include "ndcausal/oracle.hpp"
#include "ndcausal/theory.hpp"

namespace ndcausal {

enum class FindingCode {
  MissingSSA,
  DuplicateSSA,
  ReactionInAgentPrecondition,
  UndeclaredSymbol,
  ArityMismatch,
  SortMismatch,
  UndeclaredReaction,
  NonClosedInitial,
  DuplicateDeclaration,
  EmptyReactions,
  InvalidAxiomBody,
  ReactionIndependence,
  ReactionExistence,
};

inline std::string_view to_string(FindingCode c) {
  switch (c) {
    case FindingCode::MissingSSA: return "MissingSSA";
    case FindingCode::DuplicateSSA: return "DuplicateSSA";
    case FindingCode::ReactionInAgentPrecondition: return "ReactionInAgentPrecondition";
    case FindingCode::UndeclaredSymbol: return "UndeclaredSymbol";
    case FindingCode::ArityMismatch: return "ArityMismatch";
    case FindingCode::SortMismatch: return "SortMismatch";
    case FindingCode::UndeclaredReaction: return "UndeclaredReaction";
    case FindingCode::NonClosedInitial: return "NonClosedInitial";
    case FindingCode::DuplicateDeclaration: return "DuplicateDeclaration";
    case FindingCode::EmptyReactions: return "EmptyReactions";
    case FindingCode::InvalidAxiomBody: return "InvalidAxiomBody";
    case FindingCode::ReactionIndependence: return "ReactionIndependence";
    case FindingCode::ReactionExistence: return "ReactionExistence";
  }
  return "Unknown";
}

struct Finding {
  FindingCode code;
  std::string subject;
  std::string message;
  std::vector<std::string> witness;

  bool operator==(const Finding&) const = default;
  auto operator<=>(const Finding&) const = default;
};

struct RequirementReport {
  int depth = 0;
  std::size_t situations_checked = 0;
  std::vector<Finding> counterexamples;

  bool passed() const { return counterexamples.empty(); }
};

namespace detail {

class AxiomChecker {
 public:
  AxiomChecker(const NDBATheory& d, std::vector<Finding>& out) : d_(d), out_(out) {}

  // Walks one axiom body. `scope` holds the variables that may occur free.
  void check(const Formula& f, const std::string& where, const std::map<std::string, Sort>& scope, bool allow_poss_ag,
             const ActionDecl* owner) {
    where_ = where;
    owner_ = owner;
    allow_poss_ag_ = allow_poss_ag;
    walk(f, scope);
  }

 private:
  void add(FindingCode c, const std::string& msg) { out_.push_back(Finding{c, where_, msg, {}}); }

  void term(const Term& t, const std::map<std::string, Sort>& scope, const std::optional<Sort>& expected) {
    switch (t.kind) {
      case Term::Kind::Variable: {
        auto it = scope.find(t.name);
        if (it == scope.end()) {
          add(FindingCode::UndeclaredSymbol, "free variable " + t.name);
        } else if (it->second != t.sort) {
          add(FindingCode::SortMismatch, "variable " + t.name + " used at sort " + t.sort.name);
        }
        break;
      }
      case Term::Kind::Constant: {
        auto s = d_.constant_sort(t.name);
        if (!s) {
          add(FindingCode::UndeclaredSymbol, "undeclared constant " + t.name);
          return;
        }
        if (s->is_reaction() && owner_ &&
            std::find(owner_->reactions.begin(), owner_->reactions.end(), t.name) == owner_->reactions.end())
          add(FindingCode::UndeclaredReaction, "reaction " + t.name + " is not declared for " + owner_->name);
        if (expected && *expected != *s)
          add(FindingCode::SortMismatch, "constant " + t.name + " has sort " + s->name + ", expected " + expected->name);
        break;
      }
      case Term::Kind::Action: {
        const ActionDecl* a = d_.find_action(t.name);
        if (!a) {
          add(FindingCode::UndeclaredSymbol, "undeclared action " + t.name);
          return;
        }
        if (t.args.size() != a->params.size() + 1) {
          add(FindingCode::ArityMismatch, "action " + t.name + " expects " + std::to_string(a->params.size() + 1) +
                                              " arguments (with reaction)");
          return;
        }
        for (std::size_t i = 0; i < a->params.size(); ++i) term(t.args[i], scope, a->params[i].sort);
        const ActionDecl* saved = owner_;
        owner_ = a;
        term(t.args.back(), scope, Sort::reaction());
        owner_ = saved;
        break;
      }
    }
  }

  void walk(const Formula& f, const std::map<std::string, Sort>& scope) {
    if (f.sit()) add(FindingCode::InvalidAxiomBody, "axiom bodies must be situation-suppressed");
    switch (f.kind()) {
      case FormulaKind::True:
      case FormulaKind::False: break;
      case FormulaKind::Fluent: {
        const FluentDecl* fl = d_.find_fluent(f.name());
        if (!fl) {
          add(FindingCode::UndeclaredSymbol, "undeclared fluent " + f.name());
          break;
        }
        if (fl->params.size() != f.terms().size()) {
          add(FindingCode::ArityMismatch, "fluent " + f.name() + " expects " + std::to_string(fl->params.size()) +
                                              " arguments");
          break;
        }
        for (std::size_t i = 0; i < fl->params.size(); ++i) term(f.terms()[i], scope, fl->params[i]);
        break;
      }
      case FormulaKind::Rigid: {
        const RigidDecl* r = d_.find_rigid(f.name());
        if (!r) {
          add(FindingCode::UndeclaredSymbol, "undeclared relation " + f.name());
          break;
        }
        if (r->arity != f.terms().size()) add(FindingCode::ArityMismatch, "relation " + f.name() + " arity");
        for (const auto& t : f.terms()) term(t, scope, std::nullopt);
        break;
      }
      case FormulaKind::PossAg: {
        if (!allow_poss_ag_) {
          add(FindingCode::InvalidAxiomBody, "PossAg is only allowed in system-action preconditions");
          break;
        }
        const ActionDecl* a = d_.find_action(f.agent().name);
        if (!a) {
          add(FindingCode::UndeclaredSymbol, "undeclared action " + f.agent().name);
          break;
        }
        if (a->params.size() != f.agent().args.size()) {
          add(FindingCode::ArityMismatch, "agent action " + f.agent().name + " arity");
          break;
        }
        for (std::size_t i = 0; i < a->params.size(); ++i) term(f.agent().args[i], scope, a->params[i].sort);
        break;
      }
      case FormulaKind::Eq:
        term(f.lhs(), scope, std::nullopt);
        term(f.rhs(), scope, std::nullopt);
        if (f.lhs().sort != f.rhs().sort) add(FindingCode::SortMismatch, "equality between different sorts");
        break;
      case FormulaKind::Not:
      case FormulaKind::And:
      case FormulaKind::Or:
        for (const auto& c : f.children()) walk(c, scope);
        break;
      case FormulaKind::Exists:
      case FormulaKind::Forall: {
        auto inner = scope;
        for (const auto& v : f.vars()) {
          if (v.sort.is_situation()) add(FindingCode::InvalidAxiomBody, "quantification over situations");
          inner[v.name] = v.sort;
        }
        walk(f.body(), inner);
        break;
      }
      default:
        add(FindingCode::InvalidAxiomBody, "construct not allowed in an axiom body: " + to_string(f));
        break;
    }
  }

  const NDBATheory& d_;
  std::vector<Finding>& out_;
  std::string where_;
  const ActionDecl* owner_ = nullptr;
  bool allow_poss_ag_ = false;
};

inline bool mentions_reaction_variable(const Formula& f) {
  for (const auto& v : free_variables(f))
    if (v.sort.is_reaction()) return true;
  return false;
}

}  // namespace detail

// Structural well-formedness. Findings are sorted; an empty list means well-formed.
inline std::vector<Finding> validate_theory(const NDBATheory& d) {
  std::vector<Finding> out;
  auto add = [&](FindingCode c, const std::string& subject, const std::string& msg) {
    out.push_back(Finding{c, subject, msg, {}});
  };

  // Sorts, constants, predicates and actions live in separate namespaces.
  std::map<std::string, std::map<std::string, std::string>> seen;
  auto space = [](const std::string& what) -> std::string {
    if (what == "object" || what == "reaction") return "constant";
    if (what == "fluent" || what == "relation") return "predicate";
    return what;
  };
  auto declare = [&](const std::string& name, const std::string& what) {
    auto [it, fresh] = seen[space(what)].emplace(name, what);
    if (!fresh) add(FindingCode::DuplicateDeclaration, name, name + " declared as " + it->second + " and " + what);
  };
  std::set<std::string> sort_names(d.sorts.begin(), d.sorts.end());
  for (const auto& s : d.sorts) declare(s, "sort");
  for (const auto& o : d.objects) {
    declare(o.name, "object");
    if (!sort_names.count(o.sort.name)) add(FindingCode::UndeclaredSymbol, o.name, "undeclared sort " + o.sort.name);
  }
  for (const auto& r : d.rigids) declare(r.name, "relation");
  for (const auto& f : d.fluents) {
    declare(f.name, "fluent");
    for (const auto& p : f.params)
      if (!sort_names.count(p.name)) add(FindingCode::UndeclaredSymbol, f.name, "undeclared sort " + p.name);
  }
  std::set<std::string> reactions_seen;
  for (const auto& a : d.actions) {
    declare(a.name, "action");
    if (a.reactions.empty()) add(FindingCode::EmptyReactions, a.name, "action " + a.name + " declares no reactions");
    for (const auto& p : a.params)
      if (!sort_names.count(p.sort.name)) add(FindingCode::UndeclaredSymbol, a.name, "undeclared sort " + p.sort.name);
    for (const auto& r : a.reactions)
      if (reactions_seen.insert(r).second) declare(r, "reaction");
  }

  for (const auto& r : d.rigids) {
    for (const auto& t : r.tuples) {
      if (t.size() != r.arity) add(FindingCode::ArityMismatch, r.name, "tuple of wrong arity in " + r.name);
      for (const auto& c : t)
        if (!d.find_object(c)) add(FindingCode::NonClosedInitial, r.name, "undeclared constant " + c + " in " + r.name);
    }
  }

  for (const auto& f : d.fluents) {
    std::size_t n = 0;
    for (const auto& s : d.ssas) n += s.fluent == f.name;
    if (n == 0) add(FindingCode::MissingSSA, f.name, "no successor-state axiom for " + f.name);
    if (n > 1) add(FindingCode::DuplicateSSA, f.name, "several successor-state axioms for " + f.name);
  }

  detail::AxiomChecker checker(d, out);
  for (const auto& s : d.ssas) {
    const FluentDecl* fl = d.find_fluent(s.fluent);
    if (!fl) {
      add(FindingCode::UndeclaredSymbol, s.fluent, "successor-state axiom for undeclared fluent " + s.fluent);
      continue;
    }
    if (fl->params.size() != s.params.size()) {
      add(FindingCode::ArityMismatch, s.fluent, "successor-state axiom parameters do not match " + s.fluent);
      continue;
    }
    std::map<std::string, Sort> scope;
    for (std::size_t i = 0; i < s.params.size(); ++i) scope[s.params[i].name] = fl->params[i];
    scope[s.action_var.name] = Sort::action();
    checker.check(s.body, "ssa " + s.fluent, scope, false, nullptr);
  }

  for (const auto& a : d.actions) {
    std::map<std::string, Sort> scope;
    for (const auto& p : a.params) scope[p.name] = p.sort;
    if (detail::mentions_reaction_variable(a.poss_ag))
      add(FindingCode::ReactionInAgentPrecondition, a.name, "agent precondition of " + a.name + " mentions a reaction");
    auto ag_scope = scope;
    ag_scope[a.reaction_var.name] = Sort::reaction();
    checker.check(a.poss_ag, "poss_ag " + a.name, ag_scope, false, &a);
    scope[a.reaction_var.name] = Sort::reaction();
    checker.check(a.poss, "poss " + a.name, scope, true, &a);
  }

  for (const auto& g : d.initial) {
    const FluentDecl* fl = d.find_fluent(g.name);
    if (!fl) {
      add(FindingCode::NonClosedInitial, g.name, "initial atom " + to_string(g) + " names no declared fluent");
      continue;
    }
    if (fl->params.size() != g.args.size()) {
      add(FindingCode::ArityMismatch, g.name, "initial atom " + to_string(g) + " has wrong arity");
      continue;
    }
    for (std::size_t i = 0; i < g.args.size(); ++i) {
      const ObjectDecl* o = d.find_object(g.args[i]);
      if (!o)
        add(FindingCode::NonClosedInitial, g.name, "initial atom " + to_string(g) + " uses undeclared " + g.args[i]);
      else if (o->sort != fl->params[i])
        add(FindingCode::SortMismatch, g.name, "initial atom " + to_string(g) + " has an argument of the wrong sort");
    }
  }

  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// Bounded check of reaction independence and reaction existence over every
// situation reachable by at most `depth` executable system actions.
inline RequirementReport check_reaction_requirements(const NDBATheory& d, int depth) {
  if (depth <= 0) throw Error(ErrorCode::DepthNonPositive, "depth must be positive, got " + std::to_string(depth));
  RequirementReport rep;
  rep.depth = depth;
  Oracle o(d);
  const auto agents = d.ground_agent_actions();
  const auto reactions = d.domain(Sort::reaction());

  std::vector<Situation> frontier{Situation::s0()};
  std::set<std::set<GroundAtom>> visited{o.fluent_state(Situation::s0()).true_atoms};
  std::set<std::pair<FindingCode, std::string>> reported;

  for (int level = 0; level <= depth && !frontier.empty(); ++level) {
    std::vector<Situation> next;
    for (const auto& s : frontier) {
      ++rep.situations_checked;
      for (const auto& ag : agents) {
        const bool pag = o.poss_ag(ag, s);
        bool some = false;
        for (const auto& r : reactions) {
          Term a = with_reaction(ag, r);
          if (!o.poss(a, s)) continue;
          some = true;
          if (!pag && reported.emplace(FindingCode::ReactionIndependence, to_string(a)).second)
            rep.counterexamples.push_back(Finding{FindingCode::ReactionIndependence, ag.name,
                                                  "Poss(" + to_string(a) + ") holds but PossAg(" + to_string(ag) +
                                                      ") does not",
                                                  {to_string(a), to_string(s)}});
          if (level < depth) {
            Situation t = s.after(a);
            if (visited.insert(o.fluent_state(t).true_atoms).second) next.push_back(t);
          }
        }
        if (pag && !some && reported.emplace(FindingCode::ReactionExistence, to_string(ag)).second)
          rep.counterexamples.push_back(Finding{FindingCode::ReactionExistence, ag.name,
                                                "PossAg(" + to_string(ag) + ") holds but no reaction is possible",
                                                {to_string(ag), to_string(s)}});
      }
    }
    frontier = std::move(next);
  }
  std::sort(rep.counterexamples.begin(), rep.counterexamples.end());
  return rep;
}

}  // namespace ndcausal
