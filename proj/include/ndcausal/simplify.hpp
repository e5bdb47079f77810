#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ndcausal/formula.hpp"
#include "ndcausal/formula_ops.hpp"
#include "ndcausal/theory.hpp"

namespace ndcausal {

struct SimplifyOptions {
  // Look up rigid relations and fluent atoms at S0 in the closed initial model.
  bool use_initial_state = true;
  std::size_t max_rounds = 64;
};

class Simplifier {
 public:
  explicit Simplifier(const NDBATheory& d, SimplifyOptions o = {}) : d_(&d), opt_(o) {}

  // Iterates single passes until nothing changes.
  Formula operator()(const Formula& f) const {
    Formula cur = f;
    for (std::size_t i = 0; i < opt_.max_rounds; ++i) {
      Formula next = simp(cur, std::nullopt);
      if (next == cur) return cur;
      cur = next;
    }
    return cur;
  }

  Formula equality(const Term& l, const Term& r) const {
    if (l == r) return Formula::top();
    if (l.sort != r.sort) return Formula::bottom();
    if (l.is_constant() && r.is_constant()) return Formula::bottom();
    if (l.is_action() && r.is_action()) {
      if (l.name != r.name || l.args.size() != r.args.size()) return Formula::bottom();
      std::vector<Formula> parts;
      for (std::size_t i = 0; i < l.args.size(); ++i) {
        Formula p = equality(l.args[i], r.args[i]);
        if (p.is_false()) return Formula::bottom();
        if (!p.is_true()) parts.push_back(p);
      }
      return Formula::conj(std::move(parts));
    }
    if (!l.is_variable() && r.is_variable()) return Formula::eq(r, l);
    if (l.is_variable() && r.is_variable() && r.name < l.name) return Formula::eq(r, l);
    return Formula::eq(l, r);
  }

 private:
  static bool mentions(const Term& t, const std::string& v) {
    if (t.is_variable()) return t.name == v;
    for (const auto& a : t.args)
      if (mentions(a, v)) return true;
    return false;
  }

  // True when the formula only needs S0 facts, rigid facts and equality once closed.
  static bool model_evaluable(const Formula& f) {
    switch (f.kind()) {
      case FormulaKind::True:
      case FormulaKind::False:
      case FormulaKind::Eq:
      case FormulaKind::Rigid: return true;
      case FormulaKind::Fluent: return f.sit() && f.sit()->is_s0();
      case FormulaKind::Time: return f.sit() && f.sit()->is_s0_based();
      case FormulaKind::Not:
      case FormulaKind::And:
      case FormulaKind::Or:
        for (const auto& c : f.children())
          if (!model_evaluable(c)) return false;
        return true;
      case FormulaKind::Exists:
      case FormulaKind::Forall:
        for (const auto& v : f.vars())
          if (v.sort.is_situation()) return false;
        return model_evaluable(f.body());
      default: return false;
    }
  }

  bool rigid_only(const Formula& f) const {
    switch (f.kind()) {
      case FormulaKind::True:
      case FormulaKind::False:
      case FormulaKind::Eq: return true;
      case FormulaKind::Rigid: return opt_.use_initial_state;
      case FormulaKind::Not:
      case FormulaKind::And:
      case FormulaKind::Or:
        for (const auto& c : f.children())
          if (!rigid_only(c)) return false;
        return true;
      case FormulaKind::Exists:
      case FormulaKind::Forall:
        for (const auto& v : f.vars())
          if (v.sort.is_situation()) return false;
        return rigid_only(f.body());
      default: return false;
    }
  }

  static bool is_negation_of(const Formula& a, const Formula& b) {
    return (a.is(FormulaKind::Not) && a.body() == b) || (b.is(FormulaKind::Not) && b.body() == a);
  }

  Formula simp(const Formula& f, std::optional<int> now) const {
    switch (f.kind()) {
      case FormulaKind::True:
      case FormulaKind::False: return f;
      case FormulaKind::Eq: return equality(f.lhs(), f.rhs());
      case FormulaKind::Rigid: {
        if (!opt_.use_initial_state) return f;
        std::vector<std::string> tuple;
        for (const auto& t : f.terms()) {
          if (!t.is_constant()) return f;
          tuple.push_back(t.name);
        }
        const RigidDecl* r = d_->find_rigid(f.name());
        if (!r) return f;
        return Formula::boolean(r->tuples.count(tuple) > 0);
      }
      case FormulaKind::Fluent: {
        if (!opt_.use_initial_state || !f.sit() || !f.sit()->is_s0()) return f;
        GroundAtom g{f.name(), {}};
        for (const auto& t : f.terms()) {
          if (!t.is_constant()) return f;
          g.args.push_back(t.name);
        }
        return Formula::boolean(d_->initial.count(g) > 0);
      }
      case FormulaKind::Time: {
        if (f.time_rhs() < 0) return Formula::boolean(f.time_op() == TimeOp::Gt);
        std::optional<int> t;
        if (f.sit()) {
          if (f.sit()->is_s0_based()) t = f.sit()->timestamp();
        } else {
          t = now;
        }
        if (!t) return f;
        return Formula::boolean(f.time_op() == TimeOp::Eq ? *t == f.time_rhs() : *t > f.time_rhs());
      }
      case FormulaKind::Poss: {
        const Term& a = f.action();
        const ActionDecl* decl = d_->find_action(a.name);
        if (decl && !a.args.empty() && a.args.back().is_constant() &&
            std::find(decl->reactions.begin(), decl->reactions.end(), a.args.back().name) == decl->reactions.end())
          return Formula::bottom();
        return f;
      }
      case FormulaKind::PossAg: return f;
      case FormulaKind::After: {
        Formula b = simp(f.body(), now ? std::optional<int>(*now + 1) : std::nullopt);
        if (b.is_true() || b.is_false()) return b;
        return f.with_children({b});
      }
      case FormulaKind::Not: {
        Formula b = simp(f.body(), now);
        if (b.is_true()) return Formula::bottom();
        if (b.is_false()) return Formula::top();
        if (b.is(FormulaKind::Not)) return b.body();
        return f.with_children({b});
      }
      case FormulaKind::And:
      case FormulaKind::Or: return junction(f, now);
      case FormulaKind::Exists:
      case FormulaKind::Forall: return quantifier(f, now);
      case FormulaKind::Causes: {
        if (f.ts() < 0) return Formula::bottom();
        if (f.sit() && f.sit()->is_s0_based() && f.ts() >= f.sit()->timestamp()) return Formula::bottom();
        if (!f.sit() && now && f.ts() >= *now) return Formula::bottom();
        Formula e = simp(f.effect(), std::nullopt);
        if (e.is_true() || e.is_false()) return Formula::bottom();
        return f.with_children({e});
      }
      case FormulaKind::CAfter:
      case FormulaKind::PAfter: {
        std::optional<int> t;
        const int n = static_cast<int>(f.seq().size());
        if (f.sit()) {
          if (f.sit()->is_s0_based()) t = f.sit()->timestamp() + n;
        } else if (now) {
          t = *now + n;
        }
        Formula c = simp(f.cond(), t);
        if (f.is(FormulaKind::CAfter) && c.is_true()) return c;
        if (f.is(FormulaKind::PAfter) && c.is_false()) return c;
        return f.with_children({c});
      }
      case FormulaKind::CCauses:
      case FormulaKind::PCauses: {
        if (f.is(FormulaKind::PCauses) && (f.ts() < 0 || f.ts() >= static_cast<int>(f.seq().size())))
          return Formula::bottom();
        return f.with_children({simp(f.effect(), std::nullopt)});
      }
    }
    return f;
  }

  Formula junction(const Formula& f, std::optional<int> now) const {
    const bool is_and = f.is(FormulaKind::And);
    const FormulaKind self = f.kind();
    std::vector<Formula> flat;
    std::vector<Formula> pending(f.children().rbegin(), f.children().rend());
    while (!pending.empty()) {
      Formula c = pending.back();
      pending.pop_back();
      Formula s = simp(c, now);
      if (s.is(self)) {
        for (auto it = s.children().rbegin(); it != s.children().rend(); ++it) pending.push_back(*it);
        continue;
      }
      if (is_and ? s.is_false() : s.is_true()) return s;
      if (is_and ? s.is_true() : s.is_false()) continue;
      bool dup = false;
      for (const auto& x : flat) {
        if (x == s) {
          dup = true;
          break;
        }
        if (is_negation_of(x, s)) return Formula::boolean(!is_and);
      }
      if (!dup) flat.push_back(s);
    }
    if (is_and) {
      // Unique names: one variable cannot equal two distinct constants.
      std::map<std::string, std::string> bound;
      for (const auto& x : flat) {
        if (!x.is(FormulaKind::Eq) || !x.lhs().is_variable() || !x.rhs().is_constant()) continue;
        auto [it, fresh] = bound.emplace(x.lhs().name, x.rhs().name);
        if (!fresh && it->second != x.rhs().name) return Formula::bottom();
      }
    } else {
      std::map<std::string, std::string> excluded;
      for (const auto& x : flat) {
        if (!x.is(FormulaKind::Not) || !x.body().is(FormulaKind::Eq)) continue;
        const Formula& e = x.body();
        if (!e.lhs().is_variable() || !e.rhs().is_constant()) continue;
        auto [it, fresh] = excluded.emplace(e.lhs().name, e.rhs().name);
        if (!fresh && it->second != e.rhs().name) return Formula::top();
      }
    }
    if (flat.empty()) return Formula::boolean(is_and);
    if (flat.size() == 1) return flat.front();
    FormulaNode n = f.node();
    n.children = std::move(flat);
    if (n == f.node()) return f;
    return Formula::from_node(std::move(n));
  }

  // Finds a conjunct v = t (or a disjunct v != t for forall) that fixes bound variable v.
  std::optional<std::pair<Variable, Term>> one_point(const Formula& body, const std::vector<Variable>& vars,
                                                     bool is_exists, std::size_t& index) const {
    auto match = [&](const Formula& eq) -> std::optional<std::pair<Variable, Term>> {
      for (const auto& v : vars) {
        if (eq.lhs().is_variable() && eq.lhs().name == v.name && !mentions(eq.rhs(), v.name))
          return std::make_pair(v, eq.rhs());
        if (eq.rhs().is_variable() && eq.rhs().name == v.name && !mentions(eq.lhs(), v.name))
          return std::make_pair(v, eq.lhs());
      }
      return std::nullopt;
    };
    const FormulaKind junct = is_exists ? FormulaKind::And : FormulaKind::Or;
    std::vector<Formula> items = body.is(junct) ? body.children() : std::vector<Formula>{body};
    for (std::size_t i = 0; i < items.size(); ++i) {
      const Formula& it = items[i];
      if (is_exists && it.is(FormulaKind::Eq)) {
        if (auto m = match(it)) {
          index = i;
          return m;
        }
      }
      if (!is_exists && it.is(FormulaKind::Not) && it.body().is(FormulaKind::Eq)) {
        if (auto m = match(it.body())) {
          index = i;
          return m;
        }
      }
    }
    return std::nullopt;
  }

  Formula quantifier(const Formula& f, std::optional<int> now) const {
    const bool is_exists = f.is(FormulaKind::Exists);
    for (const auto& v : f.vars()) {
      if (v.sort.is_situation()) return f.with_children({simp(f.body(), now)});
      if (d_->domain(v.sort).empty()) return Formula::boolean(!is_exists);
    }
    Formula b = simp(f.body(), now);
    if (b.is_true() || b.is_false()) return b;

    // Drop variables that no longer occur.
    std::set<std::string> fv;
    for (const auto& v : free_variables(b)) fv.insert(v.name);
    std::vector<Variable> vars;
    for (const auto& v : f.vars())
      if (fv.count(v.name)) vars.push_back(v);
    if (vars.empty()) return b;

    std::size_t index = 0;
    if (auto m = one_point(b, vars, is_exists, index)) {
      const FormulaKind junct = is_exists ? FormulaKind::And : FormulaKind::Or;
      std::vector<Formula> rest;
      if (b.is(junct)) {
        rest = b.children();
        rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(index));
      }
      Formula remaining = is_exists ? Formula::conj(rest) : Formula::disj(rest);
      remaining = substitute(remaining, Binding{{m->first.name, m->second}});
      std::vector<Variable> left;
      for (const auto& v : vars)
        if (v.name != m->first.name) left.push_back(v);
      return rebuild(is_exists, std::move(left), remaining);
    }

    // Distribute over the matching junction so each part can shed variables.
    if ((is_exists && b.is(FormulaKind::Or)) || (!is_exists && b.is(FormulaKind::And))) {
      std::vector<Formula> parts;
      for (const auto& c : b.children()) parts.push_back(rebuild(is_exists, vars, c));
      return is_exists ? Formula::disj(std::move(parts)) : Formula::conj(std::move(parts));
    }

    std::set<std::string> var_names;
    for (const auto& v : vars) var_names.insert(v.name);
    bool closed = true;
    for (const auto& v : free_variables(b))
      if (!var_names.count(v.name)) closed = false;
    if (closed && ((opt_.use_initial_state && model_evaluable(b)) || rigid_only(b))) {
      std::vector<Formula> parts;
      const Variable v = vars.front();
      std::vector<Variable> left(vars.begin() + 1, vars.end());
      for (const auto& c : d_->domain(v.sort)) parts.push_back(rebuild(is_exists, left, substitute(b, {{v.name, c}})));
      return is_exists ? Formula::disj(std::move(parts)) : Formula::conj(std::move(parts));
    }
    return rebuild(is_exists, std::move(vars), b);
  }

  static Formula rebuild(bool is_exists, std::vector<Variable> vars, Formula body) {
    return is_exists ? Formula::exists(std::move(vars), std::move(body)) : Formula::forall(std::move(vars), std::move(body));
  }

  const NDBATheory* d_;
  SimplifyOptions opt_;
};

inline Formula simplify(const NDBATheory& d, const Formula& f, SimplifyOptions o = {}) { return Simplifier(d, o)(f); }

}  // namespace ndcausal
