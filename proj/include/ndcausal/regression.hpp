#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ndcausal/formula.hpp"
#include "ndcausal/formula_ops.hpp"
#include "ndcausal/printer.hpp"
#include "ndcausal/simplify.hpp"
#include "ndcausal/theory.hpp"

namespace ndcausal {

enum class RuleKind {
  FluentSSA,
  PossExpansion,
  Connective,
  CausesReduction,
  CAfterReduction,
  PAfterReduction,
  CCausesReduction,
  PCausesReduction,
  NoChange,
  Simplification,
};

inline std::string_view to_string(RuleKind r) {
  switch (r) {
    case RuleKind::FluentSSA: return "FluentSSA";
    case RuleKind::PossExpansion: return "PossExpansion";
    case RuleKind::Connective: return "Connective";
    case RuleKind::CausesReduction: return "CausesReduction";
    case RuleKind::CAfterReduction: return "CAfterReduction";
    case RuleKind::PAfterReduction: return "PAfterReduction";
    case RuleKind::CCausesReduction: return "CCausesReduction";
    case RuleKind::PCausesReduction: return "PCausesReduction";
    case RuleKind::NoChange: return "NoChange";
    case RuleKind::Simplification: return "Simplification";
  }
  return "Unknown";
}

inline bool is_extended_reduction(RuleKind r) {
  return r == RuleKind::CausesReduction || r == RuleKind::CAfterReduction || r == RuleKind::PAfterReduction ||
         r == RuleKind::CCausesReduction || r == RuleKind::PCausesReduction;
}

struct RegressionStep {
  RuleKind rule = RuleKind::NoChange;
  Formula before;
  Formula after;
};

struct RegressionResult {
  Formula fixpoint;
  std::vector<RegressionStep> trace;
  int steps = 0;  // regress_one passes

  // Passes whose outermost rewrite reduced an extended atom.
  std::size_t extended_reductions() const {
    return static_cast<std::size_t>(
        std::count_if(trace.begin(), trace.end(), [](const RegressionStep& s) { return is_extended_reduction(s.rule); }));
  }
};

struct Diagnosis {
  bool ok = true;
  std::string reason;
  explicit operator bool() const { return ok; }
};

namespace detail {

enum class Context { Top, Suppressed, Effect };

inline Diagnosis check_regressable(const Formula& f, Context ctx) {
  auto fail = [](std::string why) { return Diagnosis{false, std::move(why)}; };
  auto sub = [&](const Formula& c, Context k) { return check_regressable(c, k); };
  const FormulaKind k = f.kind();

  if (is_situated_kind(k)) {
    if (ctx == Context::Top) {
      if (!f.sit()) return fail("situation-suppressed atom outside a causal context: " + to_string(f));
      if (!f.sit()->is_s0_based())
        return fail("situation " + to_string(*f.sit()) + " is not rooted at S0");
    } else if (f.sit()) {
      return fail("explicit situation inside a situation-suppressed context: " + to_string(f));
    }
    if (ctx == Context::Effect && (is_extended_kind(k) || k == FormulaKind::Time))
      return fail("effects must be dynamic formulas: " + to_string(f));
    if (f.sit())
      for (const auto& a : f.sit()->actions)
        if (!a.is_action()) return fail("situation " + to_string(*f.sit()) + " contains a non-action term");
  }
  switch (k) {
    case FormulaKind::Poss:
      if (!f.action().is_action()) return fail("Poss of a non-action term");
      return {};
    case FormulaKind::After:
      if (ctx == Context::Top) return fail("After outside a situation-suppressed context");
      if (!f.action().is_action()) return fail("After of a non-action term");
      return sub(f.body(), ctx);
    case FormulaKind::Causes:
      if (!f.action().is_action()) return fail("Causes of a non-action term");
      if (f.ts() < 0) return fail("negative timestamp in " + to_string(f));
      return sub(f.effect(), Context::Effect);
    case FormulaKind::CAfter:
    case FormulaKind::PAfter:
      return sub(f.cond(), Context::Suppressed);
    case FormulaKind::CCauses:
    case FormulaKind::PCauses:
      if (ctx == Context::Effect) return fail("effects must be dynamic formulas: " + to_string(f));
      if (f.ts() < 0) return fail("negative timestamp in " + to_string(f));
      return sub(f.effect(), Context::Effect);
    case FormulaKind::Exists:
    case FormulaKind::Forall:
      for (const auto& v : f.vars())
        if (v.sort.is_situation()) return fail("quantifies over situations (" + v.name + ")");
      return sub(f.body(), ctx);
    case FormulaKind::Not:
    case FormulaKind::And:
    case FormulaKind::Or:
      for (const auto& c : f.children())
        if (auto d = sub(c, ctx); !d) return d;
      return {};
    default:
      return {};
  }
}

inline bool pure_s0(const Formula& f) {
  if (is_extended_kind(f.kind())) return false;
  switch (f.kind()) {
    case FormulaKind::Poss:
    case FormulaKind::PossAg:
    case FormulaKind::After: return false;
    case FormulaKind::Fluent:
    case FormulaKind::Time: return f.sit() && f.sit()->is_s0();
    case FormulaKind::Eq: return true;
    default:
      for (const auto& c : f.children())
        if (!pure_s0(c)) return false;
      return true;
  }
}

}  // namespace detail

inline Diagnosis is_extended_regressable(const Formula& f) {
  if (auto d = detail::check_regressable(f, detail::Context::Top); !d) return d;
  auto fv = free_variables(f);
  if (!fv.empty()) return Diagnosis{false, "free variable " + fv.begin()->name + " (queries must be ground)"};
  return {};
}

// Only S0, rigid relations, fluents at S0, equalities and quantifiers remain.
inline bool is_pure_initial(const Formula& f) { return detail::pure_s0(f); }

struct RegressionOptions {
  std::optional<std::size_t> step_budget;
  SimplifyOptions simplify;
};

inline std::size_t default_step_budget(const Formula& f) {
  std::size_t longest = 0;
  std::function<void(const Formula&)> walk = [&](const Formula& g) {
    if (g.sit()) longest = std::max(longest, g.sit()->length());
    longest = std::max(longest, g.seq().size());
    for (const auto& c : g.children()) walk(c);
  };
  walk(f);
  return 10 * (longest + formula_size(f));
}

class Regressor {
 public:
  explicit Regressor(const NDBATheory& d, RegressionOptions o = {}) : d_(&d), opt_(o), simp_(d, o.simplify) {}

  Formula simplify(const Formula& f) const { return simp_(f); }

  // One pass of the extended operator; also reports the outermost rule applied.
  std::pair<Formula, RuleKind> step(const Formula& f) {
    reserve(f);
    budget_ = opt_.step_budget.value_or(default_step_budget(f));
    Tracker t;
    Formula out = R(f, t, 0);
    return {out, t.rule()};
  }

  Formula regress_one(const Formula& f) {
    reset();
    return step(f).first;
  }

  RegressionResult regress_star(const Formula& f) {
    if (auto d = is_extended_regressable(f); !d) throw Error(ErrorCode::NotRegressable, d.reason);
    reset();
    const std::size_t budget = opt_.step_budget.value_or(default_step_budget(f));
    RegressionResult res;
    Formula cur = f;
    for (;;) {
      if (static_cast<std::size_t>(res.steps) >= budget)
        throw Error(ErrorCode::StepBudgetExceeded, "no fixpoint after " + std::to_string(budget) + " passes");
      reserve(cur);
      budget_ = budget;
      Tracker t;
      Formula next = R(cur, t, 0);
      ++res.steps;
      res.trace.push_back(RegressionStep{t.rule(), cur, next});
      Formula simp = simp_(next);
      if (!(simp == next)) res.trace.push_back(RegressionStep{RuleKind::Simplification, next, simp});
      if (next == cur && simp == next) break;
      cur = simp;
    }
    res.fixpoint = cur;
    return res;
  }

 private:
  class Tracker {
   public:
    void hit(RuleKind r, int depth) {
      if (depth < depth_) {
        depth_ = depth;
        rule_ = r;
      } else if (depth == depth_ && r != rule_) {
        rule_ = RuleKind::Connective;
      }
    }
    RuleKind rule() const { return rule_; }

   private:
    int depth_ = 1 << 30;
    RuleKind rule_ = RuleKind::NoChange;
  };

  void reset() {
    used_ = d_->symbol_names();
    used_.insert("S0");
  }

  void reserve(const Formula& f) {
    if (used_.empty()) reset();
    for (const auto& n : variable_names(f)) used_.insert(n);
    for (const auto& n : placeholder_names(f)) used_.insert(n);
  }

  std::string fresh(const std::string& prefix) {
    std::string n = fresh_name(prefix, used_);
    used_.insert(n);
    return n;
  }

  Formula regress_fluent(const Formula& f) {
    const SSADecl* ssa = d_->find_ssa(f.name());
    if (!ssa) throw Error(ErrorCode::UnknownFluent, f.name());
    if (ssa->params.size() != f.terms().size()) throw Error(ErrorCode::NotRegressable, "arity of " + to_string(f));
    Binding b;
    for (std::size_t i = 0; i < ssa->params.size(); ++i) b[ssa->params[i].name] = f.terms()[i];
    b[ssa->action_var.name] = f.sit()->actions.back();
    return restore(substitute(ssa->body, b), f.sit()->parent());
  }

  Formula reaction_membership(const ActionDecl& decl, const Term& r) const {
    if (r.is_constant())
      return Formula::boolean(std::find(decl.reactions.begin(), decl.reactions.end(), r.name) != decl.reactions.end());
    std::set<std::string> mine(decl.reactions.begin(), decl.reactions.end());
    auto all = d_->reactions();
    if (mine == std::set<std::string>(all.begin(), all.end())) return Formula::top();
    std::vector<Formula> alts;
    for (const auto& x : decl.reactions) alts.push_back(Formula::eq(r, Term::constant(x, Sort::reaction())));
    return Formula::disj(std::move(alts));
  }

  Formula expand_poss(const Formula& f) {
    const Term& a = f.action();
    const ActionDecl* decl = d_->find_action(a.name);
    if (!decl) throw Error(ErrorCode::UnknownAction, a.name);
    if (a.args.size() != decl->params.size() + 1)
      throw Error(ErrorCode::NotRegressable, "wrong arity in " + to_string(f));
    Binding b;
    for (std::size_t i = 0; i < decl->params.size(); ++i) b[decl->params[i].name] = a.args[i];
    b[decl->reaction_var.name] = a.args.back();
    Formula pi = Formula::conj(reaction_membership(*decl, a.args.back()), substitute(decl->poss, b));
    return restore(pi, *f.sit());
  }

  Formula expand_poss_ag(const Formula& f) {
    const AgentAction& a = f.agent();
    const ActionDecl* decl = d_->find_action(a.name);
    if (!decl) throw Error(ErrorCode::UnknownAction, a.name);
    if (a.args.size() != decl->params.size())
      throw Error(ErrorCode::NotRegressable, "wrong arity in " + to_string(f));
    Binding b;
    for (std::size_t i = 0; i < decl->params.size(); ++i) b[decl->params[i].name] = a.args[i];
    return restore(substitute(decl->poss_ag, b), *f.sit());
  }

  // R[phi[do(a, p)]]^{-1} for a fresh placeholder p.
  Formula inner_after(const Formula& phi, const Term& a) {
    const std::string p = fresh("s");
    const Situation base = Situation::named(p);
    Formula cur = restore(phi, base.after(a));
    for (std::size_t i = 0;; ++i) {
      if (i >= budget_) throw Error(ErrorCode::StepBudgetExceeded, "inner regression did not reach " + p);
      Tracker ignored;
      Formula next = simp_(R(cur, ignored, 0));
      if (next == cur) break;
      cur = next;
    }
    return suppress_base(cur);
  }

  Formula causes_case(const Formula& f) {
    const Situation& sd = *f.sit();
    const Term& a = sd.actions.back();
    const Situation s = sd.parent();
    const Term& b = f.action();
    const int t = f.ts();
    const Formula& phi = f.effect();
    Formula phi_s = restore(phi, s);
    Tracker ignored;
    Formula phi_do = R(restore(phi, sd), ignored, 0);
    Formula inner = inner_after(phi, a);
    return Formula::disj({
        Formula::conj({Formula::time(TimeOp::Eq, t, s), Formula::eq(b, a), Formula::neg(phi_s), phi_do}),
        Formula::conj({Formula::time(TimeOp::Gt, t, s), phi_s, phi_do, Formula::causes(b, t, phi, s)}),
        Formula::conj({Formula::time(TimeOp::Gt, t, s), Formula::neg(phi_s), phi_do,
                       Formula::causes(b, t, Formula::conj(Formula::poss(a), inner), s)}),
    });
  }

  // Peels the last agent action off CAfter/PAfter.
  Formula after_case(const Formula& f, Tracker& tr, int depth) {
    const bool certainly = f.is(FormulaKind::CAfter);
    if (f.seq().empty()) return R(restore(f.cond(), *f.sit()), tr, depth + 1);
    std::vector<AgentAction> head(f.seq().begin(), f.seq().end() - 1);
    Formula cond = peel(f.seq().back(), f.cond(), certainly);
    return certainly ? Formula::cafter(std::move(head), cond, f.sit()) : Formula::pafter(std::move(head), cond, f.sit());
  }

  Formula peel(const AgentAction& last, const Formula& cond, bool certainly) {
    Variable e{fresh("e"), Sort::reaction()};
    Term act = with_reaction(last, e.term());
    Formula inner = inner_after(cond, act);
    if (certainly) return Formula::forall({e}, Formula::disj(Formula::neg(Formula::poss(act)), inner));
    return Formula::exists({e}, Formula::conj(Formula::poss(act), inner));
  }

  Formula agent_causes_case(const Formula& f) {
    const bool certainly = f.is(FormulaKind::CCauses);
    Variable e{fresh("e"), Sort::reaction()};
    Formula some_cause = Formula::exists({e}, Formula::causes(with_reaction(f.agent(), e.term()), f.ts(), f.effect()));
    Formula star = certainly ? Formula::disj(Formula::neg(f.effect()), some_cause) : Formula::conj(f.effect(), some_cause);
    if (f.seq().empty())
      return certainly ? Formula::cafter({}, star, Situation::s0()) : Formula::pafter({}, star, Situation::s0());
    std::vector<AgentAction> head(f.seq().begin(), f.seq().end() - 1);
    Formula cond = peel(f.seq().back(), star, certainly);
    return certainly ? Formula::cafter(std::move(head), cond, Situation::s0())
                     : Formula::pafter(std::move(head), cond, Situation::s0());
  }

  Formula R(const Formula& f, Tracker& tr, int depth) {
    switch (f.kind()) {
      case FormulaKind::Fluent:
        if (!f.sit() || f.sit()->is_bare()) return f;
        tr.hit(RuleKind::FluentSSA, depth);
        return regress_fluent(f);
      case FormulaKind::Time:
        if (!f.sit() || f.sit()->is_bare()) return f;
        tr.hit(RuleKind::FluentSSA, depth);
        return Formula::time(f.time_op(), f.time_rhs() - 1, f.sit()->parent());
      case FormulaKind::Poss:
        if (!f.sit()) return f;
        tr.hit(RuleKind::PossExpansion, depth);
        return R(expand_poss(f), tr, depth + 1);
      case FormulaKind::PossAg:
        if (!f.sit()) return f;
        tr.hit(RuleKind::PossExpansion, depth);
        return R(expand_poss_ag(f), tr, depth + 1);
      case FormulaKind::Causes:
        if (!f.sit()) return f;
        if (f.sit()->is_bare()) {
          if (!f.sit()->is_s0()) return f;
          tr.hit(RuleKind::CausesReduction, depth);
          return Formula::bottom();
        }
        tr.hit(RuleKind::CausesReduction, depth);
        return causes_case(f);
      case FormulaKind::CAfter:
      case FormulaKind::PAfter:
        if (!f.sit()) return f;
        tr.hit(f.is(FormulaKind::CAfter) ? RuleKind::CAfterReduction : RuleKind::PAfterReduction, depth);
        return after_case(f, tr, depth);
      case FormulaKind::CCauses:
      case FormulaKind::PCauses:
        tr.hit(f.is(FormulaKind::CCauses) ? RuleKind::CCausesReduction : RuleKind::PCausesReduction, depth);
        return agent_causes_case(f);
      case FormulaKind::Not:
      case FormulaKind::And:
      case FormulaKind::Or:
      case FormulaKind::Exists:
      case FormulaKind::Forall: {
        std::vector<Formula> cs;
        cs.reserve(f.children().size());
        for (const auto& c : f.children()) cs.push_back(R(c, tr, depth + 1));
        return f.with_children(std::move(cs));
      }
      default:
        return f;
    }
  }

  const NDBATheory* d_;
  RegressionOptions opt_;
  Simplifier simp_;
  std::set<std::string> used_;
  std::size_t budget_ = 0;
};

inline Formula regress_one(const NDBATheory& d, const Formula& f) { return Regressor(d).regress_one(f); }

inline RegressionResult regress_star(const NDBATheory& d, const Formula& f, RegressionOptions o = {}) {
  return Regressor(d, o).regress_star(f);
}

}  // namespace ndcausal
