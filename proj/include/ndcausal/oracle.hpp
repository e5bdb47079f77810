#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ndcausal/formula.hpp"
#include "ndcausal/formula_ops.hpp"
#include "ndcausal/theory.hpp"

namespace ndcausal {

struct FluentState {
  Situation situation;
  std::set<GroundAtom> true_atoms;

  bool holds(const GroundAtom& a) const { return true_atoms.count(a) > 0; }
};

struct ExecutionNode {
  Situation situation;
  std::optional<Term> action;  // the system action leading here; empty at the root
  std::vector<GroundAtom> state;
  std::vector<ExecutionNode> children;
  std::size_t depth = 0;
};

struct ExecutionTree {
  std::vector<AgentAction> sequence;
  ExecutionNode root;

  // Nodes at full depth, i.e. the Do_ag-reachable situations, in tree order.
  std::vector<const ExecutionNode*> leaves() const {
    std::vector<const ExecutionNode*> out;
    collect(root, out);
    return out;
  }

 private:
  void collect(const ExecutionNode& n, std::vector<const ExecutionNode*>& out) const {
    if (n.depth == sequence.size()) {
      out.push_back(&n);
      return;
    }
    for (const auto& c : n.children) collect(c, out);
  }
};

struct CauseVerdict {
  bool holds = false;
  bool vacuous = false;             // no execution satisfies the effect
  bool candidate_in_scenario = true;
  std::size_t executions = 0;
  std::size_t satisfying = 0;
};

// Brute-force model evaluator over the closed initial state and the SSAs.
class Oracle {
 public:
  explicit Oracle(const NDBATheory& d) : d_(&d) {}

  const NDBATheory& theory() const { return *d_; }

  const FluentState& fluent_state(const Situation& s) {
    if (!s.is_ground()) throw Error(ErrorCode::UngroundSituation, to_string(s));
    auto it = states_.find(s);
    if (it != states_.end()) return it->second;
    if (s.actions.empty()) {
      return states_.emplace(s, FluentState{s, d_->initial}).first->second;
    }
    const Situation prev = s.parent();
    fluent_state(prev);
    const Term& a = s.actions.back();
    if (!d_->find_action(a.name)) throw Error(ErrorCode::UndeclaredAction, to_string(a));
    FluentState next{s, {}};
    for (const auto& f : d_->fluents) {
      const SSADecl* ssa = d_->find_ssa(f.name);
      if (!ssa) throw Error(ErrorCode::UnknownFluent, "no successor-state axiom for " + f.name);
      d_->for_each_tuple(f.params, [&](const std::vector<Term>& args) {
        Binding env;
        for (std::size_t i = 0; i < args.size(); ++i) env[ssa->params[i].name] = args[i];
        env[ssa->action_var.name] = a;
        if (eval_rec(ssa->body, env, &prev)) {
          GroundAtom g{f.name, {}};
          for (const auto& t : args) g.args.push_back(t.name);
          next.true_atoms.insert(std::move(g));
        }
      });
    }
    return states_.emplace(s, std::move(next)).first->second;
  }

  bool eval(const Formula& f, const Binding& env = {}, const Situation* ctx = nullptr) {
    Binding e = env;
    return eval_rec(f, e, ctx);
  }

  bool eval_at(const Formula& f, const Situation& s) { return eval(f, {}, &s); }

  bool poss(const Term& a, const Situation& s) {
    const ActionDecl* decl = d_->find_action(a.name);
    if (!decl) throw Error(ErrorCode::UndeclaredAction, to_string(a));
    if (a.args.size() != decl->params.size() + 1)
      throw Error(ErrorCode::SortMismatch, "wrong arity for system action " + to_string(a));
    const Term& r = a.args.back();
    if (std::find(decl->reactions.begin(), decl->reactions.end(), r.name) == decl->reactions.end()) return false;
    Binding env;
    for (std::size_t i = 0; i < decl->params.size(); ++i) env[decl->params[i].name] = a.args[i];
    env[decl->reaction_var.name] = r;
    return eval_rec(decl->poss, env, &s);
  }

  bool poss_ag(const AgentAction& a, const Situation& s) {
    const ActionDecl* decl = d_->find_action(a.name);
    if (!decl) throw Error(ErrorCode::UndeclaredAction, to_string(a));
    if (a.args.size() != decl->params.size())
      throw Error(ErrorCode::SortMismatch, "wrong arity for agent action " + to_string(a));
    Binding env;
    for (std::size_t i = 0; i < decl->params.size(); ++i) env[decl->params[i].name] = a.args[i];
    return eval_rec(decl->poss_ag, env, &s);
  }

  bool executable(const Situation& s) {
    for (std::size_t k = 0; k < s.actions.size(); ++k)
      if (!poss(s.actions[k], s.prefix(k))) return false;
    return true;
  }

  std::vector<Situation> enumerate_executions(const std::vector<AgentAction>& alpha, const Situation& s) {
    std::vector<Situation> out;
    expand(alpha, 0, s, out);
    return out;
  }

  ExecutionTree execution_tree(const std::vector<AgentAction>& alpha, const Situation& s = Situation::s0()) {
    ExecutionTree t;
    t.sequence = alpha;
    t.root = build_node(alpha, 0, s, std::nullopt);
    return t;
  }

  bool pafter(const std::vector<AgentAction>& alpha, const Formula& phi, const Situation& s) {
    for (const auto& leaf : enumerate_executions(alpha, s))
      if (eval_at(phi, leaf)) return true;
    return false;
  }

  bool cafter(const std::vector<AgentAction>& alpha, const Formula& phi, const Situation& s) {
    for (const auto& leaf : enumerate_executions(alpha, s))
      if (!eval_at(phi, leaf)) return false;
    return true;
  }

  bool causes_directly(const Term& a, int ts, const Formula& phi, const Situation& s) {
    if (ts < 0) throw Error(ErrorCode::TimestampOutOfRange, "negative timestamp " + std::to_string(ts));
    if (static_cast<std::size_t>(ts) >= s.length()) return false;
    if (s.actions[static_cast<std::size_t>(ts)] != a) return false;
    if (eval_at(phi, s.prefix(static_cast<std::size_t>(ts)))) return false;
    for (std::size_t k = static_cast<std::size_t>(ts) + 1; k <= s.length(); ++k)
      if (!eval_at(phi, s.prefix(k))) return false;
    return true;
  }

  // Least fixpoint of the two closure rules, by recursion on strict prefixes.
  bool causes(const Term& a, int ts, const Formula& phi, const Situation& s) {
    if (ts < 0) throw Error(ErrorCode::TimestampOutOfRange, "negative timestamp " + std::to_string(ts));
    if (causes_directly(a, ts, phi, s)) return true;
    for (std::size_t k = static_cast<std::size_t>(ts) + 1; k < s.length(); ++k) {
      const Term& ak = s.actions[k];
      if (!causes_directly(ak, static_cast<int>(k), phi, s)) continue;
      Formula next = Formula::conj(Formula::poss(ak), Formula::after(ak, phi));
      return causes(a, ts, next, s.prefix(k));
    }
    return false;
  }

  CauseVerdict pcauses(const AgentAction& beta, int ts, const Formula& phi, const std::vector<AgentAction>& alpha) {
    return agent_causes(beta, ts, phi, alpha, false);
  }

  CauseVerdict ccauses(const AgentAction& beta, int ts, const Formula& phi, const std::vector<AgentAction>& alpha) {
    return agent_causes(beta, ts, phi, alpha, true);
  }

  bool nd_setting_valid(const std::vector<AgentAction>& alpha, const Formula& phi) {
    return !eval_at(phi, Situation::s0()) && pafter(alpha, phi, Situation::s0());
  }

 private:
  const std::vector<Term>& domain(const Sort& s) {
    auto it = domains_.find(s);
    if (it != domains_.end()) return it->second;
    return domains_.emplace(s, d_->domain(s)).first->second;
  }

  Term ground(const Term& t, const Binding& env) {
    Term g = substitute(t, env);
    if (!g.is_ground()) throw Error(ErrorCode::UnboundVariable, "term " + to_string(t) + " is not closed");
    return g;
  }

  AgentAction ground(const AgentAction& a, const Binding& env) {
    AgentAction g = substitute(a, env);
    if (!g.is_ground()) throw Error(ErrorCode::UnboundVariable, "action " + to_string(a) + " is not closed");
    return g;
  }

  Situation resolve(const std::optional<Situation>& sit, const Binding& env, const Situation* ctx) {
    if (!sit) {
      if (!ctx) throw Error(ErrorCode::UngroundSituation, "situation-suppressed atom outside any situation");
      return *ctx;
    }
    if (sit->placeholder) throw Error(ErrorCode::UngroundSituation, "placeholder " + *sit->placeholder);
    Situation g = substitute(*sit, env);
    if (!g.is_ground()) throw Error(ErrorCode::UnboundVariable, "situation " + to_string(*sit) + " is not closed");
    return g;
  }

  Formula close(const Formula& f, const Binding& env) { return env.empty() ? f : substitute(f, env); }

  bool eval_rec(const Formula& f, Binding& env, const Situation* ctx) {
    switch (f.kind()) {
      case FormulaKind::True: return true;
      case FormulaKind::False: return false;
      case FormulaKind::Fluent: {
        Situation s = resolve(f.sit(), env, ctx);
        GroundAtom g{f.name(), {}};
        for (const auto& t : f.terms()) g.args.push_back(ground(t, env).name);
        return fluent_state(s).holds(g);
      }
      case FormulaKind::Rigid: {
        const RigidDecl* r = d_->find_rigid(f.name());
        if (!r) throw Error(ErrorCode::UnknownFluent, "undeclared rigid relation " + f.name());
        std::vector<std::string> tuple;
        for (const auto& t : f.terms()) tuple.push_back(ground(t, env).name);
        return r->tuples.count(tuple) > 0;
      }
      case FormulaKind::Poss: return poss(ground(f.action(), env), resolve(f.sit(), env, ctx));
      case FormulaKind::PossAg: return poss_ag(ground(f.agent(), env), resolve(f.sit(), env, ctx));
      case FormulaKind::After: {
        if (!ctx) throw Error(ErrorCode::UngroundSituation, "After outside any situation");
        Situation next = ctx->after(ground(f.action(), env));
        return eval_rec(f.body(), env, &next);
      }
      case FormulaKind::Eq: return ground(f.lhs(), env) == ground(f.rhs(), env);
      case FormulaKind::Time: {
        const int t = resolve(f.sit(), env, ctx).timestamp();
        return f.time_op() == TimeOp::Eq ? t == f.time_rhs() : t > f.time_rhs();
      }
      case FormulaKind::Not: return !eval_rec(f.body(), env, ctx);
      case FormulaKind::And:
        for (const auto& c : f.children())
          if (!eval_rec(c, env, ctx)) return false;
        return true;
      case FormulaKind::Or:
        for (const auto& c : f.children())
          if (eval_rec(c, env, ctx)) return true;
        return false;
      case FormulaKind::Exists:
      case FormulaKind::Forall: return eval_quantifier(f, 0, env, ctx);
      case FormulaKind::Causes:
        return causes(ground(f.action(), env), f.ts(), close(f.effect(), env), resolve(f.sit(), env, ctx));
      case FormulaKind::CAfter:
      case FormulaKind::PAfter: {
        std::vector<AgentAction> seq;
        for (const auto& a : f.seq()) seq.push_back(ground(a, env));
        Situation s = resolve(f.sit(), env, ctx);
        Formula cond = close(f.cond(), env);
        return f.is(FormulaKind::CAfter) ? cafter(seq, cond, s) : pafter(seq, cond, s);
      }
      case FormulaKind::CCauses:
      case FormulaKind::PCauses: {
        std::vector<AgentAction> seq;
        for (const auto& a : f.seq()) seq.push_back(ground(a, env));
        AgentAction beta = ground(f.agent(), env);
        Formula eff = close(f.effect(), env);
        return (f.is(FormulaKind::CCauses) ? ccauses(beta, f.ts(), eff, seq) : pcauses(beta, f.ts(), eff, seq)).holds;
      }
    }
    throw Error(ErrorCode::Internal, "unhandled formula kind");
  }

  bool eval_quantifier(const Formula& f, std::size_t i, Binding& env, const Situation* ctx) {
    if (i == f.vars().size()) return eval_rec(f.body(), env, ctx);
    const Variable& v = f.vars()[i];
    const bool is_exists = f.is(FormulaKind::Exists);
    std::optional<Term> saved;
    if (auto it = env.find(v.name); it != env.end()) saved = it->second;
    bool result = !is_exists;
    for (const auto& c : domain(v.sort)) {
      env[v.name] = c;
      const bool r = eval_quantifier(f, i + 1, env, ctx);
      if (r == is_exists) {
        result = is_exists;
        break;
      }
    }
    if (saved)
      env[v.name] = *saved;
    else
      env.erase(v.name);
    return result;
  }

  void expand(const std::vector<AgentAction>& alpha, std::size_t i, const Situation& s, std::vector<Situation>& out) {
    if (i == alpha.size()) {
      out.push_back(s);
      return;
    }
    const ActionDecl* decl = d_->find_action(alpha[i].name);
    if (!decl) throw Error(ErrorCode::UndeclaredAction, to_string(alpha[i]));
    for (const auto& r : decl->reactions) {
      Term a = with_reaction(alpha[i], Term::constant(r, Sort::reaction()));
      if (poss(a, s)) expand(alpha, i + 1, s.after(a), out);
    }
  }

  ExecutionNode build_node(const std::vector<AgentAction>& alpha, std::size_t i, const Situation& s,
                           std::optional<Term> via) {
    ExecutionNode n;
    n.situation = s;
    n.action = std::move(via);
    n.depth = i;
    const auto& st = fluent_state(s).true_atoms;
    n.state.assign(st.begin(), st.end());
    if (i == alpha.size()) return n;
    const ActionDecl* decl = d_->find_action(alpha[i].name);
    if (!decl) throw Error(ErrorCode::UndeclaredAction, to_string(alpha[i]));
    for (const auto& r : decl->reactions) {
      Term a = with_reaction(alpha[i], Term::constant(r, Sort::reaction()));
      if (poss(a, s)) n.children.push_back(build_node(alpha, i + 1, s.after(a), a));
    }
    return n;
  }

  CauseVerdict agent_causes(const AgentAction& beta, int ts, const Formula& phi, const std::vector<AgentAction>& alpha,
                            bool certainly) {
    CauseVerdict v;
    v.candidate_in_scenario = std::find(alpha.begin(), alpha.end(), beta) != alpha.end();
    const auto leaves = enumerate_executions(alpha, Situation::s0());
    v.executions = leaves.size();
    bool any = false;
    bool all = true;
    for (const auto& s : leaves) {
      if (!eval_at(phi, s)) continue;
      ++v.satisfying;
      bool found = false;
      for (const auto& r : domain(Sort::reaction())) {
        if (causes(with_reaction(beta, r), ts, phi, s)) {
          found = true;
          break;
        }
      }
      any = any || found;
      all = all && found;
    }
    v.vacuous = v.satisfying == 0;
    v.holds = certainly ? all : any;
    return v;
  }

  const NDBATheory* d_;
  std::map<Situation, FluentState> states_;
  std::map<Sort, std::vector<Term>> domains_;
};

}  // namespace ndcausal
