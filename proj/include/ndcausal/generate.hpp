#pragma once

#include <random>
#include <string>
#include <vector>

#include "ndcausal/oracle.hpp"
#include "ndcausal/query.hpp"
#include "ndcausal/theory.hpp"
#include "ndcausal/validate.hpp"

namespace ndcausal {

struct GeneratorOptions {
  int max_objects = 4;
  int max_fluents = 3;
  int max_actions = 2;
  int max_reactions = 2;
  int requirement_depth = 4;
  bool deterministic = false;  // one reaction per action
  int max_attempts = 200;
};

// Random small NDBATs and ground queries over them. Everything is driven by a
// single mt19937_64 so a seed reproduces the whole corpus.
class Generator {
 public:
  explicit Generator(std::uint64_t seed, GeneratorOptions opts = {}) : rng_(seed), opts_(opts) {}

  std::mt19937_64& rng() { return rng_; }

  NDBATheory theory() {
    for (int attempt = 0; attempt < opts_.max_attempts; ++attempt) {
      NDBATheory d = candidate(attempt);
      if (!validate_theory(d).empty()) continue;
      if (!check_reaction_requirements(d, opts_.requirement_depth).passed()) continue;
      return d;
    }
    throw Error(ErrorCode::Internal, "could not generate a theory satisfying the reaction requirements");
  }

  // A ground dynamic formula over d, at most `depth` connectives deep.
  Formula effect(const NDBATheory& d, int depth = 2) {
    if (depth <= 0 || chance(0.35)) return effect_atom(d, depth);
    switch (pick(4)) {
      case 0: return Formula::neg(effect(d, depth - 1));
      case 1: return Formula::conj(effect(d, depth - 1), effect(d, depth - 1));
      case 2: return Formula::disj(effect(d, depth - 1), effect(d, depth - 1));
      default: return effect_atom(d, depth);
    }
  }

  // Agent actions chosen by a random walk that prefers executable steps.
  std::vector<AgentAction> agent_sequence(const NDBATheory& d, Oracle& o, std::size_t len) {
    const auto all = d.ground_agent_actions();
    std::vector<AgentAction> seq;
    Situation cur = Situation::s0();
    for (std::size_t i = 0; i < len; ++i) {
      std::vector<AgentAction> ok;
      for (const auto& a : all)
        if (o.poss_ag(a, cur)) ok.push_back(a);
      const AgentAction& a = (!ok.empty() && chance(0.85)) ? element(ok) : element(all);
      seq.push_back(a);
      std::vector<Term> next;
      for (const auto& r : d.reactions()) {
        Term sys = with_reaction(a, Term::constant(r, Sort::reaction()));
        if (o.poss(sys, cur)) next.push_back(sys);
      }
      cur = cur.after(next.empty() ? with_reaction(a, Term::constant(element(d.reactions()), Sort::reaction())) : element(next));
    }
    return seq;
  }

  // Ground situation built from system actions, mostly executable.
  Situation system_scenario(const NDBATheory& d, Oracle& o, std::size_t len) {
    const auto all = d.ground_system_actions();
    Situation cur = Situation::s0();
    for (std::size_t i = 0; i < len; ++i) {
      std::vector<Term> ok;
      for (const auto& a : all)
        if (o.poss(a, cur)) ok.push_back(a);
      cur = cur.after((!ok.empty() && chance(0.85)) ? element(ok) : element(all));
    }
    return cur;
  }

  CausalQuery query(const NDBATheory& d, Oracle& o, std::size_t max_len = 4) {
    const std::size_t len = static_cast<std::size_t>(between(0, static_cast<int>(max_len)));
    const bool biased = chance(0.7);
    switch (pick(6)) {
      case 0:
      case 1: {
        const std::size_t n = std::max<std::size_t>(len, 1);
        Situation s = system_scenario(d, o, n);
        Formula phi = effect_where(d, biased, [&](const Formula& f) {
          return !o.eval_at(f, Situation::s0()) && o.eval_at(f, s);
        });
        const int ts = between(0, static_cast<int>(n) - 1);
        Term a = chance(0.75) ? s.actions[static_cast<std::size_t>(ts)] : element(d.ground_system_actions());
        return chance(0.5) ? CausalQuery::causes(a, ts, phi, s) : CausalQuery::causes_directly(a, ts, phi, s);
      }
      case 2:
      case 3: {
        const std::size_t n = std::max<std::size_t>(len, 1);
        auto alpha = agent_sequence(d, o, n);
        Formula phi = effect_where(d, biased, [&](const Formula& f) { return o.nd_setting_valid(alpha, f); });
        const int ts = between(0, static_cast<int>(n) - 1);
        AgentAction b = chance(0.75) ? alpha[static_cast<std::size_t>(ts)] : element(d.ground_agent_actions());
        return chance(0.5) ? CausalQuery::ccauses(b, ts, phi, alpha) : CausalQuery::pcauses(b, ts, phi, alpha);
      }
      default: {
        auto alpha = agent_sequence(d, o, len);
        Formula phi = effect(d);
        return chance(0.5) ? CausalQuery::cafter(alpha, phi) : CausalQuery::pafter(alpha, phi);
      }
    }
  }

  // When `biased`, retries a few effects looking for one that satisfies `want`.
  template <typename Pred>
  Formula effect_where(const NDBATheory& d, bool biased, Pred want) {
    Formula phi = effect(d);
    for (int i = 0; biased && i < 12 && !want(phi); ++i) phi = effect(d);
    return phi;
  }

  int between(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool chance(double p) { return std::bernoulli_distribution(p)(rng_); }
  std::size_t pick(std::size_t n) { return static_cast<std::size_t>(between(0, static_cast<int>(n) - 1)); }
  template <typename T>
  const T& element(const std::vector<T>& v) {
    if (v.empty()) throw Error(ErrorCode::Internal, "empty choice");
    return v[pick(v.size())];
  }

 private:
  static Sort obj() { return Sort{"Obj"}; }

  Term constant(const NDBATheory& d) { return Term::constant(element(d.objects).name, obj()); }

  // Argument list for a fluent, filled from the given variables where sorts allow.
  std::vector<Term> fluent_args(const NDBATheory& d, const FluentDecl& f, const std::vector<Variable>& vars) {
    std::vector<Term> args;
    for (std::size_t i = 0; i < f.params.size(); ++i)
      args.push_back(!vars.empty() && chance(0.7) ? element(vars).term() : constant(d));
    return args;
  }

  Formula literal(const NDBATheory& d, const std::vector<Variable>& vars) {
    if (!d.rigids.empty() && chance(0.2)) {
      const auto& r = d.rigids.front();
      std::vector<Term> args;
      for (std::size_t i = 0; i < r.arity; ++i)
        args.push_back(!vars.empty() && chance(0.7) ? element(vars).term() : constant(d));
      return Formula::rigid(r.name, std::move(args));
    }
    const auto& f = element(d.fluents);
    Formula atom = Formula::fluent(f.name, fluent_args(d, f, vars));
    return chance(0.4) ? Formula::neg(atom) : atom;
  }

  NDBATheory candidate(int attempt) {
    NDBATheory d;
    d.name = "random" + std::to_string(attempt);
    d.sorts = {"Obj"};
    const int n_obj = between(1, opts_.max_objects);
    for (int i = 0; i < n_obj; ++i) d.objects.push_back(ObjectDecl{"O" + std::to_string(i + 1), obj()});
    if (chance(0.4)) {
      RigidDecl r{"Ok", 1, {}};
      for (const auto& o : d.objects)
        if (chance(0.5)) r.tuples.insert({o.name});
      d.rigids.push_back(std::move(r));
    }
    const int n_fl = between(1, opts_.max_fluents);
    for (int i = 0; i < n_fl; ++i) {
      FluentDecl f{"F" + std::to_string(i + 1), {}};
      if (chance(0.5)) f.params.push_back(obj());
      d.fluents.push_back(std::move(f));
    }

    const std::vector<std::string> pool = {"R1", "R2", "R3"};
    const int n_act = between(1, opts_.max_actions);
    for (int i = 0; i < n_act; ++i) {
      ActionDecl a;
      a.name = "A" + std::to_string(i + 1);
      if (chance(0.6)) a.params.push_back(Variable{"x", obj()});
      const int n_r = opts_.deterministic ? 1 : between(1, opts_.max_reactions);
      std::vector<std::string> rs = pool;
      std::shuffle(rs.begin(), rs.end(), rng_);
      rs.resize(static_cast<std::size_t>(n_r));
      std::sort(rs.begin(), rs.end());
      a.reactions = rs;
      d.actions.push_back(std::move(a));
    }
    for (auto& a : d.actions) {
      std::vector<Formula> pre;
      const int n_lit = between(0, 2);
      for (int k = 0; k < n_lit; ++k) pre.push_back(literal(d, a.params));
      a.poss_ag = Formula::conj(std::move(pre));
      a.poss = Formula::conj(Formula::poss_ag(a.agent_pattern()), reaction_constraint(d, a));
    }
    for (const auto& f : d.fluents) d.ssas.push_back(ssa(d, f));
    for (const auto& g : d.ground_fluent_atoms())
      if (chance(0.4)) d.initial.insert(g);
    return d;
  }

  Formula reaction_constraint(const NDBATheory& d, const ActionDecl& a) {
    const Term e = a.reaction_var.term();
    auto is = [&](const std::string& r) { return Formula::eq(e, Term::constant(r, Sort::reaction())); };
    if (a.reactions.size() == 1) return chance(0.5) ? is(a.reactions[0]) : Formula::top();
    switch (pick(3)) {
      case 0: return Formula::top();
      case 1: return Formula::implies(literal(d, a.params), is(a.reactions[0]));
      default: {
        Formula l = literal(d, a.params);
        return Formula::conj(Formula::implies(l, is(a.reactions[0])), Formula::implies(Formula::neg(l), is(a.reactions[1])));
      }
    }
  }

  // a = A(args, r) with args matching the fluent parameters where possible.
  Formula action_pattern(const NDBATheory& d, const ActionDecl& a, const std::vector<Variable>& fparams,
                         const Variable& avar) {
    std::vector<Variable> bound;
    std::vector<Term> args;
    for (std::size_t i = 0; i < a.params.size(); ++i) {
      if (!fparams.empty() && chance(0.6)) {
        args.push_back(fparams.front().term());
      } else if (chance(0.5)) {
        Variable x{"z" + std::to_string(i + 1), obj()};
        bound.push_back(x);
        args.push_back(x.term());
      } else {
        args.push_back(constant(d));
      }
    }
    if (chance(0.5)) {
      Variable r{"r", Sort::reaction()};
      bound.push_back(r);
      args.push_back(r.term());
    } else {
      args.push_back(Term::constant(element(a.reactions), Sort::reaction()));
    }
    Formula eq = Formula::eq(avar.term(), Term::action(a.name, std::move(args)));
    if (chance(0.3)) eq = Formula::conj(eq, literal(d, fparams));
    return Formula::exists(std::move(bound), eq);
  }

  SSADecl ssa(const NDBATheory& d, const FluentDecl& f) {
    SSADecl s;
    s.fluent = f.name;
    for (std::size_t i = 0; i < f.params.size(); ++i) s.params.push_back(Variable{"y", f.params[i]});
    std::vector<Term> own;
    for (const auto& p : s.params) own.push_back(p.term());
    Formula frame = Formula::fluent(f.name, own);
    if (chance(0.15)) {
      s.body = frame;
      return s;
    }
    std::vector<Formula> pos, neg;
    for (const auto& a : d.actions) {
      if (chance(0.6)) pos.push_back(action_pattern(d, a, s.params, s.action_var));
      if (chance(0.4)) neg.push_back(action_pattern(d, a, s.params, s.action_var));
    }
    s.body = Formula::disj(Formula::disj(std::move(pos)),
                           Formula::conj(frame, Formula::neg(Formula::disj(std::move(neg)))));
    return s;
  }

  Formula effect_atom(const NDBATheory& d, int depth) {
    const std::size_t r = pick(10);
    if (r < 6) {
      const auto& f = element(d.fluents);
      return Formula::fluent(f.name, fluent_args(d, f, {}));
    }
    if (r == 6) return Formula::poss(element(d.ground_system_actions()));
    if (r == 7) {
      Formula inner = depth > 0 ? effect(d, depth - 1) : effect_atom(d, 0);
      return Formula::after(element(d.ground_system_actions()), inner);
    }
    // Quantified atom over a unary fluent, when there is one.
    for (const auto& f : d.fluents) {
      if (f.params.size() != 1) continue;
      Variable v{"v", obj()};
      Formula body = Formula::fluent(f.name, {v.term()});
      return chance(0.5) ? Formula::exists({v}, body) : Formula::forall({v}, body);
    }
    const auto& f = element(d.fluents);
    return Formula::fluent(f.name, fluent_args(d, f, {}));
  }

  std::mt19937_64 rng_;
  GeneratorOptions opts_;
};

}  // namespace ndcausal
