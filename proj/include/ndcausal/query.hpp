#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ndcausal/formula.hpp"
#include "ndcausal/formula_ops.hpp"
#include "ndcausal/oracle.hpp"
#include "ndcausal/regression.hpp"
#include "ndcausal/theory.hpp"

namespace ndcausal {

enum class QueryKind { CausesDirectly, Causes, PCauses, CCauses, CAfter, PAfter };

inline std::string_view to_string(QueryKind k) {
  switch (k) {
    case QueryKind::CausesDirectly: return "causes_directly";
    case QueryKind::Causes: return "causes";
    case QueryKind::PCauses: return "pcauses";
    case QueryKind::CCauses: return "ccauses";
    case QueryKind::CAfter: return "cafter";
    case QueryKind::PAfter: return "pafter";
  }
  return "unknown";
}

struct CausalQuery {
  QueryKind kind = QueryKind::Causes;
  std::optional<Term> action;         // causes, causes_directly
  std::optional<AgentAction> agent;   // pcauses, ccauses
  int ts = 0;
  Formula effect;                     // effect, or the condition of cafter/pafter
  Situation situation;                // scenario of causes*, start of cafter/pafter
  std::vector<AgentAction> sequence;  // pcauses, ccauses, cafter, pafter

  bool operator==(const CausalQuery&) const = default;

  static CausalQuery causes(Term a, int ts, Formula phi, Situation s) {
    return CausalQuery{QueryKind::Causes, std::move(a), std::nullopt, ts, std::move(phi), std::move(s), {}};
  }
  static CausalQuery causes_directly(Term a, int ts, Formula phi, Situation s) {
    return CausalQuery{QueryKind::CausesDirectly, std::move(a), std::nullopt, ts, std::move(phi), std::move(s), {}};
  }
  static CausalQuery ccauses(AgentAction b, int ts, Formula phi, std::vector<AgentAction> alpha) {
    return CausalQuery{QueryKind::CCauses, std::nullopt, std::move(b), ts, std::move(phi), Situation::s0(),
                       std::move(alpha)};
  }
  static CausalQuery pcauses(AgentAction b, int ts, Formula phi, std::vector<AgentAction> alpha) {
    return CausalQuery{QueryKind::PCauses, std::nullopt, std::move(b), ts, std::move(phi), Situation::s0(),
                       std::move(alpha)};
  }
  static CausalQuery cafter(std::vector<AgentAction> alpha, Formula phi, Situation s = Situation::s0()) {
    return CausalQuery{QueryKind::CAfter, std::nullopt, std::nullopt, 0, std::move(phi), std::move(s), std::move(alpha)};
  }
  static CausalQuery pafter(std::vector<AgentAction> alpha, Formula phi, Situation s = Situation::s0()) {
    return CausalQuery{QueryKind::PAfter, std::nullopt, std::nullopt, 0, std::move(phi), std::move(s), std::move(alpha)};
  }
};

// The query as a ground extended formula. CausesDirectly is unfolded over
// the prefixes of its scenario.
inline Formula to_formula(const CausalQuery& q) {
  switch (q.kind) {
    case QueryKind::Causes: return Formula::causes(*q.action, q.ts, q.effect, q.situation);
    case QueryKind::CausesDirectly: {
      const auto n = q.situation.length();
      if (q.ts < 0 || static_cast<std::size_t>(q.ts) >= n) return Formula::bottom();
      const auto t = static_cast<std::size_t>(q.ts);
      if (q.situation.actions[t] != *q.action) return Formula::bottom();
      std::vector<Formula> parts{Formula::neg(restore(q.effect, q.situation.prefix(t)))};
      for (std::size_t k = t + 1; k <= n; ++k) parts.push_back(restore(q.effect, q.situation.prefix(k)));
      return Formula::conj(std::move(parts));
    }
    case QueryKind::PCauses: return Formula::pcauses(*q.agent, q.ts, q.effect, q.sequence);
    case QueryKind::CCauses: return Formula::ccauses(*q.agent, q.ts, q.effect, q.sequence);
    case QueryKind::CAfter: return Formula::cafter(q.sequence, q.effect, q.situation);
    case QueryKind::PAfter: return Formula::pafter(q.sequence, q.effect, q.situation);
  }
  throw Error(ErrorCode::Internal, "unknown query kind");
}

struct OracleAnswer {
  bool value = false;
  std::optional<CauseVerdict> verdict;  // pcauses/ccauses only
  std::vector<std::string> warnings;
};

inline OracleAnswer answer_with_oracle(Oracle& o, const CausalQuery& q) {
  OracleAnswer out;
  switch (q.kind) {
    case QueryKind::Causes:
    case QueryKind::CausesDirectly:
      if (!o.executable(q.situation)) out.warnings.push_back("scenario " + to_string(q.situation) + " is not executable");
      out.value = q.kind == QueryKind::Causes ? o.causes(*q.action, q.ts, q.effect, q.situation)
                                              : o.causes_directly(*q.action, q.ts, q.effect, q.situation);
      break;
    case QueryKind::PCauses:
    case QueryKind::CCauses: {
      CauseVerdict v = q.kind == QueryKind::PCauses ? o.pcauses(*q.agent, q.ts, q.effect, q.sequence)
                                                    : o.ccauses(*q.agent, q.ts, q.effect, q.sequence);
      out.value = v.holds;
      if (!v.candidate_in_scenario)
        out.warnings.push_back(to_string(*q.agent) + " does not occur in the scenario " + to_string(q.sequence));
      if (v.vacuous) out.warnings.push_back("no execution of the scenario satisfies the effect");
      out.verdict = v;
      break;
    }
    case QueryKind::CAfter: out.value = o.cafter(q.sequence, q.effect, q.situation); break;
    case QueryKind::PAfter: out.value = o.pafter(q.sequence, q.effect, q.situation); break;
  }
  return out;
}

struct TheoremVerdict {
  bool oracle = false;
  bool regressed = false;
  bool agree = false;
  RegressionResult regression;
};

// Evaluates the query semantically and through regression to S0, and compares.
inline TheoremVerdict check_regression_theorem(const NDBATheory& d, const CausalQuery& q, RegressionOptions opts = {}) {
  Formula f = to_formula(q);
  if (auto diag = is_extended_regressable(f); !diag) throw Error(ErrorCode::NotRegressable, diag.reason);
  TheoremVerdict v;
  Oracle o(d);
  v.oracle = answer_with_oracle(o, q).value;
  v.regression = Regressor(d, opts).regress_star(f);
  v.regressed = o.eval(v.regression.fixpoint);
  v.agree = v.oracle == v.regressed;
  return v;
}

}  // namespace ndcausal
