#pragma once

#include <string>
#include <vector>

#include "ndcausal/formula.hpp"

namespace ndcausal {

namespace detail {

inline std::string join_terms(const std::vector<Term>& ts) {
  std::string out;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (i) out += ", ";
    out += to_string(ts[i]);
  }
  return out;
}

inline std::string join_vars(const std::vector<Variable>& vs) {
  std::string out;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (i) out += ", ";
    out += vs[i].name + ":" + vs[i].sort.name;
  }
  return out;
}

inline std::string at(const std::optional<Situation>& s) { return s ? "@" + to_string(*s) : std::string(); }

inline std::string time_op_text(TimeOp op) { return op == TimeOp::Eq ? "=" : ">"; }

}  // namespace detail

// Canonical prefix rendering used by traces and golden files.
inline std::string to_string(const Formula& f) {
  using detail::at;
  switch (f.kind()) {
    case FormulaKind::True: return "true";
    case FormulaKind::False: return "false";
    case FormulaKind::Fluent:
      return (f.terms().empty() ? f.name() : f.name() + "(" + detail::join_terms(f.terms()) + ")") + at(f.sit());
    case FormulaKind::Rigid: return f.name() + "(" + detail::join_terms(f.terms()) + ")";
    case FormulaKind::Poss: return "Poss(" + to_string(f.action()) + ")" + at(f.sit());
    case FormulaKind::PossAg: return "PossAg(" + to_string(f.agent()) + ")" + at(f.sit());
    case FormulaKind::After: return "After(" + to_string(f.action()) + ", " + to_string(f.body()) + ")";
    case FormulaKind::Eq: return to_string(f.lhs()) + " = " + to_string(f.rhs());
    case FormulaKind::Time:
      return "time" + at(f.sit()) + " " + detail::time_op_text(f.time_op()) + " " + std::to_string(f.time_rhs());
    case FormulaKind::Not: return "not(" + to_string(f.body()) + ")";
    case FormulaKind::And:
    case FormulaKind::Or: {
      std::string out = f.is(FormulaKind::And) ? "and(" : "or(";
      for (std::size_t i = 0; i < f.children().size(); ++i) {
        if (i) out += ", ";
        out += to_string(f.child(i));
      }
      return out + ")";
    }
    case FormulaKind::Exists:
    case FormulaKind::Forall:
      return std::string(f.is(FormulaKind::Exists) ? "exists" : "forall") + "([" + detail::join_vars(f.vars()) +
             "], " + to_string(f.body()) + ")";
    case FormulaKind::Causes:
      return "Causes(" + to_string(f.action()) + ", " + std::to_string(f.ts()) + ", " + to_string(f.effect()) + ")" +
             at(f.sit());
    case FormulaKind::CAfter:
    case FormulaKind::PAfter:
      return std::string(f.is(FormulaKind::CAfter) ? "CAfter(" : "PAfter(") + to_string(f.seq()) + ", " +
             to_string(f.cond()) + ")" + at(f.sit());
    case FormulaKind::CCauses:
    case FormulaKind::PCauses:
      return std::string(f.is(FormulaKind::CCauses) ? "CCauses(" : "PCauses(") + to_string(f.agent()) + ", " +
             std::to_string(f.ts()) + ", " + to_string(f.effect()) + ", " + to_string(f.seq()) + ")";
  }
  return "?";
}

// Infix rendering in the surface syntax accepted by the DSL parser.
inline std::string to_dsl(const Formula& f) {
  using detail::at;
  switch (f.kind()) {
    case FormulaKind::True: return "true";
    case FormulaKind::False: return "false";
    case FormulaKind::Fluent:
      return (f.terms().empty() ? f.name() : f.name() + "(" + detail::join_terms(f.terms()) + ")") + at(f.sit());
    case FormulaKind::Rigid: return f.name() + "(" + detail::join_terms(f.terms()) + ")";
    case FormulaKind::Poss: return "Poss(" + to_string(f.action()) + ")" + at(f.sit());
    case FormulaKind::PossAg: return "PossAg(" + to_string(f.agent()) + ")" + at(f.sit());
    case FormulaKind::After: return "After(" + to_string(f.action()) + ", " + to_dsl(f.body()) + ")";
    case FormulaKind::Eq: return "(" + to_string(f.lhs()) + " = " + to_string(f.rhs()) + ")";
    case FormulaKind::Time:
      return "(time" + at(f.sit()) + " " + detail::time_op_text(f.time_op()) + " " + std::to_string(f.time_rhs()) +
             ")";
    case FormulaKind::Not: return "~" + to_dsl(f.body());
    case FormulaKind::And:
    case FormulaKind::Or: {
      std::string out = "(";
      for (std::size_t i = 0; i < f.children().size(); ++i) {
        if (i) out += f.is(FormulaKind::And) ? " & " : " | ";
        out += to_dsl(f.child(i));
      }
      return out + ")";
    }
    case FormulaKind::Exists:
    case FormulaKind::Forall:
      return std::string(f.is(FormulaKind::Exists) ? "(exists " : "(forall ") + detail::join_vars(f.vars()) + ". " +
             to_dsl(f.body()) + ")";
    case FormulaKind::Causes:
      return "Causes(" + to_string(f.action()) + ", " + std::to_string(f.ts()) + ", " + to_dsl(f.effect()) + ")" +
             at(f.sit());
    case FormulaKind::CAfter:
    case FormulaKind::PAfter:
      return std::string(f.is(FormulaKind::CAfter) ? "CAfter(" : "PAfter(") + to_string(f.seq()) + ", " +
             to_dsl(f.cond()) + ")" + at(f.sit());
    case FormulaKind::CCauses:
    case FormulaKind::PCauses:
      return std::string(f.is(FormulaKind::CCauses) ? "CCauses(" : "PCauses(") + to_string(f.agent()) + ", " +
             std::to_string(f.ts()) + ", " + to_dsl(f.effect()) + ", " + to_string(f.seq()) + ")";
  }
  return "?";
}

}  // namespace ndcausal
