#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ndcausal {

enum class ErrorCode {
  SortMismatch,
  MixedSituationBase,
  UnboundVariable,
  UngroundSituation,
  UndeclaredAction,
  UnknownFluent,
  UnknownAction,
  NotRegressable,
  TimestampOutOfRange,
  DepthNonPositive,
  StepBudgetExceeded,
  ScenarioNotExecutable,
  InvalidQuery,
  Internal,
};

inline std::string_view to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::SortMismatch: return "SortMismatch";
    case ErrorCode::MixedSituationBase: return "MixedSituationBase";
    case ErrorCode::UnboundVariable: return "UnboundVariable";
    case ErrorCode::UngroundSituation: return "UngroundSituation";
    case ErrorCode::UndeclaredAction: return "UndeclaredAction";
    case ErrorCode::UnknownFluent: return "UnknownFluent";
    case ErrorCode::UnknownAction: return "UnknownAction";
    case ErrorCode::NotRegressable: return "NotRegressable";
    case ErrorCode::TimestampOutOfRange: return "TimestampOutOfRange";
    case ErrorCode::DepthNonPositive: return "DepthNonPositive";
    case ErrorCode::StepBudgetExceeded: return "StepBudgetExceeded";
    case ErrorCode::ScenarioNotExecutable: return "ScenarioNotExecutable";
    case ErrorCode::InvalidQuery: return "InvalidQuery";
    case ErrorCode::Internal: return "Internal";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Object sorts are user-declared; Reaction, Action and Situation are built in.
struct Sort {
  std::string name;

  static Sort reaction() { return {"Reaction"}; }
  static Sort action() { return {"Action"}; }
  static Sort situation() { return {"Situation"}; }

  bool is_reaction() const { return name == "Reaction"; }
  bool is_action() const { return name == "Action"; }
  bool is_situation() const { return name == "Situation"; }
  bool is_object() const { return !is_reaction() && !is_action() && !is_situation(); }

  bool operator==(const Sort&) const = default;
  std::strong_ordering operator<=>(const Sort&) const = default;
};

struct Term {
  enum class Kind { Constant, Variable, Action };

  Kind kind = Kind::Constant;
  std::string name;
  Sort sort;
  std::vector<Term> args;

  static Term constant(std::string n, Sort s) { return Term{Kind::Constant, std::move(n), std::move(s), {}}; }
  static Term variable(std::string n, Sort s) { return Term{Kind::Variable, std::move(n), std::move(s), {}}; }
  static Term action(std::string n, std::vector<Term> a) {
    return Term{Kind::Action, std::move(n), Sort::action(), std::move(a)};
  }

  bool is_constant() const { return kind == Kind::Constant; }
  bool is_variable() const { return kind == Kind::Variable; }
  bool is_action() const { return kind == Kind::Action; }

  bool is_ground() const {
    if (is_variable()) return false;
    for (const auto& a : args)
      if (!a.is_ground()) return false;
    return true;
  }

  bool operator==(const Term& o) const {
    return kind == o.kind && name == o.name && sort == o.sort && args == o.args;
  }
  std::strong_ordering operator<=>(const Term& o) const {
    if (auto c = kind <=> o.kind; c != 0) return c;
    if (auto c = name <=> o.name; c != 0) return c;
    if (auto c = sort <=> o.sort; c != 0) return c;
    const std::size_t n = std::min(args.size(), o.args.size());
    for (std::size_t i = 0; i < n; ++i)
      if (auto c = args[i] <=> o.args[i]; c != 0) return c;
    return args.size() <=> o.args.size();
  }
};

inline std::string to_string(const Term& t) {
  if (!t.is_action()) return t.name;
  std::string out = t.name + "(";
  for (std::size_t i = 0; i < t.args.size(); ++i) {
    if (i) out += ", ";
    out += to_string(t.args[i]);
  }
  return out + ")";
}

// Reaction-suppressed action A(x).
struct AgentAction {
  std::string name;
  std::vector<Term> args;

  bool is_ground() const {
    for (const auto& a : args)
      if (!a.is_ground()) return false;
    return true;
  }

  bool operator==(const AgentAction& o) const { return name == o.name && args == o.args; }
  std::strong_ordering operator<=>(const AgentAction& o) const {
    if (auto c = name <=> o.name; c != 0) return c;
    const std::size_t n = std::min(args.size(), o.args.size());
    for (std::size_t i = 0; i < n; ++i)
      if (auto c = args[i] <=> o.args[i]; c != 0) return c;
    return args.size() <=> o.args.size();
  }
};

inline std::string to_string(const AgentAction& a) {
  std::string out = a.name + "(";
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (i) out += ", ";
    out += to_string(a.args[i]);
  }
  return out + ")";
}

// System action A(x, r): the reaction is the last argument.
inline Term with_reaction(const AgentAction& a, Term reaction) {
  auto args = a.args;
  args.push_back(std::move(reaction));
  return Term::action(a.name, std::move(args));
}

inline AgentAction agent_of(const Term& system_action) {
  if (!system_action.is_action() || system_action.args.empty())
    throw Error(ErrorCode::SortMismatch, "not a system action: " + to_string(system_action));
  AgentAction a{system_action.name, system_action.args};
  a.args.pop_back();
  return a;
}

inline const Term& reaction_of(const Term& system_action) {
  if (!system_action.is_action() || system_action.args.empty())
    throw Error(ErrorCode::SortMismatch, "not a system action: " + to_string(system_action));
  return system_action.args.back();
}

// S0 or a named placeholder, followed by a chain of system actions (oldest first).
struct Situation {
  std::optional<std::string> placeholder;
  std::vector<Term> actions;

  static Situation s0() { return {}; }
  static Situation named(std::string p) { return Situation{std::move(p), {}}; }
  static Situation from(std::vector<Term> acts) { return Situation{std::nullopt, std::move(acts)}; }

  bool is_s0_based() const { return !placeholder.has_value(); }
  bool is_s0() const { return is_s0_based() && actions.empty(); }
  bool is_bare() const { return actions.empty(); }

  bool is_ground() const {
    if (placeholder) return false;
    for (const auto& a : actions)
      if (!a.is_ground()) return false;
    return true;
  }

  std::size_t length() const { return actions.size(); }

  // Only meaningful for S0-based chains.
  int timestamp() const { return static_cast<int>(actions.size()); }

  Situation after(Term a) const {
    Situation s = *this;
    s.actions.push_back(std::move(a));
    return s;
  }

  Situation prefix(std::size_t n) const {
    Situation s{placeholder, {}};
    s.actions.assign(actions.begin(), actions.begin() + static_cast<std::ptrdiff_t>(std::min(n, actions.size())));
    return s;
  }

  Situation parent() const { return prefix(actions.empty() ? 0 : actions.size() - 1); }
  Situation base() const { return Situation{placeholder, {}}; }

  bool same_base(const Situation& o) const { return placeholder == o.placeholder; }

  bool operator==(const Situation&) const = default;
  std::strong_ordering operator<=>(const Situation& o) const {
    if (auto c = placeholder <=> o.placeholder; c != 0) return c;
    const std::size_t n = std::min(actions.size(), o.actions.size());
    for (std::size_t i = 0; i < n; ++i)
      if (auto c = actions[i] <=> o.actions[i]; c != 0) return c;
    return actions.size() <=> o.actions.size();
  }
};

inline std::string to_string(const Situation& s) {
  const std::string base = s.placeholder ? *s.placeholder : "S0";
  if (s.actions.empty()) return base;
  std::string out = "do([";
  for (std::size_t i = 0; i < s.actions.size(); ++i) {
    if (i) out += ", ";
    out += to_string(s.actions[i]);
  }
  return out + "], " + base + ")";
}

inline std::string to_string(const std::vector<AgentAction>& seq) {
  std::string out = "[";
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (i) out += ", ";
    out += to_string(seq[i]);
  }
  return out + "]";
}

}  // namespace ndcausal
