#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ndcausal/term.hpp"

namespace ndcausal {

enum class FormulaKind {
  True,
  False,
  Fluent,
  Rigid,
  Poss,
  PossAg,
  After,
  Eq,
  Time,
  Not,
  And,
  Or,
  Exists,
  Forall,
  Causes,
  CAfter,
  PAfter,
  CCauses,
  PCauses,
};

enum class TimeOp { Eq, Gt };

struct Variable {
  std::string name;
  Sort sort;

  Term term() const { return Term::variable(name, sort); }

  bool operator==(const Variable&) const = default;
  std::strong_ordering operator<=>(const Variable&) const = default;
};

struct FormulaNode;

// Immutable, structurally shared formula value. Atoms with an empty `sit`
// are situation-suppressed.
class Formula {
 public:
  Formula();

  static Formula from_node(FormulaNode n);

  static Formula top();
  static Formula bottom();
  static Formula boolean(bool b) { return b ? top() : bottom(); }
  static Formula fluent(std::string name, std::vector<Term> args, std::optional<Situation> sit = std::nullopt);
  static Formula rigid(std::string name, std::vector<Term> args);
  static Formula poss(Term action, std::optional<Situation> sit = std::nullopt);
  static Formula poss_ag(AgentAction action, std::optional<Situation> sit = std::nullopt);
  static Formula after(Term action, Formula body);
  static Formula eq(Term lhs, Term rhs);
  static Formula time(TimeOp op, int rhs, std::optional<Situation> sit = std::nullopt);
  static Formula neg(Formula f);
  static Formula conj(std::vector<Formula> fs);
  static Formula disj(std::vector<Formula> fs);
  static Formula conj(Formula a, Formula b) { return conj(std::vector<Formula>{std::move(a), std::move(b)}); }
  static Formula disj(Formula a, Formula b) { return disj(std::vector<Formula>{std::move(a), std::move(b)}); }
  static Formula implies(Formula a, Formula b) { return disj(neg(std::move(a)), std::move(b)); }
  static Formula exists(std::vector<Variable> vars, Formula body);
  static Formula forall(std::vector<Variable> vars, Formula body);
  static Formula causes(Term action, int ts, Formula effect, std::optional<Situation> sit = std::nullopt);
  static Formula cafter(std::vector<AgentAction> seq, Formula cond, std::optional<Situation> sit = std::nullopt);
  static Formula pafter(std::vector<AgentAction> seq, Formula cond, std::optional<Situation> sit = std::nullopt);
  static Formula ccauses(AgentAction beta, int ts, Formula effect, std::vector<AgentAction> seq);
  static Formula pcauses(AgentAction beta, int ts, Formula effect, std::vector<AgentAction> seq);

  const FormulaNode& node() const { return *ptr_; }
  FormulaKind kind() const;
  const std::string& name() const;
  const std::vector<Term>& terms() const;
  const Term& action() const;
  const Term& lhs() const;
  const Term& rhs() const;
  const AgentAction& agent() const;
  const std::vector<AgentAction>& seq() const;
  const std::optional<Situation>& sit() const;
  const std::vector<Formula>& children() const;
  const Formula& child(std::size_t i) const;
  const Formula& body() const { return child(0); }
  const Formula& effect() const { return child(0); }
  const Formula& cond() const { return child(0); }
  const std::vector<Variable>& vars() const;
  int ts() const;
  int time_rhs() const { return ts(); }
  TimeOp time_op() const;

  bool is(FormulaKind k) const { return kind() == k; }
  bool is_true() const { return is(FormulaKind::True); }
  bool is_false() const { return is(FormulaKind::False); }

  // Copies with one field replaced; returns *this when nothing changes.
  Formula with_sit(std::optional<Situation> s) const;
  Formula with_children(std::vector<Formula> cs) const;

  bool same(const Formula& o) const { return ptr_ == o.ptr_; }
  bool operator==(const Formula& o) const;

 private:
  explicit Formula(std::shared_ptr<const FormulaNode> p) : ptr_(std::move(p)) {}
  std::shared_ptr<const FormulaNode> ptr_;
};

struct FormulaNode {
  FormulaKind kind = FormulaKind::True;
  std::string name;                 // Fluent, Rigid
  std::vector<Term> terms;          // atom args; Eq lhs/rhs; action of Poss/After/Causes
  std::optional<AgentAction> agent; // PossAg, CCauses/PCauses candidate
  std::vector<AgentAction> seq;     // CAfter/PAfter/CCauses/PCauses sequence
  std::optional<Situation> sit;
  std::vector<Formula> children;
  std::vector<Variable> vars;
  int number = 0;                   // timestamp or time bound
  TimeOp op = TimeOp::Eq;

  bool operator==(const FormulaNode&) const = default;
};

inline bool is_extended_kind(FormulaKind k) {
  return k == FormulaKind::Causes || k == FormulaKind::CAfter || k == FormulaKind::PAfter ||
         k == FormulaKind::CCauses || k == FormulaKind::PCauses;
}

// Atoms that carry (or are suppressed with respect to) a situation argument.
inline bool is_situated_kind(FormulaKind k) {
  return k == FormulaKind::Fluent || k == FormulaKind::Poss || k == FormulaKind::PossAg ||
         k == FormulaKind::Time || k == FormulaKind::Causes || k == FormulaKind::CAfter ||
         k == FormulaKind::PAfter;
}

inline bool is_quantifier_kind(FormulaKind k) { return k == FormulaKind::Exists || k == FormulaKind::Forall; }

inline Formula::Formula() : ptr_(std::make_shared<const FormulaNode>()) {}

inline Formula Formula::from_node(FormulaNode n) { return Formula(std::make_shared<const FormulaNode>(std::move(n))); }

inline Formula Formula::top() {
  static const Formula t = from_node(FormulaNode{});
  return t;
}

inline Formula Formula::bottom() {
  static const Formula f = [] {
    FormulaNode n;
    n.kind = FormulaKind::False;
    return from_node(std::move(n));
  }();
  return f;
}

inline Formula Formula::fluent(std::string name, std::vector<Term> args, std::optional<Situation> sit) {
  FormulaNode n;
  n.kind = FormulaKind::Fluent;
  n.name = std::move(name);
  n.terms = std::move(args);
  n.sit = std::move(sit);
  return from_node(std::move(n));
}

inline Formula Formula::rigid(std::string name, std::vector<Term> args) {
  FormulaNode n;
  n.kind = FormulaKind::Rigid;
  n.name = std::move(name);
  n.terms = std::move(args);
  return from_node(std::move(n));
}

inline Formula Formula::poss(Term action, std::optional<Situation> sit) {
  FormulaNode n;
  n.kind = FormulaKind::Poss;
  n.terms = {std::move(action)};
  n.sit = std::move(sit);
  return from_node(std::move(n));
}

inline Formula Formula::poss_ag(AgentAction action, std::optional<Situation> sit) {
  FormulaNode n;
  n.kind = FormulaKind::PossAg;
  n.agent = std::move(action);
  n.sit = std::move(sit);
  return from_node(std::move(n));
}

inline Formula Formula::after(Term action, Formula body) {
  FormulaNode n;
  n.kind = FormulaKind::After;
  n.terms = {std::move(action)};
  n.children = {std::move(body)};
  return from_node(std::move(n));
}

inline Formula Formula::eq(Term lhs, Term rhs) {
  FormulaNode n;
  n.kind = FormulaKind::Eq;
  n.terms = {std::move(lhs), std::move(rhs)};
  return from_node(std::move(n));
}

inline Formula Formula::time(TimeOp op, int rhs, std::optional<Situation> sit) {
  FormulaNode n;
  n.kind = FormulaKind::Time;
  n.op = op;
  n.number = rhs;
  n.sit = std::move(sit);
  return from_node(std::move(n));
}

inline Formula Formula::neg(Formula f) {
  FormulaNode n;
  n.kind = FormulaKind::Not;
  n.children = {std::move(f)};
  return from_node(std::move(n));
}

inline Formula Formula::conj(std::vector<Formula> fs) {
  if (fs.empty()) return top();
  if (fs.size() == 1) return fs.front();
  FormulaNode n;
  n.kind = FormulaKind::And;
  n.children = std::move(fs);
  return from_node(std::move(n));
}

inline Formula Formula::disj(std::vector<Formula> fs) {
  if (fs.empty()) return bottom();
  if (fs.size() == 1) return fs.front();
  FormulaNode n;
  n.kind = FormulaKind::Or;
  n.children = std::move(fs);
  return from_node(std::move(n));
}

inline Formula Formula::exists(std::vector<Variable> vars, Formula body) {
  if (vars.empty()) return body;
  FormulaNode n;
  n.kind = FormulaKind::Exists;
  n.vars = std::move(vars);
  n.children = {std::move(body)};
  return from_node(std::move(n));
}

inline Formula Formula::forall(std::vector<Variable> vars, Formula body) {
  if (vars.empty()) return body;
  FormulaNode n;
  n.kind = FormulaKind::Forall;
  n.vars = std::move(vars);
  n.children = {std::move(body)};
  return from_node(std::move(n));
}

inline Formula Formula::causes(Term action, int ts, Formula effect, std::optional<Situation> sit) {
  FormulaNode n;
  n.kind = FormulaKind::Causes;
  n.terms = {std::move(action)};
  n.number = ts;
  n.children = {std::move(effect)};
  n.sit = std::move(sit);
  return from_node(std::move(n));
}

inline Formula Formula::cafter(std::vector<AgentAction> seq, Formula cond, std::optional<Situation> sit) {
  FormulaNode n;
  n.kind = FormulaKind::CAfter;
  n.seq = std::move(seq);
  n.children = {std::move(cond)};
  n.sit = std::move(sit);
  return from_node(std::move(n));
}

inline Formula Formula::pafter(std::vector<AgentAction> seq, Formula cond, std::optional<Situation> sit) {
  FormulaNode n;
  n.kind = FormulaKind::PAfter;
  n.seq = std::move(seq);
  n.children = {std::move(cond)};
  n.sit = std::move(sit);
  return from_node(std::move(n));
}

inline Formula Formula::ccauses(AgentAction beta, int ts, Formula effect, std::vector<AgentAction> seq) {
  FormulaNode n;
  n.kind = FormulaKind::CCauses;
  n.agent = std::move(beta);
  n.number = ts;
  n.children = {std::move(effect)};
  n.seq = std::move(seq);
  return from_node(std::move(n));
}

inline Formula Formula::pcauses(AgentAction beta, int ts, Formula effect, std::vector<AgentAction> seq) {
  FormulaNode n;
  n.kind = FormulaKind::PCauses;
  n.agent = std::move(beta);
  n.number = ts;
  n.children = {std::move(effect)};
  n.seq = std::move(seq);
  return from_node(std::move(n));
}

inline FormulaKind Formula::kind() const { return ptr_->kind; }
inline const std::string& Formula::name() const { return ptr_->name; }
inline const std::vector<Term>& Formula::terms() const { return ptr_->terms; }
inline const Term& Formula::action() const { return ptr_->terms.at(0); }
inline const Term& Formula::lhs() const { return ptr_->terms.at(0); }
inline const Term& Formula::rhs() const { return ptr_->terms.at(1); }
inline const AgentAction& Formula::agent() const { return ptr_->agent.value(); }
inline const std::vector<AgentAction>& Formula::seq() const { return ptr_->seq; }
inline const std::optional<Situation>& Formula::sit() const { return ptr_->sit; }
inline const std::vector<Formula>& Formula::children() const { return ptr_->children; }
inline const Formula& Formula::child(std::size_t i) const { return ptr_->children.at(i); }
inline const std::vector<Variable>& Formula::vars() const { return ptr_->vars; }
inline int Formula::ts() const { return ptr_->number; }
inline TimeOp Formula::time_op() const { return ptr_->op; }

inline Formula Formula::with_sit(std::optional<Situation> s) const {
  if (ptr_->sit == s) return *this;
  FormulaNode n = *ptr_;
  n.sit = std::move(s);
  return from_node(std::move(n));
}

inline Formula Formula::with_children(std::vector<Formula> cs) const {
  bool changed = cs.size() != ptr_->children.size();
  for (std::size_t i = 0; !changed && i < cs.size(); ++i) changed = !cs[i].same(ptr_->children[i]);
  if (!changed) return *this;
  FormulaNode n = *ptr_;
  n.children = std::move(cs);
  return from_node(std::move(n));
}

inline bool Formula::operator==(const Formula& o) const {
  if (ptr_ == o.ptr_) return true;
  return *ptr_ == *o.ptr_;
}

}  // namespace ndcausal
