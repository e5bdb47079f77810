#pragma once

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "ndcausal/formula.hpp"
#include "ndcausal/printer.hpp"
#include "ndcausal/query.hpp"
#include "ndcausal/regression.hpp"
#include "ndcausal/theory.hpp"

namespace ndcausal {

struct SourceSpan {
  std::string file;
  int line = 1;
  int column = 1;
  int length = 1;

  bool operator==(const SourceSpan&) const = default;
};

enum class Severity { Error, Warning };

enum class DiagCode {
  SyntaxError,
  UnexpectedEnd,
  MissingSection,
  UndeclaredFluent,
  UndeclaredSymbol,
  UndeclaredAction,
  UndeclaredSort,
  ArityMismatch,
  SortMismatch,
  DuplicateDeclaration,
  InvalidSituation,
  EffectNotDynamic,
  InvalidQuery,
};

inline std::string_view to_string(DiagCode c) {
  switch (c) {
    case DiagCode::SyntaxError: return "SyntaxError";
    case DiagCode::UnexpectedEnd: return "UnexpectedEnd";
    case DiagCode::MissingSection: return "MissingSection";
    case DiagCode::UndeclaredFluent: return "UndeclaredFluent";
    case DiagCode::UndeclaredSymbol: return "UndeclaredSymbol";
    case DiagCode::UndeclaredAction: return "UndeclaredAction";
    case DiagCode::UndeclaredSort: return "UndeclaredSort";
    case DiagCode::ArityMismatch: return "ArityMismatch";
    case DiagCode::SortMismatch: return "SortMismatch";
    case DiagCode::DuplicateDeclaration: return "DuplicateDeclaration";
    case DiagCode::InvalidSituation: return "InvalidSituation";
    case DiagCode::EffectNotDynamic: return "EffectNotDynamic";
    case DiagCode::InvalidQuery: return "InvalidQuery";
  }
  return "Unknown";
}

struct ParseDiagnostic {
  Severity severity = Severity::Error;
  DiagCode code = DiagCode::SyntaxError;
  std::string message;
  SourceSpan span;
  std::vector<std::string> expected;
};

inline std::string format(const ParseDiagnostic& d) {
  std::string out = (d.span.file.empty() ? std::string("<input>") : d.span.file) + ":" + std::to_string(d.span.line) +
                    ":" + std::to_string(d.span.column) + ": " +
                    (d.severity == Severity::Error ? "error" : "warning") + " [" + std::string(to_string(d.code)) +
                    "] " + d.message;
  if (!d.expected.empty()) {
    out += " (expected ";
    for (std::size_t i = 0; i < d.expected.size(); ++i) out += (i ? ", " : "") + d.expected[i];
    out += ")";
  }
  return out;
}

template <typename T>
struct ParseResult {
  std::optional<T> value;
  std::vector<ParseDiagnostic> diagnostics;

  bool ok() const {
    if (!value) return false;
    return std::none_of(diagnostics.begin(), diagnostics.end(),
                        [](const ParseDiagnostic& d) { return d.severity == Severity::Error; });
  }
};

namespace dsl_detail {

enum class Tok { Ident, Int, Sym, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  SourceSpan span;
};

inline const std::set<std::string>& keywords() {
  static const std::set<std::string> k = {
      "domain", "sorts",   "objects", "rigid",    "fluent",          "action",  "reactions", "poss_ag",
      "poss",   "ssa",     "init",    "exists",   "forall",          "true",    "false",     "time",
      "do",     "S0",      "After",   "Poss",     "PossAg",          "Causes",  "CAfter",    "PAfter",
      "CCauses", "PCauses", "causes", "causes_directly", "ccauses",  "pcauses", "cafter",    "pafter",
      "effect", "scenario", "in"};
  return k;
}

inline bool is_item_keyword(const std::string& s) {
  return s == "sorts" || s == "objects" || s == "rigid" || s == "fluent" || s == "action" || s == "ssa" || s == "init";
}

inline bool is_query_keyword(const std::string& s) {
  return s == "causes" || s == "causes_directly" || s == "ccauses" || s == "pcauses" || s == "cafter" || s == "pafter";
}

class Lexer {
 public:
  Lexer(std::string_view text, std::string file) : text_(text), file_(std::move(file)) {}

  std::vector<Token> run(std::vector<ParseDiagnostic>& diags) {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      if (pos_ >= text_.size()) {
        out.push_back(Token{Tok::End, "", span(1)});
        return out;
      }
      const char c = text_[pos_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::size_t n = 1;
        while (pos_ + n < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_ + n])) || text_[pos_ + n] == '_' ||
                text_[pos_ + n] == '\''))
          ++n;
        out.push_back(take(Tok::Ident, n));
      } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                 (c == '-' && pos_ + 1 < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_ + 1])))) {
        std::size_t n = 1;
        while (pos_ + n < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_ + n]))) ++n;
        if (n > 9) {
          diags.push_back(ParseDiagnostic{Severity::Error, DiagCode::SyntaxError, "integer literal too long", span(n), {}});
          n = std::min<std::size_t>(n, 9);
        }
        out.push_back(take(Tok::Int, n));
      } else if (starts("->") || starts("!=")) {
        out.push_back(take(Tok::Sym, 2));
      } else if (std::string_view("{}()[],:;.=~&|@/>").find(c) != std::string_view::npos) {
        out.push_back(take(Tok::Sym, 1));
      } else {
        diags.push_back(ParseDiagnostic{Severity::Error, DiagCode::SyntaxError,
                                        "unexpected character '" + std::string(1, c) + "'", span(1), {}});
        advance(1);
      }
    }
  }

 private:
  bool starts(std::string_view s) const { return text_.substr(pos_, s.size()) == s; }

  SourceSpan span(std::size_t n) const { return SourceSpan{file_, line_, col_, static_cast<int>(std::max<std::size_t>(n, 1))}; }

  void advance(std::size_t n) {
    for (std::size_t i = 0; i < n && pos_ < text_.size(); ++i, ++pos_) {
      if (text_[pos_] == '\n') {
        ++line_;
        col_ = 1;
      } else {
        ++col_;
      }
    }
  }

  Token take(Tok k, std::size_t n) {
    Token t{k, std::string(text_.substr(pos_, n)), span(n)};
    advance(n);
    return t;
  }

  void skip_space() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance(1);
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance(1);
      } else {
        break;
      }
    }
  }

  std::string_view text_;
  std::string file_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

struct Failure {};

class Parser {
 public:
  Parser(std::string_view text, std::string file, const NDBATheory* theory) : theory_(theory) {
    toks_ = Lexer(text, std::move(file)).run(diags_);
    if (!theory_) theory_ = &own_;
  }

  std::vector<ParseDiagnostic> take_diagnostics() {
    std::stable_sort(diags_.begin(), diags_.end(), [](const ParseDiagnostic& a, const ParseDiagnostic& b) {
      return std::tie(a.span.line, a.span.column) < std::tie(b.span.line, b.span.column);
    });
    return std::move(diags_);
  }

  bool has_errors() const {
    return std::any_of(diags_.begin(), diags_.end(), [](const ParseDiagnostic& d) { return d.severity == Severity::Error; });
  }

  std::optional<NDBATheory> domain() {
    if (peek().kind == Tok::End) {
      error(DiagCode::MissingSection, "missing section 'domain'", peek().span, {"domain"});
      return std::nullopt;
    }
    try {
      expect_keyword("domain");
      own_.name = expect_ident("domain name").text;
      expect_sym("{");
    } catch (Failure&) {
      return std::nullopt;
    }
    while (!is_sym("}") && peek().kind != Tok::End) {
      try {
        item();
      } catch (Failure&) {
        sync_item();
      }
    }
    if (peek().kind == Tok::End) {
      error(DiagCode::UnexpectedEnd, "unexpected end of input in domain body", peek().span, {"}"});
      return std::nullopt;
    }
    next();
    if (peek().kind != Tok::End) error(DiagCode::SyntaxError, "unexpected '" + peek().text + "' after domain", peek().span, {});
    check_domain_sections();
    return own_;
  }

  std::vector<CausalQuery> queries(bool exactly_one) {
    std::vector<CausalQuery> out;
    while (peek().kind != Tok::End) {
      try {
        out.push_back(query());
        if (is_sym(";")) next();
      } catch (Failure&) {
        while (peek().kind != Tok::End && !(peek().kind == Tok::Ident && is_query_keyword(peek().text))) next();
      }
      if (exactly_one) break;
    }
    if (out.empty() && !has_errors())
      error(DiagCode::MissingSection, "expected a query", peek().span,
            {"causes", "causes_directly", "ccauses", "pcauses", "cafter", "pafter"});
    if (exactly_one && peek().kind != Tok::End && !has_errors())
      error(DiagCode::SyntaxError, "unexpected '" + peek().text + "' after query", peek().span, {});
    return out;
  }

  std::optional<Formula> standalone_formula() {
    try {
      Formula f = formula();
      if (peek().kind != Tok::End) error(DiagCode::SyntaxError, "unexpected '" + peek().text + "'", peek().span, {});
      return f;
    } catch (Failure&) {
      return std::nullopt;
    }
  }

  std::optional<std::vector<AgentAction>> standalone_sequence() {
    try {
      std::vector<AgentAction> seq;
      if (is_sym("[")) {
        seq = agent_list();
      } else {
        while (peek().kind != Tok::End) {
          seq.push_back(agent_action());
          if (is_sym(",") || is_sym(";")) next();
        }
      }
      if (peek().kind != Tok::End) error(DiagCode::SyntaxError, "unexpected '" + peek().text + "'", peek().span, {});
      return seq;
    } catch (Failure&) {
      return std::nullopt;
    }
  }

 private:
  // ---- token helpers
  const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  Token next() {
    Token t = peek();
    if (pos_ < toks_.size() - 1) ++pos_;
    return t;
  }
  bool is_sym(const char* s, std::size_t k = 0) const { return peek(k).kind == Tok::Sym && peek(k).text == s; }
  bool is_kw(const char* s, std::size_t k = 0) const { return peek(k).kind == Tok::Ident && peek(k).text == s; }

  void error(DiagCode c, std::string msg, const SourceSpan& sp, std::vector<std::string> expected) {
    diags_.push_back(ParseDiagnostic{Severity::Error, c, std::move(msg), sp, std::move(expected)});
  }
  void warn(DiagCode c, std::string msg, const SourceSpan& sp) {
    diags_.push_back(ParseDiagnostic{Severity::Warning, c, std::move(msg), sp, {}});
  }

  [[noreturn]] void fail(DiagCode c, std::string msg, const SourceSpan& sp, std::vector<std::string> expected = {}) {
    error(c, std::move(msg), sp, std::move(expected));
    throw Failure{};
  }

  [[noreturn]] void unexpected(std::vector<std::string> expected) {
    const Token& t = peek();
    if (t.kind == Tok::End) fail(DiagCode::UnexpectedEnd, "unexpected end of input", t.span, std::move(expected));
    fail(DiagCode::SyntaxError, "unexpected '" + t.text + "'", t.span, std::move(expected));
  }

  void expect_sym(const char* s) {
    if (!is_sym(s)) unexpected({std::string("'") + s + "'"});
    next();
  }
  void expect_keyword(const char* s) {
    if (!is_kw(s)) unexpected({s});
    next();
  }
  Token expect_ident(const std::string& what) {
    if (peek().kind != Tok::Ident || keywords().count(peek().text)) unexpected({what});
    return next();
  }
  int expect_int() {
    if (peek().kind != Tok::Int) unexpected({"integer"});
    return std::stoi(next().text);
  }

  void sync_item() {
    while (peek().kind != Tok::End) {
      if (peek().kind == Tok::Ident && is_item_keyword(peek().text)) return;
      if (is_sym("}") && peek(1).kind == Tok::End) return;
      next();
    }
  }

  // ---- domain
  void check_domain_sections() {
    if (own_.sorts.empty() && !own_.objects.empty())
      error(DiagCode::MissingSection, "missing section 'sorts'", peek().span, {"sorts"});
  }

  bool predicate_taken(const std::string& n) const { return own_.find_fluent(n) || own_.find_rigid(n); }
  bool constant_taken(const std::string& n) const { return own_.find_object(n) || own_.is_reaction(n); }

  std::optional<Sort> sort_named(const Token& t, bool builtin_ok) {
    if (t.text == "Reaction" || t.text == "Action" || t.text == "Situation") {
      if (builtin_ok) return Sort{t.text};
      error(DiagCode::SortMismatch, "built-in sort " + t.text + " is not allowed here", t.span, {});
      return std::nullopt;
    }
    const auto& sorts = theory_->sorts;
    if (std::find(sorts.begin(), sorts.end(), t.text) == sorts.end()) {
      error(DiagCode::UndeclaredSort, "undeclared sort " + t.text, t.span, {});
      return std::nullopt;
    }
    return Sort{t.text};
  }

  void item() {
    const Token kw = peek();
    if (kw.kind != Tok::Ident) unexpected({"sorts", "objects", "rigid", "fluent", "action", "ssa", "init", "}"});
    if (kw.text == "sorts") return sorts_item();
    if (kw.text == "objects") return objects_item();
    if (kw.text == "rigid") return rigid_item();
    if (kw.text == "fluent") return fluent_item();
    if (kw.text == "action") return action_item();
    if (kw.text == "ssa") return ssa_item();
    if (kw.text == "init") return init_item();
    unexpected({"sorts", "objects", "rigid", "fluent", "action", "ssa", "init", "}"});
  }

  void sorts_item() {
    next();
    expect_sym("{");
    while (!is_sym("}")) {
      Token t = expect_ident("sort name");
      if (std::find(own_.sorts.begin(), own_.sorts.end(), t.text) != own_.sorts.end() || t.text == "Reaction" ||
          t.text == "Action" || t.text == "Situation")
        error(DiagCode::DuplicateDeclaration, "sort " + t.text + " declared twice", t.span, {});
      else
        own_.sorts.push_back(t.text);
      if (is_sym(",")) next();
    }
    next();
  }

  void objects_item() {
    next();
    expect_sym("{");
    while (!is_sym("}")) {
      std::vector<Token> names{expect_ident("object name")};
      while (is_sym(",")) {
        next();
        names.push_back(expect_ident("object name"));
      }
      expect_sym(":");
      Token st = expect_ident("sort");
      auto sort = sort_named(st, false);
      for (const auto& n : names) {
        if (constant_taken(n.text)) {
          error(DiagCode::DuplicateDeclaration, "constant " + n.text + " declared twice", n.span, {});
          continue;
        }
        if (sort) own_.objects.push_back(ObjectDecl{n.text, *sort});
      }
      if (is_sym(";") || is_sym(",")) next();
    }
    next();
  }

  void rigid_item() {
    next();
    Token name = expect_ident("relation name");
    expect_sym("/");
    const int arity = expect_int();
    if (arity < 0) fail(DiagCode::SyntaxError, "negative arity", name.span);
    RigidDecl r{name.text, static_cast<std::size_t>(arity), {}};
    expect_sym("{");
    while (!is_sym("}")) {
      const SourceSpan at = peek().span;
      expect_sym("(");
      std::vector<std::string> tuple;
      while (!is_sym(")")) {
        Token c = expect_ident("object constant");
        if (!own_.find_object(c.text)) error(DiagCode::UndeclaredSymbol, "undeclared object " + c.text, c.span, {});
        tuple.push_back(c.text);
        if (is_sym(",")) next();
      }
      next();
      if (tuple.size() != r.arity)
        error(DiagCode::ArityMismatch, name.text + " expects " + std::to_string(arity) + " arguments", at, {});
      else
        r.tuples.insert(tuple);
      if (is_sym(",")) next();
    }
    next();
    if (predicate_taken(name.text))
      error(DiagCode::DuplicateDeclaration, "relation " + name.text + " declared twice", name.span, {});
    else
      own_.rigids.push_back(std::move(r));
  }

  void fluent_item() {
    next();
    Token name = expect_ident("fluent name");
    FluentDecl f{name.text, {}};
    if (is_sym("(")) {
      next();
      while (!is_sym(")")) {
        Token st = expect_ident("sort");
        if (auto s = sort_named(st, false)) f.params.push_back(*s);
        if (is_sym(",")) next();
      }
      next();
    }
    if (predicate_taken(name.text))
      error(DiagCode::DuplicateDeclaration, "fluent " + name.text + " declared twice", name.span, {});
    else
      own_.fluents.push_back(std::move(f));
  }

  void action_item() {
    next();
    Token name = expect_ident("action name");
    if (own_.find_action(name.text)) fail(DiagCode::DuplicateDeclaration, "action " + name.text + " declared twice", name.span);
    ActionDecl a;
    a.name = name.text;
    expect_sym("(");
    while (!is_sym(")")) {
      Token p = expect_ident("parameter");
      expect_sym(":");
      Token st = expect_ident("sort");
      auto s = sort_named(st, false);
      if (p.text == a.reaction_var.name)
        error(DiagCode::DuplicateDeclaration, "parameter " + p.text + " clashes with the reaction variable", p.span, {});
      if (s) a.params.push_back(Variable{p.text, *s});
      if (is_sym(",")) next();
    }
    next();
    expect_sym("{");
    expect_keyword("reactions");
    expect_sym("{");
    while (!is_sym("}")) {
      Token r = expect_ident("reaction constant");
      if (own_.find_object(r.text))
        error(DiagCode::DuplicateDeclaration, r.text + " is already an object constant", r.span, {});
      else if (std::find(a.reactions.begin(), a.reactions.end(), r.text) != a.reactions.end())
        error(DiagCode::DuplicateDeclaration, "reaction " + r.text + " listed twice", r.span, {});
      else
        a.reactions.push_back(r.text);
      if (is_sym(",")) next();
    }
    next();
    // Registered before the bodies so the reaction constants resolve.
    own_.actions.push_back(a);
    ActionDecl& stored = own_.actions.back();

    std::map<std::string, Sort> scope;
    for (const auto& p : a.params) scope[p.name] = p.sort;
    scope[a.reaction_var.name] = Sort::reaction();
    bool saw_ag = false, saw_poss = false;
    while (!is_sym("}")) {
      if (is_kw("poss_ag") && is_sym(":", 1)) {
        next();
        next();
        scopes_.push_back(scope);
        stored.poss_ag = formula();
        scopes_.pop_back();
        saw_ag = true;
      } else if (is_kw("poss")) {
        next();
        expect_sym(":");
        scopes_.push_back(scope);
        self_ = &stored;
        stored.poss = formula();
        self_ = nullptr;
        scopes_.pop_back();
        saw_poss = true;
      } else {
        unexpected({"poss_ag", "poss", "}"});
      }
    }
    next();
    if (!saw_ag) error(DiagCode::MissingSection, "action " + a.name + " has no poss_ag section", name.span, {"poss_ag"});
    if (!saw_poss) error(DiagCode::MissingSection, "action " + a.name + " has no poss section", name.span, {"poss"});
  }

  void ssa_item() {
    next();
    Token name = expect_ident("fluent name");
    const FluentDecl* fl = own_.find_fluent(name.text);
    if (!fl) fail(DiagCode::UndeclaredFluent, "successor-state axiom for undeclared fluent " + name.text, name.span);
    SSADecl s;
    s.fluent = name.text;
    std::vector<Token> params;
    if (is_sym("(")) {
      next();
      while (!is_sym(")")) {
        if (is_kw("do")) {
          next();
          expect_sym("(");
          s.action_var.name = expect_ident("action variable").text;
          expect_sym(",");
          expect_ident("situation variable");
          expect_sym(")");
        } else {
          params.push_back(expect_ident("parameter"));
        }
        if (is_sym(",")) next();
      }
      next();
    }
    if (params.size() != fl->params.size())
      fail(DiagCode::ArityMismatch,
           "fluent " + name.text + " has " + std::to_string(fl->params.size()) + " parameters", name.span);
    std::map<std::string, Sort> scope;
    for (std::size_t i = 0; i < params.size(); ++i) {
      s.params.push_back(Variable{params[i].text, fl->params[i]});
      scope[params[i].text] = fl->params[i];
    }
    scope[s.action_var.name] = Sort::action();
    if (is_sym(":") || is_sym("="))
      next();
    else
      unexpected({"':'", "'='"});
    scopes_.push_back(scope);
    s.body = formula();
    scopes_.pop_back();
    if (own_.find_ssa(s.fluent))
      error(DiagCode::DuplicateDeclaration, "second successor-state axiom for " + s.fluent, name.span, {});
    else
      own_.ssas.push_back(std::move(s));
  }

  void init_item() {
    next();
    expect_sym("{");
    while (!is_sym("}")) {
      Token name = expect_ident("fluent atom");
      const FluentDecl* fl = own_.find_fluent(name.text);
      GroundAtom g{name.text, {}};
      std::vector<Token> args;
      if (is_sym("(")) {
        next();
        while (!is_sym(")")) {
          args.push_back(expect_ident("object constant"));
          if (is_sym(",")) next();
        }
        next();
      }
      if (is_sym(",")) next();
      if (!fl) {
        error(DiagCode::UndeclaredFluent, "undeclared fluent " + name.text, name.span, {});
        continue;
      }
      if (args.size() != fl->params.size()) {
        error(DiagCode::ArityMismatch, "fluent " + name.text + " has " + std::to_string(fl->params.size()) + " parameters",
              name.span, {});
        continue;
      }
      bool ok = true;
      for (std::size_t i = 0; i < args.size(); ++i) {
        const ObjectDecl* o = own_.find_object(args[i].text);
        if (!o) {
          error(DiagCode::UndeclaredSymbol, "undeclared object " + args[i].text, args[i].span, {});
          ok = false;
        } else if (o->sort != fl->params[i]) {
          error(DiagCode::SortMismatch, args[i].text + " is not a " + fl->params[i].name, args[i].span, {});
          ok = false;
        }
        g.args.push_back(args[i].text);
      }
      if (ok) own_.initial.insert(std::move(g));
    }
    next();
  }

  // ---- terms
  std::optional<Sort> lookup_var(const std::string& n) const {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it)
      if (auto f = it->find(n); f != it->end()) return f->second;
    return std::nullopt;
  }

  void check_sort(const Term& t, const Sort& want, const SourceSpan& at) {
    if (t.sort != want)
      error(DiagCode::SortMismatch, to_string(t) + " has sort " + t.sort.name + ", expected " + want.name, at, {});
  }

  std::vector<std::pair<Term, SourceSpan>> arg_list() {
    std::vector<std::pair<Term, SourceSpan>> out;
    expect_sym("(");
    while (!is_sym(")")) {
      const SourceSpan at = peek().span;
      out.emplace_back(term(), at);
      if (is_sym(","))
        next();
      else if (!is_sym(")"))
        unexpected({"','", "')'"});
    }
    next();
    return out;
  }

  // Parses an action term; `want_system` selects the reaction-carrying form.
  Term action_term(std::optional<bool> want_system) {
    Token name = expect_ident("action");
    const ActionDecl* a = theory_->find_action(name.text);
    if (!a) fail(DiagCode::UndeclaredAction, "undeclared action " + name.text, name.span);
    auto args = arg_list();
    const std::size_t n = a->params.size();
    bool system;
    if (want_system)
      system = *want_system;
    else
      system = args.size() == n + 1;
    const std::size_t expected = system ? n + 1 : n;
    if (args.size() != expected)
      fail(DiagCode::ArityMismatch,
           "action " + name.text + " expects " + std::to_string(expected) + " arguments" +
               (system ? " including the reaction" : ""),
           name.span);
    std::vector<Term> ts;
    for (std::size_t i = 0; i < args.size(); ++i) {
      check_sort(args[i].first, i < n ? a->params[i].sort : Sort::reaction(), args[i].second);
      ts.push_back(args[i].first);
    }
    return Term::action(name.text, std::move(ts));
  }

  Term term() {
    if (peek().kind != Tok::Ident || keywords().count(peek().text)) unexpected({"term"});
    if (is_sym("(", 1)) return action_term(std::nullopt);
    Token t = next();
    if (auto s = lookup_var(t.text)) return Term::variable(t.text, *s);
    if (auto s = theory_->constant_sort(t.text)) return Term::constant(t.text, *s);
    fail(DiagCode::UndeclaredSymbol, "undeclared symbol " + t.text, t.span);
  }

  AgentAction agent_action() {
    Term t = action_term(false);
    return AgentAction{t.name, t.args};
  }

  Term system_action() { return action_term(true); }

  std::vector<AgentAction> agent_list() {
    std::vector<AgentAction> out;
    expect_sym("[");
    while (!is_sym("]")) {
      out.push_back(agent_action());
      if (is_sym(","))
        next();
      else if (!is_sym("]"))
        unexpected({"','", "']'"});
    }
    next();
    return out;
  }

  Situation situation() {
    const Token t = peek();
    if (is_kw("S0")) {
      next();
      return Situation::s0();
    }
    if (is_kw("do")) {
      next();
      expect_sym("(");
      std::vector<Term> acts;
      if (is_sym("[")) {
        next();
        while (!is_sym("]")) {
          acts.push_back(system_action());
          if (is_sym(","))
            next();
          else if (!is_sym("]"))
            unexpected({"','", "']'"});
        }
        next();
      } else {
        acts.push_back(system_action());
      }
      expect_sym(",");
      Situation inner = situation();
      expect_sym(")");
      for (auto& a : acts) inner.actions.push_back(std::move(a));
      return inner;
    }
    if (t.kind == Tok::Ident && !keywords().count(t.text)) {
      next();
      return Situation::named(t.text);
    }
    unexpected({"S0", "do", "situation variable"});
  }

  std::optional<Situation> at_situation() {
    if (!is_sym("@")) return std::nullopt;
    next();
    return situation();
  }

  // ---- formulas
  Formula formula() {
    Formula lhs = disjunction();
    if (is_sym("->")) {
      next();
      return Formula::implies(lhs, formula());
    }
    return lhs;
  }

  Formula disjunction() {
    std::vector<Formula> parts{conjunction()};
    while (is_sym("|")) {
      next();
      parts.push_back(conjunction());
    }
    return Formula::disj(std::move(parts));
  }

  Formula conjunction() {
    std::vector<Formula> parts{unary()};
    while (is_sym("&")) {
      next();
      parts.push_back(unary());
    }
    return Formula::conj(std::move(parts));
  }

  Formula unary() {
    if (is_sym("~")) {
      next();
      return Formula::neg(unary());
    }
    if (is_kw("exists") || is_kw("forall")) {
      const bool ex = next().text == "exists";
      std::vector<Variable> vars;
      std::map<std::string, Sort> scope;
      do {
        if (!vars.empty()) next();
        Token v = expect_ident("variable");
        expect_sym(":");
        Token st = expect_ident("sort");
        auto s = sort_named(st, true);
        if (!s) throw Failure{};
        if (scope.count(v.text)) error(DiagCode::DuplicateDeclaration, "variable " + v.text + " bound twice", v.span, {});
        vars.push_back(Variable{v.text, *s});
        scope[v.text] = *s;
      } while (is_sym(","));
      expect_sym(".");
      scopes_.push_back(scope);
      Formula body = formula();
      scopes_.pop_back();
      return ex ? Formula::exists(std::move(vars), body) : Formula::forall(std::move(vars), body);
    }
    return primary();
  }

  Formula equation() {
    Term l = term();
    bool negated = false;
    if (is_sym("!="))
      negated = true;
    else if (!is_sym("="))
      unexpected({"'='", "'!='"});
    const SourceSpan at = next().span;
    Term r = term();
    if (l.sort != r.sort) error(DiagCode::SortMismatch, "equality between sorts " + l.sort.name + " and " + r.sort.name, at, {});
    Formula eq = Formula::eq(std::move(l), std::move(r));
    return negated ? Formula::neg(eq) : eq;
  }

  Formula primary() {
    const Token t = peek();
    if (is_sym("(")) {
      next();
      Formula f = formula();
      expect_sym(")");
      return f;
    }
    if (t.kind != Tok::Ident) unexpected({"formula"});
    const std::string& w = t.text;
    if (w == "true" || w == "false") {
      next();
      return Formula::boolean(w == "true");
    }
    if (w == "time") {
      next();
      auto sit = at_situation();
      TimeOp op;
      if (is_sym("="))
        op = TimeOp::Eq;
      else if (peek().kind == Tok::Sym && peek().text == ">")
        op = TimeOp::Gt;
      else
        unexpected({"'='", "'>'"});
      next();
      return Formula::time(op, expect_int(), sit);
    }
    if (w == "Poss") {
      next();
      expect_sym("(");
      Term a = system_action();
      expect_sym(")");
      return Formula::poss(std::move(a), at_situation());
    }
    if (w == "PossAg") {
      next();
      expect_sym("(");
      AgentAction a = agent_action();
      expect_sym(")");
      return Formula::poss_ag(std::move(a), at_situation());
    }
    if (w == "poss_ag") {
      if (!self_) fail(DiagCode::SyntaxError, "poss_ag shorthand is only available in a poss section", t.span);
      next();
      return Formula::poss_ag(self_->agent_pattern(), at_situation());
    }
    if (w == "After") {
      next();
      expect_sym("(");
      Term a = system_action();
      expect_sym(",");
      Formula body = formula();
      expect_sym(")");
      return Formula::after(std::move(a), body);
    }
    if (w == "Causes") {
      next();
      expect_sym("(");
      Term a = system_action();
      expect_sym(",");
      const int ts = expect_int();
      expect_sym(",");
      Formula eff = formula();
      expect_sym(")");
      return Formula::causes(std::move(a), ts, eff, at_situation());
    }
    if (w == "CAfter" || w == "PAfter") {
      next();
      expect_sym("(");
      auto seq = agent_list();
      expect_sym(",");
      Formula cond = formula();
      expect_sym(")");
      auto sit = at_situation();
      return w == "CAfter" ? Formula::cafter(std::move(seq), cond, sit) : Formula::pafter(std::move(seq), cond, sit);
    }
    if (w == "CCauses" || w == "PCauses") {
      next();
      expect_sym("(");
      AgentAction b = agent_action();
      expect_sym(",");
      const int ts = expect_int();
      expect_sym(",");
      Formula eff = formula();
      expect_sym(",");
      auto seq = agent_list();
      expect_sym(")");
      return w == "CCauses" ? Formula::ccauses(std::move(b), ts, eff, std::move(seq))
                            : Formula::pcauses(std::move(b), ts, eff, std::move(seq));
    }
    if (keywords().count(w)) unexpected({"formula"});

    const bool equation_follows = is_sym("=", 1) || is_sym("!=", 1);
    const bool is_term_symbol = lookup_var(w) || theory_->constant_sort(w) || theory_->find_action(w);
    if (const FluentDecl* fl = theory_->find_fluent(w); fl && !equation_follows) {
      next();
      std::vector<Term> args;
      if (is_sym("(")) {
        auto parsed = arg_list();
        if (parsed.size() != fl->params.size())
          fail(DiagCode::ArityMismatch, "fluent " + w + " expects " + std::to_string(fl->params.size()) + " arguments",
               t.span);
        for (std::size_t i = 0; i < parsed.size(); ++i) {
          check_sort(parsed[i].first, fl->params[i], parsed[i].second);
          args.push_back(parsed[i].first);
        }
      } else if (!fl->params.empty()) {
        fail(DiagCode::ArityMismatch, "fluent " + w + " expects " + std::to_string(fl->params.size()) + " arguments",
             t.span);
      }
      return Formula::fluent(w, std::move(args), at_situation());
    }
    if (const RigidDecl* r = theory_->find_rigid(w); r && !equation_follows) {
      next();
      std::vector<Term> args;
      if (is_sym("("))
        for (auto& [a, sp] : arg_list()) args.push_back(a);
      if (args.size() != r->arity)
        fail(DiagCode::ArityMismatch, "relation " + w + " expects " + std::to_string(r->arity) + " arguments", t.span);
      return Formula::rigid(w, std::move(args));
    }
    if (is_term_symbol) return equation();
    fail(DiagCode::UndeclaredSymbol, "undeclared symbol " + w, t.span);
  }

  // ---- queries
  void check_effect(const Formula& f, bool condition, const SourceSpan& at) {
    auto d = detail::check_regressable(f, condition ? detail::Context::Suppressed : detail::Context::Effect);
    if (!d) error(DiagCode::EffectNotDynamic, d.reason, at, {});
    auto fv = free_variables(f);
    if (!fv.empty()) error(DiagCode::InvalidQuery, "free variable " + fv.begin()->name + " in query", at, {});
  }

  Situation ground_situation(const SourceSpan& at) {
    Situation s = situation();
    if (!s.is_ground()) error(DiagCode::InvalidSituation, "scenario must be a ground situation rooted at S0", at, {});
    return s;
  }

  int timestamp() {
    const SourceSpan at = peek().span;
    const int ts = expect_int();
    if (ts < 0) error(DiagCode::InvalidQuery, "timestamps are non-negative", at, {});
    return ts;
  }

  CausalQuery query() {
    const Token kw = peek();
    if (kw.kind != Tok::Ident || !is_query_keyword(kw.text))
      unexpected({"causes", "causes_directly", "ccauses", "pcauses", "cafter", "pafter"});
    next();
    CausalQuery q;
    if (kw.text == "causes" || kw.text == "causes_directly") {
      q.kind = kw.text == "causes" ? QueryKind::Causes : QueryKind::CausesDirectly;
      const SourceSpan at_action = peek().span;
      q.action = system_action();
      if (!q.action->is_ground()) error(DiagCode::InvalidQuery, "the candidate action must be ground", at_action, {});
      expect_sym("@");
      q.ts = timestamp();
      expect_keyword("effect");
      const SourceSpan at = peek().span;
      q.effect = formula();
      check_effect(q.effect, false, at);
      expect_keyword("in");
      const SourceSpan at_sit = peek().span;
      q.situation = ground_situation(at_sit);
    } else if (kw.text == "ccauses" || kw.text == "pcauses") {
      q.kind = kw.text == "ccauses" ? QueryKind::CCauses : QueryKind::PCauses;
      const SourceSpan at_action = peek().span;
      q.agent = agent_action();
      if (!q.agent->is_ground()) error(DiagCode::InvalidQuery, "the candidate action must be ground", at_action, {});
      expect_sym("@");
      q.ts = timestamp();
      expect_keyword("effect");
      const SourceSpan at = peek().span;
      q.effect = formula();
      check_effect(q.effect, false, at);
      expect_keyword("scenario");
      q.sequence = agent_list();
    } else {
      q.kind = kw.text == "cafter" ? QueryKind::CAfter : QueryKind::PAfter;
      q.sequence = agent_list();
      expect_keyword("effect");
      const SourceSpan at = peek().span;
      q.effect = formula();
      check_effect(q.effect, true, at);
      if (is_kw("in")) {
        next();
        const SourceSpan at_sit = peek().span;
        q.situation = ground_situation(at_sit);
      }
    }
    for (const auto& a : q.sequence)
      if (!a.is_ground()) error(DiagCode::InvalidQuery, "scenario actions must be ground", kw.span, {});
    return q;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::vector<ParseDiagnostic> diags_;
  NDBATheory own_;
  const NDBATheory* theory_;
  std::vector<std::map<std::string, Sort>> scopes_;
  const ActionDecl* self_ = nullptr;
};

}  // namespace dsl_detail

inline ParseResult<NDBATheory> parse_domain(std::string_view text, std::string file = {}) {
  dsl_detail::Parser p(text, std::move(file), nullptr);
  ParseResult<NDBATheory> r;
  auto d = p.domain();
  const bool failed = p.has_errors();
  r.diagnostics = p.take_diagnostics();
  if (!failed) r.value = std::move(d);
  return r;
}

inline ParseResult<std::vector<CausalQuery>> parse_queries(std::string_view text, const NDBATheory& d,
                                                           std::string file = {}) {
  dsl_detail::Parser p(text, std::move(file), &d);
  ParseResult<std::vector<CausalQuery>> r;
  auto qs = p.queries(false);
  const bool failed = p.has_errors();
  r.diagnostics = p.take_diagnostics();
  if (!failed) r.value = std::move(qs);
  return r;
}

inline ParseResult<CausalQuery> parse_query(std::string_view text, const NDBATheory& d, std::string file = {}) {
  dsl_detail::Parser p(text, std::move(file), &d);
  ParseResult<CausalQuery> r;
  auto qs = p.queries(true);
  const bool failed = p.has_errors();
  r.diagnostics = p.take_diagnostics();
  if (!failed && qs.size() == 1) r.value = std::move(qs.front());
  return r;
}

inline ParseResult<Formula> parse_formula(std::string_view text, const NDBATheory& d) {
  dsl_detail::Parser p(text, {}, &d);
  ParseResult<Formula> r;
  auto f = p.standalone_formula();
  const bool failed = p.has_errors();
  r.diagnostics = p.take_diagnostics();
  if (!failed) r.value = std::move(f);
  return r;
}

inline ParseResult<std::vector<AgentAction>> parse_sequence(std::string_view text, const NDBATheory& d) {
  dsl_detail::Parser p(text, {}, &d);
  ParseResult<std::vector<AgentAction>> r;
  auto s = p.standalone_sequence();
  const bool failed = p.has_errors();
  r.diagnostics = p.take_diagnostics();
  if (!failed) r.value = std::move(s);
  return r;
}

inline std::string print_domain(const NDBATheory& d) {
  std::string out = "domain " + d.name + " {\n";
  out += "  sorts {";
  for (std::size_t i = 0; i < d.sorts.size(); ++i) out += (i ? ", " : " ") + d.sorts[i];
  out += d.sorts.empty() ? "}\n" : " }\n";
  if (!d.objects.empty()) {
    out += "  objects {";
    for (std::size_t i = 0; i < d.objects.size();) {
      std::size_t j = i;
      std::string group;
      while (j < d.objects.size() && d.objects[j].sort == d.objects[i].sort) {
        group += (j == i ? "" : ", ") + d.objects[j].name;
        ++j;
      }
      out += (i ? "; " : " ") + group + " : " + d.objects[i].sort.name;
      i = j;
    }
    out += " }\n";
  }
  for (const auto& r : d.rigids) {
    out += "  rigid " + r.name + "/" + std::to_string(r.arity) + " {";
    bool first = true;
    for (const auto& t : r.tuples) {
      out += first ? " (" : ", (";
      first = false;
      for (std::size_t i = 0; i < t.size(); ++i) out += (i ? ", " : "") + t[i];
      out += ")";
    }
    out += r.tuples.empty() ? "}\n" : " }\n";
  }
  for (const auto& f : d.fluents) {
    out += "  fluent " + f.name;
    if (!f.params.empty()) {
      out += "(";
      for (std::size_t i = 0; i < f.params.size(); ++i) out += (i ? ", " : "") + f.params[i].name;
      out += ")";
    }
    out += "\n";
  }
  for (const auto& a : d.actions) {
    out += "  action " + a.name + "(";
    for (std::size_t i = 0; i < a.params.size(); ++i) out += (i ? ", " : "") + a.params[i].name + ": " + a.params[i].sort.name;
    out += ") {\n    reactions {";
    for (std::size_t i = 0; i < a.reactions.size(); ++i) out += (i ? ", " : " ") + a.reactions[i];
    out += a.reactions.empty() ? "}\n" : " }\n";
    out += "    poss_ag: " + to_dsl(a.poss_ag) + "\n";
    out += "    poss: " + to_dsl(a.poss) + "\n  }\n";
  }
  for (const auto& s : d.ssas) {
    out += "  ssa " + s.fluent + "(";
    for (std::size_t i = 0; i < s.params.size(); ++i) out += s.params[i].name + ", ";
    out += "do(" + s.action_var.name + ", s)) = " + to_dsl(s.body) + "\n";
  }
  out += "  init {";
  bool first = true;
  for (const auto& g : d.initial) {
    out += (first ? " " : ", ") + to_string(g);
    first = false;
  }
  out += d.initial.empty() ? "}\n" : " }\n";
  return out + "}\n";
}

inline std::string print_query(const CausalQuery& q) {
  switch (q.kind) {
    case QueryKind::Causes:
    case QueryKind::CausesDirectly:
      return std::string(to_string(q.kind)) + " " + to_string(*q.action) + " @ " + std::to_string(q.ts) + " effect " +
             to_dsl(q.effect) + " in " + to_string(q.situation);
    case QueryKind::PCauses:
    case QueryKind::CCauses:
      return std::string(to_string(q.kind)) + " " + to_string(*q.agent) + " @ " + std::to_string(q.ts) + " effect " +
             to_dsl(q.effect) + " scenario " + to_string(q.sequence);
    case QueryKind::CAfter:
    case QueryKind::PAfter: {
      std::string out = std::string(to_string(q.kind)) + " " + to_string(q.sequence) + " effect " + to_dsl(q.effect);
      if (!q.situation.is_s0()) out += " in " + to_string(q.situation);
      return out;
    }
  }
  return {};
}

}  // namespace ndcausal
