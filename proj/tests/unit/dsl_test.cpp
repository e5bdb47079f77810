#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "support.hpp"

using namespace ndcausal;
using namespace testing_support;

namespace {

bool has_code(const std::vector<ParseDiagnostic>& ds, DiagCode c) {
  return std::any_of(ds.begin(), ds.end(), [&](const ParseDiagnostic& d) { return d.code == c; });
}

const char* kMinimal = R"(
domain tiny {
  sorts { Thing }
  objects { A, B : Thing }
  fluent On(Thing)
  action press(x: Thing) {
    reactions { Ok }
    poss_ag: ~On(x)
    poss: poss_ag & e = Ok
  }
  ssa On(x, do(a, s)) = (exists r:Reaction. a = press(x, r)) | On(x)
  init { On(B) }
}
)";

}  // namespace

TEST(ParseDomain, Robot) {
  auto r = parse_domain(slurp(robot_path()), "robot.ndbat");
  ASSERT_TRUE(r.ok());
  EXPECT_TRUE(r.diagnostics.empty());
  EXPECT_EQ(r.value->name, "robot");
  EXPECT_EQ(r.value->fluents.size(), 3u);
  EXPECT_EQ(r.value->actions.size(), 2u);
  EXPECT_EQ(r.value->objects.size(), 4u);
  EXPECT_EQ(r.value->find_rigid("Connected")->tuples.size(), 3u);
  EXPECT_EQ(r.value->initial.size(), 3u);
}

TEST(ParseDomain, MinimalDomainValidates) {
  auto r = parse_domain(kMinimal);
  ASSERT_TRUE(r.ok());
  EXPECT_TRUE(validate_theory(*r.value).empty());
  EXPECT_TRUE(check_reaction_requirements(*r.value, 3).passed());
}

TEST(ParseDomain, EmptyFile) {
  auto r = parse_domain("");
  EXPECT_FALSE(r.ok());
  ASSERT_EQ(r.diagnostics.size(), 1u);
  EXPECT_EQ(r.diagnostics[0].code, DiagCode::MissingSection);
  EXPECT_NE(r.diagnostics[0].message.find("domain"), std::string::npos);
}

TEST(ParseDomain, CommentsOnly) {
  auto r = parse_domain("# nothing here\n   # still nothing\n");
  EXPECT_FALSE(r.ok());
  EXPECT_EQ(r.diagnostics.at(0).code, DiagCode::MissingSection);
}

TEST(ParseDomain, SsaForUndeclaredFluentHasASpan) {
  std::string text = kMinimal;
  text.replace(text.find("  init"), 0, "  ssa Vul(do(a, s)) = Vul\n");
  auto r = parse_domain(text, "bad.ndbat");
  EXPECT_FALSE(r.ok());
  ASSERT_TRUE(has_code(r.diagnostics, DiagCode::UndeclaredFluent));
  const auto& d = *std::find_if(r.diagnostics.begin(), r.diagnostics.end(),
                                [](const ParseDiagnostic& x) { return x.code == DiagCode::UndeclaredFluent; });
  EXPECT_EQ(d.span.file, "bad.ndbat");
  EXPECT_EQ(d.span.line, 12);
  EXPECT_EQ(d.span.column, 7);
  EXPECT_EQ(d.span.length, 3);
}

TEST(ParseDomain, RecoversAndReportsSeveralErrors) {
  std::string text = kMinimal;
  text.replace(text.find("fluent On(Thing)"), 16, "fluent On(Thng)");
  text.replace(text.find("init { On(B) }"), 14, "init { Off(B) }");
  auto r = parse_domain(text);
  EXPECT_FALSE(r.ok());
  EXPECT_TRUE(has_code(r.diagnostics, DiagCode::UndeclaredSort));
  EXPECT_TRUE(has_code(r.diagnostics, DiagCode::UndeclaredFluent));
  EXPECT_TRUE(std::is_sorted(r.diagnostics.begin(), r.diagnostics.end(), [](const auto& a, const auto& b) {
    return std::tie(a.span.line, a.span.column) < std::tie(b.span.line, b.span.column);
  }));
}

TEST(ParseDomain, ArityAndSortErrors) {
  std::string text = kMinimal;
  text.replace(text.find("poss_ag: ~On(x)"), 15, "poss_ag: ~On(x, x)");
  auto r = parse_domain(text);
  EXPECT_TRUE(has_code(r.diagnostics, DiagCode::ArityMismatch));

  std::string text2 = kMinimal;
  text2.replace(text2.find("e = Ok"), 6, "e = A");
  auto r2 = parse_domain(text2);
  EXPECT_TRUE(has_code(r2.diagnostics, DiagCode::SortMismatch));
}

TEST(ParseDomain, DuplicateDeclarations) {
  std::string text = kMinimal;
  text.replace(text.find("  fluent On"), 0, "  fluent On(Thing)\n");
  auto r = parse_domain(text);
  EXPECT_TRUE(has_code(r.diagnostics, DiagCode::DuplicateDeclaration));
}

TEST(ParseDomain, UnterminatedDomain) {
  std::string text = kMinimal;
  text.erase(text.rfind('}'));
  auto r = parse_domain(text);
  EXPECT_FALSE(r.ok());
  EXPECT_TRUE(has_code(r.diagnostics, DiagCode::UnexpectedEnd));
}

TEST(ParseDomain, ExpectedTokensAreListed) {
  auto r = parse_domain("domain x { fluents }");
  ASSERT_FALSE(r.diagnostics.empty());
  const auto& exp = r.diagnostics[0].expected;
  EXPECT_NE(std::find(exp.begin(), exp.end(), "fluent"), exp.end());
}

TEST(ParseQuery, CertainlyCauses) {
  CausalQuery q = query("ccauses move(I0,I1) @ 0 effect Vul scenario [move(I0,I1), move(I1,I2)]");
  EXPECT_EQ(q, CausalQuery::ccauses(move("I0", "I1"), 0, vul(), alpha2()));
}

TEST(ParseQuery, CausesInSigma1) {
  CausalQuery q = query(
      "causes move(I1,I2,Vul) @ 2 effect Vul in "
      "do([comm(I0,Succ),move(I0,I1,NotVul),move(I1,I2,Vul),move(I2,I3,NotVul)], S0)");
  EXPECT_EQ(q, CausalQuery::causes(move("I1", "I2", "Vul"), 2, vul(), sigma1()));
}

TEST(ParseQuery, NestedDoIsTheSameSituation) {
  CausalQuery a = query("causes move(I0,I1,Vul) @ 0 effect Vul in do(move(I1,I2,Vul), do(move(I0,I1,Vul), S0))");
  CausalQuery b = query("causes move(I0,I1,Vul) @ 0 effect Vul in do([move(I0,I1,Vul), move(I1,I2,Vul)], S0)");
  EXPECT_EQ(a, b);
}

TEST(ParseQuery, PossiblyAfter) {
  CausalQuery q = query("pafter [comm(I0)] effect Vul");
  EXPECT_EQ(q, CausalQuery::pafter({comm("I0")}, vul()));
}

TEST(ParseQuery, EffectMustBeDynamic) {
  auto r = parse_query("ccauses move(I0,I1) @ 0 effect time = 0 scenario [move(I0,I1)]", robot());
  EXPECT_FALSE(r.ok());
  EXPECT_TRUE(has_code(r.diagnostics, DiagCode::EffectNotDynamic));
}

TEST(ParseQuery, RejectsOpenQueries) {
  auto r = parse_query("pafter [comm(I0)] effect At(i)", robot());
  EXPECT_FALSE(r.ok());
  auto r2 = parse_query("pafter [comm(I0)] effect exists i:Location. At(i)", robot());
  EXPECT_TRUE(r2.ok());
}

TEST(ParseQuery, AgentActionArity) {
  auto r = parse_query("pcauses move(I0,I1,Vul) @ 0 effect Vul scenario [move(I0,I1)]", robot());
  EXPECT_FALSE(r.ok());
  EXPECT_TRUE(has_code(r.diagnostics, DiagCode::ArityMismatch));
}

TEST(ParseQuery, SeveralQueriesInOrder) {
  auto r = parse_queries("pafter [comm(I0)] effect Vul\ncafter [] effect At(I0)\n# done\n", robot());
  ASSERT_TRUE(r.ok());
  ASSERT_EQ(r.value->size(), 2u);
  EXPECT_EQ((*r.value)[1].kind, QueryKind::CAfter);
}

TEST(ParseFormula, Precedence) {
  // & binds tighter than |, which binds tighter than ->.
  EXPECT_EQ(formula("Vul | At(I0) & At(I1)"), Formula::disj(vul(), Formula::conj(at("I0"), at("I1"))));
  EXPECT_EQ(formula("Vul -> At(I0) -> At(I1)"), Formula::implies(vul(), Formula::implies(at("I0"), at("I1"))));
  EXPECT_EQ(formula("~Vul & At(I0)"), Formula::conj(Formula::neg(vul()), at("I0")));
}

TEST(ParseFormula, EqualityVersusFluentNames) {
  // Vul is a fluent and a reaction; an equation decides the reading.
  EXPECT_EQ(formula("exists e:Reaction. e = Vul"),
            Formula::exists({Variable{"e", Sort::reaction()}}, Formula::eq(Term::variable("e", Sort::reaction()), reaction("Vul"))));
  EXPECT_EQ(formula("Vul"), vul());
}

TEST(Printer, DomainRoundTrip) {
  const std::string once = print_domain(robot());
  auto r = parse_domain(once);
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(print_domain(*r.value), once);
  EXPECT_EQ(r.value->fluents, robot().fluents);
  EXPECT_EQ(r.value->actions, robot().actions);
  EXPECT_EQ(r.value->initial, robot().initial);
}

TEST(Printer, QueryRoundTrip) {
  CausalQuery q = CausalQuery::ccauses(move("I0", "I1"), 0, vul(), alpha2());
  EXPECT_EQ(query(print_query(q)), q);
  CausalQuery c = CausalQuery::causes(move("I1", "I2", "Vul"), 2, Formula::conj(vul(), Formula::neg(at("I0"))), sigma1());
  EXPECT_EQ(query(print_query(c)), c);
}

TEST(Printer, Deterministic) { EXPECT_EQ(print_domain(robot()), print_domain(robot())); }

TEST(Parser, RandomInputNeverCrashes) {
  std::mt19937_64 rng(99);
  const std::string alphabet = "domain sorts objects fluent action ssa init {}()[],:;.=~&|@/-># \n abcXYZ019'";
  const std::string robot_text = slurp(robot_path());
  for (int i = 0; i < 500; ++i) {
    std::string text;
    if (i % 2 == 0) {
      const std::size_t n = rng() % 200;
      for (std::size_t k = 0; k < n; ++k) text += alphabet[rng() % alphabet.size()];
    } else {
      // Truncated or perturbed copies of a valid file.
      text = robot_text.substr(0, rng() % robot_text.size());
      if (!text.empty()) text[rng() % text.size()] = alphabet[rng() % alphabet.size()];
    }
    auto r = parse_domain(text);
    if (!r.ok()) {
      EXPECT_FALSE(r.diagnostics.empty());
      for (const auto& d : r.diagnostics) {
        EXPECT_GE(d.span.line, 1);
        EXPECT_GE(d.span.column, 1);
        EXPECT_GE(d.span.length, 1);
      }
    }
    (void)parse_query(text, robot());
  }
}
