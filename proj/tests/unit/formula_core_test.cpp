#include <gtest/gtest.h>

#include "support.hpp"

using namespace ndcausal;
using namespace testing_support;

namespace {

Term var(const char* n, Sort s) { return Term::variable(n, std::move(s)); }

}  // namespace

TEST(Situation, TimestampCountsActions) {
  EXPECT_EQ(Situation::s0().timestamp(), 0u);
  EXPECT_EQ(sigma1().timestamp(), 4u);
  EXPECT_EQ(sigma1().prefix(2).timestamp(), 2u);
  EXPECT_EQ(sigma1().prefix(2).actions.back(), move("I0", "I1", "NotVul"));
  EXPECT_EQ(sigma1().parent(), sigma1().prefix(3));
}

TEST(Situation, GroundnessAndPrinting) {
  EXPECT_TRUE(sigma1().is_ground());
  EXPECT_FALSE(Situation::named("s'").is_ground());
  EXPECT_FALSE(Situation::from({Term::action("move", {loc("I0"), loc("I1"), var("e", Sort::reaction())})}).is_ground());
  EXPECT_EQ(to_string(Situation::s0()), "S0");
  EXPECT_EQ(to_string(Situation::s0().after(comm("I0", "Succ"))), "do([comm(I0, Succ)], S0)");
  EXPECT_EQ(to_string(Situation::named("now").after(comm("I0", "Succ"))), "do([comm(I0, Succ)], now)");
}

TEST(AgentActions, ReactionIsTheLastArgument) {
  Term sys = with_reaction(move("I0", "I1"), reaction("Vul"));
  EXPECT_EQ(sys, move("I0", "I1", "Vul"));
  EXPECT_EQ(agent_of(sys), move("I0", "I1"));
  EXPECT_EQ(reaction_of(sys), reaction("Vul"));
}

TEST(Restore, FluentBaseCase) { EXPECT_EQ(restore(vul(), Situation::s0()), Formula::fluent("Vul", {}, Situation::s0())); }

TEST(Restore, AfterExtendsTheSituation) {
  Formula f = Formula::after(move("I1", "I2", "Vul"), vul());
  EXPECT_EQ(restore(f, Situation::s0()), Formula::fluent("Vul", {}, Situation::s0().after(move("I1", "I2", "Vul"))));
}

TEST(Restore, HomomorphicOverConnectives) {
  Formula f = Formula::conj(Formula::neg(vul()), Formula::poss(comm("I0", "Succ")));
  Formula want = Formula::conj(Formula::neg(Formula::fluent("Vul", {}, Situation::s0())),
                               Formula::poss(comm("I0", "Succ"), Situation::s0()));
  EXPECT_EQ(restore(f, Situation::s0()), want);
}

TEST(Restore, LeavesAlreadySituatedAtomsAlone) {
  Formula f = Formula::fluent("Vul", {}, sigma1());
  EXPECT_EQ(restore(f, Situation::s0()), f);
}

TEST(Restore, RenamesBinderCapturedBySituation) {
  const Sort r = Sort::reaction();
  Situation s = Situation::s0().after(Term::action("move", {loc("I0"), loc("I1"), var("e", r)}));
  Formula f = Formula::exists({Variable{"e", r}}, Formula::poss(Term::action("comm", {loc("I0"), var("e", r)})));
  Formula g = restore(f, s);
  ASSERT_TRUE(g.is(FormulaKind::Exists));
  EXPECT_NE(g.vars()[0].name, "e");
  // The free e of the situation stays free.
  auto fv = free_variables(g);
  ASSERT_EQ(fv.size(), 1u);
  EXPECT_EQ(fv.begin()->name, "e");
}

TEST(Suppress, StripsGroundBase) { EXPECT_EQ(suppress(Formula::fluent("Vul", {}, Situation::s0())), vul()); }

TEST(Suppress, RoundTripOverPlaceholder) {
  Formula f = Formula::conj(Formula::neg(vul()), at("I0"));
  EXPECT_EQ(suppress(restore(f, Situation::named("s'"))), f);
}

TEST(Suppress, DropsTheWholeChain) {
  const Sort r = Sort::reaction();
  Term a = Term::action("move", {loc("I0"), loc("I1"), var("e''", r)});
  Formula f = Formula::fluent("At", {loc("I1")}, Situation::named("s'").after(a));
  EXPECT_EQ(suppress(f), at("I1"));
}

TEST(Suppress, RoundTripOverGroundSituation) {
  Formula f = Formula::conj(Formula::neg(vul()), at("I0"));
  EXPECT_EQ(suppress(restore(f, sigma1())), f);
}

TEST(SuppressBase, RemainingChainBecomesAfter) {
  const Sort r = Sort::reaction();
  Term a = Term::action("move", {loc("I0"), loc("I1"), var("e''", r)});
  Formula f = Formula::fluent("At", {loc("I1")}, Situation::named("s'").after(a));
  EXPECT_EQ(suppress_base(f), Formula::after(a, at("I1")));
  EXPECT_EQ(restore(suppress_base(f), Situation::named("s'")), f);
}

TEST(Suppress, PossIsStrippedLikeFluents) {
  Formula f = Formula::poss(comm("I0", "Succ"), Situation::named("now"));
  EXPECT_EQ(suppress(f), Formula::poss(comm("I0", "Succ")));
}

TEST(Suppress, MixedBasesAreRejected) {
  Formula f = Formula::conj(Formula::fluent("Vul", {}, Situation::s0()), Formula::fluent("Vul", {}, Situation::named("s'")));
  try {
    suppress(f);
    FAIL() << "expected MixedSituationBase";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MixedSituationBase);
  }
}

TEST(Substitute, GroundsAllVariables) {
  const Sort l{"Location"}, r = Sort::reaction();
  Formula f = Formula::poss(Term::action("move", {var("i", l), var("j", l), var("e", r)}));
  Binding b{{"i", loc("I0")}, {"j", loc("I1")}, {"e", reaction("Vul")}};
  EXPECT_EQ(substitute(f, b), Formula::poss(move("I0", "I1", "Vul")));
}

TEST(Substitute, EmptyBindingIsIdentity) {
  const Sort r = Sort::reaction();
  Formula f = Formula::exists({Variable{"e", r}},
                              Formula::causes(Term::action("move", {loc("I0"), loc("I1"), var("e", r)}), 0, vul()));
  EXPECT_EQ(substitute(f, {}), f);
}

TEST(Substitute, BoundOccurrencesUntouched) {
  const Sort r = Sort::reaction();
  Formula f = Formula::exists({Variable{"e", r}}, Formula::poss(Term::action("comm", {loc("I0"), var("e", r)})));
  EXPECT_EQ(substitute(f, {{"e", reaction("Succ")}}), f);
}

TEST(Substitute, AvoidsCapture) {
  const Sort r = Sort::reaction();
  // exists e. e = x, with x := e (a different, free e).
  Formula f = Formula::exists({Variable{"e", r}}, Formula::eq(var("e", r), var("x", r)));
  Formula g = substitute(f, {{"x", var("e", r)}});
  ASSERT_TRUE(g.is(FormulaKind::Exists));
  const std::string bound = g.vars()[0].name;
  EXPECT_NE(bound, "e");
  EXPECT_EQ(g.body(), Formula::eq(var(bound.c_str(), r), var("e", r)));
}

TEST(Substitute, SortMismatchThrows) {
  const Sort l{"Location"};
  Formula f = Formula::fluent("At", {var("i", l)});
  try {
    substitute(f, {{"i", reaction("Vul")}});
    FAIL() << "expected SortMismatch";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SortMismatch);
  }
}

TEST(FreeVariables, ClosedFormulas) {
  const Sort r = Sort::reaction();
  EXPECT_TRUE(free_variables(Formula::fluent("Vul", {}, Situation::s0())).empty());
  EXPECT_TRUE(free_variables(Formula::exists({Variable{"e", r}},
                                             Formula::poss(Term::action("move", {loc("I0"), loc("I1"), var("e", r)}))))
                  .empty());
}

TEST(FreeVariables, OpenReactionVariable) {
  const Sort r = Sort::reaction();
  Formula f = Formula::conj(Formula::poss(Term::action("move", {loc("I1"), loc("I2"), var("e'", r)})),
                            Formula::disj(Formula::eq(var("e'", r), reaction("Vul")), vul()));
  auto fv = free_variables(f);
  ASSERT_EQ(fv.size(), 1u);
  EXPECT_EQ(*fv.begin(), (Variable{"e'", r}));
}

TEST(FreeVariables, SeesInsideEffectsAndSequences) {
  const Sort l{"Location"};
  Formula f = Formula::cafter({AgentAction{"comm", {var("i", l)}}}, vul(), Situation::s0());
  EXPECT_EQ(free_variables(f).size(), 1u);
}

TEST(FreshName, SkipsTakenNames) {
  EXPECT_EQ(fresh_name("e", {}), "e1");
  EXPECT_EQ(fresh_name("e'", {"e1", "e2"}), "e3");
  EXPECT_EQ(fresh_name("s12", {"s1"}), "s2");
}

TEST(Builders, DegenerateJunctions) {
  EXPECT_TRUE(Formula::conj(std::vector<Formula>{}).is(FormulaKind::True));
  EXPECT_TRUE(Formula::disj(std::vector<Formula>{}).is(FormulaKind::False));
  EXPECT_EQ(Formula::conj(std::vector<Formula>{vul()}), vul());
  EXPECT_EQ(Formula::exists({}, vul()), vul());
}

TEST(Printer, CanonicalPrefixForm) {
  const Sort r = Sort::reaction();
  Formula f = Formula::exists(
      {Variable{"e", r}},
      Formula::conj(Formula::neg(Formula::fluent("Vul", {}, Situation::s0())),
                    Formula::poss(Term::action("move", {loc("I0"), loc("I1"), var("e", r)}), Situation::s0())));
  EXPECT_EQ(to_string(f), "exists([e:Reaction], and(not(Vul@S0), Poss(move(I0, I1, e))@S0))");
  EXPECT_EQ(to_string(Formula::time(TimeOp::Gt, 2, Situation::s0())), "time@S0 > 2");
  EXPECT_EQ(to_string(Formula::ccauses(move("I0", "I1"), 0, vul(), alpha2())),
            "CCauses(move(I0, I1), 0, Vul, [move(I0, I1), move(I1, I2)])");
}

TEST(Printer, InfixForm) {
  Formula f = Formula::implies(at("I0"), Formula::disj(vul(), Formula::neg(at("I1"))));
  EXPECT_EQ(to_dsl(f), "(~At(I0) | (Vul | ~At(I1)))");
}

TEST(Formula, StructuralEquality) {
  EXPECT_EQ(Formula::conj(vul(), at("I0")), Formula::conj(vul(), at("I0")));
  EXPECT_NE(Formula::conj(vul(), at("I0")), Formula::conj(at("I0"), vul()));
  EXPECT_NE(Formula::fluent("Vul", {}, Situation::s0()), vul());
}
