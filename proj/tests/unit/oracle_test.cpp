#include <gtest/gtest.h>

#include "support.hpp"

using namespace ndcausal;
using namespace testing_support;

namespace {

std::set<GroundAtom> atoms(std::initializer_list<GroundAtom> l) { return l; }

bool holds(const FluentState& st, const GroundAtom& g) { return st.true_atoms.count(g) > 0; }

}  // namespace

TEST(FluentState, InitialState) {
  Oracle o(robot());
  auto st = o.fluent_state(Situation::s0());
  EXPECT_EQ(st.true_atoms, atoms({{"At", {"I0"}}, {"Risky", {"I1"}}, {"Risky", {"I2"}}}));
}

TEST(FluentState, MoveWithoutVulnerability) {
  Oracle o(robot());
  auto st = o.fluent_state(Situation::from({comm("I0", "Succ"), move("I0", "I1", "NotVul")}));
  EXPECT_FALSE(holds(st, {"Vul", {}}));
  EXPECT_TRUE(holds(st, {"At", {"I1"}}));
  EXPECT_FALSE(holds(st, {"At", {"I0"}}));
}

TEST(FluentState, MoveWithVulnerability) {
  Oracle o(robot());
  auto st = o.fluent_state(Situation::from({move("I0", "I1", "Vul")}));
  EXPECT_TRUE(holds(st, {"Vul", {}}));
  EXPECT_TRUE(holds(st, {"At", {"I1"}}));
}

TEST(FluentState, UndeclaredActionIsAnError) {
  Oracle o(robot());
  try {
    o.fluent_state(Situation::from({Term::action("jump", {reaction("Succ")})}));
    FAIL() << "expected UndeclaredAction";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UndeclaredAction);
  }
}

TEST(Eval, FluentAtThirdStep) {
  Oracle o(robot());
  EXPECT_TRUE(o.eval(Formula::fluent("Vul", {}, sigma1().prefix(3))));
}

TEST(Eval, SomeReactionIsPossibleAtS0) {
  Oracle o(robot());
  EXPECT_TRUE(o.eval(formula("exists e:Reaction. Poss(move(I0, I1, e))@S0")));
  EXPECT_TRUE(o.eval(Formula::poss(move("I0", "I1", "Vul"), Situation::s0())));
  EXPECT_TRUE(o.eval(Formula::poss(move("I0", "I1", "NotVul"), Situation::s0())));
  EXPECT_FALSE(o.eval(Formula::poss(move("I0", "I1", "Succ"), Situation::s0())));
}

TEST(Eval, Constants) {
  Oracle o(robot());
  EXPECT_FALSE(o.eval(Formula::bottom()));
  EXPECT_TRUE(o.eval(Formula::top()));
}

TEST(Eval, TimeAtoms) {
  Oracle o(robot());
  EXPECT_TRUE(o.eval(Formula::time(TimeOp::Eq, 4, sigma1())));
  EXPECT_FALSE(o.eval(Formula::time(TimeOp::Gt, 0, Situation::s0())));
}

TEST(Eval, ErrorsOnOpenOrUngroundInput) {
  Oracle o(robot());
  try {
    o.eval(formula("At(i)@S0"));
    FAIL() << "expected an error";
  } catch (const std::exception&) {
  }
  try {
    o.eval(Formula::fluent("Vul", {}, Situation::named("now")));
    FAIL() << "expected UngroundSituation";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UngroundSituation);
  }
}

TEST(Executable, Scenarios) {
  Oracle o(robot());
  EXPECT_TRUE(o.executable(sigma1()));
  EXPECT_TRUE(o.executable(Situation::s0()));
  // comm needs a location that is not risky.
  EXPECT_FALSE(o.executable(Situation::from({move("I0", "I1", "NotVul"), comm("I1", "Succ")})));
}

TEST(Executions, FourBranchesForAlpha1) {
  Oracle o(robot());
  auto leaves = o.enumerate_executions(alpha1(), Situation::s0());
  ASSERT_EQ(leaves.size(), 4u);
  // Reaction-declaration order: Vul before NotVul.
  EXPECT_EQ(leaves.front(), Situation::from({comm("I0", "Succ"), move("I0", "I1", "Vul"), move("I1", "I2", "Vul"),
                                             move("I2", "I3", "NotVul")}));
  EXPECT_EQ(leaves.back(), sigma1().prefix(1).after(move("I0", "I1", "NotVul")).after(move("I1", "I2", "NotVul")).after(
                               move("I2", "I3", "NotVul")));
}

TEST(Executions, EmptySequence) {
  Oracle o(robot());
  EXPECT_EQ(o.enumerate_executions({}, Situation::s0()), std::vector<Situation>{Situation::s0()});
}

TEST(Executions, Alpha2HasFourBranches) {
  Oracle o(robot());
  EXPECT_EQ(o.enumerate_executions(alpha2(), Situation::s0()).size(), 4u);
}

TEST(Executions, InexecutableFirstAction) {
  Oracle o(robot());
  EXPECT_TRUE(o.enumerate_executions({comm("I1")}, Situation::s0()).empty());
}

TEST(ExecutionTree, BranchingProfileOfAlpha1) {
  Oracle o(robot());
  ExecutionTree t = o.execution_tree(alpha1());
  EXPECT_EQ(branching_profile(t), (std::vector<std::size_t>{1, 2, 2, 1}));
  std::size_t with_vul = 0;
  for (const auto* leaf : t.leaves()) with_vul += o.eval_at(vul(), leaf->situation) ? 1 : 0;
  EXPECT_EQ(t.leaves().size(), 4u);
  EXPECT_EQ(with_vul, 3u);
}

TEST(After, PossiblyAndCertainly) {
  Oracle o(robot());
  EXPECT_TRUE(o.pafter(alpha1(), vul(), Situation::s0()));
  EXPECT_FALSE(o.cafter(alpha1(), vul(), Situation::s0()));
  EXPECT_EQ(o.cafter({}, at("I0"), Situation::s0()), o.eval_at(at("I0"), Situation::s0()));
  EXPECT_EQ(o.pafter({}, vul(), Situation::s0()), o.eval_at(vul(), Situation::s0()));
}

TEST(CausesDirectly, PrimaryCause) {
  Oracle o(robot());
  EXPECT_TRUE(o.causes_directly(move("I1", "I2", "Vul"), 2, vul(), sigma1()));
  EXPECT_FALSE(o.causes_directly(move("I2", "I3", "NotVul"), 3, vul(), sigma1()));
  EXPECT_FALSE(o.causes_directly(move("I0", "I1", "NotVul"), 1, vul(), sigma1()));
}

TEST(CausesDirectly, NothingCausesAtS0) {
  Oracle o(robot());
  for (int ts = 0; ts < 3; ++ts) {
    EXPECT_FALSE(o.causes_directly(move("I0", "I1", "Vul"), ts, vul(), Situation::s0()));
    EXPECT_FALSE(o.causes(move("I0", "I1", "Vul"), ts, vul(), Situation::s0()));
  }
}

TEST(CausesDirectly, NegativeTimestamp) {
  Oracle o(robot());
  try {
    o.causes_directly(move("I1", "I2", "Vul"), -1, vul(), sigma1());
    FAIL() << "expected TimestampOutOfRange";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TimestampOutOfRange);
  }
}

TEST(Causes, ScenarioSigma1) {
  Oracle o(robot());
  EXPECT_FALSE(o.causes(comm("I0", "Succ"), 0, vul(), sigma1()));
  EXPECT_TRUE(o.causes(move("I0", "I1", "NotVul"), 1, vul(), sigma1()));
  EXPECT_TRUE(o.causes(move("I1", "I2", "Vul"), 2, vul(), sigma1()));
  EXPECT_FALSE(o.causes(move("I2", "I3", "NotVul"), 3, vul(), sigma1()));
}

TEST(Causes, IndirectCauseGoesThroughThePrecondition) {
  Oracle o(robot());
  // move(I0,I1) at 1 brings about the precondition of the primary cause at 2.
  Formula inner = Formula::conj(Formula::poss(move("I1", "I2", "Vul")), Formula::after(move("I1", "I2", "Vul"), vul()));
  EXPECT_TRUE(o.causes_directly(move("I0", "I1", "NotVul"), 1, inner, sigma1().prefix(2)));
  EXPECT_TRUE(o.causes(move("I0", "I1", "NotVul"), 1, inner, sigma1().prefix(2)));
}

TEST(Causes, FalseWhenTimestampNotInScenario) {
  Oracle o(robot());
  EXPECT_FALSE(o.causes(move("I2", "I3", "NotVul"), 4, vul(), sigma1()));
  EXPECT_FALSE(o.causes(move("I2", "I3", "NotVul"), 9, vul(), sigma1()));
}

TEST(AgentCauses, Alpha1) {
  Oracle o(robot());
  EXPECT_FALSE(o.pcauses(comm("I0"), 0, vul(), alpha1()).holds);
  EXPECT_TRUE(o.ccauses(move("I0", "I1"), 1, vul(), alpha1()).holds);
  EXPECT_TRUE(o.pcauses(move("I1", "I2"), 2, vul(), alpha1()).holds);
  EXPECT_FALSE(o.ccauses(move("I1", "I2"), 2, vul(), alpha1()).holds);
  EXPECT_FALSE(o.pcauses(move("I2", "I3"), 3, vul(), alpha1()).holds);
}

TEST(AgentCauses, Alpha2) {
  Oracle o(robot());
  auto v = o.ccauses(move("I0", "I1"), 0, vul(), alpha2());
  EXPECT_TRUE(v.holds);
  EXPECT_EQ(v.executions, 4u);
  EXPECT_EQ(v.satisfying, 3u);
  EXPECT_FALSE(v.vacuous);
}

TEST(AgentCauses, VacuousCertainty) {
  Oracle o(robot());
  // comm alone never makes the robot vulnerable.
  auto v = o.ccauses(comm("I0"), 0, vul(), {comm("I0")});
  EXPECT_TRUE(v.holds);
  EXPECT_TRUE(v.vacuous);
  EXPECT_FALSE(o.pcauses(comm("I0"), 0, vul(), {comm("I0")}).holds);
}

TEST(AgentCauses, CandidateOutsideScenarioIsFlagged) {
  Oracle o(robot());
  auto v = o.pcauses(comm("I3"), 0, vul(), alpha2());
  EXPECT_FALSE(v.candidate_in_scenario);
  EXPECT_FALSE(v.holds);
}

TEST(Setting, Validity) {
  Oracle o(robot());
  EXPECT_TRUE(o.nd_setting_valid(alpha1(), vul()));
  EXPECT_FALSE(o.nd_setting_valid({comm("I0")}, vul()));
  EXPECT_FALSE(o.nd_setting_valid(alpha1(), Formula::neg(vul())));
}

TEST(Queries, OracleWarnings) {
  Oracle o(robot());
  auto a = answer_with_oracle(o, CausalQuery::ccauses(comm("I0"), 0, vul(), {comm("I0")}));
  EXPECT_TRUE(a.value);
  ASSERT_EQ(a.warnings.size(), 1u);
  auto b = answer_with_oracle(o, CausalQuery::causes(comm("I1", "Succ"), 0, vul(), Situation::from({comm("I1", "Succ")})));
  EXPECT_FALSE(b.value);
  ASSERT_EQ(b.warnings.size(), 1u);
}
