#include <gtest/gtest.h>

#include <algorithm>

#include "support.hpp"

using namespace ndcausal;
using namespace testing_support;

namespace {

// Robot domain text with one substring replaced.
NDBATheory mutated(const std::string& from, const std::string& to) {
  std::string text = slurp(robot_path());
  const auto at = text.find(from);
  if (at == std::string::npos) throw std::runtime_error("mutation anchor not found: " + from);
  text.replace(at, from.size(), to);
  auto r = parse_domain(text, "mutated.ndbat");
  if (!r.ok()) {
    std::string msg;
    for (const auto& d : r.diagnostics) msg += format(d) + "\n";
    throw std::runtime_error(msg);
  }
  return *r.value;
}

bool has(const std::vector<Finding>& fs, FindingCode c, const std::string& subject) {
  return std::any_of(fs.begin(), fs.end(), [&](const Finding& f) { return f.code == c && f.subject == subject; });
}

}  // namespace

TEST(RobotDomain, ShapeMatchesTheAxioms) {
  const auto& d = robot();
  EXPECT_EQ(d.fluents.size(), 3u);
  EXPECT_EQ(d.actions.size(), 2u);
  EXPECT_EQ(d.objects.size(), 4u);
  ASSERT_NE(d.find_rigid("Connected"), nullptr);
  std::set<std::vector<std::string>> edges{{"I0", "I1"}, {"I1", "I2"}, {"I2", "I3"}};
  EXPECT_EQ(d.find_rigid("Connected")->tuples, edges);
  EXPECT_EQ(d.find_action("move")->reactions, (std::vector<std::string>{"Vul", "NotVul"}));
  EXPECT_EQ(d.find_action("comm")->reactions, (std::vector<std::string>{"Succ"}));
  EXPECT_EQ(d.reactions(), (std::vector<std::string>{"Vul", "NotVul", "Succ"}));
}

TEST(Validate, RobotDomainIsWellFormed) { EXPECT_TRUE(validate_theory(robot()).empty()); }

TEST(Validate, MissingSSA) {
  NDBATheory d = robot();
  d.ssas.erase(std::remove_if(d.ssas.begin(), d.ssas.end(), [](const SSADecl& s) { return s.fluent == "Vul"; }),
               d.ssas.end());
  auto fs = validate_theory(d);
  EXPECT_TRUE(has(fs, FindingCode::MissingSSA, "Vul"));
}

TEST(Validate, ReactionInAgentPrecondition) {
  NDBATheory d = mutated("poss_ag: At(i) & Connected(i, j)", "poss_ag: At(i) & Connected(i, j) & e = Vul");
  EXPECT_TRUE(has(validate_theory(d), FindingCode::ReactionInAgentPrecondition, "move"));
}

TEST(Validate, DuplicateSSA) {
  NDBATheory d = robot();
  d.ssas.push_back(*d.find_ssa("Risky"));
  EXPECT_TRUE(has(validate_theory(d), FindingCode::DuplicateSSA, "Risky"));
}

TEST(Validate, UndeclaredReactionInPrecondition) {
  NDBATheory d = mutated("poss: poss_ag & e = Succ", "poss: poss_ag & e = Vul");
  auto fs = validate_theory(d);
  EXPECT_TRUE(std::any_of(fs.begin(), fs.end(), [](const Finding& f) { return f.code == FindingCode::UndeclaredReaction; }));
}

TEST(Validate, NonClosedInitialState) {
  NDBATheory d = robot();
  d.initial.insert(GroundAtom{"At", {"I9"}});
  EXPECT_TRUE(has(validate_theory(d), FindingCode::NonClosedInitial, "At"));
}

TEST(Validate, DuplicateDeclarationWithinOneNamespace) {
  NDBATheory d = robot();
  d.fluents.push_back(FluentDecl{"Connected", {}});
  d.ssas.push_back(SSADecl{"Connected", {}, Variable{"a", Sort::action()}, Formula::fluent("Connected", {})});
  EXPECT_TRUE(has(validate_theory(d), FindingCode::DuplicateDeclaration, "Connected"));
}

TEST(Validate, FluentAndReactionMayShareAName) {
  // Vul is both a fluent and a reaction of move.
  EXPECT_NE(robot().find_fluent("Vul"), nullptr);
  EXPECT_TRUE(robot().is_reaction("Vul"));
  EXPECT_FALSE(has(validate_theory(robot()), FindingCode::DuplicateDeclaration, "Vul"));
}

TEST(Validate, ArityMismatchInAxiom) {
  NDBATheory d = robot();
  for (auto& s : d.ssas)
    if (s.fluent == "Risky") s.body = Formula::fluent("Risky", {});
  auto fs = validate_theory(d);
  EXPECT_TRUE(std::any_of(fs.begin(), fs.end(), [](const Finding& f) { return f.code == FindingCode::ArityMismatch; }));
}

TEST(Validate, DeterministicAndIdempotent) {
  NDBATheory d = robot();
  d.ssas.clear();
  EXPECT_EQ(validate_theory(d), validate_theory(d));
  auto fs = validate_theory(d);
  EXPECT_TRUE(std::is_sorted(fs.begin(), fs.end()));
  EXPECT_EQ(fs.size(), 3u);
}

TEST(ReactionRequirements, RobotPassesAtDepthFour) {
  auto rep = check_reaction_requirements(robot(), 4);
  EXPECT_TRUE(rep.passed());
  EXPECT_EQ(rep.depth, 4);
  EXPECT_GT(rep.situations_checked, 1u);
}

TEST(ReactionRequirements, PassIsMonotoneInDepth) {
  for (int depth = 1; depth <= 5; ++depth) EXPECT_TRUE(check_reaction_requirements(robot(), depth).passed()) << depth;
}

TEST(ReactionRequirements, ExistenceViolationIsFound) {
  // No reaction is admissible when the target is not risky.
  NDBATheory d = mutated("(~Risky(j) -> e = NotVul)", "(~Risky(j) -> false)");
  auto rep = check_reaction_requirements(d, 4);
  ASSERT_FALSE(rep.passed());
  EXPECT_EQ(rep.counterexamples.front().code, FindingCode::ReactionExistence);
  EXPECT_EQ(rep.counterexamples.front().subject, "move");
  // The first non-risky target is I3, reachable only after two moves.
  EXPECT_TRUE(check_reaction_requirements(d, 1).passed());
}

TEST(ReactionRequirements, IndependenceViolationIsFound) {
  NDBATheory d = mutated("poss: poss_ag & (Risky(j) -> (e = Vul | e = NotVul)) & (~Risky(j) -> e = NotVul)",
                         "poss: e = Vul");
  auto rep = check_reaction_requirements(d, 4);
  ASSERT_FALSE(rep.passed());
  EXPECT_TRUE(std::any_of(rep.counterexamples.begin(), rep.counterexamples.end(),
                          [](const Finding& f) { return f.code == FindingCode::ReactionIndependence; }));
}

TEST(ReactionRequirements, DepthMustBePositive) {
  try {
    check_reaction_requirements(robot(), 0);
    FAIL() << "expected DepthNonPositive";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DepthNonPositive);
  }
}

TEST(Theory, GroundActionEnumeration) {
  const auto& d = robot();
  EXPECT_EQ(d.ground_agent_actions().size(), 16u + 4u);
  EXPECT_EQ(d.ground_system_actions().size(), 16u * 2u + 4u);
  EXPECT_EQ(d.domain(Sort{"Location"}).size(), 4u);
  EXPECT_EQ(d.domain(Sort::reaction()).size(), 3u);
}
