#include <gtest/gtest.h>

#include "corpus.hpp"

using namespace ndcausal;
using namespace testing_support;

namespace {

constexpr std::size_t kCases = 200;

bool only_initial_situations(const Formula& f) {
  if (is_extended_kind(f.kind()) || f.is(FormulaKind::After) || f.is(FormulaKind::Poss) ||
      f.is(FormulaKind::PossAg) || f.is(FormulaKind::Time))
    return false;
  if (f.is(FormulaKind::Fluent) && !(f.sit() && f.sit()->is_s0())) return false;
  for (const auto& c : f.children())
    if (!only_initial_situations(c)) return false;
  return true;
}

}  // namespace

TEST(Structural, CertainlyImpliesPossiblyInValidSettings) {
  Generator g(31);
  std::size_t valid = 0, certain = 0;
  for (std::size_t i = 0; valid < kCases && i < 20 * kCases; ++i) {
    const NDBATheory& d = corpus(5, 12)[i % 12];
    Oracle o(d);
    const std::size_t n = static_cast<std::size_t>(g.between(1, 4));
    auto alpha = g.agent_sequence(d, o, n);
    const Formula phi = g.effect_where(d, true, [&](const Formula& f) { return o.nd_setting_valid(alpha, f); });
    if (!o.nd_setting_valid(alpha, phi)) continue;
    ++valid;
    const int t = g.between(0, static_cast<int>(n) - 1);
    const AgentAction beta = alpha[static_cast<std::size_t>(t)];
    const bool cc = o.ccauses(beta, t, phi, alpha).holds;
    if (cc) {
      ++certain;
      EXPECT_TRUE(o.pcauses(beta, t, phi, alpha).holds) << to_string(phi);
    }
  }
  EXPECT_GE(valid, kCases);
  EXPECT_GT(certain, 0u);
}

TEST(Structural, DeterministicDomainsCollapseTheNotions) {
  Generator g(32, GeneratorOptions{.deterministic = true});
  std::size_t valid = 0, held = 0;
  for (std::size_t i = 0; valid < kCases && i < 20 * kCases; ++i) {
    const NDBATheory& d = corpus(6, 10, true)[i % 10];
    Oracle o(d);
    const std::size_t n = static_cast<std::size_t>(g.between(1, 4));
    auto alpha = g.agent_sequence(d, o, n);
    const Formula phi = g.effect_where(d, true, [&](const Formula& f) { return o.nd_setting_valid(alpha, f); });
    if (!o.nd_setting_valid(alpha, phi)) continue;
    ++valid;
    const auto leaves = o.enumerate_executions(alpha, Situation::s0());
    ASSERT_EQ(leaves.size(), 1u);
    const int t = g.between(0, static_cast<int>(n) - 1);
    const AgentAction beta = g.chance(0.8) ? alpha[static_cast<std::size_t>(t)] : g.element(d.ground_agent_actions());
    const std::string& only = d.find_action(beta.name)->reactions.at(0);
    const bool c = o.causes(with_reaction(beta, Term::constant(only, Sort::reaction())), t, phi, leaves[0]);
    EXPECT_EQ(o.pcauses(beta, t, phi, alpha).holds, c);
    EXPECT_EQ(o.ccauses(beta, t, phi, alpha).holds, c);
    held += c ? 1 : 0;
  }
  EXPECT_GE(valid, kCases);
  EXPECT_GT(held, 0u);
}

TEST(Structural, DirectCausesAreCauses) {
  Generator g(33);
  std::size_t direct = 0;
  for (std::size_t i = 0; direct < kCases && i < 30 * kCases; ++i) {
    const NDBATheory& d = corpus(5, 12)[i % 12];
    Oracle o(d);
    const std::size_t n = static_cast<std::size_t>(g.between(1, 4));
    const Situation s = g.system_scenario(d, o, n);
    const int t = g.between(0, static_cast<int>(n) - 1);
    const Term a = g.chance(0.9) ? s.actions[static_cast<std::size_t>(t)] : g.element(d.ground_system_actions());
    const Formula phi = g.effect_where(d, true, [&](const Formula& f) { return !o.eval_at(f, Situation::s0()) && o.eval_at(f, s); });
    if (!o.causes_directly(a, t, phi, s)) continue;
    ++direct;
    EXPECT_TRUE(o.causes(a, t, phi, s)) << to_string(phi) << " in " << to_string(s);
  }
  EXPECT_GE(direct, kCases);
}

TEST(Structural, FixpointsArePureAndIdempotent) {
  Generator g(34);
  RegressionOptions opts;
  opts.simplify.use_initial_state = false;
  for (std::size_t i = 0; i < kCases; ++i) {
    const NDBATheory& d = corpus(5, 12)[i % 12];
    Oracle o(d);
    const CausalQuery q = g.query(d, o);
    Regressor r(d, opts);
    const RegressionResult res = r.regress_star(to_formula(q));
    ASSERT_TRUE(only_initial_situations(res.fixpoint)) << to_string(res.fixpoint);
    EXPECT_EQ(r.regress_one(res.fixpoint), res.fixpoint);
    EXPECT_EQ(r.simplify(res.fixpoint), res.fixpoint);
    EXPECT_EQ(r.regress_star(res.fixpoint).fixpoint, res.fixpoint);
    EXPECT_EQ(simplify(d, simplify(d, res.fixpoint)), simplify(d, res.fixpoint));
  }
}

TEST(Structural, SuppressUndoesRestore) {
  Generator g(35);
  std::size_t checked = 0;
  for (std::size_t i = 0; checked < kCases && i < 20 * kCases; ++i) {
    const NDBATheory& d = corpus(5, 12)[i % 12];
    Oracle o(d);
    const Formula phi = g.effect(d, 3);
    if (mentions(phi, FormulaKind::After) || mentions(phi, FormulaKind::Poss)) continue;
    const Situation s = g.system_scenario(d, o, static_cast<std::size_t>(g.between(0, 4)));
    EXPECT_EQ(suppress(restore(phi, s)), phi) << to_string(phi);
    const Formula psi = g.effect(d, 1);
    // restore commutes with the connectives.
    EXPECT_EQ(restore(Formula::neg(phi), s), Formula::neg(restore(phi, s)));
    EXPECT_EQ(restore(Formula::conj(phi, psi), s), Formula::conj(restore(phi, s), restore(psi, s)));
    const Variable v{fresh_name("v", variable_names(phi)), Sort{"Obj"}};
    EXPECT_EQ(restore(Formula::exists({v}, phi), s), Formula::exists({v}, restore(phi, s)));
    ++checked;
  }
  EXPECT_GE(checked, kCases);
}

TEST(Structural, DslRoundTrip) {
  Generator g(36);
  for (std::size_t i = 0; i < kCases; ++i) {
    const NDBATheory& d = corpus(5, 12)[i % 12];
    const std::string text = print_domain(d);
    auto parsed = parse_domain(text);
    ASSERT_TRUE(parsed.ok()) << text << (parsed.diagnostics.empty() ? "" : format(parsed.diagnostics[0]));
    EXPECT_EQ(print_domain(*parsed.value), text);
    EXPECT_EQ(*parsed.value, d);

    Oracle o(d);
    const CausalQuery q = g.query(d, o);
    auto back = parse_query(print_query(q), d);
    ASSERT_TRUE(back.ok()) << print_query(q) << (back.diagnostics.empty() ? "" : format(back.diagnostics[0]));
    EXPECT_EQ(*back.value, q) << print_query(q);
  }
}
