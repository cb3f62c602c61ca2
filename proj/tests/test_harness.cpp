#include <gtest/gtest.h>

#include <cmath>

#include "freequiver/errors.hpp"
#include "freequiver/harness.hpp"
#include "freequiver/library_maps.hpp"

using namespace freequiver;

namespace {

TrialPlan sch_plan(std::uint64_t seed, int trials) {
  TrialPlan plan;
  plan.master_seed = seed;
  plan.trials = trials;
  plan.dim_profiles = {Dims{{"u", 2}, {"v", 3}}, Dims{{"u", 3}, {"v", 1}}, Dims{{"u", 1}, {"v", 2}}};
  return plan;
}

TrialPlan loop_plan(std::uint64_t seed, int trials) {
  TrialPlan plan;
  plan.master_seed = seed;
  plan.trials = trials;
  plan.dim_profiles = {Dims{{"u", 2}}, Dims{{"u", 3}}, Dims{{"u", 4}}};
  return plan;
}

const CheckSummary& find(const ConformanceReport& r, const std::string& name) {
  for (const auto& c : r.checks) {
    if (c.name == name) return c;
  }
  throw std::runtime_error("missing check " + name);
}

}  // namespace

TEST(Harness, CheckNames) {
  EXPECT_EQ(check_name(CheckKind::DirectSum), "direct_sum");
  EXPECT_EQ(check_name(CheckKind::Similarity), "similarity");
  EXPECT_EQ(check_name(CheckKind::Intertwine), "intertwine");
  EXPECT_EQ(check_name(CheckKind::LemmaPart1), "lemma_part1");
}

TEST(Harness, TrialSeedsAreStableAndDistinct) {
  EXPECT_EQ(trial_seed(7, 3, CheckKind::DirectSum), trial_seed(7, 3, CheckKind::DirectSum));
  EXPECT_NE(trial_seed(7, 3, CheckKind::DirectSum), trial_seed(7, 4, CheckKind::DirectSum));
  EXPECT_NE(trial_seed(7, 3, CheckKind::DirectSum), trial_seed(7, 3, CheckKind::Similarity));
  EXPECT_NE(trial_seed(7, 3, CheckKind::DirectSum), trial_seed(8, 3, CheckKind::DirectSum));
}

TEST(Harness, RejectsEmptyPlans) {
  TrialPlan plan = sch_plan(1, 0);
  EXPECT_THROW(run_conformance(schur_map(), plan), Error);
  plan = sch_plan(1, 2);
  plan.dim_profiles.clear();
  EXPECT_THROW(run_conformance(schur_map(), plan), Error);
  plan = sch_plan(1, 2);
  plan.dim_profiles = {Dims{{"u", 2}}};
  EXPECT_THROW(run_conformance(schur_map(), plan), ShapeError);
}

TEST(Harness, BuiltinsPass) {
  for (const FreeMapDef& f : {schur_map(), ppt_map(Pivot::D), ppt_map(Pivot::A), block_inverse_map()}) {
    const ConformanceReport r = run_conformance(f, sch_plan(11, 6));
    EXPECT_TRUE(r.all_passed());
    for (const auto& c : r.checks) {
      EXPECT_EQ(c.executed + c.skipped, 6);
      EXPECT_GT(c.executed, 0);
    }
  }
}

TEST(Harness, RandomPolynomialsPass) {
  for (std::uint64_t s = 0; s < 5; ++s) {
    EXPECT_TRUE(run_conformance(random_polynomial_map(sch_quiver(), 3, s), sch_plan(20 + s, 4)).all_passed());
    EXPECT_TRUE(run_conformance(random_polynomial_map(classical_embed(2), 3, s), loop_plan(30 + s, 4)).all_passed());
  }
}

TEST(Harness, IntertwinersAreNontrivial) {
  // Transposition commutes with direct sums and fails to commute with Gamma.
  const FreeMapDef f = identity_map(classical_embed(2));
  const MapUnderTest transpose = [](const Rep& x) {
    std::vector<Matrix> mats;
    for (const auto& m : x.mats()) mats.push_back(m.transpose());
    return x.with_mats(mats);
  };
  TrialPlan plan = loop_plan(40, 4);
  plan.checks = {CheckKind::Intertwine};
  const ConformanceReport r = run_conformance(f, plan, transpose);
  EXPECT_FALSE(r.all_passed());
  EXPECT_EQ(r.checks[0].failing_seeds.size(), 4u);
}

TEST(Harness, DetectsNonFreeMaps) {
  const FreeMapDef f = identity_map(classical_embed(1));
  // Entrywise conjugation respects direct sums but not similarity.
  const MapUnderTest conj = [](const Rep& x) {
    std::vector<Matrix> mats;
    for (const auto& m : x.mats()) mats.push_back(m.conjugate());
    return x.with_mats(mats);
  };
  const ConformanceReport r = run_conformance(f, loop_plan(41, 5), conj);
  EXPECT_EQ(find(r, "direct_sum").passed, 5);
  EXPECT_EQ(find(r, "similarity").passed, 0);
  EXPECT_EQ(find(r, "similarity").failing_seeds.size(), 5u);
  EXPECT_FALSE(r.all_passed());
}

TEST(Harness, ExceptionsBecomeFailures) {
  const FreeMapDef f = identity_map(classical_embed(1));
  const MapUnderTest broken = [](const Rep&) -> Rep { throw Error("boom"); };
  TrialPlan plan = loop_plan(42, 2);
  plan.checks = {CheckKind::DirectSum};
  const ConformanceReport r = run_conformance(f, plan, broken);
  EXPECT_EQ(r.checks[0].passed, 0);
  EXPECT_TRUE(std::isinf(r.checks[0].max_residual));
  EXPECT_EQ(r.checks[0].note, "boom");
}

TEST(Harness, SingularPointsAreSkipped) {
  // The inverted node evaluates to zero at every point.
  const Quiver q = classical_embed(1);
  const FreeMapDef f(q, q, std::vector<Expr>{inv(Expr::atom("x") - Expr::atom("x"))});
  const ConformanceReport r = run_conformance(f, loop_plan(43, 3));
  for (const auto& c : r.checks) {
    EXPECT_EQ(c.skipped, 3);
    EXPECT_EQ(c.executed, 0);
  }
  EXPECT_TRUE(r.all_passed());
}

TEST(Harness, ThreadCountDoesNotChangeResults) {
  TrialPlan one = sch_plan(50, 6);
  TrialPlan many = one;
  many.threads = 4;
  const ConformanceReport a = run_conformance(ppt_map(Pivot::D), one);
  const ConformanceReport b = run_conformance(ppt_map(Pivot::D), many);
  ASSERT_EQ(a.checks.size(), b.checks.size());
  for (std::size_t i = 0; i < a.checks.size(); ++i) {
    EXPECT_EQ(a.checks[i].max_residual, b.checks[i].max_residual);
    EXPECT_EQ(a.checks[i].passed, b.checks[i].passed);
    EXPECT_EQ(a.checks[i].skipped, b.checks[i].skipped);
  }
}

TEST(Harness, LemmaPart1OnPpt) {
  TrialPlan plan = sch_plan(60, 3);
  plan.checks = {CheckKind::LemmaPart1};
  const ConformanceReport r = run_conformance(ppt_map(Pivot::D), plan);
  const CheckSummary& c = find(r, "lemma_part1");
  EXPECT_EQ(c.note, "conditional on sampled injectivity evidence");
  EXPECT_GT(c.executed, 0);
  EXPECT_TRUE(r.all_passed());
}

TEST(Harness, LemmaPart1SkipsNonBijectiveIdentification) {
  TrialPlan plan = sch_plan(61, 2);
  plan.checks = {CheckKind::LemmaPart1};
  const ConformanceReport r = run_conformance(schur_map(), plan);
  EXPECT_EQ(r.checks[0].skipped + r.checks[0].executed, 2);
}

TEST(Harness, RunCheckDirectly) {
  const FreeMapDef f = schur_map();
  const MapUnderTest apply = [&f](const Rep& x) { return eval_map(f, x); };
  const auto r = run_check(f, apply, CheckKind::Similarity, Dims{{"u", 2}, {"v", 2}}, Dims{{"u", 1}, {"v", 1}}, 9);
  ASSERT_TRUE(r.has_value());
  EXPECT_LE(*r, 1e-9);
}

TEST(ClassicalEmbed, PolynomialsAreFree) {
  const Quiver q = classical_embed(3);
  const Expr x = Expr::atom("x"), y = Expr::atom("y"), z = Expr::atom("z");
  const FreeMapDef f(q, Quiver({"u"}, {{"p", "u", "u"}}),
                     std::vector<Expr>{x * y * z - 2.0 * (z * z) + Expr::id("u")});
  TrialPlan plan = loop_plan(70, 5);
  plan.dim_profiles = {Dims{{"u", 2}}, Dims{{"u", 3}}};
  EXPECT_TRUE(run_conformance(f, plan).all_passed());
}
