#include <gtest/gtest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <map>

#include "sgimd/task_explorer.hpp"

using namespace sgimd;

namespace {

RegionTree fuzzed_tree(std::uint64_t seed, int goals) {
  RegionTree tree(kUnitTaskSpace);
  Rng rng(seed);
  for (int i = 0; i < goals; ++i) {
    const Goal g{rng.uniform(-1, 1), rng.uniform(-1, 1)};
    // competence that improves over time on the right half only
    const double c = g.x > 0 ? -1.0 + std::min(1.0, i / 400.0) * rng.uniform() : -0.5;
    tree.update(g, c);
  }
  return tree;
}

}  // namespace

TEST(RegionProbabilities, HandCases) {
  const std::vector<double> three{0.2, 0.6, 0.2};
  const auto p = interest_probabilities(three);
  ASSERT_EQ(p.size(), 3u);
  EXPECT_EQ(p[0], 0.0);
  EXPECT_EQ(p[1], 1.0);
  EXPECT_EQ(p[2], 0.0);

  const std::vector<double> equal(5, 0.3);
  for (double v : interest_probabilities(equal)) EXPECT_DOUBLE_EQ(v, 0.2);

  const std::vector<double> mixed{0.1, 0.3, 0.6};
  const auto q = interest_probabilities(mixed);
  EXPECT_NEAR(q[0], 0.0, 1e-15);
  EXPECT_NEAR(q[1], 0.2 / 0.7, 1e-15);
  EXPECT_NEAR(q[2], 0.5 / 0.7, 1e-15);
}

TEST(DecideGoal, ModeOneFollowsRegionProbabilities) {
  const RegionTree tree = fuzzed_tree(3, 600);
  const auto p = region_probabilities(tree);
  ASSERT_GE(p.size(), 3u);
  GoalSelectionParams only_interest{1.0, 0.0, 0.0, 0.05};
  Rng rng(11);
  std::map<std::uint64_t, int> hits;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    const auto c = decide_goal(tree, rng, only_interest);
    ASSERT_EQ(c.mode, GoalMode::m1_interest);
    ++hits[*c.source_region];
    const auto& leaf = tree.leaves()[tree.locate(c.goal)];
    ASSERT_EQ(leaf.id, *c.source_region);
  }
  double chi2 = 0.0;
  int dof = -1;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const int observed = hits[tree.leaves()[i].id];
    if (p[i] == 0.0) {
      EXPECT_EQ(observed, 0) << "zero-probability leaf drawn";
      continue;
    }
    const double expected = p[i] * n;
    chi2 += (observed - expected) * (observed - expected) / expected;
    ++dof;
  }
  ASSERT_GT(dof, 0);
  const boost::math::chi_squared dist(dof);
  EXPECT_GT(boost::math::cdf(boost::math::complement(dist, chi2)), 0.01);
}

TEST(DecideGoal, ModeTwoIsUniformOverQuadrants) {
  const RegionTree tree = fuzzed_tree(4, 200);
  GoalSelectionParams only_uniform{0.0, 1.0, 0.0, 0.05};
  Rng rng(12);
  std::array<int, 4> quad{};
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    const auto c = decide_goal(tree, rng, only_uniform);
    ASSERT_EQ(c.mode, GoalMode::m2_uniform);
    ++quad[(c.goal.x >= 0 ? 1 : 0) + (c.goal.y >= 0 ? 2 : 0)];
  }
  const double sigma = std::sqrt(n * 0.25 * 0.75);
  for (int q : quad) EXPECT_LT(std::abs(q - n / 4.0), 3 * sigma);
}

TEST(DecideGoal, ModeThreeStaysNearWeakestGoal) {
  const RegionTree tree = fuzzed_tree(5, 300);
  GoalSelectionParams only_refine{0.0, 0.0, 1.0, 0.05};
  Rng rng(13);
  const double radius = 0.05 * kUnitTaskSpace.diameter();
  for (int i = 0; i < 2000; ++i) {
    const auto c = decide_goal(tree, rng, only_refine);
    ASSERT_EQ(c.mode, GoalMode::m3_refine);
    const Region* leaf = nullptr;
    for (const auto& r : tree.leaves())
      if (r.id == *c.source_region) leaf = &r;
    ASSERT_NE(leaf, nullptr);
    EXPECT_LE(distance(c.goal, leaf->weakest()->goal), radius + 1e-12);
  }
}

TEST(DecideGoal, GoalsStayInTaskSpaceAndModesMix) {
  const RegionTree tree = fuzzed_tree(6, 500);
  Rng rng(14);
  std::map<GoalMode, int> modes;
  for (int i = 0; i < 10000; ++i) {
    const auto c = decide_goal(tree, rng);
    ASSERT_TRUE(kUnitTaskSpace.contains(c.goal));
    ++modes[c.mode];
  }
  EXPECT_NEAR(modes[GoalMode::m1_interest] / 10000.0, 0.7, 0.02);
  EXPECT_NEAR(modes[GoalMode::m2_uniform] / 10000.0, 0.2, 0.02);
  EXPECT_NEAR(modes[GoalMode::m3_refine] / 10000.0, 0.1, 0.02);
}

TEST(EmulateGoal, ClipsIntoTaskSpace) {
  EXPECT_EQ(emulate_goal({0.2, -0.4}, kUnitTaskSpace), (Goal{0.2, -0.4}));
  EXPECT_EQ(emulate_goal({1.4, -2.0}, kUnitTaskSpace), (Goal{1.0, -1.0}));
}
