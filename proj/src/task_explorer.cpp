#include "sgimd/task_explorer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace sgimd {

std::string to_string(GoalMode mode) {
  switch (mode) {
    case GoalMode::m1_interest: return "m1_interest";
    case GoalMode::m2_uniform: return "m2_uniform";
    case GoalMode::m3_refine: return "m3_refine";
  }
  return "m2_uniform";
}

std::vector<double> interest_probabilities(std::span<const double> interests) {
  if (interests.empty()) return {};
  std::vector<double> p(interests.size(), 0.0);
  const double lowest = *std::min_element(interests.begin(), interests.end());
  double total = 0.0;
  for (std::size_t i = 0; i < interests.size(); ++i) {
    p[i] = interests[i] - lowest;
    total += p[i];
  }
  if (!(total > 0.0)) {
    std::fill(p.begin(), p.end(), 1.0 / static_cast<double>(p.size()));
    return p;
  }
  for (double& v : p) v /= total;
  return p;
}

std::vector<double> region_probabilities(const RegionTree& tree) {
  std::vector<double> interests;
  for (const auto& r : tree.leaves()) interests.push_back(r.interest);
  return interest_probabilities(interests);
}

std::size_t sample_region(const RegionTree& tree, Rng& rng) {
  const auto p = region_probabilities(tree);
  const double u = rng.uniform();
  double cum = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    cum += p[i];
    last_positive = i;
    if (u < cum) return i;
  }
  return last_positive;  // rounding at the top end
}

namespace {

Vec2 uniform_in(const Box& b, Rng& rng) {
  return {rng.uniform(b.lo.x, b.hi.x), rng.uniform(b.lo.y, b.hi.y)};
}

}  // namespace

GoalChoice decide_goal(const RegionTree& tree, Rng& rng, const GoalSelectionParams& params) {
  const double total = params.p_interest + params.p_uniform + params.p_refine;
  if (!(total > 0.0)) throw ConfigError("goal mode probabilities must not all be zero");
  const double u = rng.uniform() * total;
  GoalChoice choice;
  if (u < params.p_interest) {
    const auto& leaf = tree.leaves()[sample_region(tree, rng)];
    choice.mode = GoalMode::m1_interest;
    choice.source_region = leaf.id;
    choice.goal = uniform_in(leaf.bounds, rng);
  } else if (u < params.p_interest + params.p_uniform) {
    choice.mode = GoalMode::m2_uniform;
    choice.goal = uniform_in(tree.task_space(), rng);
  } else {
    const auto& leaf = tree.leaves()[sample_region(tree, rng)];
    choice.mode = GoalMode::m3_refine;
    choice.source_region = leaf.id;
    const auto weakest = leaf.weakest();
    if (!weakest) {
      choice.goal = uniform_in(leaf.bounds, rng);
    } else {
      const double radius = params.refine_fraction * tree.task_space().diameter();
      const double r = radius * std::sqrt(rng.uniform());
      const double a = 2.0 * std::numbers::pi * rng.uniform();
      choice.goal = tree.task_space().clip(weakest->goal + Vec2{r * std::cos(a), r * std::sin(a)});
    }
  }
  return choice;
}

Goal emulate_goal(Outcome demonstrated, const Box& task_space) { return task_space.clip(demonstrated); }

}  // namespace sgimd
