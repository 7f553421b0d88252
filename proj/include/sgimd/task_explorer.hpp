#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sgimd/interest_map.hpp"
#include "sgimd/rng.hpp"
#include "sgimd/types.hpp"

namespace sgimd {

enum class GoalMode { m1_interest, m2_uniform, m3_refine };

std::string to_string(GoalMode mode);

struct GoalChoice {
  Goal goal;
  GoalMode mode = GoalMode::m2_uniform;
  std::optional<std::uint64_t> source_region;
};

struct GoalSelectionParams {
  double p_interest = 0.7;
  double p_uniform = 0.2;
  double p_refine = 0.1;
  /// Refinement radius as a fraction of the task-space diameter.
  double refine_fraction = 0.05;
};

/// Selection probabilities (interest_n - min) / sum(interest_i - min);
/// uniform when every interest is the same.
std::vector<double> interest_probabilities(std::span<const double> interests);

/// interest_probabilities over the tree's leaves.
std::vector<double> region_probabilities(const RegionTree& tree);

/// Draws a leaf position from the probabilities above.
std::size_t sample_region(const RegionTree& tree, Rng& rng);

/// Picks the next self-generated goal: mode 1 samples uniformly inside an
/// interest-weighted leaf, mode 2 uniformly in T, mode 3 near the weakest
/// goal of an interest-weighted leaf (clipped to T).
GoalChoice decide_goal(const RegionTree& tree, Rng& rng, const GoalSelectionParams& params = {});

/// A demonstrated outcome adopted as the current goal, clipped into T.
Goal emulate_goal(Outcome demonstrated, const Box& task_space);

}  // namespace sgimd
