#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sgimd/types.hpp"

namespace sgimd {

/// Similarity J in [-1, 0]: minus the distance to the goal normalized by the
/// goal's distance from the rest outcome, clamped at -1. Throws
/// DegenerateGoalError when goal coincides with origin.
double similarity_J(Goal goal, Outcome reached, Outcome origin);

/// Competence for a goal: best (largest) J over the outcomes obtained while
/// pursuing it. Throws MissingAttemptsError when there are none.
double competence(Goal goal, std::span<const Outcome> attempts, Outcome origin);

/// Competence progress over the last `window` entries of an old-to-new
/// history: |sum(older half) - sum(newer half)| / window. Shorter histories
/// are padded at the old end with their oldest entry; an empty history has
/// zero interest. Throws ConfigError unless window is positive and even.
double interest_of(std::span<const double> competences, std::size_t window);

struct RegionParams {
  std::size_t window = 10;  // zeta
  std::size_t max_goals = 30;  // g_max
};

struct GoalRecord {
  Goal goal;
  double competence = 0.0;
  std::uint64_t order = 0;  // global attempt counter, increasing
};

struct Region {
  std::uint64_t id = 0;
  Box bounds;
  std::vector<GoalRecord> history;  // attempt order
  double interest = 0.0;

  std::vector<double> competences() const;
  /// Record with the lowest competence; nullopt for an empty region.
  std::optional<GoalRecord> weakest() const;
};

struct SplitRecord {
  std::uint64_t parent = 0;
  std::uint64_t left = 0;
  std::uint64_t right = 0;
  std::size_t dim = 0;
  double cut = 0.0;
  bool fallback = false;  // midpoint cut, no feasible candidate
};

struct SplitResult {
  Region left;
  Region right;
  std::size_t dim = 0;
  double cut = 0.0;
  bool fallback = false;
};

/// Chooses the axis-aligned cut (each dimension x 9 quantiles of the stored
/// goal coordinates) maximizing the interest difference of the two halves,
/// with at least window/2 goals on each side. Ties go to the most balanced
/// cut, then the lowest dimension. Without a feasible cut, splits dimension 0
/// at its midpoint. Child ids are left at 0 for the caller to assign.
SplitResult split_region(const Region& region, const RegionParams& params);

/// Recursive partition of the task space into leaf regions.
class RegionTree {
 public:
  explicit RegionTree(Box task_space, RegionParams params = {});

  /// Appends a competence to the leaf containing goal, refreshes its interest
  /// and splits it once it holds more than max_goals entries. Returns the id
  /// of the leaf that received the goal. Throws OutOfBoundsError outside T.
  std::uint64_t update(Goal goal, double competence);

  const std::vector<Region>& leaves() const { return leaves_; }
  const std::vector<SplitRecord>& split_log() const { return splits_; }
  const Box& task_space() const { return task_space_; }
  const RegionParams& params() const { return params_; }

  /// Position in leaves() of the leaf containing p; throws OutOfBoundsError.
  std::size_t locate(Vec2 p) const;

  /// JSON list of {bounds, interest, n_goals}.
  std::string snapshot_json() const;

 private:
  bool leaf_contains(const Region& r, Vec2 p) const;

  Box task_space_;
  RegionParams params_;
  std::vector<Region> leaves_;
  std::vector<SplitRecord> splits_;
  std::uint64_t next_id_ = 1;
  std::uint64_t next_order_ = 0;
};

}  // namespace sgimd
