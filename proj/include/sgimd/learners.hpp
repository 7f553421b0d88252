#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sgimd/environment.hpp"
#include "sgimd/interest_map.hpp"
#include "sgimd/memory.hpp"
#include "sgimd/policy_explorer.hpp"
#include "sgimd/task_explorer.hpp"
#include "sgimd/teachers.hpp"

namespace sgimd {

enum class Strategy { random, sagg_riac, imitation, observation, sgim_d };

std::string to_string(Strategy s);
/// Accepts the to_string() names; throws ConfigError otherwise.
Strategy strategy_from_string(const std::string& s);
bool is_social(Strategy s);

struct LearnerConfig {
  Strategy strategy = Strategy::sgim_d;
  std::size_t total_episodes = 5000;
  /// Executed policies between demonstrations; 0 disables demonstrations.
  std::size_t demo_period = 30;
  Box task_space = kUnitTaskSpace;
  RegionParams regions;
  GoalSelectionParams goals;
  ExplorerParams explorer;
  TileGrid teaching_grid;
  std::size_t checkpoint_period = 1000;
  std::uint64_t rng_seed = 0;

  /// Throws ConfigError on inconsistent values.
  void validate() const;
};

/// One logged episode. Goal-less strategies leave goal, J and mode empty.
struct RunRow {
  std::uint64_t episode = 0;
  StrategyTag tag = StrategyTag::autonomous;
  std::string mode;
  std::optional<Goal> goal;
  PolicyParams params;
  Outcome outcome;
  std::optional<double> J;
};

struct RunRecord {
  LearnerConfig config;
  EpisodicMemory memory;
  std::vector<RunRow> rows;
  /// Goals chosen by the learner itself (decide_goal), in order.
  std::vector<Goal> self_goals;
  std::size_t executed = 0;
  std::size_t demonstrations = 0;
  std::size_t goal_pursuits = 0;
  std::size_t leaves = 0;
  std::string region_snapshot;  // JSON, empty for goal-less strategies
  std::vector<std::string> warnings;
};

/// Called with the policy count (executed, or watched for the observer)
/// each time it reaches a multiple of the checkpoint period.
using CheckpointFn = std::function<void(std::size_t policies, const EpisodicMemory& memory)>;

/// Independent seeds for the learner's own choices, the environment noise and
/// the teacher's selections, all derived from one run seed.
struct RunSeeds {
  std::uint64_t learner;
  std::uint64_t environment;
  std::uint64_t teacher;

  static RunSeeds from(std::uint64_t run_seed);
};

RunRecord run_sgim_d(const LearnerConfig& cfg, Environment& env, const DemonstrationSet* teacher,
                     const CheckpointFn& checkpoint = {});
RunRecord run_sagg_riac(const LearnerConfig& cfg, Environment& env, const CheckpointFn& checkpoint = {});
RunRecord run_random(const LearnerConfig& cfg, Environment& env, const CheckpointFn& checkpoint = {});
RunRecord run_imitation(const LearnerConfig& cfg, Environment& env, const DemonstrationSet& teacher,
                        const CheckpointFn& checkpoint = {});
/// Watches one demonstration per period and executes nothing; env only
/// supplies the arm's rest outcome.
RunRecord run_observation(const LearnerConfig& cfg, const Environment& env, const DemonstrationSet& teacher,
                          const CheckpointFn& checkpoint = {});

/// Dispatches on cfg.strategy. Social strategies require a teacher.
RunRecord run_learner(const LearnerConfig& cfg, Environment& env, const DemonstrationSet* teacher,
                      const CheckpointFn& checkpoint = {});

/// Run CSV: episode, strategy_tag, mode, goal_x, goal_y, theta1..theta25, tau_x, tau_y, J.
void write_run_csv(const std::string& path, const RunRecord& run);
std::string run_csv(const RunRecord& run);
/// JSON sidecar with the configuration and derived counters.
std::string run_sidecar_json(const RunRecord& run);

}  // namespace sgimd
