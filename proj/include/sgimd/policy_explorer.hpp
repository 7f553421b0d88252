#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "sgimd/environment.hpp"
#include "sgimd/memory.hpp"
#include "sgimd/nelder_mead.hpp"
#include "sgimd/rng.hpp"

namespace sgimd {

/// How the simplex is completed when the local neighbourhood holds fewer
/// than 25 seeds.
enum class SimplexPadding {
  memory_neighbors,  // nearest stored policies, values already known
  perturbation,      // init + 0.05 e_i, each costing one execution
};

struct ExplorerParams {
  std::size_t h_max = 12;
  std::size_t k_max = 4;
  double dist_m = 0.3;
  double dist_n = 0.3;
  double h_beta = 0.02;
  double alpha = 0.5;
  double eps_goal = 0.05;
  std::size_t goal_budget = 12;
  std::size_t n_im = 5;
  double eps_max = 0.4;
  SimplexPadding padding = SimplexPadding::memory_neighbors;
};

/// Executes policies against the environment and records them in memory.
/// Every execution is reported to the optional observer.
class PolicyRunner {
 public:
  using Observer = std::function<void(const Episode&)>;

  PolicyRunner(Environment& env, EpisodicMemory& memory) : env_(env), memory_(memory) {}

  Episode execute(const PolicyParams& params, StrategyTag tag);
  /// Records an observed (not executed) episode.
  Episode observe(const PolicyParams& params, Outcome outcome);

  std::size_t executed() const { return executed_; }
  EpisodicMemory& memory() { return memory_; }
  const EpisodicMemory& memory() const { return memory_; }
  Environment& environment() { return env_; }
  void set_observer(Observer obs) { observer_ = std::move(obs); }

 private:
  Environment& env_;
  EpisodicMemory& memory_;
  Observer observer_;
  std::size_t executed_ = 0;
};

/// Reliability of one anchor episode for reaching a goal.
struct LocalityScore {
  std::size_t anchor = 0;               // memory position
  std::vector<Neighbor> neighbor_set;   // K_h, by policy distance to the anchor
  double outcome_distance = 0.0;        // dist(tau_h, goal)
  double variance = 0.0;                // var_h of neighbour outcomes
  double score = 0.0;                   // outcome_distance + alpha * variance
};

/// Scores every anchor of H: the h_max outcome-nearest episodes within dist_m
/// of the goal, or the plain h_max nearest when none is that close.
std::vector<LocalityScore> score_localities(Goal goal, const EpisodicMemory& memory, const ExplorerParams& params);

/// Most reliable locality (lowest score, first in H order on ties).
/// Throws EmptyMemoryError on an empty memory.
LocalityScore local_data(Goal goal, const EpisodicMemory& memory, const ExplorerParams& params = {});

/// Mean of 2-D outcomes' squared deviation from their centroid.
double outcome_variance(const EpisodicMemory& memory, const std::vector<Neighbor>& set);

/// Gaussian-weighted blend of the locality's policies, weights
/// exp(-d^2 / (2 h_beta^2)) on the outcome distance to the goal. Also the
/// inverse model used at evaluation time.
PolicyParams infer_policy(Goal goal, const LocalityScore& locality, const EpisodicMemory& memory, double h_beta);

PolicyParams global_explore(Rng& rng);

struct PolicySeed {
  PolicyParams params;
  std::optional<double> value;
};

using PolicyObjective = std::function<double(const PolicyParams&)>;

/// Nelder-Mead over the 25-D policy box. The simplex is init plus up to 25
/// distinct seeds, padded with init + 0.05 e_i. Seeds with known values are not
/// re-evaluated. Stops when the best value drops below tol or the evaluation
/// budget is spent.
OptimizerState nelder_mead(const PolicyObjective& objective, const PolicySeed& init,
                           const std::vector<PolicySeed>& seeds, std::size_t max_evals, double tol);

PolicyParams to_policy(std::span<const double> point);

/// Executes n_im copies of theta_d perturbed by a random vector of norm below
/// eps_max (uniform direction and radius), tagged as imitation.
std::vector<Episode> imitate_policy(const PolicyParams& demonstrated, PolicyRunner& runner, Rng& rng,
                                    std::size_t n_im, double eps_max);

enum class Regime { global, local };

struct PursuitResult {
  std::vector<Episode> episodes;
  std::vector<Regime> regimes;  // one entry per regime draw
  double best_distance = 0.0;   // to the goal
  bool reached = false;         // normalized distance fell below eps_goal
};

/// Probability of the global-exploration regime: min(1, D(tau_close, goal) / D(goal, origin)).
double global_probability(Goal goal, Outcome closest, Outcome origin);

/// Works toward one goal with at most `budget` executions. Each round draws
/// global exploration with global_probability(), else runs local
/// optimization: execute the inferred policy, then Nelder-Mead on the rest of
/// the budget. Stops early once the goal is reached within eps_goal.
PursuitResult goal_directed_optimization(Goal goal, Outcome origin, PolicyRunner& runner, Rng& rng,
                                         const ExplorerParams& params, std::size_t budget);

}  // namespace sgimd
