#include "sgimd/policy_explorer.hpp"

#include <algorithm>
#include <cmath>

namespace sgimd {

Episode PolicyRunner::execute(const PolicyParams& params, StrategyTag tag) {
  Episode e;
  e.index = memory_.next_index();
  e.tag = tag;
  e.params = params;
  e.outcome = env_.execute(params);
  memory_.record(e);
  ++executed_;
  if (observer_) observer_(e);
  return e;
}

Episode PolicyRunner::observe(const PolicyParams& params, Outcome outcome) {
  Episode e;
  e.index = memory_.next_index();
  e.tag = StrategyTag::demonstration;
  e.params = params;
  e.outcome = outcome;
  memory_.record(e);
  if (observer_) observer_(e);
  return e;
}

double outcome_variance(const EpisodicMemory& memory, const std::vector<Neighbor>& set) {
  if (set.empty()) return 0.0;
  Vec2 mean;
  for (const auto& n : set) mean = mean + memory[n.position].outcome;
  mean = mean * (1.0 / static_cast<double>(set.size()));
  double v = 0.0;
  for (const auto& n : set) v += squared_distance(memory[n.position].outcome, mean);
  return v / static_cast<double>(set.size());
}

std::vector<LocalityScore> score_localities(Goal goal, const EpisodicMemory& memory, const ExplorerParams& params) {
  auto anchors = memory.nearest_outcomes(goal, params.h_max);
  std::vector<Neighbor> close;
  for (const auto& a : anchors)
    if (a.distance < params.dist_m) close.push_back(a);
  if (!close.empty()) anchors = std::move(close);

  std::vector<LocalityScore> scores;
  scores.reserve(anchors.size());
  for (const auto& a : anchors) {
    LocalityScore s;
    s.anchor = a.position;
    s.outcome_distance = a.distance;
    s.neighbor_set = memory.nearest_policies(memory[a.position].params, params.dist_n);
    if (s.neighbor_set.size() > params.k_max) s.neighbor_set.resize(params.k_max);
    s.variance = outcome_variance(memory, s.neighbor_set);
    s.score = s.outcome_distance + params.alpha * s.variance;
    scores.push_back(std::move(s));
  }
  return scores;
}

LocalityScore local_data(Goal goal, const EpisodicMemory& memory, const ExplorerParams& params) {
  auto scores = score_localities(goal, memory, params);
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i)
    if (scores[i].score < scores[best].score) best = i;
  return std::move(scores[best]);
}

PolicyParams infer_policy(Goal goal, const LocalityScore& locality, const EpisodicMemory& memory, double h_beta) {
  const auto& set = locality.neighbor_set;
  if (set.empty()) return memory[locality.anchor].params;
  std::vector<double> d2(set.size());
  double d2_min = INFINITY;
  for (std::size_t k = 0; k < set.size(); ++k) {
    d2[k] = squared_distance(memory[set[k].position].outcome, goal);
    d2_min = std::min(d2_min, d2[k]);
  }
  // shifting by the smallest distance avoids underflow of every weight
  std::array<double, kParamDim> blend{};
  double total = 0.0;
  for (std::size_t k = 0; k < set.size(); ++k) {
    const double w = std::exp(-(d2[k] - d2_min) / (2.0 * h_beta * h_beta));
    total += w;
    const auto& theta = memory[set[k].position].params.values();
    for (std::size_t i = 0; i < kParamDim; ++i) blend[i] += w * theta[i];
  }
  for (double& v : blend) v /= total;
  return PolicyParams::clamped(blend);
}

PolicyParams global_explore(Rng& rng) { return random_policy(rng); }

PolicyParams to_policy(std::span<const double> point) { return PolicyParams::clamped(point); }

OptimizerState nelder_mead(const PolicyObjective& objective, const PolicySeed& init,
                           const std::vector<PolicySeed>& seeds, std::size_t max_evals, double tol) {
  if (max_evals == 0) throw InvalidParams("nelder_mead needs a positive evaluation budget");
  std::vector<SimplexVertex> simplex;
  simplex.reserve(kParamDim + 1);
  auto as_vector = [](const PolicyParams& p) { return std::vector<double>(p.values().begin(), p.values().end()); };
  simplex.push_back({as_vector(init.params), init.value});
  for (const auto& s : seeds) {
    if (simplex.size() == kParamDim + 1) break;
    const bool duplicate = std::any_of(simplex.begin(), simplex.end(), [&](const SimplexVertex& v) {
      double d = 0.0;
      for (std::size_t i = 0; i < kParamDim; ++i) d += (v.point[i] - s.params[i]) * (v.point[i] - s.params[i]);
      return d < 1e-18;
    });
    if (!duplicate) simplex.push_back({as_vector(s.params), s.value});
  }
  const auto pad = axis_simplex(simplex.front().point, 0.05);
  for (std::size_t i = 1; simplex.size() < kParamDim + 1; ++i) simplex.push_back(pad[i]);

  SimplexOptions opt;
  opt.max_evals = max_evals;
  opt.target = tol;
  const Objective f = [&](std::span<const double> x) { return objective(to_policy(x)); };
  return minimize_simplex(f, std::move(simplex), opt);
}

std::vector<Episode> imitate_policy(const PolicyParams& demonstrated, PolicyRunner& runner, Rng& rng,
                                    std::size_t n_im, double eps_max) {
  std::vector<Episode> out;
  out.reserve(n_im);
  for (std::size_t k = 0; k < n_im; ++k) {
    std::array<double, kParamDim> dir{};
    double norm = 0.0;
    while (norm == 0.0) {
      for (double& v : dir) v = rng.normal();
      norm = 0.0;
      for (double v : dir) norm += v * v;
      norm = std::sqrt(norm);
    }
    const double radius = eps_max * rng.uniform();
    std::array<double, kParamDim> theta{};
    for (std::size_t i = 0; i < kParamDim; ++i) theta[i] = demonstrated[i] + radius * dir[i] / norm;
    out.push_back(runner.execute(PolicyParams::clamped(theta), StrategyTag::imitation));
  }
  return out;
}

double global_probability(Goal goal, Outcome closest, Outcome origin) {
  const double norm = distance(goal, origin);
  if (!(norm > 0.0)) return distance(closest, goal) > 0.0 ? 1.0 : 0.0;
  return std::min(1.0, distance(closest, goal) / norm);
}

PursuitResult goal_directed_optimization(Goal goal, Outcome origin, PolicyRunner& runner, Rng& rng,
                                         const ExplorerParams& params, std::size_t budget) {
  PursuitResult result;
  result.best_distance = INFINITY;
  const double goal_norm = std::max(distance(goal, origin), 1e-12);
  const double target = params.eps_goal * goal_norm;
  EpisodicMemory& memory = runner.memory();

  auto run = [&](const PolicyParams& theta) {
    const Episode e = runner.execute(theta, StrategyTag::autonomous);
    result.episodes.push_back(e);
    const double d = distance(e.outcome, goal);
    result.best_distance = std::min(result.best_distance, d);
    if (d < target) result.reached = true;
    return d;
  };

  std::size_t remaining = budget;
  while (remaining > 0 && !result.reached) {
    bool global = true;
    if (!memory.empty()) {
      const auto closest = memory.nearest_outcomes(goal, 1).front();
      global = rng.bernoulli(global_probability(goal, memory[closest.position].outcome, origin));
    }
    result.regimes.push_back(global ? Regime::global : Regime::local);
    if (global) {
      run(global_explore(rng));
      --remaining;
      continue;
    }

    const LocalityScore loc = local_data(goal, memory, params);
    const PolicyParams guess = infer_policy(goal, loc, memory, params.h_beta);
    const double guess_value = run(guess);
    --remaining;
    if (remaining == 0 || result.reached) break;

    std::vector<PolicySeed> seeds;
    for (const auto& n : loc.neighbor_set)
      seeds.push_back({memory[n.position].params, distance(memory[n.position].outcome, goal)});
    if (params.padding == SimplexPadding::memory_neighbors) {
      for (const auto& n : memory.nearest_policies_k(guess, 2 * kParamDim))
        seeds.push_back({memory[n.position].params, distance(memory[n.position].outcome, goal)});
    }
    const PolicyObjective objective = [&](const PolicyParams& theta) { return run(theta); };
    const std::size_t before = result.episodes.size();
    nelder_mead(objective, {guess, guess_value}, seeds, remaining, target);
    remaining -= std::min(remaining, result.episodes.size() - before);
    break;  // the local optimizer owns the rest of the budget
  }
  return result;
}

}  // namespace sgimd
