#include "sgimd/learners.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "sgimd/csv.hpp"

namespace sgimd {

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::random: return "random";
    case Strategy::sagg_riac: return "sagg_riac";
    case Strategy::imitation: return "imitation";
    case Strategy::observation: return "observation";
    case Strategy::sgim_d: return "sgim_d";
  }
  return "sgim_d";
}

Strategy strategy_from_string(const std::string& s) {
  for (Strategy v : {Strategy::random, Strategy::sagg_riac, Strategy::imitation, Strategy::observation,
                     Strategy::sgim_d})
    if (to_string(v) == s) return v;
  throw ConfigError("unknown strategy '" + s + "'");
}

bool is_social(Strategy s) {
  return s == Strategy::imitation || s == Strategy::observation || s == Strategy::sgim_d;
}

void LearnerConfig::validate() const {
  if (total_episodes == 0) throw ConfigError("total_episodes must be positive");
  if (checkpoint_period == 0) throw ConfigError("checkpoint_period must be positive");
  if ((strategy == Strategy::imitation || strategy == Strategy::observation) && demo_period == 0)
    throw ConfigError(to_string(strategy) + " needs a positive demo_period");
  if (!(task_space.hi.x > task_space.lo.x && task_space.hi.y > task_space.lo.y))
    throw ConfigError("task space must have positive extent");
  if (regions.window == 0 || regions.window % 2 != 0) throw ConfigError("window must be positive and even");
  if (explorer.goal_budget == 0) throw ConfigError("goal budget must be positive");
  if (explorer.n_im == 0) throw ConfigError("n_im must be positive");
  if (!(explorer.eps_max >= 0.0)) throw ConfigError("eps_max must be non-negative");
  const double p = goals.p_interest + goals.p_uniform + goals.p_refine;
  if (std::abs(p - 1.0) > 1e-9 || goals.p_interest < 0 || goals.p_uniform < 0 || goals.p_refine < 0)
    throw ConfigError("goal mode probabilities must be non-negative and sum to 1");
}

RunSeeds RunSeeds::from(std::uint64_t run_seed) {
  return {Rng::derive(run_seed, 0), Rng::derive(run_seed, 1), Rng::derive(run_seed, 2)};
}

namespace {

// Shared state of one run: the logged rows, the label of the current
// activity and the checkpoint schedule.
class Session {
 public:
  Session(const LearnerConfig& cfg, Environment& env, const CheckpointFn& checkpoint)
      : cfg_(cfg), env_(env), runner_(env, record_.memory), checkpoint_(checkpoint) {
    cfg.validate();
    record_.config = cfg;
    const RunSeeds seeds = RunSeeds::from(cfg.rng_seed);
    env_.reseed(seeds.environment);
    rng_ = Rng(seeds.learner);
    teacher_rng_ = Rng(seeds.teacher);
    origin_ = env.rest_outcome();
    runner_.set_observer([this](const Episode& e) { on_episode(e); });
  }

  void set_activity(std::string mode, std::optional<Goal> goal) {
    mode_ = std::move(mode);
    goal_ = goal;
  }

  std::size_t remaining() const { return cfg_.total_episodes - runner_.executed(); }

  // Fitted parameters of a demonstration, fitting raw ones on first use.
  const PolicyParams& demo_params(const DemonstrationSet& set, std::size_t i) {
    auto it = fitted_.find(i);
    if (it != fitted_.end()) return it->second;
    PolicyParams p;
    if (const auto* d = std::get_if<PolicyDemo>(&set.entries[i])) {
      p = d->params;
    } else {
      const FitResult fit = fit_demonstration(std::get<RawDemonstration>(set.entries[i]));
      if (fit.warning) record_.warnings.push_back("demonstration " + std::to_string(i) + " fitted poorly");
      p = fit.params;
    }
    return fitted_.emplace(i, p).first->second;
  }

  std::size_t pick_demo(const DemonstrationSet& set) {
    ++record_.demonstrations;
    return select_demonstration(set, outcomes_, cfg_.teaching_grid, teacher_rng_);
  }

  RunRecord finish(const RegionTree* tree) {
    record_.executed = runner_.executed();
    if (tree) {
      record_.leaves = tree->leaves().size();
      record_.region_snapshot = tree->snapshot_json();
    }
    return std::move(record_);
  }

  void checkpoint(std::size_t policies) {
    if (checkpoint_ && policies % cfg_.checkpoint_period == 0) checkpoint_(policies, record_.memory);
  }

  const LearnerConfig& cfg_;
  Environment& env_;
  RunRecord record_;
  PolicyRunner runner_;
  Rng rng_;
  Rng teacher_rng_;
  Outcome origin_;
  std::vector<Outcome> outcomes_;

 private:
  void on_episode(const Episode& e) {
    RunRow row;
    row.episode = e.index;
    row.tag = e.tag;
    row.mode = mode_;
    row.goal = goal_;
    row.params = e.params;
    row.outcome = e.outcome;
    if (goal_ && *goal_ != origin_) row.J = similarity_J(*goal_, e.outcome, origin_);
    record_.rows.push_back(std::move(row));
    outcomes_.push_back(e.outcome);
    if (e.tag != StrategyTag::demonstration) checkpoint(runner_.executed());
  }

  const CheckpointFn& checkpoint_;
  std::map<std::size_t, PolicyParams> fitted_;
  std::string mode_;
  std::optional<Goal> goal_;
};

double pursuit_competence(Goal goal, const std::vector<Episode>& episodes, Outcome origin) {
  std::vector<Outcome> reached;
  reached.reserve(episodes.size());
  for (const auto& e : episodes) reached.push_back(e.outcome);
  return competence(goal, reached, origin);
}

// Goal-babbling loop shared by SGIM-D and SAGG-RIAC; a null teacher or a zero
// demo_period leaves only the autonomous branch.
RunRecord goal_babbling(const LearnerConfig& cfg, Environment& env, const DemonstrationSet* teacher,
                        const CheckpointFn& checkpoint) {
  Session s(cfg, env, checkpoint);
  RegionTree tree(cfg.task_space, cfg.regions);
  const bool social = teacher != nullptr && !teacher->empty() && cfg.demo_period > 0;
  std::size_t next_demo = cfg.demo_period;

  while (s.remaining() > 0) {
    if (social && s.runner_.executed() >= next_demo) {
      next_demo += cfg.demo_period;
      try {
        const std::size_t i = s.pick_demo(*teacher);
        const PolicyParams& theta_d = s.demo_params(*teacher, i);
        const Goal goal = emulate_goal(demo_outcome(teacher->entries[i]), cfg.task_space);
        s.set_activity("emulation", goal);
        const auto eps = imitate_policy(theta_d, s.runner_, s.rng_, std::min(cfg.explorer.n_im, s.remaining()),
                                        cfg.explorer.eps_max);
        if (goal != s.origin_) tree.update(goal, pursuit_competence(goal, eps, s.origin_));
      } catch (const Error& e) {
        s.record_.warnings.push_back(std::string("demonstration skipped: ") + e.what());
      }
      continue;
    }

    GoalChoice choice = decide_goal(tree, s.rng_, cfg.goals);
    while (choice.goal == s.origin_) choice = decide_goal(tree, s.rng_, cfg.goals);
    s.record_.self_goals.push_back(choice.goal);
    ++s.record_.goal_pursuits;
    s.set_activity(to_string(choice.mode), choice.goal);
    const std::size_t budget = std::min(cfg.explorer.goal_budget, s.remaining());
    const PursuitResult res =
        goal_directed_optimization(choice.goal, s.origin_, s.runner_, s.rng_, cfg.explorer, budget);
    tree.update(choice.goal, pursuit_competence(choice.goal, res.episodes, s.origin_));
  }
  return s.finish(&tree);
}

}  // namespace

RunRecord run_sgim_d(const LearnerConfig& cfg, Environment& env, const DemonstrationSet* teacher,
                     const CheckpointFn& checkpoint) {
  return goal_babbling(cfg, env, teacher, checkpoint);
}

RunRecord run_sagg_riac(const LearnerConfig& cfg, Environment& env, const CheckpointFn& checkpoint) {
  return goal_babbling(cfg, env, nullptr, checkpoint);
}

RunRecord run_random(const LearnerConfig& cfg, Environment& env, const CheckpointFn& checkpoint) {
  Session s(cfg, env, checkpoint);
  s.set_activity("random", std::nullopt);
  while (s.remaining() > 0) s.runner_.execute(global_explore(s.rng_), StrategyTag::autonomous);
  return s.finish(nullptr);
}

RunRecord run_imitation(const LearnerConfig& cfg, Environment& env, const DemonstrationSet& teacher,
                        const CheckpointFn& checkpoint) {
  Session s(cfg, env, checkpoint);
  while (s.remaining() > 0) {
    const std::size_t i = s.pick_demo(teacher);
    const PolicyParams& theta_d = s.demo_params(teacher, i);
    s.set_activity("imitation", std::nullopt);
    imitate_policy(theta_d, s.runner_, s.rng_, std::min(cfg.demo_period, s.remaining()), cfg.explorer.eps_max);
  }
  return s.finish(nullptr);
}

RunRecord run_observation(const LearnerConfig& cfg, const Environment& env, const DemonstrationSet& teacher,
                          const CheckpointFn& checkpoint) {
  // a private copy keeps the caller's environment untouched; nothing is executed on it
  Environment watcher = env;
  Session s(cfg, watcher, checkpoint);
  s.set_activity("observation", std::nullopt);
  for (std::size_t watched = 1; watched <= cfg.total_episodes; ++watched) {
    if (watched % cfg.demo_period == 0) {
      const std::size_t i = s.pick_demo(teacher);
      s.runner_.observe(s.demo_params(teacher, i), demo_outcome(teacher.entries[i]));
    }
    s.checkpoint(watched);
  }
  return s.finish(nullptr);
}

RunRecord run_learner(const LearnerConfig& cfg, Environment& env, const DemonstrationSet* teacher,
                      const CheckpointFn& checkpoint) {
  if (is_social(cfg.strategy) && (teacher == nullptr || teacher->empty()))
    throw ConfigError(to_string(cfg.strategy) + " needs a demonstration set");
  switch (cfg.strategy) {
    case Strategy::random: return run_random(cfg, env, checkpoint);
    case Strategy::sagg_riac: return run_sagg_riac(cfg, env, checkpoint);
    case Strategy::imitation: return run_imitation(cfg, env, *teacher, checkpoint);
    case Strategy::observation: return run_observation(cfg, env, *teacher, checkpoint);
    case Strategy::sgim_d: return run_sgim_d(cfg, env, teacher, checkpoint);
  }
  throw ConfigError("unknown strategy");
}

std::string run_csv(const RunRecord& run) {
  std::ostringstream out;
  out << "episode,strategy_tag,mode,goal_x,goal_y";
  for (std::size_t i = 1; i <= kParamDim; ++i) out << ",theta" << i;
  out << ",tau_x,tau_y,J\n";
  for (const RunRow& r : run.rows) {
    out << r.episode << ',' << to_string(r.tag) << ',' << r.mode << ',';
    if (r.goal) out << csv::number(r.goal->x) << ',' << csv::number(r.goal->y);
    else out << ',';
    for (double v : r.params.values()) out << ',' << csv::number(v);
    out << ',' << csv::number(r.outcome.x) << ',' << csv::number(r.outcome.y) << ',';
    if (r.J) out << csv::number(*r.J);
    out << '\n';
  }
  return out.str();
}

void write_run_csv(const std::string& path, const RunRecord& run) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path);
  out << run_csv(run);
}

std::string run_sidecar_json(const RunRecord& run) {
  const LearnerConfig& c = run.config;
  std::size_t imitation = 0;
  std::size_t autonomous = 0;
  for (const auto& e : run.memory.episodes()) {
    if (e.tag == StrategyTag::imitation) ++imitation;
    if (e.tag == StrategyTag::autonomous) ++autonomous;
  }
  nlohmann::ordered_json j;
  j["config"] = {
      {"strategy", to_string(c.strategy)},
      {"total_episodes", c.total_episodes},
      {"demo_period", c.demo_period},
      {"task_space", {c.task_space.lo.x, c.task_space.lo.y, c.task_space.hi.x, c.task_space.hi.y}},
      {"window", c.regions.window},
      {"max_goals", c.regions.max_goals},
      {"mode_probabilities", {c.goals.p_interest, c.goals.p_uniform, c.goals.p_refine}},
      {"refine_fraction", c.goals.refine_fraction},
      {"h_max", c.explorer.h_max},
      {"k_max", c.explorer.k_max},
      {"dist_m", c.explorer.dist_m},
      {"dist_n", c.explorer.dist_n},
      {"h_beta", c.explorer.h_beta},
      {"alpha", c.explorer.alpha},
      {"eps_goal", c.explorer.eps_goal},
      {"goal_budget", c.explorer.goal_budget},
      {"n_im", c.explorer.n_im},
      {"eps_max", c.explorer.eps_max},
      {"rng_seed", c.rng_seed},
  };
  j["counters"] = {
      {"executed", run.executed},
      {"memory_size", run.memory.size()},
      {"autonomous_episodes", autonomous},
      {"imitation_episodes", imitation},
      {"demonstrations", run.demonstrations},
      {"goal_pursuits", run.goal_pursuits},
      {"leaves", run.leaves},
      {"memory_digest", run.memory.digest()},
  };
  j["warnings"] = run.warnings;
  return j.dump(2);
}

}  // namespace sgimd
