#include "sgimd/harness.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <json.hpp>

#include "sgimd/csv.hpp"

namespace sgimd {

BenchmarkSet generate_benchmark(const EnvConfig& env_cfg, const BenchmarkOptions& options) {
  if (options.n_probe < 100000) throw ConfigError("benchmark generation needs at least 1e5 probes");
  EnvConfig quiet = env_cfg;
  quiet.noise_enabled = false;
  const Environment env(quiet);
  Rng probe_rng(Rng::derive(options.seed, 0));
  std::vector<Outcome> landings(options.n_probe);
  BenchmarkSet bench;
  bench.seed = options.seed;
  bench.tiled_area = options.tiled_area;
  bench.reach_box = {{INFINITY, INFINITY}, {-INFINITY, -INFINITY}};
  for (auto& o : landings) {
    o = env.simulate(random_policy(probe_rng)).landing;
    bench.reach_box.lo = {std::min(bench.reach_box.lo.x, o.x), std::min(bench.reach_box.lo.y, o.y)};
    bench.reach_box.hi = {std::max(bench.reach_box.hi.x, o.x), std::max(bench.reach_box.hi.y, o.y)};
  }

  auto occupied = [&](std::size_t n) {
    const TileGrid grid{options.tiled_area, n, n};
    std::vector<char> seen(grid.count(), 0);
    std::size_t count = 0;
    for (const auto& o : landings)
      if (const auto t = grid.tile_of(o); t && !seen[*t]) {
        seen[*t] = 1;
        ++count;
      }
    return count;
  };

  std::size_t resolution = options.resolution;
  if (resolution == 0) {
    std::size_t best_gap = SIZE_MAX;
    for (std::size_t n = options.min_resolution; n <= options.max_resolution; ++n) {
      const std::size_t c = occupied(n);
      const std::size_t gap = c > options.target_points ? c - options.target_points : options.target_points - c;
      if (gap < best_gap) {
        best_gap = gap;
        resolution = n;
      }
    }
  }
  if (resolution == 0) throw ResolutionError("no resolution candidates");
  bench.resolution = resolution;

  const TileGrid grid{options.tiled_area, resolution, resolution};
  std::vector<std::vector<std::size_t>> members(grid.count());
  for (std::size_t i = 0; i < landings.size(); ++i)
    if (const auto t = grid.tile_of(landings[i])) members[*t].push_back(i);
  Rng pick_rng(Rng::derive(options.seed, 1));
  for (const auto& m : members)
    if (!m.empty()) bench.points.push_back(landings[m[pick_rng.index(m.size())]]);
  if (bench.points.size() < 100)
    throw ResolutionError("only " + std::to_string(bench.points.size()) + " occupied tiles at resolution " +
                          std::to_string(resolution));
  return bench;
}

void write_benchmark(const std::string& path, const BenchmarkSet& bench) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path);
  out << "# seed=" << bench.seed << " resolution=" << bench.resolution << '\n';
  out << "# tiled_area=" << csv::number(bench.tiled_area.lo.x) << ',' << csv::number(bench.tiled_area.lo.y) << ','
      << csv::number(bench.tiled_area.hi.x) << ',' << csv::number(bench.tiled_area.hi.y) << '\n';
  out << "# reach_box=" << csv::number(bench.reach_box.lo.x) << ',' << csv::number(bench.reach_box.lo.y) << ','
      << csv::number(bench.reach_box.hi.x) << ',' << csv::number(bench.reach_box.hi.y) << '\n';
  out << "x,y\n";
  for (const auto& p : bench.points) out << csv::number(p.x) << ',' << csv::number(p.y) << '\n';
}

BenchmarkSet read_benchmark(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot read " + path);
  BenchmarkSet bench;
  auto parse_box = [&](const std::string& text) {
    const auto c = csv::split(text);
    if (c.size() != 4) throw FormatError("bad box in " + path);
    return Box{{csv::to_double(c[0], path), csv::to_double(c[1], path)},
               {csv::to_double(c[2], path), csv::to_double(c[3], path)}};
  };
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line == "x,y") continue;
    if (line.starts_with("# seed=")) {
      std::istringstream s(line.substr(7));
      std::string rest;
      s >> bench.seed >> rest;
      if (!rest.starts_with("resolution=")) throw FormatError("bad benchmark header in " + path);
      bench.resolution = std::stoul(rest.substr(11));
    } else if (line.starts_with("# tiled_area=")) {
      bench.tiled_area = parse_box(line.substr(13));
    } else if (line.starts_with("# reach_box=")) {
      bench.reach_box = parse_box(line.substr(12));
    } else {
      const auto c = csv::split(line);
      if (c.size() != 2) throw FormatError("benchmark row needs two columns in " + path);
      bench.points.push_back({csv::to_double(c[0], path), csv::to_double(c[1], path)});
    }
  }
  if (bench.points.empty()) throw FormatError("benchmark " + path + " has no points");
  return bench;
}

EvaluationResult evaluate(const EpisodicMemory& memory, const BenchmarkSet& bench, const EnvConfig& env_cfg,
                          std::uint64_t seed, const ExplorerParams& params) {
  if (memory.empty()) throw EmptyMemoryError("cannot evaluate an empty memory");
  EnvConfig private_cfg = env_cfg;
  private_cfg.rng_seed = seed;
  Environment env(private_cfg);
  EvaluationResult res;
  res.errors.reserve(bench.points.size());
  double total = 0.0;
  for (const Goal& g : bench.points) {
    const PolicyParams theta = infer_policy(g, local_data(g, memory, params), memory, params.h_beta);
    const double e = distance(env.execute(theta), g);
    res.errors.push_back(e);
    total += e;
  }
  res.mean_error = bench.points.empty() ? 0.0 : total / static_cast<double>(bench.points.size());
  return res;
}

std::size_t coverage(std::span<const Episode> episodes, const Box& area, std::size_t n) {
  const TileGrid grid{area, n, n};
  std::vector<char> seen(grid.count(), 0);
  std::size_t count = 0;
  for (const auto& e : episodes)
    if (const auto t = grid.tile_of(e.outcome); t && !seen[*t]) {
      seen[*t] = 1;
      ++count;
    }
  return count;
}

double fraction_inside(std::span<const Goal> goals, const Box& box) {
  if (goals.empty()) return 0.0;
  std::size_t inside = 0;
  for (const auto& g : goals) inside += box.contains(g) ? 1 : 0;
  return static_cast<double>(inside) / static_cast<double>(goals.size());
}

// ---------------------------------------------------------------- config

namespace {

namespace pt = boost::property_tree;

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  for (auto& cell : csv::split(text)) {
    const auto b = cell.find_first_not_of(" \t");
    const auto e = cell.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(cell.substr(b, e - b + 1));
  }
  return out;
}

// "1,2,5" or "1-10" or a mix of both
std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> out;
  for (const auto& item : split_list(text)) {
    const auto dash = item.find('-');
    if (dash != std::string::npos && dash > 0) {
      const auto a = std::stoull(item.substr(0, dash));
      const auto b = std::stoull(item.substr(dash + 1));
      if (b < a) throw ConfigError("bad seed range '" + item + "'");
      for (auto s = a; s <= b; ++s) out.push_back(s);
    } else {
      out.push_back(std::stoull(item));
    }
  }
  if (out.empty()) throw ConfigError("seed list is empty");
  return out;
}

class Section {
 public:
  Section(const pt::ptree& root, const std::string& name) : name_(name) {
    if (auto child = root.get_child_optional(name)) tree_ = *child;
  }

  template <typename T>
  void read(const std::string& key, T& target) {
    if (auto v = tree_.get_optional<std::string>(key)) {
      used_.insert(key);
      try {
        if constexpr (std::is_same_v<T, bool>) {
          target = (*v == "true" || *v == "1" || *v == "yes");
          if (!target && !(*v == "false" || *v == "0" || *v == "no")) throw ConfigError("");
        } else if constexpr (std::is_same_v<T, std::string>) {
          target = *v;
        } else {
          target = tree_.get<T>(key);
        }
      } catch (const std::exception&) {
        throw ConfigError("bad value for " + name_ + "." + key + ": '" + *v + "'");
      }
    }
  }

  std::optional<std::string> raw(const std::string& key) {
    auto v = tree_.get_optional<std::string>(key);
    if (v) used_.insert(key);
    return v ? std::optional<std::string>(*v) : std::nullopt;
  }

  void finish() const {
    for (const auto& [key, _] : tree_)
      if (!used_.contains(key)) throw ConfigError("unknown key " + name_ + "." + key);
  }

 private:
  std::string name_;
  pt::ptree tree_;
  std::set<std::string> used_;
};

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  pt::ptree root;
  try {
    std::istringstream in(text);
    pt::read_ini(in, root);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  for (const auto& [name, _] : root)
    if (name != "env" && name != "learner" && name != "teacher" && name != "harness")
      throw ConfigError("unknown config section [" + name + "]");

  ExperimentConfig cfg;
  Section env(root, "env");
  env.read("scale", cfg.env.scale);
  env.read("noise_base", cfg.env.noise_base);
  env.read("noise_speed_gain", cfg.env.noise_speed_gain);
  env.read("speed_reference", cfg.env.speed_reference);
  env.read("release_gain", cfg.env.release_gain);
  env.read("base_height", cfg.env.base_height);
  env.read("rod_length", cfg.env.rod_length);
  env.read("gravity", cfg.env.gravity);
  env.read("steps", cfg.env.steps);
  env.read("noise_enabled", cfg.env.noise_enabled);
  env.finish();
  cfg.env.validate();

  LearnerConfig& l = cfg.learner;
  Section learner(root, "learner");
  if (auto s = learner.raw("strategy")) l.strategy = strategy_from_string(*s);
  learner.read("total_episodes", l.total_episodes);
  learner.read("demo_period", l.demo_period);
  learner.read("checkpoint_period", l.checkpoint_period);
  learner.read("window", l.regions.window);
  learner.read("max_goals", l.regions.max_goals);
  learner.read("p_interest", l.goals.p_interest);
  learner.read("p_uniform", l.goals.p_uniform);
  learner.read("p_refine", l.goals.p_refine);
  learner.read("refine_fraction", l.goals.refine_fraction);
  learner.read("h_max", l.explorer.h_max);
  learner.read("k_max", l.explorer.k_max);
  learner.read("dist_m", l.explorer.dist_m);
  learner.read("dist_n", l.explorer.dist_n);
  learner.read("h_beta", l.explorer.h_beta);
  learner.read("alpha", l.explorer.alpha);
  learner.read("eps_goal", l.explorer.eps_goal);
  learner.read("goal_budget", l.explorer.goal_budget);
  learner.read("n_im", l.explorer.n_im);
  learner.read("eps_max", l.explorer.eps_max);
  if (auto p = learner.raw("padding")) {
    if (*p == "memory_neighbors") l.explorer.padding = SimplexPadding::memory_neighbors;
    else if (*p == "perturbation") l.explorer.padding = SimplexPadding::perturbation;
    else throw ConfigError("unknown padding '" + *p + "'");
  }
  learner.finish();
  l.validate();

  Section teacher(root, "teacher");
  teacher.read("demonstrator", cfg.teacher.demonstrator);
  teacher.read("path", cfg.teacher.path);
  teacher.read("k_rep", cfg.teacher.k_rep);
  teacher.read("source_episodes", cfg.teacher.source_episodes);
  teacher.read("seed", cfg.teacher.seed);
  if (auto p = teacher.raw("profile")) {
    if (*p == "knot_step") cfg.teacher.profile.shape = DemoProfile::Shape::knot_step;
    else if (*p == "minimum_jerk") cfg.teacher.profile.shape = DemoProfile::Shape::minimum_jerk;
    else throw ConfigError("unknown profile '" + *p + "'");
  }
  teacher.read("active_fraction", cfg.teacher.profile.active);
  teacher.read("count", cfg.teacher.count);
  if (!(cfg.teacher.profile.active > 0.0 && cfg.teacher.profile.active <= 1.0))
    throw ConfigError("active_fraction must be in (0, 1]");
  teacher.finish();
  if (cfg.teacher.demonstrator < 1 || cfg.teacher.demonstrator > 3) throw ConfigError("demonstrator must be 1, 2 or 3");

  HarnessConfig& h = cfg.harness;
  Section harness(root, "harness");
  if (auto s = harness.raw("strategies")) {
    h.strategies.clear();
    for (const auto& name : split_list(*s)) h.strategies.push_back(strategy_from_string(name));
  }
  if (auto s = harness.raw("seeds")) {
    try {
      h.seeds = parse_seeds(*s);
    } catch (const std::logic_error&) {
      throw ConfigError("bad seed list '" + *s + "'");
    }
  }
  harness.read("n_probe", h.bench.n_probe);
  harness.read("bench_seed", h.bench.seed);
  harness.read("resolution", h.bench.resolution);
  harness.read("target_points", h.bench.target_points);
  harness.read("bench_path", h.bench_path);
  harness.read("large_space", h.large_space);
  harness.read("coverage_tiles", h.coverage_tiles);
  harness.read("threads", h.threads);
  harness.read("label", h.label);
  harness.finish();
  if (h.threads == 0) throw ConfigError("threads must be positive");
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

Box task_space_for(const HarnessConfig& harness, const Box& base) {
  return harness.large_space ? Box{base.lo * 100.0, base.hi * 100.0} : base;
}

DemonstrationSet make_teacher(const ExperimentConfig& cfg) {
  if (!cfg.teacher.path.empty()) return read_demonstration_set(cfg.teacher.path);
  const std::uint64_t seed = cfg.teacher.seed;
  if (cfg.teacher.demonstrator == 3) {
    EnvConfig env_cfg = cfg.env;
    env_cfg.rng_seed = Rng::derive(seed, 20);
    Environment env(env_cfg);
    Rng rng(Rng::derive(seed, 21));
    Demonstrator3Options options;
    options.profile = cfg.teacher.profile;
    options.count = cfg.teacher.count;
    return build_demonstrator3(env, rng, {}, options).set;
  }
  // demonstrators 1 and 2 draw on an expert SAGG-RIAC run in the unit space
  LearnerConfig source = cfg.learner;
  source.strategy = Strategy::sagg_riac;
  source.total_episodes = cfg.teacher.source_episodes;
  source.task_space = kUnitTaskSpace;
  source.rng_seed = Rng::derive(seed, 10);
  Environment source_env(cfg.env);
  const RunRecord expert = run_sagg_riac(source, source_env);
  if (cfg.teacher.demonstrator == 1) {
    Rng rng(Rng::derive(seed, 11));
    return build_demonstrator1(expert.memory, rng);
  }
  EnvConfig env_cfg = cfg.env;
  env_cfg.rng_seed = Rng::derive(seed, 12);
  Environment env(env_cfg);
  return build_demonstrator2(expert.memory, env, cfg.teacher.k_rep).set;
}

// ---------------------------------------------------------------- experiments

std::size_t StrategyResult::successful() const {
  std::size_t n = 0;
  for (const auto& s : seeds) n += s.failed ? 0 : 1;
  return n;
}

const StrategyResult* ExperimentReport::find(Strategy s) const {
  for (const auto& r : strategies)
    if (r.strategy == s) return &r;
  return nullptr;
}

void aggregate(StrategyResult& result) {
  result.checkpoints.clear();
  result.mean.clear();
  result.variance.clear();
  const SeedResult* first = nullptr;
  for (const auto& s : result.seeds)
    if (!s.failed) {
      first = &s;
      break;
    }
  if (!first) return;
  result.checkpoints = first->checkpoints;
  for (std::size_t c = 0; c < result.checkpoints.size(); ++c) {
    double sum = 0.0, sq = 0.0, n = 0.0;
    for (const auto& s : result.seeds) {
      if (s.failed || c >= s.errors.size()) continue;
      sum += s.errors[c];
      sq += s.errors[c] * s.errors[c];
      n += 1.0;
    }
    const double m = sum / n;
    result.mean.push_back(m);
    result.variance.push_back(std::max(0.0, sq / n - m * m));
  }
}

namespace {

SeedResult run_one(const ExperimentConfig& cfg, const BenchmarkSet& bench, const DemonstrationSet* teacher,
                   Strategy strategy, std::uint64_t seed) {
  SeedResult out;
  out.seed = seed;
  try {
    LearnerConfig lc = cfg.learner;
    lc.strategy = strategy;
    lc.rng_seed = seed;
    lc.task_space = task_space_for(cfg.harness, cfg.learner.task_space);
    Environment env(cfg.env);
    const CheckpointFn checkpoint = [&](std::size_t policies, const EpisodicMemory& memory) {
      const auto eval_seed = Rng::derive(Rng::derive(seed, 1000), policies);
      out.checkpoints.push_back(policies);
      out.errors.push_back(evaluate(memory, bench, cfg.env, eval_seed, lc.explorer).mean_error);
    };
    const RunRecord run = run_learner(lc, env, teacher, checkpoint);
    out.executed = run.executed;
    out.coverage = coverage(run.memory.episodes(), bench.tiled_area, cfg.harness.coverage_tiles);
    out.reachable_goal_fraction = fraction_inside(run.self_goals, bench.reach_box);
  } catch (const std::exception& e) {
    out.failed = true;
    out.failure = e.what();
  }
  return out;
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& cfg, const BenchmarkSet& bench,
                                const DemonstrationSet* teacher) {
  ExperimentReport report;
  report.label = cfg.harness.label;
  report.demonstrator = cfg.teacher.demonstrator;
  report.large_space = cfg.harness.large_space;
  report.benchmark_points = bench.points.size();
  report.noise_std = measure_noise(cfg.env, Context::origin(), 200, 10, 12345).mean_axis_std;

  struct Job {
    std::size_t strategy;
    std::size_t seed;
  };
  std::vector<Job> jobs;
  for (std::size_t s = 0; s < cfg.harness.strategies.size(); ++s) {
    StrategyResult r;
    r.strategy = cfg.harness.strategies[s];
    r.seeds.resize(cfg.harness.seeds.size());
    report.strategies.push_back(std::move(r));
    for (std::size_t k = 0; k < cfg.harness.seeds.size(); ++k) jobs.push_back({s, k});
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t j = next++; j < jobs.size(); j = next++) {
      const Job job = jobs[j];
      report.strategies[job.strategy].seeds[job.seed] =
          run_one(cfg, bench, teacher, cfg.harness.strategies[job.strategy], cfg.harness.seeds[job.seed]);
    }
  };
  const std::size_t n_threads = std::min(cfg.harness.threads, std::max<std::size_t>(1, jobs.size()));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }
  for (auto& r : report.strategies) aggregate(r);
  return report;
}

// ---------------------------------------------------------------- verdicts

namespace {

struct Final {
  double mean = 0.0;
  double variance = 0.0;
  std::size_t n = 0;
};

Final final_of(const StrategyResult& r) { return {r.final_mean(), r.final_variance(), r.successful()}; }

// Standard error of a difference of means, from the per-strategy variances.
double pooled_se(const Final& a, const Final& b) {
  auto term = [](const Final& f) {
    return f.n > 1 ? f.variance * static_cast<double>(f.n) / static_cast<double>(f.n - 1) / static_cast<double>(f.n)
                   : 0.0;
  };
  return std::sqrt(term(a) + term(b));
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

const ExperimentReport* main_report(const std::vector<ExperimentReport>& reports) {
  const ExperimentReport* best = nullptr;
  for (const auto& r : reports) {
    if (r.large_space) continue;
    if (!best || r.strategies.size() > best->strategies.size()) best = &r;
  }
  return best;
}

}  // namespace

std::vector<Verdict> compare(const std::vector<ExperimentReport>& reports) {
  std::vector<Verdict> rows;
  const ExperimentReport* main = main_report(reports);

  if (main) {
    const auto* obs = main->find(Strategy::observation);
    const auto* rnd = main->find(Strategy::random);
    const auto* sagg = main->find(Strategy::sagg_riac);
    const auto* imi = main->find(Strategy::imitation);
    const auto* sgim = main->find(Strategy::sgim_d);

    if (obs && rnd && sagg && imi && sgim) {
      const Final o = final_of(*obs), r = final_of(*rnd), s = final_of(*sagg), i = final_of(*imi), g = final_of(*sgim);
      const Final& mid = s.mean >= i.mean ? s : i;
      const double gap1 = o.mean - r.mean, se1 = pooled_se(o, r);
      const double gap2 = r.mean - mid.mean, se2 = pooled_se(r, mid);
      const double gap3 = mid.mean - g.mean, se3 = pooled_se(mid, g);
      const std::size_t n = std::min({o.n, r.n, s.n, i.n, g.n});
      Verdict v{"C1", "final error Observation > Random > max(SAGG-RIAC, Imitation) > SGIM-D, gaps >= 1 pooled SE", false, ""};
      v.pass = n >= 10 && gap1 > se1 && gap2 > se2 && gap3 > se3;
      v.detail = "obs " + fmt(o.mean) + " rnd " + fmt(r.mean) + " sagg " + fmt(s.mean) + " imi " + fmt(i.mean) +
                 " sgim " + fmt(g.mean) + "; gaps " + fmt(gap1) + "/" + fmt(se1) + " " + fmt(gap2) + "/" + fmt(se2) +
                 " " + fmt(gap3) + "/" + fmt(se3) + "; seeds " + std::to_string(n);
      rows.push_back(v);
    }
    if (rnd && sgim) {
      const double ratio = sgim->final_mean() / rnd->final_mean();
      rows.push_back({"C2", "SGIM-D final error <= 0.6 x Random", ratio <= 0.6, "ratio " + fmt(ratio)});
    }
    if (sgim) {
      const double bound = 3.0 * main->noise_std;
      rows.push_back({"C3", "SGIM-D final error <= 3 x mean noise std", sgim->final_mean() <= bound,
                      "sgim " + fmt(sgim->final_mean()) + " bound " + fmt(bound)});
    }
    if (rnd && sagg && sgim) {
      bool ok = true;
      std::size_t compared = 0;
      std::string detail;
      for (const auto& gs : sgim->seeds) {
        const SeedResult* ss = nullptr;
        const SeedResult* rs = nullptr;
        for (const auto& x : sagg->seeds)
          if (x.seed == gs.seed) ss = &x;
        for (const auto& x : rnd->seeds)
          if (x.seed == gs.seed) rs = &x;
        if (!ss || !rs || gs.failed || ss->failed || rs->failed) {
          ok = false;
          continue;
        }
        ++compared;
        const bool seed_ok = gs.coverage > ss->coverage && ss->coverage > rs->coverage;
        ok = ok && seed_ok;
        detail += (detail.empty() ? "" : " ") + std::to_string(gs.seed) + ":" + std::to_string(gs.coverage) + ">" +
                  std::to_string(ss->coverage) + ">" + std::to_string(rs->coverage) + (seed_ok ? "" : "!");
      }
      rows.push_back({"C4", "20x20 coverage SGIM-D > SAGG-RIAC > Random on every seed", ok && compared > 0, detail});
    }
  }

  // demonstrator robustness needs one small-space report per demonstrator
  std::array<const ExperimentReport*, 4> by_demo{};
  for (const auto& r : reports)
    if (!r.large_space && r.demonstrator >= 1 && r.demonstrator <= 3 && r.find(Strategy::sgim_d) &&
        r.find(Strategy::sagg_riac) && !by_demo[r.demonstrator])
      by_demo[r.demonstrator] = &r;
  if (by_demo[1] && by_demo[2] && by_demo[3]) {
    bool ok = true;
    std::string detail;
    for (int d = 1; d <= 3; ++d) {
      const Final g = final_of(*by_demo[d]->find(Strategy::sgim_d));
      const Final s = final_of(*by_demo[d]->find(Strategy::sagg_riac));
      ok = ok && g.mean < s.mean && g.n >= 5 && s.n >= 5;
      detail += "d" + std::to_string(d) + " sgim " + fmt(g.mean) + " sagg " + fmt(s.mean) + "; ";
    }
    const double d1 = by_demo[1]->find(Strategy::sgim_d)->final_mean();
    const double d3 = by_demo[3]->find(Strategy::sgim_d)->final_mean();
    ok = ok && d3 <= d1;
    detail += "d3 <= d1: " + fmt(d3) + " vs " + fmt(d1);
    rows.push_back({"C5", "SGIM-D beats SAGG-RIAC for demonstrators 1-3; demonstrator 3 <= demonstrator 1", ok, detail});
  }

  for (const auto& r : reports) {
    if (!r.large_space) continue;
    const auto* sgim = r.find(Strategy::sgim_d);
    const auto* sagg = r.find(Strategy::sagg_riac);
    if (!sgim || !sagg) continue;
    auto mean_fraction = [](const StrategyResult& s) {
      double sum = 0.0, n = 0.0;
      for (const auto& x : s.seeds)
        if (!x.failed) {
          sum += x.reachable_goal_fraction;
          n += 1.0;
        }
      return n > 0 ? sum / n : 0.0;
    };
    const double fg = mean_fraction(*sgim);
    const double fs = mean_fraction(*sagg);
    const bool ok = sgim->final_mean() < sagg->final_mean() && fg >= 2.0 * fs && sgim->successful() >= 5 &&
                    sagg->successful() >= 5;
    rows.push_back({"C6", "large task space: SGIM-D error < SAGG-RIAC, reachable-goal fraction >= 2x", ok,
                    "sgim " + fmt(sgim->final_mean()) + " sagg " + fmt(sagg->final_mean()) + "; fractions " +
                        fmt(fg) + " vs " + fmt(fs)});
    break;
  }
  return rows;
}

// ---------------------------------------------------------------- report I/O

std::string report_json(const std::vector<ExperimentReport>& reports) {
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (const auto& r : reports) {
    nlohmann::ordered_json jr;
    jr["label"] = r.label;
    jr["demonstrator"] = r.demonstrator;
    jr["large_space"] = r.large_space;
    jr["noise_std"] = r.noise_std;
    jr["benchmark_points"] = r.benchmark_points;
    jr["strategies"] = nlohmann::ordered_json::array();
    for (const auto& s : r.strategies) {
      nlohmann::ordered_json js;
      js["strategy"] = to_string(s.strategy);
      js["checkpoints"] = s.checkpoints;
      js["mean"] = s.mean;
      js["variance"] = s.variance;
      js["seeds"] = nlohmann::ordered_json::array();
      for (const auto& x : s.seeds) {
        nlohmann::ordered_json jx;
        jx["seed"] = x.seed;
        jx["checkpoints"] = x.checkpoints;
        jx["errors"] = x.errors;
        jx["coverage"] = x.coverage;
        jx["reachable_goal_fraction"] = x.reachable_goal_fraction;
        jx["executed"] = x.executed;
        jx["failed"] = x.failed;
        if (x.failed) jx["failure"] = x.failure;
        js["seeds"].push_back(jx);
      }
      jr["strategies"].push_back(js);
    }
    out.push_back(jr);
  }
  return out.dump(2);
}

std::vector<ExperimentReport> read_report_json(const std::string& text) {
  std::vector<ExperimentReport> reports;
  try {
    const auto root = nlohmann::json::parse(text);
    for (const auto& jr : root) {
      ExperimentReport r;
      r.label = jr.at("label").get<std::string>();
      r.demonstrator = jr.at("demonstrator").get<int>();
      r.large_space = jr.at("large_space").get<bool>();
      r.noise_std = jr.at("noise_std").get<double>();
      r.benchmark_points = jr.at("benchmark_points").get<std::size_t>();
      for (const auto& js : jr.at("strategies")) {
        StrategyResult s;
        s.strategy = strategy_from_string(js.at("strategy").get<std::string>());
        for (const auto& jx : js.at("seeds")) {
          SeedResult x;
          x.seed = jx.at("seed").get<std::uint64_t>();
          x.checkpoints = jx.at("checkpoints").get<std::vector<std::size_t>>();
          x.errors = jx.at("errors").get<std::vector<double>>();
          x.coverage = jx.at("coverage").get<std::size_t>();
          x.reachable_goal_fraction = jx.at("reachable_goal_fraction").get<double>();
          x.executed = jx.at("executed").get<std::size_t>();
          x.failed = jx.at("failed").get<bool>();
          if (x.failed) x.failure = jx.value("failure", "");
          s.seeds.push_back(std::move(x));
        }
        aggregate(s);
        r.strategies.push_back(std::move(s));
      }
      reports.push_back(std::move(r));
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad report: ") + e.what());
  }
  return reports;
}

std::string curves_csv(const std::vector<ExperimentReport>& reports) {
  std::ostringstream out;
  out << "label,strategy,checkpoint,mean,variance,n\n";
  for (const auto& r : reports)
    for (const auto& s : r.strategies)
      for (std::size_t c = 0; c < s.checkpoints.size(); ++c)
        out << r.label << ',' << to_string(s.strategy) << ',' << s.checkpoints[c] << ',' << csv::number(s.mean[c])
            << ',' << csv::number(s.variance[c]) << ',' << s.successful() << '\n';
  return out.str();
}

}  // namespace sgimd
