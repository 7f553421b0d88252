#include <gtest/gtest.h>

#include <filesystem>
#include <set>

#include "sgimd/harness.hpp"

using namespace sgimd;

namespace {

const BenchmarkSet& default_benchmark() {
  static const BenchmarkSet bench = [] {
    BenchmarkOptions opt;
    opt.seed = 3;
    return generate_benchmark(EnvConfig{}, opt);
  }();
  return bench;
}

EnvConfig quiet_config() {
  EnvConfig cfg;
  cfg.noise_enabled = false;
  return cfg;
}

// memory of random policies plus a benchmark made of their noise-free landings
std::pair<EpisodicMemory, BenchmarkSet> oracle_memory(std::size_t n) {
  Environment env(quiet_config());
  Rng rng(12);
  EpisodicMemory m;
  BenchmarkSet bench;
  for (std::size_t i = 0; i < n; ++i) {
    const auto p = random_policy(rng);
    const Outcome o = env.execute(p);
    m.record({i, StrategyTag::autonomous, p, o});
    bench.points.push_back(o);
  }
  return {std::move(m), std::move(bench)};
}

StrategyResult strategy(Strategy s, const std::vector<double>& finals, const std::vector<std::size_t>& cover = {}) {
  StrategyResult r;
  r.strategy = s;
  for (std::size_t k = 0; k < finals.size(); ++k) {
    SeedResult x;
    x.seed = k + 1;
    x.checkpoints = {1000, 5000};
    x.errors = {0.5, finals[k]};
    x.coverage = cover.empty() ? 0 : cover[k];
    x.executed = 5000;
    r.seeds.push_back(x);
  }
  aggregate(r);
  return r;
}

std::vector<double> around(double v, std::size_t n, double jitter = 0.001) {
  std::vector<double> out;
  for (std::size_t k = 0; k < n; ++k) out.push_back(v + (k % 2 ? jitter : -jitter));
  return out;
}

ExperimentReport main_fixture(double sgim_final) {
  ExperimentReport r;
  r.label = "main";
  r.demonstrator = 2;
  r.noise_std = 0.02;
  r.strategies = {strategy(Strategy::observation, around(0.2, 10), std::vector<std::size_t>(10, 40)),
                  strategy(Strategy::random, around(0.1, 10), std::vector<std::size_t>(10, 60)),
                  strategy(Strategy::sagg_riac, around(0.08, 10), std::vector<std::size_t>(10, 80)),
                  strategy(Strategy::imitation, around(0.06, 10), std::vector<std::size_t>(10, 30)),
                  strategy(Strategy::sgim_d, around(sgim_final, 10), std::vector<std::size_t>(10, 100))};
  return r;
}

ExperimentReport demo_fixture(int demonstrator, double sgim, double sagg) {
  ExperimentReport r;
  r.label = "demo" + std::to_string(demonstrator);
  r.demonstrator = demonstrator;
  r.strategies = {strategy(Strategy::sagg_riac, around(sagg, 5)), strategy(Strategy::sgim_d, around(sgim, 5))};
  return r;
}

const Verdict* find(const std::vector<Verdict>& rows, const std::string& id) {
  for (const auto& v : rows)
    if (v.criterion == id) return &v;
  return nullptr;
}

}  // namespace

TEST(Benchmark, CountAndPlacement) {
  const auto& bench = default_benchmark();
  EXPECT_GE(bench.points.size(), 300u);
  EXPECT_LE(bench.points.size(), 400u);
  const TileGrid grid{bench.tiled_area, bench.resolution, bench.resolution};
  std::set<std::size_t> tiles;
  for (const auto& p : bench.points) {
    const auto t = grid.tile_of(p);
    ASSERT_TRUE(t.has_value());
    EXPECT_TRUE(tiles.insert(*t).second) << "two points in one tile";
    EXPECT_TRUE(bench.reach_box.contains(p));
  }
}

TEST(Benchmark, ReproducibleAndValidated) {
  BenchmarkOptions opt;
  opt.seed = 3;
  EXPECT_EQ(generate_benchmark(EnvConfig{}, opt).points, default_benchmark().points);
  opt.seed = 4;
  EXPECT_NE(generate_benchmark(EnvConfig{}, opt).points, default_benchmark().points);
  opt.n_probe = 99999;
  EXPECT_THROW(generate_benchmark(EnvConfig{}, opt), ConfigError);
  opt.n_probe = 100000;
  opt.resolution = 8;  // at most 64 tiles
  EXPECT_THROW(generate_benchmark(EnvConfig{}, opt), ResolutionError);
}

TEST(Benchmark, FileRoundTrip) {
  const auto path = (std::filesystem::temp_directory_path() / "sgimd_bench.csv").string();
  write_benchmark(path, default_benchmark());
  EXPECT_EQ(read_benchmark(path).points, default_benchmark().points);
  std::filesystem::remove(path);
}

TEST(Evaluate, OracleMemoryIsExact) {
  const auto [memory, bench] = oracle_memory(60);
  const auto r = evaluate(memory, bench, quiet_config(), 1);
  ASSERT_EQ(r.errors.size(), 60u);
  EXPECT_LT(r.mean_error, 1e-6);
}

TEST(Evaluate, SideEffectFreeAndRepeatable) {
  const auto [memory, ignored] = oracle_memory(2000);
  const auto& bench = default_benchmark();
  const auto digest = memory.digest();
  const auto a = evaluate(memory, bench, EnvConfig{}, 5);
  const auto b = evaluate(memory, bench, EnvConfig{}, 5);
  EXPECT_EQ(memory.digest(), digest);
  EXPECT_EQ(memory.size(), 2000u);
  EXPECT_EQ(a.mean_error, b.mean_error);
  EXPECT_NE(evaluate(memory, bench, EnvConfig{}, 6).mean_error, a.mean_error);

  double widest = 0.0;
  for (const auto& p : bench.points)
    for (const auto& q : bench.points) widest = std::max(widest, distance(p, q));
  EXPECT_LE(a.mean_error, widest);
  EXPECT_THROW(evaluate(EpisodicMemory(), bench, EnvConfig{}, 5), EmptyMemoryError);
}

TEST(Metrics, CoverageAndFractionInside) {
  std::vector<Episode> eps;
  for (const Outcome o : {Outcome{-0.99, -0.99}, Outcome{-0.98, -0.98}, Outcome{0.5, 0.5}, Outcome{2.0, 0.0}})
    eps.push_back({eps.size(), StrategyTag::autonomous, PolicyParams(), o});
  EXPECT_EQ(coverage(eps), 2u);
  EXPECT_EQ(coverage(eps, kUnitTaskSpace, 1), 1u);

  const std::vector<Goal> goals{{0.0, 0.0}, {50.0, 0.0}, {0.5, -0.5}, {-90.0, 90.0}};
  EXPECT_DOUBLE_EQ(fraction_inside(goals, kUnitTaskSpace), 0.5);
  EXPECT_EQ(fraction_inside({}, kUnitTaskSpace), 0.0);
}

TEST(Aggregate, MeanAndPopulationVariance) {
  StrategyResult r;
  SeedResult a, b, c;
  a.checkpoints = b.checkpoints = c.checkpoints = {1000, 2000};
  a.errors = {1.0, 2.0};
  b.errors = {3.0, 4.0};
  c.failed = true;
  r.seeds = {a, b, c};
  aggregate(r);
  EXPECT_EQ(r.successful(), 2u);
  EXPECT_EQ(r.mean, (std::vector<double>{2.0, 3.0}));
  EXPECT_EQ(r.variance, (std::vector<double>{1.0, 1.0}));

  StrategyResult one;
  one.seeds = {a};
  aggregate(one);
  EXPECT_EQ(one.variance, (std::vector<double>{0.0, 0.0}));
}

TEST(RunExperiment, CheckpointsAndStrategies) {
  auto [memory, bench] = oracle_memory(40);
  ExperimentConfig cfg;
  cfg.harness.strategies = {Strategy::random, Strategy::observation};
  cfg.harness.seeds = {1};
  Environment env(EnvConfig{});
  Rng rng(2);
  EpisodicMemory source;
  for (std::size_t i = 0; i < 300; ++i) {
    const auto p = random_policy(rng);
    source.record({i, StrategyTag::autonomous, p, env.execute(p)});
  }
  const auto teacher = build_demonstrator1(source, rng);
  const auto report = run_experiment(cfg, bench, &teacher);
  ASSERT_EQ(report.strategies.size(), 2u);
  EXPECT_NE(report.find(Strategy::random), nullptr);
  EXPECT_NE(report.find(Strategy::observation), nullptr);
  EXPECT_EQ(report.find(Strategy::sgim_d), nullptr);
  EXPECT_GT(report.noise_std, 0.0);
  for (const auto& s : report.strategies) {
    EXPECT_EQ(s.checkpoints, (std::vector<std::size_t>{1000, 2000, 3000, 4000, 5000}));
    ASSERT_EQ(s.seeds.size(), 1u);
    EXPECT_FALSE(s.seeds[0].failed) << s.seeds[0].failure;
    EXPECT_EQ(s.mean.size(), 5u);
    for (double v : s.variance) EXPECT_EQ(v, 0.0);
  }
  EXPECT_EQ(report.find(Strategy::random)->seeds[0].executed, 5000u);
  EXPECT_EQ(report.find(Strategy::observation)->seeds[0].executed, 0u);

  // the JSON report reads back to the same numbers
  const auto back = read_report_json(report_json({report}));
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0].find(Strategy::random)->mean, report.find(Strategy::random)->mean);
  const auto curves = curves_csv({report});
  EXPECT_EQ(std::count(curves.begin(), curves.end(), '\n'), 1 + 2 * 5);
}

TEST(Compare, MainFixturePasses) {
  const auto rows = compare({main_fixture(0.05)});
  for (const char* id : {"C1", "C2", "C3", "C4"}) {
    const auto* v = find(rows, id);
    ASSERT_NE(v, nullptr) << id;
    EXPECT_TRUE(v->pass) << id << " " << v->detail;
  }
  EXPECT_EQ(find(rows, "C5"), nullptr);
  EXPECT_EQ(find(rows, "C6"), nullptr);
}

TEST(Compare, MainFixtureFailures) {
  // SGIM-D worse than SAGG-RIAC: ranking, ratio and noise bound all fail
  auto bad = main_fixture(0.09);
  const auto rows = compare({bad});
  EXPECT_FALSE(find(rows, "C1")->pass);
  EXPECT_FALSE(find(rows, "C2")->pass);  // 0.09 / 0.1
  EXPECT_FALSE(find(rows, "C3")->pass);  // 0.09 > 3 * 0.02
  EXPECT_TRUE(find(rows, "C4")->pass);

  // gaps inside one pooled standard error
  auto noisy = main_fixture(0.05);
  noisy.strategies[4] = strategy(Strategy::sgim_d, around(0.075, 10, 0.04), std::vector<std::size_t>(10, 100));
  EXPECT_FALSE(find(compare({noisy}), "C1")->pass);

  // one seed where SGIM-D covers less than SAGG-RIAC
  auto cover = main_fixture(0.05);
  cover.strategies[4].seeds[3].coverage = 70;
  EXPECT_FALSE(find(compare({cover}), "C4")->pass);

  // fewer than ten seeds
  auto few = main_fixture(0.05);
  few.strategies[0].seeds[9].failed = true;
  aggregate(few.strategies[0]);
  EXPECT_FALSE(find(compare({few}), "C1")->pass);
}

TEST(Compare, DemonstratorRobustness) {
  const auto ok = compare({demo_fixture(1, 0.056, 0.08), demo_fixture(2, 0.055, 0.08), demo_fixture(3, 0.054, 0.08)});
  ASSERT_NE(find(ok, "C5"), nullptr);
  EXPECT_TRUE(find(ok, "C5")->pass);
  const auto order = compare({demo_fixture(1, 0.054, 0.08), demo_fixture(2, 0.055, 0.08), demo_fixture(3, 0.056, 0.08)});
  EXPECT_FALSE(find(order, "C5")->pass);
  const auto lose = compare({demo_fixture(1, 0.056, 0.08), demo_fixture(2, 0.09, 0.08), demo_fixture(3, 0.054, 0.08)});
  EXPECT_FALSE(find(lose, "C5")->pass);
  EXPECT_EQ(find(compare({demo_fixture(1, 0.05, 0.08), demo_fixture(3, 0.05, 0.08)}), "C5"), nullptr);
}

TEST(Compare, LargeSpace) {
  auto large = demo_fixture(2, 0.06, 0.09);
  large.large_space = true;
  for (auto& x : large.strategies[0].seeds) x.reachable_goal_fraction = 0.002;
  for (auto& x : large.strategies[1].seeds) x.reachable_goal_fraction = 0.02;
  auto rows = compare({large});
  ASSERT_NE(find(rows, "C6"), nullptr);
  EXPECT_TRUE(find(rows, "C6")->pass);
  for (auto& x : large.strategies[1].seeds) x.reachable_goal_fraction = 0.003;
  EXPECT_FALSE(find(compare({large}), "C6")->pass);
}

TEST(Compare, EmptyInputsGiveEmptyTable) {
  EXPECT_TRUE(compare({}).empty());
  ExperimentReport nothing;
  EXPECT_TRUE(compare({nothing}).empty());
}

TEST(Config, ParsesSectionsAndRejectsUnknownKeys) {
  const auto cfg = parse_config(
      "[env]\nnoise_speed_gain = 0.01\n"
      "[learner]\nstrategy = sagg_riac\ndemo_period = 25\nn_im = 3\npadding = perturbation\n"
      "[teacher]\ndemonstrator = 3\nprofile = knot_step\ncount = 50\n"
      "[harness]\nseeds = 1-3,7\nstrategies = random, sgim_d\nlarge_space = true\nlabel = x\n");
  EXPECT_EQ(cfg.env.noise_speed_gain, 0.01);
  EXPECT_EQ(cfg.learner.strategy, Strategy::sagg_riac);
  EXPECT_EQ(cfg.learner.demo_period, 25u);
  EXPECT_EQ(cfg.learner.explorer.n_im, 3u);
  EXPECT_EQ(cfg.learner.explorer.padding, SimplexPadding::perturbation);
  EXPECT_EQ(cfg.teacher.demonstrator, 3);
  EXPECT_EQ(cfg.teacher.profile.shape, DemoProfile::Shape::knot_step);
  EXPECT_EQ(cfg.teacher.count, 50u);
  EXPECT_EQ(cfg.harness.seeds, (std::vector<std::uint64_t>{1, 2, 3, 7}));
  EXPECT_EQ(cfg.harness.strategies, (std::vector<Strategy>{Strategy::random, Strategy::sgim_d}));
  EXPECT_TRUE(cfg.harness.large_space);
  EXPECT_EQ(cfg.harness.label, "x");
  const Box big = task_space_for(cfg.harness, kUnitTaskSpace);
  EXPECT_EQ(big.lo.x, -100.0);
  EXPECT_EQ(big.hi.y, 100.0);

  const auto defaults = parse_config("");
  EXPECT_EQ(defaults.learner.demo_period, 30u);
  EXPECT_EQ(defaults.learner.total_episodes, 5000u);

  EXPECT_THROW(parse_config("[learner]\nbogus = 1\n"), ConfigError);
  EXPECT_THROW(parse_config("[other]\nx = 1\n"), ConfigError);
  EXPECT_THROW(parse_config("[harness]\nseeds = 5-2\n"), ConfigError);
  EXPECT_THROW(parse_config("[harness]\nseeds = abc\n"), ConfigError);
  EXPECT_THROW(parse_config("[teacher]\ndemonstrator = 4\n"), ConfigError);
  EXPECT_THROW(parse_config("[teacher]\nactive_fraction = 0\n"), ConfigError);
  EXPECT_THROW(parse_config("[learner]\ntotal_episodes = x\n"), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/sgimd.ini"), ConfigError);
}
