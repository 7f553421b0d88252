#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sgimd/environment.hpp"
#include "sgimd/learners.hpp"
#include "sgimd/memory.hpp"
#include "sgimd/teachers.hpp"

namespace sgimd {

struct BenchmarkSet {
  std::vector<Goal> points;
  std::uint64_t seed = 0;
  std::size_t resolution = 0;  // tiles per side over the tiled area
  Box tiled_area = kUnitTaskSpace;
  Box reach_box;               // bounding box of every probe landing
};

struct BenchmarkOptions {
  std::size_t n_probe = 100000;
  std::uint64_t seed = 0;
  /// Fixed tiles per side; 0 picks the resolution whose point count is
  /// closest to target_points.
  std::size_t resolution = 0;
  std::size_t target_points = 358;
  std::size_t min_resolution = 8;
  std::size_t max_resolution = 64;
  Box tiled_area = kUnitTaskSpace;
};

/// Probes random policies without noise, tiles the area, and emits one point
/// per occupied tile: a probe landing drawn uniformly among those that fell
/// in the tile. Throws ResolutionError with fewer than 100 occupied tiles and
/// ConfigError when n_probe < 1e5.
BenchmarkSet generate_benchmark(const EnvConfig& env, const BenchmarkOptions& options);

void write_benchmark(const std::string& path, const BenchmarkSet& bench);
BenchmarkSet read_benchmark(const std::string& path);

struct EvaluationResult {
  double mean_error = 0.0;
  std::vector<double> errors;
};

/// For each benchmark goal: infer a policy from the frozen memory and execute
/// it once on a private copy of the environment reseeded with `seed`. Leaves
/// memory untouched. Throws EmptyMemoryError on an empty memory.
EvaluationResult evaluate(const EpisodicMemory& memory, const BenchmarkSet& bench, const EnvConfig& env,
                          std::uint64_t seed, const ExplorerParams& params = {});

/// Number of occupied tiles of an n x n grid over area.
std::size_t coverage(std::span<const Episode> episodes, const Box& area = kUnitTaskSpace, std::size_t n = 20);

/// Fraction of goals falling inside box (0 when there are none).
double fraction_inside(std::span<const Goal> goals, const Box& box);

struct TeacherConfig {
  int demonstrator = 2;  // 1, 2 or 3
  std::string path;      // prebuilt set; empty builds one on demand
  std::size_t k_rep = 5;
  std::size_t source_episodes = 5000;  // SAGG-RIAC run feeding demonstrators 1-2
  std::uint64_t seed = 7;
  DemoProfile profile;  // demonstrator 3 movement shape
  std::size_t count = 127;  // demonstrator 3 set size
};

struct HarnessConfig {
  std::vector<Strategy> strategies{Strategy::observation, Strategy::random, Strategy::sagg_riac,
                                   Strategy::imitation, Strategy::sgim_d};
  std::vector<std::uint64_t> seeds{1, 2, 3};
  BenchmarkOptions bench;
  std::string bench_path;  // prebuilt benchmark; empty generates one
  bool large_space = false;
  std::size_t coverage_tiles = 20;
  std::size_t threads = 1;
  std::string label = "experiment";
};

struct ExperimentConfig {
  EnvConfig env;
  LearnerConfig learner;
  TeacherConfig teacher;
  HarnessConfig harness;
};

/// INI file with sections [env], [learner], [teacher], [harness]. Missing
/// keys keep their defaults; unknown keys raise ConfigError.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& text);

/// Task space used by learners: [-100, 100]^2 for the large variant.
Box task_space_for(const HarnessConfig& harness, const Box& base);

/// Builds the configured demonstration set (or reads it from teacher.path).
DemonstrationSet make_teacher(const ExperimentConfig& cfg);

struct SeedResult {
  std::uint64_t seed = 0;
  std::vector<std::size_t> checkpoints;
  std::vector<double> errors;  // mean benchmark error per checkpoint
  std::size_t coverage = 0;
  double reachable_goal_fraction = 0.0;
  std::size_t executed = 0;
  bool failed = false;
  std::string failure;
};

struct StrategyResult {
  Strategy strategy = Strategy::random;
  std::vector<SeedResult> seeds;
  std::vector<std::size_t> checkpoints;
  std::vector<double> mean;      // across successful seeds
  std::vector<double> variance;  // population variance across seeds

  double final_mean() const { return mean.empty() ? 0.0 : mean.back(); }
  double final_variance() const { return variance.empty() ? 0.0 : variance.back(); }
  std::size_t successful() const;
};

struct ExperimentReport {
  std::string label;
  int demonstrator = 0;
  bool large_space = false;
  double noise_std = 0.0;  // calibrated mean per-axis noise std
  std::size_t benchmark_points = 0;
  std::vector<StrategyResult> strategies;

  const StrategyResult* find(Strategy s) const;
};

/// Seeds are run sequentially or across harness.threads workers; each run
/// owns its environment. A failing run is marked and left out of the means.
ExperimentReport run_experiment(const ExperimentConfig& cfg, const BenchmarkSet& bench,
                                 const DemonstrationSet* teacher);

/// Fills mean and variance curves from the per-seed results.
void aggregate(StrategyResult& result);

struct Verdict {
  std::string criterion;  // "C1".."C6"
  std::string description;
  bool pass = false;
  std::string detail;
};

/// Pass/fail rows for every criterion the reports carry enough data for.
std::vector<Verdict> compare(const std::vector<ExperimentReport>& reports);

std::string report_json(const std::vector<ExperimentReport>& reports);
std::vector<ExperimentReport> read_report_json(const std::string& text);
/// Plot-ready rows: label, strategy, checkpoint, mean, variance, n.
std::string curves_csv(const std::vector<ExperimentReport>& reports);

}  // namespace sgimd
