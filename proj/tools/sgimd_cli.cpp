#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "sgimd/harness.hpp"

using namespace sgimd;

namespace {

ExperimentConfig config_or_default(const std::string& path) {
  return path.empty() ? ExperimentConfig{} : load_config(path);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path);
  out << text;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

BenchmarkSet bench_for(const ExperimentConfig& cfg, const std::string& path) {
  if (!path.empty()) return read_benchmark(path);
  if (!cfg.harness.bench_path.empty()) return read_benchmark(cfg.harness.bench_path);
  return generate_benchmark(cfg.env, cfg.harness.bench);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Socially guided intrinsic motivation on a simulated fishing arm"};
  app.require_subcommand(1);

  std::string config_path;
  auto add_config = [&](CLI::App* cmd) { cmd->add_option("--config", config_path, "INI experiment config"); };

  auto* calibrate = app.add_subcommand("calibrate", "Recompute the landing scale and report noise statistics");
  add_config(calibrate);
  std::size_t cal_samples = 20000;
  std::uint64_t cal_seed = 1;
  calibrate->add_option("--samples", cal_samples, "random policies used for the percentile");
  calibrate->add_option("--seed", cal_seed);

  auto* bench_gen = app.add_subcommand("bench-gen", "Generate the benchmark goal set");
  add_config(bench_gen);
  std::string bench_out = "bench.csv";
  bench_gen->add_option("--out", bench_out);

  auto* teach_gen = app.add_subcommand("teach-gen", "Build a demonstration set");
  add_config(teach_gen);
  int demonstrator = 2;
  std::string teach_out;
  teach_gen->add_option("--demonstrator", demonstrator)->required()->check(CLI::Range(1, 3));
  teach_gen->add_option("--out", teach_out)->required();

  auto* run = app.add_subcommand("run", "Run one learner and write its run record");
  add_config(run);
  std::string strategy;
  std::uint64_t run_seed = 1;
  std::string out_dir = ".";
  std::string bench_path;
  run->add_option("--strategy", strategy)->required();
  run->add_option("--seed", run_seed)->required();
  run->add_option("--out-dir", out_dir);
  run->add_option("--bench", bench_path, "evaluate checkpoints on this benchmark");

  auto* eval = app.add_subcommand("eval", "Evaluate a stored memory on a benchmark");
  add_config(eval);
  std::string memory_path;
  std::uint64_t eval_seed = 1;
  eval->add_option("--memory", memory_path)->required();
  eval->add_option("--bench", bench_path)->required();
  eval->add_option("--seed", eval_seed);

  auto* experiment = app.add_subcommand("experiment", "Run every configured strategy and seed");
  add_config(experiment);
  std::string report_out = "report.json";
  std::string curves_out;
  experiment->add_option("--out", report_out);
  experiment->add_option("--curves", curves_out);
  experiment->add_option("--bench", bench_path);

  auto* cmp = app.add_subcommand("compare", "Print acceptance verdicts for one or more reports");
  std::vector<std::string> report_paths;
  cmp->add_option("--report", report_paths)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*calibrate) {
      const ExperimentConfig cfg = config_or_default(config_path);
      const double scale = calibrate_scale(cfg.env, Context::origin(), cal_samples, cal_seed);
      EnvConfig scaled = cfg.env;
      scaled.scale = scale;
      const NoiseProfile noise = measure_noise(scaled, Context::origin(), 200, 20, cal_seed + 1);
      const Environment env(scaled);
      const Outcome rest = env.rest_outcome();
      std::printf("scale = %.14g\n", scale);
      std::printf("rest outcome = (%.6f, %.6f)\n", rest.x, rest.y);
      std::printf("mean per-axis noise std = %.6f\n", noise.mean_axis_std);
      std::printf("mean 2-D dispersion = %.6f\n", noise.mean_dispersion);
    } else if (*bench_gen) {
      const ExperimentConfig cfg = config_or_default(config_path);
      const BenchmarkSet bench = generate_benchmark(cfg.env, cfg.harness.bench);
      write_benchmark(bench_out, bench);
      std::printf("%zu points at resolution %zu -> %s\n", bench.points.size(), bench.resolution, bench_out.c_str());
    } else if (*teach_gen) {
      ExperimentConfig cfg = config_or_default(config_path);
      cfg.teacher.demonstrator = demonstrator;
      cfg.teacher.path.clear();
      const DemonstrationSet set = make_teacher(cfg);
      write_demonstration_set(teach_out, set);
      std::printf("%zu demonstrations (%s) -> %s\n", set.size(), set.provenance.c_str(), teach_out.c_str());
    } else if (*run) {
      const ExperimentConfig cfg = config_or_default(config_path);
      LearnerConfig lc = cfg.learner;
      lc.strategy = strategy_from_string(strategy);
      lc.rng_seed = run_seed;
      lc.task_space = task_space_for(cfg.harness, cfg.learner.task_space);
      std::optional<DemonstrationSet> teacher;
      if (is_social(lc.strategy)) teacher = make_teacher(cfg);
      std::optional<BenchmarkSet> bench;
      if (!bench_path.empty()) bench = read_benchmark(bench_path);
      Environment env(cfg.env);
      const CheckpointFn checkpoint = [&](std::size_t policies, const EpisodicMemory& memory) {
        if (!bench) return;
        const auto seed = Rng::derive(Rng::derive(run_seed, 1000), policies);
        std::printf("%zu policies: mean error %.6f\n", policies,
                    evaluate(memory, *bench, cfg.env, seed, lc.explorer).mean_error);
      };
      const RunRecord record = run_learner(lc, env, teacher ? &*teacher : nullptr, checkpoint);
      std::filesystem::create_directories(out_dir);
      const std::string stem = (std::filesystem::path(out_dir) / (strategy + "_" + std::to_string(run_seed))).string();
      write_run_csv(stem + ".csv", record);
      write_text(stem + ".json", run_sidecar_json(record));
      write_memory_csv(stem + "_memory.csv", record.memory);
      std::printf("%zu executed, %zu in memory -> %s.csv\n", record.executed, record.memory.size(), stem.c_str());
    } else if (*eval) {
      const ExperimentConfig cfg = config_or_default(config_path);
      const EpisodicMemory memory = read_memory_csv(memory_path);
      const BenchmarkSet bench = read_benchmark(bench_path);
      const EvaluationResult res = evaluate(memory, bench, cfg.env, eval_seed, cfg.learner.explorer);
      std::printf("mean error %.6f over %zu goals\n", res.mean_error, res.errors.size());
    } else if (*experiment) {
      const ExperimentConfig cfg = config_or_default(config_path);
      const BenchmarkSet bench = bench_for(cfg, bench_path);
      std::optional<DemonstrationSet> teacher;
      for (Strategy s : cfg.harness.strategies)
        if (is_social(s) && !teacher) teacher = make_teacher(cfg);
      const ExperimentReport report = run_experiment(cfg, bench, teacher ? &*teacher : nullptr);
      write_text(report_out, report_json({report}));
      if (!curves_out.empty()) write_text(curves_out, curves_csv({report}));
      for (const auto& s : report.strategies)
        std::printf("%-12s final %.6f (var %.6g, %zu seeds)\n", to_string(s.strategy).c_str(), s.final_mean(),
                    s.final_variance(), s.successful());
    } else if (*cmp) {
      std::vector<ExperimentReport> reports;
      for (const auto& p : report_paths)
        for (auto& r : read_report_json(read_text(p))) reports.push_back(std::move(r));
      const auto verdicts = compare(reports);
      for (const auto& v : verdicts)
        std::printf("%s %s: %s [%s]\n", v.pass ? "PASS" : "FAIL", v.criterion.c_str(), v.description.c_str(),
                    v.detail.c_str());
      for (const auto& v : verdicts)
        if (!v.pass) return 1;
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
