#include "sgimd/teachers.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>

#include "sgimd/csv.hpp"

namespace sgimd {

std::optional<std::size_t> TileGrid::tile_of(Vec2 p) const {
  if (!area.contains(p)) return std::nullopt;
  auto cell = [](double v, double lo, double hi, std::size_t n) {
    const auto k = static_cast<std::size_t>((v - lo) / (hi - lo) * static_cast<double>(n));
    return std::min(k, n - 1);
  };
  return cell(p.y, area.lo.y, area.hi.y, ny) * nx + cell(p.x, area.lo.x, area.hi.x, nx);
}

Box TileGrid::tile_box(std::size_t tile) const {
  const double wx = area.width(0) / static_cast<double>(nx);
  const double wy = area.width(1) / static_cast<double>(ny);
  const double x0 = area.lo.x + wx * static_cast<double>(tile % nx);
  const double y0 = area.lo.y + wy * static_cast<double>(tile / nx);
  return {{x0, y0}, {x0 + wx, y0 + wy}};
}

Outcome demo_outcome(const DemoEntry& entry) {
  return std::visit([](const auto& e) { return e.outcome; }, entry);
}

DemonstrationSet build_demonstrator1(const EpisodicMemory& memory, Rng& rng, std::size_t count) {
  if (memory.size() < count)
    throw SizeError("demonstrator 1 needs " + std::to_string(count) + " exemplars, memory holds " +
                    std::to_string(memory.size()));
  // partial Fisher-Yates: the first `count` slots become a uniform sample
  std::vector<std::size_t> order(memory.size());
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = 0; i < count; ++i) std::swap(order[i], order[i + rng.index(order.size() - i)]);

  DemonstrationSet set;
  set.provenance = "demonstrator1";
  for (std::size_t i = 0; i < count; ++i) {
    const Episode& e = memory[order[i]];
    set.entries.emplace_back(PolicyDemo{e.params, e.outcome});
  }
  return set;
}

Demonstrator2Result build_demonstrator2(const EpisodicMemory& memory, Environment& env, std::size_t k_rep,
                                        const TileGrid& grid) {
  if (k_rep < 5) throw ConfigError("demonstrator 2 needs k_rep >= 5");
  if (memory.empty()) throw SizeError("demonstrator 2 needs a non-empty memory");

  std::map<std::size_t, std::vector<std::size_t>> by_tile;
  for (std::size_t i = 0; i < memory.size(); ++i)
    if (const auto t = grid.tile_of(memory[i].outcome)) by_tile[*t].push_back(i);

  Demonstrator2Result out;
  out.set.provenance = "demonstrator2";
  for (const auto& [tile, candidates] : by_tile) {
    TileSelection sel;
    sel.tile = tile;
    sel.chosen_variance = std::numeric_limits<double>::infinity();
    Outcome chosen_mean;
    for (std::size_t pos : candidates) {
      std::vector<Outcome> reps(k_rep);
      Vec2 mean;
      for (auto& r : reps) {
        r = env.execute(memory[pos].params);
        mean = mean + r;
      }
      mean = mean * (1.0 / static_cast<double>(k_rep));
      double var = 0.0;
      for (const auto& r : reps) var += squared_distance(r, mean);
      var /= static_cast<double>(k_rep - 1);
      sel.candidate_variances.push_back(var);
      if (var < sel.chosen_variance) {
        sel.chosen_variance = var;
        sel.chosen = pos;
        chosen_mean = mean;
      }
    }
    out.set.entries.emplace_back(PolicyDemo{memory[sel.chosen].params, chosen_mean});
    out.tiles.push_back(std::move(sel));
  }
  return out;
}

double minimum_jerk(double phase) {
  const double s = std::clamp(phase, 0.0, 1.0);
  return s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
}

double DemoProfile::operator()(double phase) const {
  if (shape == Shape::knot_step) return primitive_value({0.0, 0.0, 1.0, 1.0}, 1.0, std::clamp(phase, 0.0, 1.0));
  if (!(active > 0.0 && active <= 1.0)) throw ConfigError("active fraction must be in (0, 1]");
  return minimum_jerk((phase - 0.5 * (1.0 - active)) / active);
}

RawDemonstration profile_demonstration(const std::array<double, kJoints>& start,
                                       const std::array<double, kJoints>& finish, double duration,
                                       std::size_t samples, const DemoProfile& profile) {
  RawDemonstration demo;
  const auto times = uniform_times(duration, samples);
  for (std::size_t j = 0; j < kJoints; ++j) {
    JointTrajectory& tr = demo.trajectories[j];
    tr.joint = j;
    tr.times = times;
    tr.positions.resize(times.size());
    for (std::size_t k = 0; k < times.size(); ++k) {
      tr.positions[k] = start[j] + (finish[j] - start[j]) * profile(times[k] / duration);
      // the polynomial can wiggle by an ulp near its flat ends
      if (k > 0 && (finish[j] - start[j]) * (tr.positions[k] - tr.positions[k - 1]) < 0.0)
        tr.positions[k] = tr.positions[k - 1];
    }
  }
  return demo;
}

namespace {

JointSamples to_samples(const RawDemonstration& demo, std::size_t steps) {
  // resample by linear interpolation onto the environment's step grid
  JointSamples s;
  s.duration = demo.duration();
  const auto times = uniform_times(s.duration, steps);
  s.rows.resize(times.size());
  for (std::size_t j = 0; j < kJoints; ++j) {
    const JointTrajectory& tr = demo.trajectories[j];
    std::size_t seg = 0;
    for (std::size_t k = 0; k < times.size(); ++k) {
      while (seg + 2 < tr.size() && tr.times[seg + 1] < times[k]) ++seg;
      const double t0 = tr.times[seg];
      const double t1 = tr.times[seg + 1];
      const double a = std::clamp((times[k] - t0) / (t1 - t0), 0.0, 1.0);
      s.rows[k][j] = tr.positions[seg] + a * (tr.positions[seg + 1] - tr.positions[seg]);
    }
  }
  return s;
}

JointSamples profile_samples(const std::array<double, kJoints>& start, const std::array<double, kJoints>& finish,
                             double duration, std::size_t steps, const DemoProfile& profile) {
  JointSamples s;
  s.duration = duration;
  const auto times = uniform_times(duration, steps);
  s.rows.resize(times.size());
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double p = profile(times[k] / duration);
    for (std::size_t j = 0; j < kJoints; ++j) s.rows[k][j] = start[j] + (finish[j] - start[j]) * p;
  }
  return s;
}

}  // namespace

Demonstrator3Result build_demonstrator3(Environment& env, Rng& rng, const TileGrid& grid,
                                        const Demonstrator3Options& options) {
  if (options.count == 0 || options.trajectory_samples < 4) throw ConfigError("bad demonstrator 3 options");
  const std::size_t steps = env.config().steps;

  struct Candidate {
    double miss;
    std::array<double, kJoints> start;
    std::array<double, kJoints> finish;
    double duration;
  };

  Demonstrator3Result out;
  out.set.provenance = "demonstrator3";
  // one shared search pool; each candidate serves the tile it lands in
  std::vector<std::vector<Candidate>> pool(grid.count());
  for (std::size_t s = 0; s < options.search_samples * grid.count(); ++s) {
    Candidate c;
    // wind-up posture and end posture
    for (double& f : c.start) f = rng.uniform();
    for (double& f : c.finish) f = rng.uniform();
    c.duration = decode_duration(rng.uniform());
    const Outcome o = env.simulate(profile_samples(c.start, c.finish, c.duration, steps, options.profile)).landing;
    const Vec2 inside{std::clamp(o.x, grid.area.lo.x, grid.area.hi.x), std::clamp(o.y, grid.area.lo.y, grid.area.hi.y)};
    const std::size_t tile = *grid.tile_of(inside);
    const double d = distance(o, grid.center(tile));
    if (d >= options.max_miss) continue;
    // landings inside the tile rank ahead of misses
    c.miss = grid.tile_box(tile).contains(o) ? d - 1.0 : d;
    pool[tile].push_back(c);
  }
  std::vector<std::vector<Candidate>> ranked;
  for (std::size_t tile = 0; tile < grid.count(); ++tile) {
    auto& kept = pool[tile];
    if (kept.empty()) {
      out.skipped_tiles.push_back(tile);
      continue;
    }
    const std::size_t n = std::min(options.count, kept.size());
    std::partial_sort(kept.begin(), kept.begin() + static_cast<std::ptrdiff_t>(n), kept.end(),
                      [](const Candidate& a, const Candidate& b) { return a.miss < b.miss; });
    kept.resize(n);
    ranked.push_back(std::move(kept));
  }
  for (std::size_t rank = 0; out.set.size() < options.count; ++rank) {
    bool any = false;
    for (const auto& kept : ranked) {
      if (rank >= kept.size() || out.set.size() == options.count) continue;
      any = true;
      const Candidate& c = kept[rank];
      RawDemonstration demo =
          profile_demonstration(c.start, c.finish, c.duration, options.trajectory_samples, options.profile);
      demo.outcome = env.execute(to_samples(demo, steps));
      out.set.entries.emplace_back(std::move(demo));
    }
    if (!any) break;
  }
  return out;
}

double profile_variance_ratio(const std::vector<JointTrajectory>& set, const std::vector<JointTrajectory>& reference,
                              std::size_t bins) {
  if (bins == 0) throw ConfigError("profile_variance_ratio needs at least one bin");
  auto profile = [bins](const JointTrajectory& tr) {
    const auto [mn, mx] = std::minmax_element(tr.positions.begin(), tr.positions.end());
    const double range = *mx - *mn;
    std::vector<double> sum(bins, 0.0), cnt(bins, 0.0);
    const double dur = tr.duration();
    for (std::size_t k = 0; k < tr.size(); ++k) {
      const double phase = dur > 0.0 ? tr.times[k] / dur : 0.0;
      const std::size_t b = std::min(static_cast<std::size_t>(phase * static_cast<double>(bins)), bins - 1);
      // orient every profile so that it ends above where it starts
      double v = range > 0.0 ? (tr.positions[k] - *mn) / range : 0.0;
      if (tr.positions.back() < tr.positions.front()) v = 1.0 - v;
      sum[b] += v;
      cnt[b] += 1.0;
    }
    for (std::size_t b = 0; b < bins; ++b) sum[b] = cnt[b] > 0.0 ? sum[b] / cnt[b] : 0.0;
    return sum;
  };
  auto mean_bin_variance = [&](const std::vector<JointTrajectory>& trs) {
    if (trs.size() < 2) throw SizeError("profile_variance_ratio needs at least two trajectories per set");
    std::vector<std::vector<double>> rows;
    rows.reserve(trs.size());
    for (const auto& tr : trs) rows.push_back(profile(tr));
    double total = 0.0;
    for (std::size_t b = 0; b < bins; ++b) {
      double m = 0.0;
      for (const auto& r : rows) m += r[b];
      m /= static_cast<double>(rows.size());
      double v = 0.0;
      for (const auto& r : rows) v += (r[b] - m) * (r[b] - m);
      total += v / static_cast<double>(rows.size() - 1);
    }
    return total / static_cast<double>(bins);
  };
  const double ref = mean_bin_variance(reference);
  if (!(ref > 0.0)) throw DomainError("reference trajectories have no shape variance");
  return mean_bin_variance(set) / ref;
}

std::size_t select_demonstration(const DemonstrationSet& set, std::span<const Outcome> learner_outcomes,
                                 const TileGrid& grid, Rng& rng) {
  if (set.empty()) throw SizeError("cannot select from an empty demonstration set");
  std::vector<std::vector<std::size_t>> demos(grid.count());
  for (std::size_t i = 0; i < set.size(); ++i)
    if (const auto t = grid.tile_of(demo_outcome(set.entries[i]))) demos[*t].push_back(i);

  std::vector<std::size_t> visits(grid.count(), 0);
  for (const Outcome& o : learner_outcomes)
    if (const auto t = grid.tile_of(o)) ++visits[*t];

  std::size_t least = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> tiles;
  for (std::size_t t = 0; t < grid.count(); ++t) {
    if (demos[t].empty()) continue;
    if (visits[t] < least) {
      least = visits[t];
      tiles.clear();
    }
    if (visits[t] == least) tiles.push_back(t);
  }
  if (tiles.empty()) return rng.index(set.size());
  const auto& pool = demos[tiles[rng.index(tiles.size())]];
  return pool[rng.index(pool.size())];
}

void write_demonstration_set(const std::string& path, const DemonstrationSet& set) {
  if (set.empty()) throw SizeError("refusing to write an empty demonstration set");
  const bool raw = std::holds_alternative<RawDemonstration>(set.entries.front());
  for (const auto& e : set.entries)
    if (std::holds_alternative<RawDemonstration>(e) != raw)
      throw FormatError("a demonstration set file cannot mix raw and parameter demonstrations");

  if (raw) {
    std::filesystem::create_directories(path);
    for (std::size_t i = 0; i < set.size(); ++i) {
      char name[32];
      std::snprintf(name, sizeof name, "demo_%03zu.txt", i);
      write_demonstration((std::filesystem::path(path) / name).string(),
                          std::get<RawDemonstration>(set.entries[i]));
    }
    std::ofstream meta(std::filesystem::path(path) / "provenance.txt");
    meta << set.provenance << '\n';
    return;
  }

  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path);
  out << "# provenance=" << set.provenance << '\n';
  for (std::size_t i = 1; i <= kParamDim; ++i) out << "theta" << i << ',';
  out << "tau_x,tau_y\n";
  for (const auto& e : set.entries) {
    const auto& d = std::get<PolicyDemo>(e);
    for (double v : d.params.values()) out << csv::number(v) << ',';
    out << csv::number(d.outcome.x) << ',' << csv::number(d.outcome.y) << '\n';
  }
}

DemonstrationSet read_demonstration_set(const std::string& path) {
  DemonstrationSet set;
  if (std::filesystem::is_directory(path)) {
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(path)) {
      const auto name = entry.path().filename().string();
      if (name.starts_with("demo_") && entry.path().extension() == ".txt") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) set.entries.emplace_back(read_demonstration(f.string()));
    std::ifstream meta(std::filesystem::path(path) / "provenance.txt");
    if (!std::getline(meta, set.provenance)) set.provenance = "raw";
  } else {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot read " + path);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      if (line.starts_with("# provenance=")) {
        set.provenance = line.substr(13);
        continue;
      }
      if (line.starts_with("theta")) continue;
      const auto cells = csv::split(line);
      if (cells.size() != kParamDim + 2) throw FormatError("demonstration row has wrong column count in " + path);
      PolicyParams::Values v{};
      for (std::size_t i = 0; i < kParamDim; ++i) v[i] = csv::to_double(cells[i], path);
      const Outcome tau{csv::to_double(cells[kParamDim], path), csv::to_double(cells[kParamDim + 1], path)};
      if (!is_finite(tau)) throw FormatError("non-finite demonstrated outcome in " + path);
      set.entries.emplace_back(PolicyDemo{PolicyParams::from_values(v), tau});
    }
  }
  if (set.empty()) throw FormatError("no demonstrations found at " + path);
  return set;
}

}  // namespace sgimd
