#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>

#include "sgimd/teachers.hpp"

using namespace sgimd;

namespace {

EpisodicMemory executed_memory(std::size_t n, std::uint64_t seed) {
  Environment env(EnvConfig{});
  env.reseed(seed);
  Rng rng(seed);
  EpisodicMemory m;
  for (std::size_t i = 0; i < n; ++i) {
    const auto p = random_policy(rng);
    m.record({i, StrategyTag::autonomous, p, env.execute(p)});
  }
  return m;
}

const Demonstrator3Result& default_demonstrator3() {
  static const Demonstrator3Result result = [] {
    Environment env(EnvConfig{});
    Rng rng(5);
    return build_demonstrator3(env, rng);
  }();
  return result;
}

double correlation(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

DemonstrationSet demos_at(const std::vector<Outcome>& outcomes) {
  DemonstrationSet set;
  for (const auto& o : outcomes) set.entries.emplace_back(PolicyDemo{PolicyParams(), o});
  return set;
}

}  // namespace

TEST(TileGrid, IndexingAndBoxes) {
  const TileGrid grid;
  EXPECT_EQ(grid.count(), 64u);
  EXPECT_EQ(grid.tile_of({-1.0, -1.0}), 0u);
  EXPECT_EQ(grid.tile_of({1.0, 1.0}), 63u);
  EXPECT_EQ(grid.tile_of({-0.7, -1.0}), 1u);
  EXPECT_EQ(grid.tile_of({-1.0, -0.7}), 8u);
  EXPECT_FALSE(grid.tile_of({1.2, 0.0}).has_value());
  for (std::size_t t = 0; t < grid.count(); ++t) EXPECT_EQ(grid.tile_of(grid.center(t)), t);
}

TEST(Demonstrator1, SizeMembershipAndReproducibility) {
  const auto m = executed_memory(500, 1);
  Rng a(7), b(7);
  const auto set = build_demonstrator1(m, a);
  const auto again = build_demonstrator1(m, b);
  ASSERT_EQ(set.size(), 127u);
  std::set<std::size_t> used;
  for (std::size_t i = 0; i < set.size(); ++i) {
    const auto& d = std::get<PolicyDemo>(set.entries[i]);
    const auto& e = std::get<PolicyDemo>(again.entries[i]);
    EXPECT_EQ(d.params, e.params);
    std::size_t found = m.size();
    for (std::size_t k = 0; k < m.size(); ++k)
      if (m[k].params == d.params && m[k].outcome == d.outcome) found = k;
    ASSERT_LT(found, m.size());
    used.insert(found);
  }
  EXPECT_EQ(used.size(), 127u);  // without replacement
  Rng c(7);
  EXPECT_THROW(build_demonstrator1(executed_memory(100, 2), c), SizeError);
}

TEST(Demonstrator2, KeepsLowestVarianceCandidatePerTile) {
  const auto m = executed_memory(400, 3);
  const TileGrid grid;
  Environment env(EnvConfig{});
  env.reseed(9);
  const auto r = build_demonstrator2(m, env, 5, grid);
  ASSERT_EQ(r.set.size(), r.tiles.size());
  std::set<std::size_t> tiles;
  for (std::size_t i = 0; i < r.tiles.size(); ++i) {
    const auto& sel = r.tiles[i];
    EXPECT_TRUE(tiles.insert(sel.tile).second) << "tile used twice";
    EXPECT_EQ(grid.tile_of(m[sel.chosen].outcome), sel.tile);
    ASSERT_FALSE(sel.candidate_variances.empty());
    for (double v : sel.candidate_variances) EXPECT_LE(sel.chosen_variance, v);
    EXPECT_EQ(std::get<PolicyDemo>(r.set.entries[i]).params, m[sel.chosen].params);
  }
  std::size_t candidates = 0;
  for (const auto& sel : r.tiles) candidates += sel.candidate_variances.size();
  std::size_t inside = 0;
  for (std::size_t i = 0; i < m.size(); ++i) inside += grid.tile_of(m[i].outcome).has_value();
  EXPECT_EQ(candidates, inside);

  Environment env2(EnvConfig{});
  env2.reseed(9);
  const auto again = build_demonstrator2(m, env2, 5, grid);
  ASSERT_EQ(again.tiles.size(), r.tiles.size());
  for (std::size_t i = 0; i < r.tiles.size(); ++i)
    EXPECT_EQ(again.tiles[i].candidate_variances, r.tiles[i].candidate_variances);
  EXPECT_THROW(build_demonstrator2(m, env2, 4, grid), ConfigError);
}

TEST(Demonstrator3, TrajectoriesAreMonotone) {
  const auto& r = default_demonstrator3();
  ASSERT_EQ(r.set.size(), 127u);
  for (const auto& entry : r.set.entries) {
    const auto& demo = std::get<RawDemonstration>(entry);
    for (const auto& tr : demo.trajectories) {
      ASSERT_EQ(tr.size(), 100u);
      bool up = true, down = true;
      for (std::size_t k = 1; k < tr.size(); ++k) {
        up = up && tr.positions[k] >= tr.positions[k - 1];
        down = down && tr.positions[k] <= tr.positions[k - 1];
      }
      EXPECT_TRUE(up || down);
    }
  }
}

TEST(Demonstrator3, SharedProfileUpToScaling) {
  const auto& r = default_demonstrator3();
  const auto& first = std::get<RawDemonstration>(r.set.entries[0]).trajectories[0].positions;
  for (const auto& entry : r.set.entries)
    for (const auto& tr : std::get<RawDemonstration>(entry).trajectories) {
      if (tr.positions.front() == tr.positions.back()) continue;
      EXPECT_NEAR(std::abs(correlation(tr.positions, first)), 1.0, 1e-9);
    }
}

TEST(Demonstrator3, CoversReachableTiles) {
  const TileGrid grid;
  Environment env(EnvConfig{});
  Rng rng(77);
  std::set<std::size_t> reachable;
  for (int i = 0; i < 100000; ++i)
    if (const auto t = grid.tile_of(env.simulate(random_policy(rng)).landing)) reachable.insert(*t);
  std::set<std::size_t> covered;
  for (const auto& entry : default_demonstrator3().set.entries)
    if (const auto t = grid.tile_of(demo_outcome(entry)); t && reachable.count(*t)) covered.insert(*t);
  ASSERT_FALSE(reachable.empty());
  EXPECT_GE(static_cast<double>(covered.size()), 0.7 * static_cast<double>(reachable.size()))
      << covered.size() << " of " << reachable.size();
}

TEST(Demonstrator3, StructuredComparedWithRandomTrajectories) {
  // The statistic is the mean per-time-bin variance of range-normalized
  // trajectories, relative to trajectories of random policies. A set drawn
  // from the random distribution scores about 1; we call a set structured
  // below 0.1.
  const double threshold = 0.1;
  std::vector<JointTrajectory> demos;
  for (const auto& entry : default_demonstrator3().set.entries)
    for (const auto& tr : std::get<RawDemonstration>(entry).trajectories) demos.push_back(tr);

  auto random_set = [](std::uint64_t seed) {
    Rng rng(seed);
    std::vector<JointTrajectory> out;
    for (int i = 0; i < 200; ++i) {
      const auto p = random_policy(rng);
      const auto times = uniform_times(p.duration(), 100);
      for (std::size_t j = 0; j < kJoints; ++j) out.push_back(generate_trajectory(p, j, times));
    }
    return out;
  };
  const auto reference = random_set(1);
  EXPECT_LT(profile_variance_ratio(demos, reference), threshold);
  const double control = profile_variance_ratio(random_set(2), reference);
  EXPECT_GT(control, 0.8);
  EXPECT_LT(control, 1.25);
}

TEST(Demonstrator3, ProfileShapes) {
  const DemoProfile mj;
  EXPECT_EQ(mj(0.0), 0.0);
  EXPECT_EQ(mj(1.0 / 3.0), 0.0);
  EXPECT_NEAR(mj(0.5), 0.5, 1e-15);
  EXPECT_EQ(mj(2.0 / 3.0 + 1e-9), 1.0);
  EXPECT_EQ(mj(1.0), 1.0);
  DemoProfile bad;
  bad.active = 0.0;
  EXPECT_THROW(bad(0.5), ConfigError);
  DemoProfile step;
  step.shape = DemoProfile::Shape::knot_step;
  EXPECT_NEAR(step(0.5), 0.5, 1e-12);
  EXPECT_LT(step(0.0), 0.01);
  EXPECT_GT(step(1.0), 0.99);
}

TEST(SelectDemonstration, PrefersLeastVisitedTile) {
  const TileGrid grid;
  const Outcome in_a = grid.center(10), in_b = grid.center(40);
  const auto set = demos_at({in_a, in_a, in_b});
  const std::vector<Outcome> learner(20, in_a);
  Rng rng(3);
  for (int i = 0; i < 200; ++i) EXPECT_EQ(select_demonstration(set, learner, grid, rng), 2u);
}

TEST(SelectDemonstration, UniformOverDemoTilesWhenEquallyVisited) {
  const TileGrid grid;
  const Outcome in_a = grid.center(10), in_b = grid.center(40);
  const auto set = demos_at({in_a, in_a, in_a, in_b});
  Rng rng(4);
  const int n = 8000;
  std::array<int, 4> hits{};
  for (int i = 0; i < n; ++i) ++hits[select_demonstration(set, {}, grid, rng)];
  // tile B with probability 1/2, each tile-A entry 1/6
  const double expect[4] = {n / 6.0, n / 6.0, n / 6.0, n / 2.0};
  for (int k = 0; k < 4; ++k) {
    const double p = expect[k] / n;
    EXPECT_LT(std::abs(hits[k] - expect[k]), 3 * std::sqrt(n * p * (1 - p))) << k;
  }
}

TEST(SelectDemonstration, FallbackAndReproducibility) {
  const TileGrid grid;
  const auto outside = demos_at({{3.0, 3.0}, {-4.0, 0.0}});
  Rng rng(5);
  std::array<int, 2> hits{};
  for (int i = 0; i < 1000; ++i) ++hits[select_demonstration(outside, {}, grid, rng)];
  EXPECT_GT(hits[0], 400);
  EXPECT_GT(hits[1], 400);

  const auto set = demos_at({grid.center(1), grid.center(2), grid.center(3), grid.center(3)});
  Rng a(6), b(6);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(select_demonstration(set, {}, grid, a), select_demonstration(set, {}, grid, b));
  Rng c(0);
  EXPECT_THROW(select_demonstration(DemonstrationSet{}, {}, grid, c), SizeError);
}

TEST(DemonstrationSetIo, RoundTrip) {
  const auto dir = std::filesystem::temp_directory_path() / "sgimd_teacher_io";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);

  Rng rng(8);
  const auto d1 = build_demonstrator1(executed_memory(200, 4), rng);
  const auto csv = (dir / "d1.csv").string();
  write_demonstration_set(csv, d1);
  const auto back = read_demonstration_set(csv);
  ASSERT_EQ(back.size(), d1.size());
  for (std::size_t i = 0; i < d1.size(); ++i) {
    EXPECT_EQ(std::get<PolicyDemo>(back.entries[i]).params, std::get<PolicyDemo>(d1.entries[i]).params);
    EXPECT_EQ(demo_outcome(back.entries[i]), demo_outcome(d1.entries[i]));
  }

  DemonstrationSet d3;
  for (std::size_t i = 0; i < 4; ++i) d3.entries.push_back(default_demonstrator3().set.entries[i]);
  const auto raw = (dir / "d3").string();
  write_demonstration_set(raw, d3);
  const auto raw_back = read_demonstration_set(raw);
  ASSERT_EQ(raw_back.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) {
    const auto& x = std::get<RawDemonstration>(raw_back.entries[i]);
    const auto& y = std::get<RawDemonstration>(d3.entries[i]);
    EXPECT_EQ(x.outcome, y.outcome);
    EXPECT_EQ(x.trajectories[3].positions, y.trajectories[3].positions);
  }
  std::filesystem::remove_all(dir);
}
