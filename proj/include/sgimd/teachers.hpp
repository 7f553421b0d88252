#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "sgimd/environment.hpp"
#include "sgimd/memory.hpp"
#include "sgimd/primitives.hpp"
#include "sgimd/rng.hpp"

namespace sgimd {

/// Regular grid of tiles over a rectangle, row-major from the low corner.
struct TileGrid {
  Box area = kUnitTaskSpace;
  std::size_t nx = 8;
  std::size_t ny = 8;

  std::size_t count() const { return nx * ny; }
  /// Tile index of p, or nullopt outside the area.
  std::optional<std::size_t> tile_of(Vec2 p) const;
  Box tile_box(std::size_t tile) const;
  Vec2 center(std::size_t tile) const { const Box b = tile_box(tile); return (b.lo + b.hi) * 0.5; }
};

/// A demonstration given directly in the learner's parameter space.
struct PolicyDemo {
  PolicyParams params;
  Outcome outcome;
};

using DemoEntry = std::variant<PolicyDemo, RawDemonstration>;

Outcome demo_outcome(const DemoEntry& entry);

struct DemonstrationSet {
  std::vector<DemoEntry> entries;
  std::string provenance;

  std::size_t size() const { return entries.size(); }
  bool empty() const { return entries.empty(); }
};

/// Demonstrator 1: `count` exemplars drawn uniformly without replacement
/// from a finished learner's memory. Throws SizeError if memory is smaller.
DemonstrationSet build_demonstrator1(const EpisodicMemory& memory, Rng& rng, std::size_t count = 127);

/// Per-tile record of demonstrator 2's selection.
struct TileSelection {
  std::size_t tile = 0;
  std::size_t chosen = 0;                    // memory position
  double chosen_variance = 0.0;
  std::vector<double> candidate_variances;   // every candidate in the tile, memory order
};

struct Demonstrator2Result {
  DemonstrationSet set;
  std::vector<TileSelection> tiles;
};

/// Demonstrator 2: per non-empty tile, re-executes every stored candidate
/// k_rep times and keeps the one whose outcomes vary least; its demonstrated
/// outcome is the mean of those re-executions.
Demonstrator2Result build_demonstrator2(const EpisodicMemory& memory, Environment& env, std::size_t k_rep,
                                        const TileGrid& grid = {});

/// Smooth monotone 0 -> 1 profile shared by every synthesized demonstration.
double minimum_jerk(double phase);

/// Shared normalized shape s(phase) of a demonstrator-3 movement, rising
/// monotonically from about 0 to about 1.
struct DemoProfile {
  enum class Shape {
    minimum_jerk,  // hold, minimum-jerk transition over the central `active` fraction, hold
    knot_step,     // the primitive's response to knots (0, 0, 1, 1)
  };
  Shape shape = Shape::minimum_jerk;
  double active = 1.0 / 3.0;

  /// Throws ConfigError for active outside (0, 1].
  double operator()(double phase) const;
};

struct Demonstrator3Options {
  std::size_t search_samples = 2000;  // per tile, drawn as one pool shared by all tiles
  /// Demonstrations emitted, dealt round-robin over the tiles in order of
  /// each tile's best candidates.
  std::size_t count = 127;
  double max_miss = 0.3;
  std::size_t trajectory_samples = 100;
  DemoProfile profile;
};

struct Demonstrator3Result {
  DemonstrationSet set;
  std::vector<std::size_t> skipped_tiles;
};

/// Demonstrator 3: human-like movements in which every joint follows the same
/// DemoProfile shape, scaled between per-demonstration start and final
/// positions found by random search toward each tile.
Demonstrator3Result build_demonstrator3(Environment& env, Rng& rng, const TileGrid& grid = {},
                                        const Demonstrator3Options& options = {});

/// Raw demonstration of a profile-scaled movement (normalized positions).
RawDemonstration profile_demonstration(const std::array<double, kJoints>& start,
                                       const std::array<double, kJoints>& finish, double duration,
                                       std::size_t samples, const DemoProfile& profile = {});

/// Shape statistic for a set of joint trajectories: each trajectory is
/// range-normalized and averaged into `bins` time bins; returns the mean
/// per-bin variance across trajectories of `set` divided by that of
/// `reference`.
double profile_variance_ratio(const std::vector<JointTrajectory>& set,
                              const std::vector<JointTrajectory>& reference, std::size_t bins = 10);

/// Active teaching: counts learner outcomes per tile and returns the index of
/// a uniformly chosen entry from a uniformly chosen least-visited tile that
/// holds a demonstration; uniform over all entries when no tile qualifies.
std::size_t select_demonstration(const DemonstrationSet& set, std::span<const Outcome> learner_outcomes,
                                 const TileGrid& grid, Rng& rng);

/// Demonstrators 1-2: CSV of theta1..theta25, tau_x, tau_y.
/// Demonstrator 3: a directory of raw demonstration files demo_NNN.txt.
void write_demonstration_set(const std::string& path, const DemonstrationSet& set);
DemonstrationSet read_demonstration_set(const std::string& path);

}  // namespace sgimd
