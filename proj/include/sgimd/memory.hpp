#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sgimd/kdtree.hpp"
#include "sgimd/primitives.hpp"
#include "sgimd/types.hpp"

namespace sgimd {

/// One executed (or observed) movement and where the float landed. The
/// context is fixed for an experiment, so it is not stored per episode.
struct Episode {
  std::uint64_t index = 0;
  StrategyTag tag = StrategyTag::autonomous;
  PolicyParams params;
  Outcome outcome;
};

/// A retrieval hit: position of the episode in insertion order and its distance.
struct Neighbor {
  std::size_t position = 0;
  double distance = 0.0;
};

/// Episodic memory of every (theta, tau) pair, indexed both in the outcome
/// space and in the policy-parameter space. Indices are rebuilt every
/// kRebuildPeriod insertions; newer episodes sit in a linear side buffer.
class EpisodicMemory {
 public:
  static constexpr std::size_t kRebuildPeriod = 64;

  /// Throws DuplicateIndexError unless e.index exceeds every stored index.
  void record(const Episode& e);

  std::size_t size() const { return episodes_.size(); }
  bool empty() const { return episodes_.empty(); }
  std::span<const Episode> episodes() const { return episodes_; }
  const Episode& operator[](std::size_t position) const { return episodes_[position]; }
  /// Lookup by episode index; throws DomainError if absent.
  const Episode& by_index(std::uint64_t index) const;
  std::uint64_t next_index() const { return episodes_.empty() ? 0 : episodes_.back().index + 1; }

  /// Up to h_max episodes by ascending outcome distance to target (ties by
  /// insertion order). Throws EmptyMemoryError on an empty memory.
  std::vector<Neighbor> nearest_outcomes(Goal target, std::size_t h_max) const;

  /// Every episode whose parameters lie strictly within `radius` of center,
  /// by ascending distance. Throws DomainError unless radius > 0.
  std::vector<Neighbor> nearest_policies(const PolicyParams& center, double radius) const;

  /// The k episodes with parameters closest to center (ties by insertion order).
  std::vector<Neighbor> nearest_policies_k(const PolicyParams& center, std::size_t k) const;

  /// Order-sensitive digest of the full contents.
  std::uint64_t digest() const;

 private:
  void rebuild();

  std::vector<Episode> episodes_;
  KdTree<2> outcome_index_;
  KdTree<kParamDim> policy_index_;
  std::size_t indexed_ = 0;
};

/// CSV with columns index, strategy_tag, theta1..theta25, tau_x, tau_y.
void write_memory_csv(const std::string& path, const EpisodicMemory& memory);
EpisodicMemory read_memory_csv(const std::string& path);

}  // namespace sgimd
