#include "sgimd/memory.hpp"

#include <algorithm>
#include <bit>
#include <fstream>

#include "sgimd/csv.hpp"

namespace sgimd {

std::string to_string(StrategyTag tag) {
  switch (tag) {
    case StrategyTag::autonomous: return "autonomous";
    case StrategyTag::imitation: return "imitation";
    case StrategyTag::demonstration: return "demonstration";
  }
  return "autonomous";
}

StrategyTag strategy_tag_from_string(const std::string& s) {
  if (s == "autonomous") return StrategyTag::autonomous;
  if (s == "imitation") return StrategyTag::imitation;
  if (s == "demonstration") return StrategyTag::demonstration;
  throw FormatError("unknown strategy tag '" + s + "'");
}

namespace {

KdTree<2>::Point outcome_point(Outcome o) { return {o.x, o.y}; }

}  // namespace

void EpisodicMemory::record(const Episode& e) {
  if (!episodes_.empty() && e.index <= episodes_.back().index)
    throw DuplicateIndexError("episode index " + std::to_string(e.index) + " is not past the last stored index");
  if (!is_finite(e.outcome)) throw InvalidParams("episode outcome must be finite");
  episodes_.push_back(e);
  if (episodes_.size() - indexed_ >= kRebuildPeriod) rebuild();
}

void EpisodicMemory::rebuild() {
  std::vector<KdTree<2>::Point> outs(episodes_.size());
  std::vector<KdTree<kParamDim>::Point> pols(episodes_.size());
  std::vector<std::size_t> ids(episodes_.size());
  for (std::size_t i = 0; i < episodes_.size(); ++i) {
    outs[i] = outcome_point(episodes_[i].outcome);
    pols[i] = episodes_[i].params.values();
    ids[i] = i;
  }
  outcome_index_.build(std::move(outs), ids);
  policy_index_.build(std::move(pols), std::move(ids));
  indexed_ = episodes_.size();
}

const Episode& EpisodicMemory::by_index(std::uint64_t index) const {
  auto it = std::lower_bound(episodes_.begin(), episodes_.end(), index,
                             [](const Episode& e, std::uint64_t i) { return e.index < i; });
  if (it == episodes_.end() || it->index != index)
    throw DomainError("no episode with index " + std::to_string(index));
  return *it;
}

std::vector<Neighbor> EpisodicMemory::nearest_outcomes(Goal target, std::size_t h_max) const {
  if (episodes_.empty()) throw EmptyMemoryError("nearest_outcomes on an empty memory");
  const auto q = outcome_point(target);
  auto hits = outcome_index_.nearest(q, h_max);
  for (std::size_t i = indexed_; i < episodes_.size(); ++i)
    hits.emplace_back(KdTree<2>::squared_distance(outcome_point(episodes_[i].outcome), q), i);
  std::sort(hits.begin(), hits.end());
  if (hits.size() > h_max) hits.resize(h_max);
  std::vector<Neighbor> out;
  out.reserve(hits.size());
  for (const auto& [d2, pos] : hits) out.push_back({pos, std::sqrt(d2)});
  return out;
}

std::vector<Neighbor> EpisodicMemory::nearest_policies(const PolicyParams& center, double radius) const {
  if (!(radius > 0.0)) throw DomainError("policy radius must be positive");
  const auto& q = center.values();
  auto hits = policy_index_.within(q, radius);
  const double r2 = radius * radius;
  for (std::size_t i = indexed_; i < episodes_.size(); ++i) {
    const double d2 = KdTree<kParamDim>::squared_distance(episodes_[i].params.values(), q);
    if (d2 < r2) hits.emplace_back(d2, i);
  }
  std::sort(hits.begin(), hits.end());
  std::vector<Neighbor> out;
  out.reserve(hits.size());
  for (const auto& [d2, pos] : hits) out.push_back({pos, std::sqrt(d2)});
  return out;
}

std::vector<Neighbor> EpisodicMemory::nearest_policies_k(const PolicyParams& center, std::size_t k) const {
  if (episodes_.empty()) throw EmptyMemoryError("nearest_policies_k on an empty memory");
  const auto& q = center.values();
  auto hits = policy_index_.nearest(q, k);
  for (std::size_t i = indexed_; i < episodes_.size(); ++i)
    hits.emplace_back(KdTree<kParamDim>::squared_distance(episodes_[i].params.values(), q), i);
  std::sort(hits.begin(), hits.end());
  if (hits.size() > k) hits.resize(k);
  std::vector<Neighbor> out;
  out.reserve(hits.size());
  for (const auto& [d2, pos] : hits) out.push_back({pos, std::sqrt(d2)});
  return out;
}

std::uint64_t EpisodicMemory::digest() const {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](std::uint64_t v) {
    h ^= v;
    h *= 1099511628211ULL;
  };
  for (const Episode& e : episodes_) {
    mix(e.index);
    mix(static_cast<std::uint64_t>(e.tag));
    for (double v : e.params.values()) mix(std::bit_cast<std::uint64_t>(v));
    mix(std::bit_cast<std::uint64_t>(e.outcome.x));
    mix(std::bit_cast<std::uint64_t>(e.outcome.y));
  }
  return h;
}

void write_memory_csv(const std::string& path, const EpisodicMemory& memory) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path);
  out << "index,strategy_tag";
  for (std::size_t i = 1; i <= kParamDim; ++i) out << ",theta" << i;
  out << ",tau_x,tau_y\n";
  for (const Episode& e : memory.episodes()) {
    out << e.index << ',' << to_string(e.tag);
    for (double v : e.params.values()) out << ',' << csv::number(v);
    out << ',' << csv::number(e.outcome.x) << ',' << csv::number(e.outcome.y) << '\n';
  }
}

EpisodicMemory read_memory_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot read " + path);
  std::string line;
  if (!std::getline(in, line)) throw FormatError("empty memory file " + path);
  EpisodicMemory memory;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = csv::split(line);
    if (cells.size() != kParamDim + 4) throw FormatError("memory row has wrong column count in " + path);
    Episode e;
    e.index = static_cast<std::uint64_t>(std::stoull(cells[0]));
    e.tag = strategy_tag_from_string(cells[1]);
    PolicyParams::Values v{};
    for (std::size_t i = 0; i < kParamDim; ++i) v[i] = csv::to_double(cells[2 + i], path);
    e.params = PolicyParams::from_values(v);
    e.outcome = {csv::to_double(cells[kParamDim + 2], path), csv::to_double(cells[kParamDim + 3], path)};
    memory.record(e);
  }
  return memory;
}

}  // namespace sgimd
