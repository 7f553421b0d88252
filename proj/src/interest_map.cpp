#include "sgimd/interest_map.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>

namespace sgimd {

double similarity_J(Goal goal, Outcome reached, Outcome origin) {
  const double norm = distance(goal, origin);
  if (!(norm > 0.0)) throw DegenerateGoalError("goal coincides with the rest outcome");
  return -std::min(1.0, distance(reached, goal) / norm);
}

double competence(Goal goal, std::span<const Outcome> attempts, Outcome origin) {
  if (attempts.empty()) throw MissingAttemptsError("no attempts recorded for this goal");
  double best = -1.0;
  for (const Outcome& o : attempts) best = std::max(best, similarity_J(goal, o, origin));
  return best;
}

double interest_of(std::span<const double> competences, std::size_t window) {
  if (window == 0 || window % 2 != 0) throw ConfigError("interest window must be positive and even");
  if (competences.empty()) return 0.0;
  const std::size_t n = competences.size();
  const std::size_t half = window / 2;
  const std::size_t missing = n >= window ? 0 : window - n;
  // entry k of the padded window, k = 0 oldest
  auto at = [&](std::size_t k) {
    if (k < missing) return competences.front();
    return n >= window ? competences[n - window + k] : competences[k - missing];
  };
  double older = 0.0;
  double newer = 0.0;
  for (std::size_t k = 0; k < half; ++k) older += at(k);
  for (std::size_t k = half; k < window; ++k) newer += at(k);
  return std::abs(older - newer) / static_cast<double>(window);
}

std::vector<double> Region::competences() const {
  std::vector<double> c;
  c.reserve(history.size());
  for (const auto& r : history) c.push_back(r.competence);
  return c;
}

std::optional<GoalRecord> Region::weakest() const {
  if (history.empty()) return std::nullopt;
  auto it = std::min_element(history.begin(), history.end(),
                             [](const GoalRecord& a, const GoalRecord& b) { return a.competence < b.competence; });
  return *it;
}

namespace {

double quantile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

void partition_history(const Region& parent, std::size_t dim, double cut, Region& left, Region& right) {
  left.bounds = parent.bounds;
  right.bounds = parent.bounds;
  if (dim == 0) {
    left.bounds.hi.x = cut;
    right.bounds.lo.x = cut;
  } else {
    left.bounds.hi.y = cut;
    right.bounds.lo.y = cut;
  }
  left.history.clear();
  right.history.clear();
  for (const auto& r : parent.history) (coord(r.goal, dim) < cut ? left : right).history.push_back(r);
}

}  // namespace

SplitResult split_region(const Region& region, const RegionParams& params) {
  const std::size_t min_side = params.window / 2;
  SplitResult best;
  bool found = false;
  double best_score = -1.0;
  std::size_t best_imbalance = 0;

  for (std::size_t dim = 0; dim < 2; ++dim) {
    if (region.history.empty()) break;
    std::vector<double> values;
    values.reserve(region.history.size());
    for (const auto& r : region.history) values.push_back(coord(r.goal, dim));
    std::sort(values.begin(), values.end());
    for (int k = 1; k <= 9; ++k) {
      const double cut = quantile(values, k / 10.0);
      if (!(cut > region.bounds.lower(dim) && cut < region.bounds.upper(dim))) continue;
      Region left, right;
      partition_history(region, dim, cut, left, right);
      if (left.history.size() < min_side || right.history.size() < min_side) continue;
      const auto lc = left.competences();
      const auto rc = right.competences();
      left.interest = interest_of(lc, params.window);
      right.interest = interest_of(rc, params.window);
      const double score = std::abs(left.interest - right.interest);
      const std::size_t imbalance = left.history.size() > right.history.size()
                                        ? left.history.size() - right.history.size()
                                        : right.history.size() - left.history.size();
      const bool better = !found || score > best_score + 1e-12 ||
                          (std::abs(score - best_score) <= 1e-12 && imbalance < best_imbalance);
      if (better) {
        found = true;
        best_score = score;
        best_imbalance = imbalance;
        best = {std::move(left), std::move(right), dim, cut, false};
      }
    }
  }
  if (!found) {
    const double cut = 0.5 * (region.bounds.lo.x + region.bounds.hi.x);
    partition_history(region, 0, cut, best.left, best.right);
    best.left.interest = interest_of(best.left.competences(), params.window);
    best.right.interest = interest_of(best.right.competences(), params.window);
    best.dim = 0;
    best.cut = cut;
    best.fallback = true;
  }
  return best;
}

RegionTree::RegionTree(Box task_space, RegionParams params) : task_space_(task_space), params_(params) {
  if (params_.window == 0 || params_.window % 2 != 0) throw ConfigError("interest window must be positive and even");
  if (params_.max_goals == 0) throw ConfigError("max_goals must be positive");
  if (!(task_space_.hi.x > task_space_.lo.x && task_space_.hi.y > task_space_.lo.y))
    throw ConfigError("task space must have positive extent");
  Region root;
  root.id = next_id_++;
  root.bounds = task_space_;
  leaves_.push_back(std::move(root));
}

bool RegionTree::leaf_contains(const Region& r, Vec2 p) const {
  for (std::size_t d = 0; d < 2; ++d) {
    const double v = coord(p, d);
    if (v < r.bounds.lower(d)) return false;
    const double hi = r.bounds.upper(d);
    if (v > hi || (v == hi && hi != task_space_.upper(d))) return false;
  }
  return true;
}

std::size_t RegionTree::locate(Vec2 p) const {
  if (!task_space_.contains(p)) throw OutOfBoundsError("point outside the task space");
  for (std::size_t i = 0; i < leaves_.size(); ++i)
    if (leaf_contains(leaves_[i], p)) return i;
  throw OutOfBoundsError("point not covered by any region");
}

std::uint64_t RegionTree::update(Goal goal, double competence_value) {
  const std::size_t pos = locate(goal);
  Region& leaf = leaves_[pos];
  leaf.history.push_back({goal, competence_value, next_order_++});
  const auto comps = leaf.competences();
  leaf.interest = interest_of(comps, params_.window);
  const std::uint64_t id = leaf.id;
  if (leaf.history.size() > params_.max_goals) {
    SplitResult s = split_region(leaf, params_);
    s.left.id = next_id_++;
    s.right.id = next_id_++;
    splits_.push_back({leaf.id, s.left.id, s.right.id, s.dim, s.cut, s.fallback});
    leaves_[pos] = std::move(s.left);
    leaves_.insert(leaves_.begin() + static_cast<std::ptrdiff_t>(pos) + 1, std::move(s.right));
  }
  return id;
}

std::string RegionTree::snapshot_json() const {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : leaves_) {
    out.push_back({{"id", r.id},
                   {"bounds", {r.bounds.lo.x, r.bounds.lo.y, r.bounds.hi.x, r.bounds.hi.y}},
                   {"interest", r.interest},
                   {"n_goals", r.history.size()}});
  }
  return out.dump(2);
}

}  // namespace sgimd
