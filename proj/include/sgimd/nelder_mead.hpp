#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace sgimd {

/// One simplex vertex. A vertex with a known value is not re-evaluated when the
/// simplex is built, which lets callers seed it with already-executed policies.
struct SimplexVertex {
  std::vector<double> point;
  std::optional<double> value;
};

struct SimplexOptions {
  std::size_t max_evals = 1000;
  /// Stop as soon as the best value drops strictly below this.
  double target = -std::numeric_limits<double>::infinity();
  /// Box applied to every trial point.
  double lower = 0.0;
  double upper = 1.0;
  /// Convergence: value spread <= value_tol and simplex extent <= point_tol.
  /// Disabled when both are zero.
  double value_tol = 0.0;
  double point_tol = 0.0;
};

/// Snapshot of the optimizer after termination.
struct OptimizerState {
  std::vector<SimplexVertex> simplex;  // sorted, best first; all values known
  std::size_t evaluations = 0;
  std::size_t iterations = 0;
  std::vector<double> best_history;  // best value after initialization and after each iteration
  bool reached_target = false;
  bool converged = false;

  const std::vector<double>& best_point() const { return simplex.front().point; }
  double best_value() const { return *simplex.front().value; }
};

using Objective = std::function<double(std::span<const double>)>;

/// Nelder-Mead with reflection 1, expansion 2, contraction 0.5, shrink 0.5
/// (Lagarias et al. ordering rules). `initial` must hold dimension + 1
/// vertices of equal dimension. Unknown vertex values are evaluated in order
/// and count against max_evals; if the budget runs out before the simplex is
/// complete, the best evaluated vertex is returned without iterating.
/// A non-finite objective value is re-evaluated once, then throws
/// NonFiniteObjectiveError.
OptimizerState minimize_simplex(const Objective& objective,
                                std::vector<SimplexVertex> initial,
                                const SimplexOptions& options);

/// Builds the default simplex around `init`: init plus init + step * e_i.
std::vector<SimplexVertex> axis_simplex(std::span<const double> init, double step,
                                        double lower = 0.0, double upper = 1.0);

}  // namespace sgimd
