#include "sgimd/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sgimd/types.hpp"

namespace sgimd {
namespace {

constexpr double kReflect = 1.0;
constexpr double kExpand = 2.0;
constexpr double kContract = 0.5;
constexpr double kShrink = 0.5;

class Evaluator {
 public:
  Evaluator(const Objective& f, const SimplexOptions& opt) : f_(f), opt_(opt) {}

  bool exhausted() const { return count_ >= opt_.max_evals; }
  std::size_t count() const { return count_; }

  double operator()(std::span<const double> x) {
    ++count_;
    double v = f_(x);
    if (!std::isfinite(v)) {
      v = f_(x);
      if (!std::isfinite(v)) throw NonFiniteObjectiveError("objective returned a non-finite value twice");
    }
    return v;
  }

 private:
  const Objective& f_;
  const SimplexOptions& opt_;
  std::size_t count_ = 0;
};

void clamp_point(std::vector<double>& x, const SimplexOptions& opt) {
  for (double& v : x) v = std::clamp(v, opt.lower, opt.upper);
}

// x = a + t * (b - a), clamped
std::vector<double> along(const std::vector<double>& a, const std::vector<double>& b, double t,
                          const SimplexOptions& opt) {
  std::vector<double> x(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) x[i] = a[i] + t * (b[i] - a[i]);
  clamp_point(x, opt);
  return x;
}

void sort_simplex(std::vector<SimplexVertex>& s) {
  std::stable_sort(s.begin(), s.end(),
                   [](const SimplexVertex& a, const SimplexVertex& b) { return *a.value < *b.value; });
}

bool has_converged(const std::vector<SimplexVertex>& s, const SimplexOptions& opt) {
  if (opt.value_tol <= 0.0 && opt.point_tol <= 0.0) return false;
  const double spread = *s.back().value - *s.front().value;
  if (spread > opt.value_tol) return false;
  double extent = 0.0;
  for (std::size_t k = 1; k < s.size(); ++k)
    for (std::size_t i = 0; i < s[k].point.size(); ++i)
      extent = std::max(extent, std::abs(s[k].point[i] - s[0].point[i]));
  return extent <= opt.point_tol;
}

}  // namespace

std::vector<SimplexVertex> axis_simplex(std::span<const double> init, double step, double lower,
                                        double upper) {
  std::vector<SimplexVertex> s;
  s.reserve(init.size() + 1);
  s.push_back({std::vector<double>(init.begin(), init.end()), std::nullopt});
  for (std::size_t i = 0; i < init.size(); ++i) {
    std::vector<double> x(init.begin(), init.end());
    // step inward when the axis is pinned at the upper bound
    x[i] = x[i] + step <= upper ? x[i] + step : x[i] - step;
    x[i] = std::clamp(x[i], lower, upper);
    s.push_back({std::move(x), std::nullopt});
  }
  return s;
}

OptimizerState minimize_simplex(const Objective& objective, std::vector<SimplexVertex> initial,
                                const SimplexOptions& opt) {
  if (initial.size() < 2) throw InvalidParams("simplex needs at least two vertices");
  const std::size_t dim = initial.front().point.size();
  if (initial.size() != dim + 1) throw InvalidParams("simplex must have dimension + 1 vertices");
  for (const auto& v : initial)
    if (v.point.size() != dim) throw InvalidParams("simplex vertices differ in dimension");

  Evaluator eval(objective, opt);
  OptimizerState st;

  // Known vertices first keeps them in the simplex if the budget runs out.
  std::stable_partition(initial.begin(), initial.end(),
                        [](const SimplexVertex& v) { return v.value.has_value(); });
  std::vector<SimplexVertex>& s = st.simplex;
  for (auto& v : initial) {
    clamp_point(v.point, opt);
    if (!v.value) {
      if (eval.exhausted()) break;
      v.value = eval(v.point);
    } else if (!std::isfinite(*v.value)) {
      throw NonFiniteObjectiveError("seed vertex carries a non-finite value");
    }
    s.push_back(std::move(v));
  }
  if (s.empty()) throw InvalidParams("simplex budget exhausted before any evaluation");
  sort_simplex(s);
  st.best_history.push_back(*s.front().value);

  auto finish = [&]() {
    st.evaluations = eval.count();
    st.reached_target = *s.front().value < opt.target;
    return st;
  };
  if (s.size() != dim + 1 || *s.front().value < opt.target) return finish();

  const std::size_t n = dim;
  std::vector<double> centroid(n);
  while (!eval.exhausted()) {
    if (has_converged(s, opt)) {
      st.converged = true;
      break;
    }
    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i) centroid[i] += s[k].point[i];
    for (double& c : centroid) c /= static_cast<double>(n);

    SimplexVertex& worst = s[n];
    const double f_best = *s[0].value;
    const double f_second_worst = *s[n - 1].value;
    const double f_worst = *worst.value;

    auto xr = along(centroid, worst.point, -kReflect, opt);
    const double fr = eval(xr);
    bool do_shrink = false;
    if (fr < f_best) {
      if (eval.exhausted()) {
        worst = {std::move(xr), fr};
      } else {
        auto xe = along(centroid, worst.point, -kExpand, opt);
        const double fe = eval(xe);
        if (fe < fr) worst = {std::move(xe), fe};
        else worst = {std::move(xr), fr};
      }
    } else if (fr < f_second_worst) {
      worst = {std::move(xr), fr};
    } else if (fr < f_worst) {
      if (eval.exhausted()) {
        worst = {std::move(xr), fr};
      } else {
        auto xc = along(centroid, xr, kContract, opt);
        const double fc = eval(xc);
        if (fc <= fr) worst = {std::move(xc), fc};
        else do_shrink = true;
      }
    } else {
      if (!eval.exhausted()) {
        auto xcc = along(centroid, worst.point, kContract, opt);
        const double fcc = eval(xcc);
        if (fcc < f_worst) worst = {std::move(xcc), fcc};
        else do_shrink = true;
      }
    }
    if (do_shrink) {
      for (std::size_t k = 1; k <= n && !eval.exhausted(); ++k) {
        auto x = along(s[0].point, s[k].point, kShrink, opt);
        s[k] = {x, eval(x)};
      }
    }
    sort_simplex(s);
    ++st.iterations;
    st.best_history.push_back(*s.front().value);
    if (*s.front().value < opt.target) break;
  }
  return finish();
}

}  // namespace sgimd
