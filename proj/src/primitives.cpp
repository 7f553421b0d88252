#include "sgimd/primitives.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "sgimd/nelder_mead.hpp"

namespace sgimd {

PolicyParams PolicyParams::from_values(std::span<const double> values) {
  if (values.size() != kParamDim) throw InvalidParams("policy needs exactly 25 components");
  PolicyParams p;
  for (std::size_t i = 0; i < kParamDim; ++i) {
    if (!std::isfinite(values[i]) || values[i] < 0.0 || values[i] > 1.0)
      throw InvalidParams("policy component " + std::to_string(i) + " outside [0, 1]");
    p.values_[i] = values[i];
  }
  return p;
}

PolicyParams PolicyParams::clamped(std::span<const double> raw) {
  if (raw.size() != kParamDim) throw InvalidParams("policy needs exactly 25 components");
  PolicyParams p;
  for (std::size_t i = 0; i < kParamDim; ++i)
    p.values_[i] = std::isnan(raw[i]) ? 0.0 : std::clamp(raw[i], 0.0, 1.0);
  return p;
}

Knots PolicyParams::knots(std::size_t joint) const {
  Knots k;
  for (std::size_t i = 0; i < kKnots; ++i) k[i] = knot(joint, i);
  return k;
}

PolicyParams clamp_params(std::span<const double> raw) { return PolicyParams::clamped(raw); }

double policy_distance(const PolicyParams& a, const PolicyParams& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < kParamDim; ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

Knots knot_weights(double duration, double t, double sharpness) {
  if (!(duration > 0.0)) throw InvalidParams("duration must be positive");
  const double sigma = sharpness / (duration * duration);
  Knots w;
  double total = 0.0;
  for (std::size_t i = 0; i < kKnots; ++i) {
    const double ti = static_cast<double>(i) * duration / 3.0;
    w[i] = std::exp(-sigma * (t - ti) * (t - ti));
    total += w[i];
  }
  for (double& v : w) v /= total;
  return w;
}

double primitive_value(const Knots& knots, double duration, double t, double sharpness) {
  const Knots w = knot_weights(duration, t, sharpness);
  double u = 0.0;
  for (std::size_t i = 0; i < kKnots; ++i) u += w[i] * knots[i];
  return u;
}

JointTrajectory generate_trajectory(const PolicyParams& params, std::size_t joint,
                                    std::span<const double> times) {
  if (joint >= kJoints) throw InvalidParams("joint index out of range");
  const double delta = params.duration();
  if (!(delta > 0.0)) throw InvalidParams("duration must be positive");
  const double slack = 1e-12 * delta;
  JointTrajectory out;
  out.joint = joint;
  out.times.reserve(times.size());
  out.positions.reserve(times.size());
  const Knots k = params.knots(joint);
  for (double t : times) {
    if (!(t >= -slack && t <= delta + slack)) throw DomainError("time outside [0, delta]");
    out.times.push_back(t);
    out.positions.push_back(primitive_value(k, delta, std::clamp(t, 0.0, delta)));
  }
  return out;
}

std::vector<double> uniform_times(double duration, std::size_t count) {
  std::vector<double> t(count);
  for (std::size_t i = 0; i < count; ++i)
    t[i] = count == 1 ? 0.0 : duration * static_cast<double>(i) / static_cast<double>(count - 1);
  if (count > 1) t.back() = duration;
  return t;
}

void validate(const RawDemonstration& demo, std::size_t min_samples) {
  const double delta = demo.trajectories[0].duration();
  for (std::size_t j = 0; j < kJoints; ++j) {
    const auto& tr = demo.trajectories[j];
    if (tr.times.size() != tr.positions.size()) throw InvalidParams("time/position size mismatch");
    if (tr.size() < min_samples) throw InvalidParams("trajectory has too few samples");
    if (tr.times.front() != 0.0) throw InvalidParams("trajectory must start at t = 0");
    for (std::size_t i = 1; i < tr.size(); ++i)
      if (!(tr.times[i] > tr.times[i - 1])) throw InvalidParams("trajectory times must increase strictly");
    if (std::abs(tr.duration() - delta) > 1e-9 * std::max(1.0, delta))
      throw InvalidParams("joint trajectories differ in duration");
    for (double p : tr.positions)
      if (!std::isfinite(p)) throw InvalidParams("non-finite trajectory sample");
  }
  if (!is_finite(demo.outcome)) throw InvalidParams("non-finite demonstrated outcome");
}

double trajectory_residual(const Knots& knots, const JointTrajectory& traj) {
  const double delta = traj.duration();
  double s = 0.0;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const double e = traj.positions[i] - primitive_value(knots, delta, traj.times[i]);
    s += e * e;
  }
  return std::sqrt(s);
}

namespace {

double sample_at(const JointTrajectory& tr, double t) {
  auto it = std::lower_bound(tr.times.begin(), tr.times.end(), t);
  if (it == tr.times.begin()) return tr.positions.front();
  if (it == tr.times.end()) return tr.positions.back();
  const std::size_t i = static_cast<std::size_t>(it - tr.times.begin());
  const double a = (t - tr.times[i - 1]) / (tr.times[i] - tr.times[i - 1]);
  return tr.positions[i - 1] + a * (tr.positions[i] - tr.positions[i - 1]);
}

struct JointFit {
  Knots knots;
  double residual;
  bool improved;
};

JointFit fit_joint(const JointTrajectory& tr) {
  const double delta = tr.duration();
  std::vector<Knots> weights(tr.size());
  for (std::size_t i = 0; i < tr.size(); ++i) weights[i] = knot_weights(delta, tr.times[i]);

  auto sse = [&](std::span<const double> k) {
    double s = 0.0;
    for (std::size_t i = 0; i < tr.size(); ++i) {
      double u = 0.0;
      for (std::size_t j = 0; j < kKnots; ++j) u += weights[i][j] * k[j];
      const double e = tr.positions[i] - u;
      s += e * e;
    }
    return s;
  };

  std::vector<double> init(kKnots);
  for (std::size_t j = 0; j < kKnots; ++j)
    init[j] = std::clamp(sample_at(tr, static_cast<double>(j) * delta / 3.0), 0.0, 1.0);
  const double init_sse = sse(init);

  std::vector<double> best = init;
  double best_sse = init_sse;
  SimplexOptions opt;
  opt.max_evals = 3000;
  opt.value_tol = 1e-24;
  opt.point_tol = 1e-10;
  // Restarts with shrinking steps polish the minimum past the simplex's own collapse.
  for (double step : {0.05, 0.01, 1e-3, 1e-4}) {
    if (best_sse == 0.0) break;
    auto state = minimize_simplex(sse, axis_simplex(best, step), opt);
    if (state.best_value() < best_sse) {
      best_sse = state.best_value();
      best = state.best_point();
    }
  }
  JointFit fit;
  std::copy(best.begin(), best.end(), fit.knots.begin());
  fit.residual = std::sqrt(best_sse);
  fit.improved = best_sse < init_sse || init_sse == 0.0;
  return fit;
}

}  // namespace

FitResult fit_demonstration(const RawDemonstration& demo) {
  validate(demo, kKnots);
  PolicyParams::Values v{};
  FitResult result;
  bool all_improved = true;
  for (std::size_t j = 0; j < kJoints; ++j) {
    const JointFit f = fit_joint(demo.trajectories[j]);
    for (std::size_t i = 0; i < kKnots; ++i) v[j * kKnots + i] = f.knots[i];
    result.residuals[j] = f.residual;
    all_improved = all_improved && f.improved;
  }
  v[kParamDim - 1] = std::clamp(encode_duration(demo.duration()), 0.0, 1.0);
  result.params = PolicyParams::clamped(v);
  result.warning = !all_improved;
  return result;
}

void write_demonstration(const std::string& path, const RawDemonstration& demo) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path);
  out << std::setprecision(17);
  out << "delta=" << demo.duration() << '\n';
  for (const auto& tr : demo.trajectories) {
    out << "joint=" << tr.joint << '\n';
    for (std::size_t i = 0; i < tr.size(); ++i) out << tr.times[i] << ',' << tr.positions[i] << '\n';
  }
  out << "tau=" << demo.outcome.x << ',' << demo.outcome.y << '\n';
}

RawDemonstration read_demonstration(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot read " + path);
  RawDemonstration demo;
  std::string line;
  int joint = -1;
  bool have_delta = false;
  bool have_tau = false;
  double delta = 0.0;
  auto parse_pair = [&](const std::string& s, double& a, double& b) {
    const auto comma = s.find(',');
    if (comma == std::string::npos) throw FormatError("expected 'a,b' in " + path + ": " + s);
    try {
      a = std::stod(s.substr(0, comma));
      b = std::stod(s.substr(comma + 1));
    } catch (const std::exception&) {
      throw FormatError("bad number in " + path + ": " + s);
    }
  };
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.rfind("delta=", 0) == 0) {
      delta = std::stod(line.substr(6));
      have_delta = true;
    } else if (line.rfind("joint=", 0) == 0) {
      joint = std::stoi(line.substr(6));
      if (joint < 0 || joint >= static_cast<int>(kJoints)) throw FormatError("bad joint index in " + path);
      demo.trajectories[static_cast<std::size_t>(joint)].joint = static_cast<std::size_t>(joint);
    } else if (line.rfind("tau=", 0) == 0) {
      parse_pair(line.substr(4), demo.outcome.x, demo.outcome.y);
      have_tau = true;
    } else {
      if (joint < 0) throw FormatError("sample row before any joint block in " + path);
      double t = 0.0;
      double a = 0.0;
      parse_pair(line, t, a);
      auto& tr = demo.trajectories[static_cast<std::size_t>(joint)];
      tr.times.push_back(t);
      tr.positions.push_back(a);
    }
  }
  if (!have_delta || !have_tau) throw FormatError("missing delta or tau line in " + path);
  try {
    validate(demo);
  } catch (const InvalidParams& e) {
    throw FormatError(path + ": " + e.what());
  }
  if (std::abs(demo.duration() - delta) > 1e-9 * std::max(1.0, delta))
    throw FormatError("delta header disagrees with samples in " + path);
  return demo;
}

}  // namespace sgimd
