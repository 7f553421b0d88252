#include "sgimd/environment.hpp"

#include <algorithm>
#include <cmath>

namespace sgimd {
namespace {

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<double, 9>;  // row-major

Mat3 multiply(const Mat3& a, const Mat3& b) {
  Mat3 c{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      c[i * 3 + j] = a[i * 3] * b[j] + a[i * 3 + 1] * b[3 + j] + a[i * 3 + 2] * b[6 + j];
  return c;
}

Mat3 yaw(double a) {
  const double c = std::cos(a);
  const double s = std::sin(a);
  return {c, -s, 0, s, c, 0, 0, 0, 1};
}

Mat3 pitch(double a) {
  const double c = std::cos(a);
  const double s = std::sin(a);
  return {1, 0, 0, 0, c, -s, 0, s, c};
}

// Links extend along the local +y axis; at zero angles the arm points along world +y.
Vec3 tip_position(const EnvConfig& cfg, const std::array<double, kJoints>& angles) {
  Mat3 r{1, 0, 0, 0, 1, 0, 0, 0, 1};
  Vec3 p{0.0, 0.0, cfg.base_height};
  for (std::size_t j = 0; j < kJoints; ++j) {
    r = multiply(r, j % 2 == 0 ? yaw(angles[j]) : pitch(angles[j]));
    const double len = cfg.link_lengths[j] + (j + 1 == kJoints ? cfg.rod_length : 0.0);
    p[0] += r[1] * len;
    p[1] += r[4] * len;
    p[2] += r[7] * len;
  }
  return p;
}

}  // namespace

void EnvConfig::validate() const {
  for (double l : link_lengths)
    if (!(l > 0.0)) throw ConfigError("link lengths must be positive");
  for (std::size_t j = 0; j < kJoints; ++j)
    if (!(joint_upper[j] > joint_lower[j])) throw ConfigError("joint range must be non-empty");
  if (!(rod_length >= 0.0)) throw ConfigError("rod_length must be non-negative");
  if (!(gravity > 0.0)) throw ConfigError("gravity must be positive");
  if (!(base_height > 0.0)) throw ConfigError("base_height must be positive");
  if (!(scale > 0.0)) throw ConfigError("scale must be positive");
  if (!(noise_base >= 0.0)) throw ConfigError("noise_base must be non-negative");
  if (!(noise_speed_gain >= 0.0)) throw ConfigError("noise_speed_gain must be non-negative");
  if (!(speed_reference > 0.0)) throw ConfigError("speed_reference must be positive");
  if (!(release_gain >= 0.0)) throw ConfigError("release_gain must be non-negative");
  if (steps < 3) throw ConfigError("steps must be at least 3");
}

Environment::Environment(EnvConfig config, Context context)
    : config_(std::move(config)), context_(std::move(context)), rng_(config_.rng_seed) {
  config_.validate();
}

std::array<double, kJoints> Environment::rest_positions() const {
  std::array<double, kJoints> r{};
  for (std::size_t j = 0; j < kJoints; ++j) {
    r[j] = (context_.rest_angles[j] - config_.joint_lower[j]) /
           (config_.joint_upper[j] - config_.joint_lower[j]);
    r[j] = std::clamp(r[j], 0.0, 1.0);
  }
  return r;
}

PolicyParams Environment::rest_policy() const {
  PolicyParams::Values v{};
  const auto r = rest_positions();
  for (std::size_t j = 0; j < kJoints; ++j)
    for (std::size_t i = 0; i < kKnots; ++i) v[j * kKnots + i] = r[j];
  v[kParamDim - 1] = 0.5;
  return PolicyParams::from_values(v);
}

JointSamples Environment::sample_policy(const PolicyParams& params) const {
  JointSamples s;
  s.duration = params.duration();
  const auto times = uniform_times(s.duration, config_.steps);
  s.rows.resize(times.size());
  std::array<Knots, kJoints> knots;
  for (std::size_t j = 0; j < kJoints; ++j) knots[j] = params.knots(j);
  for (std::size_t k = 0; k < times.size(); ++k) {
    const Knots w = knot_weights(s.duration, times[k]);
    for (std::size_t j = 0; j < kJoints; ++j) {
      double u = 0.0;
      for (std::size_t i = 0; i < kKnots; ++i) u += w[i] * knots[j][i];
      s.rows[k][j] = u;
    }
  }
  return s;
}

Release Environment::simulate(const PolicyParams& params) const { return simulate(sample_policy(params)); }

Release Environment::simulate(const JointSamples& samples) const {
  const std::size_t n = samples.rows.size();
  if (n < 2) throw InvalidParams("need at least two joint samples");
  if (!(samples.duration > 0.0)) throw InvalidParams("duration must be positive");
  const double dt = samples.duration / static_cast<double>(n - 1);

  std::vector<Vec3> tip(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::array<double, kJoints> angles{};
    for (std::size_t j = 0; j < kJoints; ++j)
      angles[j] = config_.joint_lower[j] +
                  samples.rows[k][j] * (config_.joint_upper[j] - config_.joint_lower[j]);
    tip[k] = tip_position(config_, angles);
  }

  // Finite-difference tip velocity; release at the first sample of peak speed.
  Release rel;
  std::size_t best = 0;
  Vec3 best_v{};
  double best_speed = -1.0;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t a = k == 0 ? 0 : k - 1;
    const std::size_t b = k + 1 == n ? n - 1 : k + 1;
    const double span = static_cast<double>(b - a) * dt;
    Vec3 v;
    for (int c = 0; c < 3; ++c) v[c] = (tip[b][c] - tip[a][c]) / span;
    const double speed = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    if (speed > best_speed) {
      best_speed = speed;
      best = k;
      best_v = v;
    }
  }
  rel.position = tip[best];
  rel.peak_speed = best_speed;
  for (int c = 0; c < 3; ++c) rel.velocity[c] = best_v[c] * config_.release_gain;

  // Ballistic flight to the water plane z = 0.
  const double z0 = std::max(rel.position[2], 0.05);
  const double vz = rel.velocity[2];
  const double g = config_.gravity;
  const double t = (vz + std::sqrt(vz * vz + 2.0 * g * z0)) / g;
  rel.landing = Outcome{rel.position[0] + rel.velocity[0] * t, rel.position[1] + rel.velocity[1] * t} *
                config_.scale;
  return rel;
}

double Environment::noise_std(double peak_speed) const {
  return config_.noise_base + config_.noise_speed_gain * peak_speed / config_.speed_reference;
}

Outcome Environment::add_noise(const Release& r) {
  if (!config_.noise_enabled) return r.landing;
  const double sd = noise_std(r.peak_speed);
  const double nx = rng_.normal();
  const double ny = rng_.normal();
  return {r.landing.x + sd * nx, r.landing.y + sd * ny};
}

Outcome Environment::execute(const PolicyParams& params) { return add_noise(simulate(params)); }

Outcome Environment::execute(const JointSamples& samples) { return add_noise(simulate(samples)); }

Outcome Environment::rest_outcome() const { return simulate(rest_policy()).landing; }

PolicyParams random_policy(Rng& rng) {
  PolicyParams::Values v{};
  for (double& x : v) x = rng.uniform();
  return PolicyParams::from_values(v);
}

double calibrate_scale(const EnvConfig& config, const Context& context, std::size_t n_samples,
                       std::uint64_t rng_seed) {
  if (n_samples < 1000) throw ConfigError("calibration needs at least 1000 samples");
  EnvConfig raw = config;
  raw.scale = 1.0;
  raw.noise_enabled = false;
  const Environment env(raw, context);
  Rng rng(rng_seed);
  std::vector<double> radii(n_samples);
  double min_x = 1e300, max_x = -1e300, min_y = 1e300, max_y = -1e300;
  for (std::size_t i = 0; i < n_samples; ++i) {
    const Outcome o = env.simulate(random_policy(rng)).landing;
    radii[i] = std::hypot(o.x, o.y);
    min_x = std::min(min_x, o.x);
    max_x = std::max(max_x, o.x);
    min_y = std::min(min_y, o.y);
    max_y = std::max(max_y, o.y);
  }
  if (max_x - min_x < 1e-12 && max_y - min_y < 1e-12)
    throw CalibrationError("all calibration landings coincide");
  std::sort(radii.begin(), radii.end());
  const double pos = 0.99 * static_cast<double>(n_samples - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, n_samples - 1);
  const double q99 = radii[lo] + (pos - static_cast<double>(lo)) * (radii[hi] - radii[lo]);
  if (!(q99 > 0.0)) throw CalibrationError("degenerate landing radius");
  return 1.0 / q99;
}

NoiseProfile measure_noise(const EnvConfig& config, const Context& context, std::size_t n_policies,
                           std::size_t repetitions, std::uint64_t seed) {
  if (repetitions < 2) throw ConfigError("noise measurement needs at least two repetitions");
  EnvConfig noisy = config;
  noisy.noise_enabled = true;
  noisy.rng_seed = Rng::derive(seed, 1);
  Environment env(noisy, context);
  Rng rng(seed);
  NoiseProfile prof;
  for (std::size_t p = 0; p < n_policies; ++p) {
    const PolicyParams theta = random_policy(rng);
    double sx = 0, sy = 0, sxx = 0, syy = 0;
    for (std::size_t r = 0; r < repetitions; ++r) {
      const Outcome o = env.execute(theta);
      sx += o.x;
      sy += o.y;
      sxx += o.x * o.x;
      syy += o.y * o.y;
    }
    const double n = static_cast<double>(repetitions);
    const double vx = std::max(0.0, (sxx - sx * sx / n) / (n - 1));
    const double vy = std::max(0.0, (syy - sy * sy / n) / (n - 1));
    prof.per_policy_std.push_back({std::sqrt(vx), std::sqrt(vy)});
    prof.peak_speeds.push_back(env.simulate(theta).peak_speed);
    prof.mean_axis_std += 0.5 * (std::sqrt(vx) + std::sqrt(vy));
    prof.mean_dispersion += std::sqrt(vx + vy);
  }
  if (n_policies > 0) {
    prof.mean_axis_std /= static_cast<double>(n_policies);
    prof.mean_dispersion /= static_cast<double>(n_policies);
  }
  return prof;
}

}  // namespace sgimd
