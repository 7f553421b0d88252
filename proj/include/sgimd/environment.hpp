#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sgimd/primitives.hpp"
#include "sgimd/rng.hpp"
#include "sgimd/types.hpp"

namespace sgimd {

/// Initial arm configuration. Experiments use the single context c_org.
struct Context {
  std::array<double, kJoints> rest_angles{};  // radians
  std::string label = "c_org";

  static Context origin() { return {}; }
};

/// Surrogate fishing-arm parameters. Lengths in meters, speeds in m/s.
struct EnvConfig {
  std::array<double, kJoints> link_lengths{0.20, 0.18, 0.16, 0.14, 0.12, 0.10};
  double rod_length = 0.5;
  double gravity = 9.81;
  double base_height = 1.0;
  /// Joint ranges in radians; normalized position u maps to lower + u * (upper - lower).
  /// Even joints rotate about the vertical (yaw), odd joints about the lateral axis (pitch).
  std::array<double, kJoints> joint_lower{-0.6, -0.5, -0.5, -0.6, -0.5, -0.6};
  std::array<double, kJoints> joint_upper{0.6, 0.9, 0.5, 0.6, 0.5, 0.6};
  /// Fraction of the rod-tip velocity carried by the float at release.
  double release_gain = 0.2;
  /// Output calibration factor applied to landing points.
  double scale = 0.38182768369471;
  /// Per-axis noise std = noise_base + noise_speed_gain * peak_tip_speed / speed_reference.
  double noise_base = 0.02;
  double noise_speed_gain = 0.005;
  double speed_reference = 10.0;
  std::size_t steps = 50;
  std::uint64_t rng_seed = 0;
  bool noise_enabled = true;

  /// Throws ConfigError on invalid values.
  void validate() const;
};

/// Rod-tip state at the release instant plus the resulting landing point.
struct Release {
  std::array<double, 3> position{};
  std::array<double, 3> velocity{};
  double peak_speed = 0.0;
  Outcome landing;  // scaled, noise-free
};

/// Normalized joint positions sampled uniformly over a movement, `steps` rows of kJoints.
struct JointSamples {
  double duration = 1.0;
  std::vector<std::array<double, kJoints>> rows;
};

class Environment {
 public:
  explicit Environment(EnvConfig config, Context context = Context::origin());

  /// Executes a policy; adds speed-dependent Gaussian noise when enabled.
  Outcome execute(const PolicyParams& params);
  /// Executes arbitrary normalized joint samples (used for raw demonstrations).
  Outcome execute(const JointSamples& samples);

  Release simulate(const PolicyParams& params) const;
  Release simulate(const JointSamples& samples) const;

  /// Noise-free landing point of the no-movement policy.
  Outcome rest_outcome() const;
  /// The policy whose knots all sit at the context's rest angles.
  PolicyParams rest_policy() const;
  std::array<double, kJoints> rest_positions() const;

  double noise_std(double peak_speed) const;

  JointSamples sample_policy(const PolicyParams& params) const;

  const EnvConfig& config() const { return config_; }
  const Context& context() const { return context_; }
  void reseed(std::uint64_t seed) { rng_ = Rng(seed); }

 private:
  Outcome add_noise(const Release& r);

  EnvConfig config_;
  Context context_;
  Rng rng_;
};

/// Draws `n_samples` uniform random policies noise-free and returns the scale
/// that puts the 99th-percentile landing radius (distance from the arm base)
/// at 1.0. Requires n_samples >= 1000.
double calibrate_scale(const EnvConfig& config, const Context& context, std::size_t n_samples,
                       std::uint64_t rng_seed);

/// Repeatability of random policies under noise.
struct NoiseProfile {
  double mean_axis_std = 0.0;    // mean over policies of (std_x + std_y) / 2
  double mean_dispersion = 0.0;  // mean over policies of sqrt(var_x + var_y)
  std::vector<std::array<double, 2>> per_policy_std;
  std::vector<double> peak_speeds;
};

NoiseProfile measure_noise(const EnvConfig& config, const Context& context, std::size_t n_policies,
                           std::size_t repetitions, std::uint64_t seed);

PolicyParams random_policy(Rng& rng);

}  // namespace sgimd
