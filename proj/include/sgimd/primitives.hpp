#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "sgimd/types.hpp"

namespace sgimd {

/// Movement duration range encoded by the last policy component.
inline constexpr double kDurationMin = 0.5;
inline constexpr double kDurationMax = 2.0;
/// Knot weighting sharpness, sigma = kPrimitiveSharpness / delta^2.
inline constexpr double kPrimitiveSharpness = 40.0;

inline double decode_duration(double component) {
  return kDurationMin + component * (kDurationMax - kDurationMin);
}
inline double encode_duration(double seconds) {
  return (seconds - kDurationMin) / (kDurationMax - kDurationMin);
}

using Knots = std::array<double, kKnots>;

/// Parameters of one arm movement: 4 normalized knots per joint plus a
/// duration component, every entry in [0, 1].
class PolicyParams {
 public:
  using Values = std::array<double, kParamDim>;

  PolicyParams() { values_.fill(0.5); }

  /// Throws InvalidParams unless every component is finite and in [0, 1].
  static PolicyParams from_values(std::span<const double> values);
  /// Componentwise clamp into [0, 1]; NaN maps to 0.
  static PolicyParams clamped(std::span<const double> raw);

  const Values& values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }

  double knot(std::size_t joint, std::size_t i) const { return values_[joint * kKnots + i]; }
  Knots knots(std::size_t joint) const;
  double duration_component() const { return values_[kParamDim - 1]; }
  double duration() const { return decode_duration(duration_component()); }

  friend bool operator==(const PolicyParams&, const PolicyParams&) = default;

 private:
  Values values_{};
};

/// clamp_params: componentwise clamp of 25 raw reals into [0, 1].
PolicyParams clamp_params(std::span<const double> raw);

double policy_distance(const PolicyParams& a, const PolicyParams& b);

/// Sampled normalized joint position over time.
struct JointTrajectory {
  std::size_t joint = 0;
  std::vector<double> times;
  std::vector<double> positions;

  std::size_t size() const { return times.size(); }
  double duration() const { return times.empty() ? 0.0 : times.back(); }
};

struct RawDemonstration {
  std::array<JointTrajectory, kJoints> trajectories;
  Outcome outcome;

  double duration() const { return trajectories[0].duration(); }
};

/// Checks the trajectory invariants (strictly increasing times from 0,
/// at least `min_samples` samples, common duration). Throws InvalidParams.
void validate(const RawDemonstration& demo, std::size_t min_samples = 2);

/// Normalized interpolation weights of the four knots at time t, with
/// sigma = sharpness / duration^2.
Knots knot_weights(double duration, double t, double sharpness = kPrimitiveSharpness);

/// Primitive value at t for one joint's knots.
double primitive_value(const Knots& knots, double duration, double t, double sharpness = kPrimitiveSharpness);

/// Samples the primitive of `joint` at the given times. Throws DomainError
/// for a time outside [0, delta] and InvalidParams for a bad joint index.
JointTrajectory generate_trajectory(const PolicyParams& params, std::size_t joint,
                                    std::span<const double> times);

/// `count` uniformly spaced times over [0, duration].
std::vector<double> uniform_times(double duration, std::size_t count);

struct FitResult {
  PolicyParams params;
  std::array<double, kJoints> residuals{};  // L2 norm of the per-joint error
  bool warning = false;                     // optimizer did not improve on its start point
};

/// Correspondence: finds the knots reproducing each demonstrated joint
/// trajectory in the least-squares sense, with the duration taken from the
/// demonstration. Requires at least 4 samples per joint.
FitResult fit_demonstration(const RawDemonstration& demo);

/// Residual of a knot vector against one sampled trajectory.
double trajectory_residual(const Knots& knots, const JointTrajectory& traj);

void write_demonstration(const std::string& path, const RawDemonstration& demo);
RawDemonstration read_demonstration(const std::string& path);

}  // namespace sgimd
