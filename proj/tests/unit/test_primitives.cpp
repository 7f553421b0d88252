#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "sgimd/primitives.hpp"
#include "sgimd/rng.hpp"

using namespace sgimd;

namespace {

PolicyParams params_with_knots(const Knots& k, double duration_component = 1.0 / 3.0) {
  PolicyParams::Values v{};
  v.fill(0.5);
  for (std::size_t j = 0; j < kJoints; ++j)
    for (std::size_t i = 0; i < kKnots; ++i) v[j * kKnots + i] = k[i];
  v[kParamDim - 1] = duration_component;
  return PolicyParams::from_values(v);
}

PolicyParams random_params(Rng& rng) {
  PolicyParams::Values v{};
  for (double& x : v) x = rng.uniform();
  return PolicyParams::from_values(v);
}

RawDemonstration sample_demo(const PolicyParams& p, std::size_t n) {
  RawDemonstration demo;
  const auto times = uniform_times(p.duration(), n);
  for (std::size_t j = 0; j < kJoints; ++j) demo.trajectories[j] = generate_trajectory(p, j, times);
  demo.outcome = {0.1, 0.2};
  return demo;
}

}  // namespace

TEST(Primitives, ConstantKnotsGiveConstantTrajectory) {
  const auto p = params_with_knots({0.5, 0.5, 0.5, 0.5});
  const auto tr = generate_trajectory(p, 2, uniform_times(p.duration(), 37));
  for (double u : tr.positions) EXPECT_DOUBLE_EQ(u, 0.5);
}

TEST(Primitives, SymmetricKnotsGiveSymmetricValues) {
  const Knots k{0.1, 0.4, 0.4, 0.1};
  const double d = 1.3;
  for (double t : {0.0, 0.05, 0.2, 0.41, 0.6}) {
    EXPECT_NEAR(primitive_value(k, d, t), primitive_value(k, d, d - t), 1e-12) << t;
  }
}

TEST(Primitives, NearestKnotDominatesHandValue) {
  // sigma = 50, delta = 1, t = 1/3: weights exp(-50 (t - t_i)^2) for t_i = 0, 1/3, 2/3, 1
  const double w0 = std::exp(-50.0 / 9.0);
  const double w1 = 1.0;
  const double w2 = std::exp(-50.0 / 9.0);
  const double w3 = std::exp(-50.0 * 4.0 / 9.0);
  const double hand = w1 / (w0 + w1 + w2 + w3);
  const double u = primitive_value({0.0, 1.0, 0.0, 0.0}, 1.0, 1.0 / 3.0, 50.0);
  EXPECT_NEAR(u, hand, 1e-12);
  EXPECT_NEAR(u, 1.0, 1e-2);
}

TEST(Primitives, InterpolatesKnotsWhenSharp) {
  const Knots k{0.2, 0.9, 0.1, 0.6};
  for (std::size_t i = 0; i < kKnots; ++i)
    EXPECT_NEAR(primitive_value(k, 1.0, static_cast<double>(i) / 3.0, 1000.0), k[i], 1e-3);
}

TEST(Primitives, BoundedByKnotRange) {
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    Knots k;
    for (double& x : k) x = rng.uniform();
    const double lo = *std::min_element(k.begin(), k.end());
    const double hi = *std::max_element(k.begin(), k.end());
    const double d = decode_duration(rng.uniform());
    for (double t : uniform_times(d, 25)) {
      const double u = primitive_value(k, d, t);
      EXPECT_GE(u, lo - 1e-12);
      EXPECT_LE(u, hi + 1e-12);
    }
  }
}

TEST(Primitives, ShiftCovariance) {
  const Knots k{0.1, 0.3, 0.2, 0.4};
  const Knots shifted{0.35, 0.55, 0.45, 0.65};
  for (double t : uniform_times(0.8, 11))
    EXPECT_NEAR(primitive_value(shifted, 0.8, t), primitive_value(k, 0.8, t) + 0.25, 1e-12);
}

TEST(Primitives, RejectsTimesOutsideMovement) {
  const auto p = params_with_knots({0.1, 0.2, 0.3, 0.4});
  const std::vector<double> bad{-0.1};
  EXPECT_THROW(generate_trajectory(p, 0, bad), DomainError);
  const std::vector<double> late{p.duration() + 0.01};
  EXPECT_THROW(generate_trajectory(p, 0, late), DomainError);
  const std::vector<double> ok{0.0};
  EXPECT_THROW(generate_trajectory(p, kJoints, ok), InvalidParams);
  EXPECT_THROW(knot_weights(0.0, 0.0), InvalidParams);
}

TEST(Primitives, ClampParams) {
  std::array<double, kParamDim> raw{};
  raw.fill(0.5);
  EXPECT_EQ(clamp_params(raw).values(), PolicyParams().values());
  raw[3] = -0.2;
  raw[7] = 1.7;
  const auto c = clamp_params(raw);
  EXPECT_EQ(c[3], 0.0);
  EXPECT_EQ(c[7], 1.0);
  EXPECT_EQ(c[0], 0.5);
  EXPECT_THROW(PolicyParams::from_values(raw), InvalidParams);
}

TEST(Primitives, DurationDecoding) {
  EXPECT_DOUBLE_EQ(decode_duration(0.0), 0.5);
  EXPECT_DOUBLE_EQ(decode_duration(1.0), 2.0);
  EXPECT_DOUBLE_EQ(encode_duration(decode_duration(0.37)), 0.37);
}

TEST(Fit, RoundTripRecoversTrajectory) {
  Rng rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    const auto p = random_params(rng);
    const auto demo = sample_demo(p, 100);
    const auto fit = fit_demonstration(demo);
    EXPECT_NEAR(fit.params.duration(), p.duration(), 1e-12);
    for (std::size_t j = 0; j < kJoints; ++j) {
      EXPECT_LT(fit.residuals[j], 1e-6) << "joint " << j;
      const auto again = generate_trajectory(fit.params, j, demo.trajectories[j].times);
      for (std::size_t k = 0; k < again.size(); ++k)
        EXPECT_NEAR(again.positions[k], demo.trajectories[j].positions[k], 1e-6);
    }
  }
}

TEST(Fit, ConstantDemo) {
  RawDemonstration demo;
  const auto times = uniform_times(1.1, 40);
  for (std::size_t j = 0; j < kJoints; ++j) {
    demo.trajectories[j].joint = j;
    demo.trajectories[j].times = times;
    demo.trajectories[j].positions.assign(times.size(), 0.3);
  }
  const auto fit = fit_demonstration(demo);
  for (std::size_t j = 0; j < kJoints; ++j) {
    EXPECT_NEAR(fit.residuals[j], 0.0, 1e-12);
    for (std::size_t i = 0; i < kKnots; ++i) EXPECT_NEAR(fit.params.knot(j, i), 0.3, 1e-12);
  }
}

TEST(Fit, RampMatchesGridSearch) {
  const double delta = 1.0;
  JointTrajectory ramp;
  ramp.times = uniform_times(delta, 50);
  for (double t : ramp.times) ramp.positions.push_back(0.2 + 0.6 * t / delta);

  // exhaustive search over the knot grid at resolution 0.01
  Knots best{};
  double best_res = 1e300;
  std::vector<Knots> w;
  for (double t : ramp.times) w.push_back(knot_weights(delta, t));
  for (int a = 0; a <= 100; ++a)
    for (int b = 0; b <= 100; ++b)
      for (int c = 0; c <= 100; ++c)
        for (int d = 0; d <= 100; ++d) {
          const Knots k{a / 100.0, b / 100.0, c / 100.0, d / 100.0};
          // prune: knots far from the ramp can't win
          if (std::abs(k[0] - 0.2) > 0.15 || std::abs(k[3] - 0.8) > 0.15) continue;
          if (std::abs(k[1] - 0.4) > 0.15 || std::abs(k[2] - 0.6) > 0.15) continue;
          double s = 0.0;
          for (std::size_t i = 0; i < ramp.size(); ++i) {
            double u = 0.0;
            for (std::size_t j = 0; j < kKnots; ++j) u += w[i][j] * k[j];
            s += (u - ramp.positions[i]) * (u - ramp.positions[i]);
          }
          if (s < best_res) {
            best_res = s;
            best = k;
          }
        }
  // the objective is convex, so a minimum strictly inside the pruned box is global
  const Knots centers{0.2, 0.4, 0.6, 0.8};
  for (std::size_t i = 0; i < kKnots; ++i) ASSERT_LT(std::abs(best[i] - centers[i]), 0.145);
  for (std::size_t i = 1; i < kKnots; ++i) ASSERT_GE(best[i], best[i - 1]);

  RawDemonstration demo;
  for (std::size_t j = 0; j < kJoints; ++j) {
    demo.trajectories[j] = ramp;
    demo.trajectories[j].joint = j;
  }
  const auto fit = fit_demonstration(demo);
  for (std::size_t i = 1; i < kKnots; ++i) EXPECT_GE(fit.params.knot(0, i), fit.params.knot(0, i - 1));
  for (std::size_t i = 0; i < kKnots; ++i) EXPECT_NEAR(fit.params.knot(0, i), best[i], 0.011);
  EXPECT_LE(fit.residuals[0], std::sqrt(best_res) + 1e-9);
}

TEST(Fit, RejectsShortDemos) {
  RawDemonstration demo;
  for (std::size_t j = 0; j < kJoints; ++j) {
    demo.trajectories[j].times = {0.0, 0.5, 1.0};
    demo.trajectories[j].positions = {0.1, 0.2, 0.3};
  }
  EXPECT_THROW(fit_demonstration(demo), InvalidParams);
}

TEST(Fit, DemonstrationFileRoundTrip) {
  Rng rng(2);
  auto demo = sample_demo(random_params(rng), 20);
  demo.outcome = {-0.25, 0.75};
  const auto path = (std::filesystem::temp_directory_path() / "sgimd_demo_roundtrip.txt").string();
  write_demonstration(path, demo);
  const auto back = read_demonstration(path);
  EXPECT_EQ(back.outcome, demo.outcome);
  for (std::size_t j = 0; j < kJoints; ++j) {
    EXPECT_EQ(back.trajectories[j].times, demo.trajectories[j].times);
    EXPECT_EQ(back.trajectories[j].positions, demo.trajectories[j].positions);
  }
  std::filesystem::remove(path);
}
